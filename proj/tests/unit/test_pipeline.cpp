#include <doctest.h>

#include "tabrefine/clustering.hpp"
#include "tabrefine/evaluation.hpp"
#include "tabrefine/pipeline.hpp"
#include "tabrefine/synth.hpp"
#include "tabrefine/tsr_refine.hpp"

using namespace tabrefine;

TEST_SUITE("pipeline") {

TEST_CASE("all stages off reproduces the baseline") {
    const Document doc = apply(generate_document(8, GeneratorSpec{6, 4}),
                               inject_error(generate_document(8, GeneratorSpec{6, 4}), ErrorKind::wrong_table, 3));
    PipelineConfig cfg;
    cfg.toggles = ModuleToggles::all_off();
    const PipelineResult r = run_pipeline(doc, cfg);
    CHECK(r.chosen == most_confident(doc.candidates));
    CHECK(r.table_bbox == r.chosen.bbox);
    CHECK(r.grid == doc.grid);
    CHECK(r.cells == build_cell_matrix(*doc.grid, doc.page.tokens, cfg.params));
}

TEST_CASE("clean document matches its ground truth") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Document doc = generate_document(seed, GeneratorSpec{2 + seed % 8, 1 + seed % 7});
        const PipelineResult r = run_pipeline(doc, PipelineConfig{});
        REQUIRE(r.cells);
        CHECK(r.cells->cells == doc.gt->cells.cells);
    }
}

TEST_CASE("noise below is trimmed to the table") {
    const Document clean = generate_document(12, GeneratorSpec{7, 5});
    const Document doc = apply(clean, inject_error(clean, ErrorKind::noise_below, 1));
    const PipelineResult r = run_pipeline(doc, PipelineConfig{});
    const double h = page_scale(doc.page.tokens).median_height;
    CHECK(std::abs(r.table_bbox.y1() - doc.gt->bbox.y1()) <= h);
}

TEST_CASE("trace order") {
    const Document doc = generate_document(2, GeneratorSpec{4, 3});
    const PipelineResult r = run_pipeline(doc, PipelineConfig{});
    std::vector<std::string> stages;
    for (const StageTrace& t : r.trace) stages.push_back(t.stage);
    const std::vector<std::string> expected{"ensemble",        "table_chooser", "header_refiner",
                                            "oversegmentation", "clip_grid",    "overlap_columns",
                                            "unfuse_lines",     "remove_extra_lines", "build_cell_matrix"};
    CHECK(stages == expected);
}

TEST_CASE("switching any single stage off never fails") {
    CorpusSpec spec;
    spec.documents = 18;
    const auto corpus = make_corpus(6, spec);
    bool ModuleToggles::*flags[] = {&ModuleToggles::ensemble,           &ModuleToggles::table_chooser,
                                    &ModuleToggles::header_refiner,     &ModuleToggles::oversegmentation,
                                    &ModuleToggles::overlap_columns,    &ModuleToggles::unfuse_lines,
                                    &ModuleToggles::remove_extra_lines};
    for (auto flag : flags) {
        PipelineConfig cfg;
        cfg.toggles.*flag = false;
        for (const auto& item : corpus) REQUIRE_NOTHROW(run_pipeline(item.doc, cfg));
    }
}

TEST_CASE("re-running is bit-identical") {
    CorpusSpec spec;
    spec.documents = 9;
    for (const auto& item : make_corpus(13, spec)) {
        const PipelineResult a = run_pipeline(item.doc, PipelineConfig{});
        const PipelineResult b = run_pipeline(item.doc, PipelineConfig{});
        CHECK(a.table_bbox == b.table_bbox);
        CHECK(a.grid == b.grid);
        CHECK(a.cells == b.cells);
    }
}

TEST_CASE("no candidates") {
    Document doc = generate_document(2, GeneratorSpec{3, 3});
    doc.candidates.clear();
    CHECK_THROWS_AS(run_pipeline(doc, PipelineConfig{}), Error);
    const DocumentEval e = run_and_evaluate("x", doc, PipelineConfig{});
    CHECK(e.error.has_value());
}

TEST_CASE("most_confident takes the first on ties") {
    const std::vector<CandidateTable> c{{BBox(0, 0, 1, 1), 0.5, Source::detector_a},
                                        {BBox(0, 0, 2, 2), 0.7, Source::detector_b},
                                        {BBox(0, 0, 3, 3), 0.7, Source::detector_a}};
    CHECK(most_confident(c) == c[1]);
}

TEST_CASE("evaluation of a perfect result") {
    const Document doc = generate_document(4, GeneratorSpec{5, 4});
    const DocumentEval e = run_and_evaluate("d", doc, PipelineConfig{});
    CHECK_FALSE(e.error);
    CHECK(e.pure);
    CHECK(e.complete);
    CHECK(e.grits.f1 == 1.0);
    CHECK(e.giou > 0.9);

    std::vector<LabeledDocument> docs{{"d", &doc}, {"e", &doc}};
    const auto all = evaluate_all(docs, PipelineConfig{}, 2);
    REQUIRE(all.size() == 2);
    CHECK(all[1].id == "e");

    const auto rows = run_ablation(docs, ParamSet{});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].name == "baseline");
    CHECK(rows[3].name == "full");
}

}
