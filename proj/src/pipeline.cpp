#include "tabrefine/pipeline.hpp"

#include "tabrefine/geometry.hpp"
#include "tabrefine/td_refine.hpp"

namespace tabrefine {

const CandidateTable& most_confident(std::span<const CandidateTable> candidates) {
    if (candidates.empty()) throw Error(Errc::NoCandidates, "no candidate tables");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i].confidence > candidates[best].confidence) best = i;
    }
    return candidates[best];
}

namespace {

StageTrace box_stage(std::string name, bool enabled, const BBox& in, const BBox& out) {
    StageTrace t;
    t.stage = std::move(name);
    t.enabled = enabled;
    t.input_bbox = in;
    t.output_bbox = out;
    return t;
}

StageTrace grid_stage(std::string name, bool enabled, const std::optional<TableGrid>& in,
                      const std::optional<TableGrid>& out) {
    StageTrace t;
    t.stage = std::move(name);
    t.enabled = enabled;
    if (in) {
        t.input_bbox = in->table_bbox;
        t.rows_in = in->rows.size();
        t.cols_in = in->columns.size();
    }
    if (out) {
        t.output_bbox = out->table_bbox;
        t.rows_out = out->rows.size();
        t.cols_out = out->columns.size();
    }
    return t;
}

}  // namespace

PipelineResult run_pipeline(const Document& doc, const PipelineConfig& config) {
    const ModuleToggles& on = config.toggles;
    const ParamSet& params = config.params;
    const HeaderDictionary& dict = config.dictionary ? *config.dictionary : default_dictionary();
    const auto& tokens = doc.page.tokens;
    PipelineResult result;

    // Detection.
    std::vector<CandidateTable> candidates;
    if (on.ensemble) {
        std::vector<CandidateTable> a, b;
        for (const auto& c : doc.candidates) (c.source == Source::detector_a ? a : b).push_back(c);
        candidates = ensemble_candidates(a, b);
    } else {
        candidates = doc.candidates;
    }
    {
        StageTrace t;
        t.stage = "ensemble";
        t.enabled = on.ensemble;
        t.note = std::to_string(doc.candidates.size()) + " -> " + std::to_string(candidates.size()) +
                 " candidates";
        result.trace.push_back(std::move(t));
    }
    if (candidates.empty()) throw Error(Errc::NoCandidates, "no candidate tables");

    if (on.table_chooser) {
        const TableChoice choice = choose_table(candidates, doc.page, dict, params);
        result.chosen = choice.chosen;
        result.chooser_fallback = choice.fallback;
    } else {
        result.chosen = most_confident(candidates);
    }
    {
        StageTrace t = box_stage("table_chooser", on.table_chooser, result.chosen.bbox, result.chosen.bbox);
        t.input_bbox.reset();
        if (result.chooser_fallback) t.note = "no candidate passed the confidence filter";
        result.trace.push_back(std::move(t));
    }

    BBox bbox = result.chosen.bbox;
    {
        const BBox out = on.header_refiner ? refine_header(bbox, doc.page, dict, params) : bbox;
        result.trace.push_back(box_stage("header_refiner", on.header_refiner, bbox, out));
        bbox = out;
    }
    {
        const BBox out = on.oversegmentation ? prune_oversegmentation(bbox, doc.page, params) : bbox;
        result.trace.push_back(box_stage("oversegmentation", on.oversegmentation, bbox, out));
        bbox = out;
    }
    result.table_bbox = bbox;

    // Structure.
    std::optional<TableGrid> grid = doc.grid;
    const bool clip = on.any_td_refinement() && grid.has_value();
    {
        std::optional<TableGrid> out = grid;
        if (clip) out = clip_grid(*grid, bbox);
        result.trace.push_back(grid_stage("clip_grid", clip, grid, out));
        grid = std::move(out);
    }
    auto grid_step = [&](const char* name, bool enabled, auto&& fn) {
        std::optional<TableGrid> out = grid;
        if (enabled && grid) out = fn(*grid);
        result.trace.push_back(grid_stage(name, enabled, grid, out));
        grid = std::move(out);
    };
    grid_step("overlap_columns", on.overlap_columns,
              [&](const TableGrid& g) { return resolve_overlapping_columns(g, tokens, params); });
    grid_step("unfuse_lines", on.unfuse_lines,
              [&](const TableGrid& g) { return unfuse_lines(g, tokens, params); });
    std::vector<RowRemoval> removals;
    grid_step("remove_extra_lines", on.remove_extra_lines,
              [&](const TableGrid& g) { return remove_extra_lines(g, tokens, params, &removals); });
    if (!removals.empty()) {
        result.trace.back().note = std::to_string(removals.size()) + " rows removed";
    }

    if (grid) {
        result.cells = build_cell_matrix(*grid, tokens, params);
        StageTrace t = grid_stage("build_cell_matrix", true, grid, grid);
        t.note = std::to_string(result.cells->rows()) + "x" + std::to_string(result.cells->cols()) + " cells";
        result.trace.push_back(std::move(t));
    }
    result.grid = std::move(grid);
    return result;
}

}  // namespace tabrefine
