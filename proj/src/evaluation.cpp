#include "tabrefine/evaluation.hpp"

#include "tabrefine/geometry.hpp"
#include "tabrefine/parallel.hpp"

namespace tabrefine {

DocumentEval evaluate_result(const std::string& id, const Document& doc, const PipelineResult& result) {
    if (!doc.gt) throw Error(Errc::InvalidValue, "document " + id + " has no ground truth");
    DocumentEval e;
    e.id = id;
    const auto pc = purity_completeness(result.table_bbox, doc.gt->bbox, doc.page.tokens);
    e.pure = pc.pure;
    e.complete = pc.complete;
    if (result.table_bbox.area() > 0.0 || doc.gt->bbox.area() > 0.0) e.giou = giou(result.table_bbox, doc.gt->bbox);
    if (result.cells) {
        e.grits = grits_con(doc.gt->cells, *result.cells);
    }
    return e;
}

DocumentEval run_and_evaluate(const std::string& id, const Document& doc, const PipelineConfig& config) {
    try {
        return evaluate_result(id, doc, run_pipeline(doc, config));
    } catch (const Error& err) {
        DocumentEval e;
        e.id = id;
        e.error = err.what();
        return e;
    }
}

std::vector<DocumentEval> evaluate_all(std::span<const LabeledDocument> docs, const PipelineConfig& config,
                                       std::size_t workers) {
    std::vector<DocumentEval> out(docs.size());
    parallel_for(docs.size(), [&](std::size_t i) { out[i] = run_and_evaluate(docs[i].id, *docs[i].doc, config); },
                 workers);
    return out;
}

std::vector<AblationRow> run_ablation(std::span<const LabeledDocument> docs, const ParamSet& params,
                                      const HeaderDictionary* dict, std::size_t workers) {
    std::vector<AblationRow> rows{{"baseline", ModuleToggles::all_off(), {}, {}},
                                  {"without_td", ModuleToggles::without_td(), {}, {}},
                                  {"without_tsr", ModuleToggles::without_tsr(), {}, {}},
                                  {"full", ModuleToggles{}, {}, {}}};
    for (AblationRow& row : rows) {
        const auto evals = evaluate_all(docs, {params, row.toggles, dict}, workers);
        row.td = summarize_td(evals);
        row.tsr = summarize_tsr(evals);
    }
    return rows;
}

}  // namespace tabrefine
