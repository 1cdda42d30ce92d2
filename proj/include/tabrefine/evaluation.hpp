#pragma once

#include <span>
#include <string>
#include <vector>

#include "tabrefine/metrics.hpp"
#include "tabrefine/pipeline.hpp"

namespace tabrefine {

/// Scores a pipeline result against the document's ground truth.
/// Throws Error(InvalidValue) when the document has none.
DocumentEval evaluate_result(const std::string& id, const Document& doc, const PipelineResult& result);

/// Runs the pipeline and scores it; a failing document is recorded with its
/// error instead of propagating.
DocumentEval run_and_evaluate(const std::string& id, const Document& doc, const PipelineConfig& config);

struct LabeledDocument {
    std::string id;
    const Document* doc = nullptr;
};

/// Order-preserving evaluation of many documents on a worker pool.
std::vector<DocumentEval> evaluate_all(std::span<const LabeledDocument> docs, const PipelineConfig& config,
                                       std::size_t workers = 0);

struct AblationRow {
    std::string name;
    ModuleToggles toggles;
    TdReport td;
    TsrReport tsr;
};

/// Baseline, without detection refinements, without structure refinements,
/// and the full pipeline.
std::vector<AblationRow> run_ablation(std::span<const LabeledDocument> docs, const ParamSet& params,
                                      const HeaderDictionary* dict = nullptr, std::size_t workers = 0);

}  // namespace tabrefine
