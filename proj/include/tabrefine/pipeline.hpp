#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tabrefine/model.hpp"
#include "tabrefine/text.hpp"
#include "tabrefine/tsr_refine.hpp"

namespace tabrefine {

/// One entry per stage, in execution order, whether or not it ran.
struct StageTrace {
    std::string stage;
    bool enabled = false;
    std::optional<BBox> input_bbox;
    std::optional<BBox> output_bbox;
    std::size_t rows_in = 0, rows_out = 0;
    std::size_t cols_in = 0, cols_out = 0;
    std::string note;
};

struct PipelineResult {
    BBox table_bbox;                  // refined detection
    CandidateTable chosen;            // candidate the detection started from
    bool chooser_fallback = false;
    std::optional<TableGrid> grid;    // absent when the document carries no structure
    std::optional<CellMatrix> cells;
    std::vector<StageTrace> trace;
};

struct PipelineConfig {
    ParamSet params;
    ModuleToggles toggles;
    const HeaderDictionary* dictionary = nullptr;  // null selects the built-in one
};

/// ensemble → table chooser → header refiner → oversegmentation → grid clip
/// → overlapping columns → unfuse lines → remove extra lines → cell matrix.
/// Disabled stages pass their input through. The grid is clipped to the
/// refined box only when some detection refinement is enabled.
/// Throws Error(NoCandidates) and Error(EmptyGrid).
PipelineResult run_pipeline(const Document& doc, const PipelineConfig& config);

/// Candidate with the highest confidence, first one on ties.
const CandidateTable& most_confident(std::span<const CandidateTable> candidates);

}  // namespace tabrefine
