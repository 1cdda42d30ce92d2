#pragma once

#include <span>
#include <vector>

#include "tabrefine/model.hpp"
#include "tabrefine/text.hpp"

namespace tabrefine {

/// Merges both detectors' candidates. Pairs with IoU above 0.9 collapse to the
/// more confident member; the result is ordered by descending confidence.
std::vector<CandidateTable> ensemble_candidates(std::span<const CandidateTable> a,
                                                std::span<const CandidateTable> b);

struct ChooserComponents {
    double confidence = 0.0;
    double area = 0.0;
    double width = 0.0;
    double height = 0.0;
    double text = 0.0;
    double header_location = 0.0;
};

struct ChooserScore {
    std::size_t index = 0;  // position in the candidate list
    ChooserComponents components;
    double total = 0.0;
};

struct TableChoice {
    CandidateTable chosen;
    std::size_t chosen_index = 0;
    std::vector<ChooserScore> scores;  // survivors of the confidence filter
    bool fallback = false;             // nothing passed the filter
};

/// Picks the single table region. Throws Error(NoCandidates) on empty input.
TableChoice choose_table(std::span<const CandidateTable> candidates, const Page& page,
                         const HeaderDictionary& dict, const ParamSet& params);

/// The three header-validity checks; each can be switched off for diagnosis.
struct HeaderChecks {
    bool keywords = true;
    bool no_stopwords = true;
    bool alignment = true;
};

/// Moves the top edge down to the first line that looks like a header.
/// Identity when no line qualifies. Output is always inside the input.
BBox refine_header(const BBox& bbox, const Page& page, const HeaderDictionary& dict,
                   const ParamSet& params, const HeaderChecks& checks = {});

struct LineSuspicion {
    BBox line_bbox;
    double score = 0.0;
    bool core = false;
};

/// Per-line suspiciousness inside `bbox`, top to bottom.
std::vector<LineSuspicion> score_lines(const BBox& bbox, const Page& page, const ParamSet& params);

/// Raises the bottom edge past suspicious trailing lines.
BBox prune_oversegmentation(const BBox& bbox, const Page& page, const ParamSet& params);

}  // namespace tabrefine
