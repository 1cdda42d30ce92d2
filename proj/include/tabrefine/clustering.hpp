#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "tabrefine/model.hpp"

namespace tabrefine {

inline constexpr int kNoise = -1;

/// Density-based clustering with Euclidean distance. `coords` holds
/// `dims` values per point (row-major). A point is core when at least
/// `min_pts` points (itself included) lie within `eps`. Points are visited and
/// clusters expanded in index order, so labels are a pure function of the
/// input order. Noise is labelled kNoise.
std::vector<int> dbscan(std::span<const double> coords, std::size_t dims, double eps, int min_pts);

inline std::vector<int> dbscan_1d(std::span<const double> values, double eps, int min_pts) {
    return dbscan(values, 1, eps, min_pts);
}

struct PageScale {
    double median_height = 0.0;
    double median_width = 0.0;
};

PageScale page_scale(std::span<const Token> tokens);

struct ClusterRadii {
    double eps_y = 1.0;
    double eps_x = 1.0;
};

/// Absolute radii from the parameters, falling back to multiples of the
/// page's median token size.
ClusterRadii cluster_radii(const ParamSet& params, const PageScale& scale);

struct TextLine {
    std::vector<int> token_ids;  // left to right
    BBox bbox;
    double y_center = 0.0;
};

/// Groups tokens into physical lines by 1-D clustering of their y-centers.
/// Noise tokens become one-token lines. Lines come back top to bottom.
std::vector<TextLine> estimate_lines(std::span<const Token> tokens, double eps_y, int min_pts);

using TokenIndex = std::unordered_map<int, const Token*>;
TokenIndex index_tokens(std::span<const Token> tokens);

struct LineSignature {
    std::vector<int> symbols;  // global column cluster per non-outlier token
    int outlier_count = 0;
};

struct SignatureSet {
    std::vector<LineSignature> signatures;  // parallel to the input lines
    std::vector<int> core_pattern;
};

/// Column-cluster signatures of every line plus the most frequent one, where
/// signatures are compared with repeated neighbours collapsed (several words
/// of one cell occupy one column). A token is an outlier when it is noise in the global x-clustering or in the joint
/// (x, y) clustering. Throws Error(NoLines) on empty input.
SignatureSet line_signatures(std::span<const TextLine> lines, const TokenIndex& tokens_by_id,
                             double eps_x, int min_pts);

/// Drops consecutive repeats: [0,0,1,1,2] -> [0,1,2].
std::vector<int> collapse_runs(std::span<const int> symbols);

/// Levenshtein distance over the collapsed cluster-id sequences, normalized
/// by the longer one.
double pattern_distance(std::span<const int> signature, std::span<const int> core);

/// True when both signatures collapse to the same sequence.
bool same_pattern(std::span<const int> a, std::span<const int> b);

}  // namespace tabrefine
