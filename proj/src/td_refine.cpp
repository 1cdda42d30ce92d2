#include "tabrefine/td_refine.hpp"

#include <algorithm>

#include "tabrefine/clustering.hpp"
#include "tabrefine/geometry.hpp"

namespace tabrefine {

namespace {

constexpr double kDuplicateIou = 0.9;
constexpr std::size_t kHeaderSearchLines = 3;
constexpr double kHeaderKeywordScore = 0.5;

struct LineView {
    TextLine line;
    std::vector<Token> tokens;
};

struct RegionLines {
    std::vector<Token> tokens;
    std::vector<LineView> lines;
};

RegionLines lines_in(const BBox& region, const Page& page, const ParamSet& params) {
    RegionLines out;
    out.tokens = tokens_in(page.tokens, region);
    const ClusterRadii radii = cluster_radii(params, page_scale(page.tokens));
    const TokenIndex index = index_tokens(out.tokens);
    for (TextLine& line : estimate_lines(out.tokens, radii.eps_y, params.dbscan_min_pts)) {
        LineView view;
        for (int id : line.token_ids) view.tokens.push_back(*index.at(id));
        view.line = std::move(line);
        out.lines.push_back(std::move(view));
    }
    return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<CandidateTable> ensemble_candidates(std::span<const CandidateTable> a,
                                                std::span<const CandidateTable> b) {
    std::vector<CandidateTable> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::stable_sort(all.begin(), all.end(), [](const CandidateTable& l, const CandidateTable& r) {
        return l.confidence > r.confidence;
    });
    std::vector<CandidateTable> kept;
    for (const CandidateTable& c : all) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const CandidateTable& k) {
            return iou(k.bbox, c.bbox) > kDuplicateIou;
        });
        if (!dup) kept.push_back(c);
    }
    return kept;
}

TableChoice choose_table(std::span<const CandidateTable> candidates, const Page& page,
                         const HeaderDictionary& dict, const ParamSet& params) {
    if (candidates.empty()) throw Error(Errc::NoCandidates, "no table candidates");

    TableChoice result;
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].confidence >= params.alpha) survivors.push_back(i);
    }
    if (survivors.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (candidates[i].confidence > candidates[best].confidence) best = i;
        }
        result.chosen = candidates[best];
        result.chosen_index = best;
        result.fallback = true;
        return result;
    }

    double max_area = 0.0, max_w = 0.0, max_h = 0.0;
    for (std::size_t i : survivors) {
        max_area = std::max(max_area, candidates[i].bbox.area());
        max_w = std::max(max_w, candidates[i].bbox.width());
        max_h = std::max(max_h, candidates[i].bbox.height());
    }
    const auto ratio = [](double v, double max) { return max > 0.0 ? v / max : 0.0; };
    const auto& w = params.chooser_weights;

    for (std::size_t i : survivors) {
        const BBox& box = candidates[i].bbox;
        ChooserScore s;
        s.index = i;
        s.components.confidence = candidates[i].confidence;
        s.components.area = ratio(box.area(), max_area);
        s.components.width = ratio(box.width(), max_w);
        s.components.height = ratio(box.height(), max_h);

        const RegionLines region = lines_in(box, page, params);
        double best_line_score = 0.0;
        const LineView* best_line = nullptr;
        for (std::size_t l = 0; l < region.lines.size(); ++l) {
            const double score =
                keyword_score(region.lines[l].tokens, dict, params.header_match_max_dist);
            if (l < kHeaderSearchLines) s.components.text = std::max(s.components.text, score);
            if (score > best_line_score) {
                best_line_score = score;
                best_line = &region.lines[l];
            }
        }
        if (best_line != nullptr && box.height() > 0.0) {
            const double depth = (best_line->line.bbox.y0() - box.y0()) / box.height();
            s.components.header_location = clamp01(1.0 - depth);
        }

        const ChooserComponents& c = s.components;
        s.total = w[ParamSet::w_confidence] * c.confidence + w[ParamSet::w_area] * c.area +
                  w[ParamSet::w_width] * c.width + w[ParamSet::w_height] * c.height +
                  0.5 * w[ParamSet::w_text] * (c.text + c.header_location);
        result.scores.push_back(s);
    }

    const auto best = std::max_element(
        result.scores.begin(), result.scores.end(),
        [](const ChooserScore& a, const ChooserScore& b) { return a.total < b.total; });
    result.chosen_index = best->index;
    result.chosen = candidates[best->index];
    return result;
}

namespace {

BBox refine_header_once(const BBox& bbox, const Page& page, const HeaderDictionary& dict,
                        const ParamSet& params, const HeaderChecks& checks) {
    const RegionLines region = lines_in(bbox, page, params);
    if (region.lines.empty()) return bbox;

    std::vector<TextLine> lines;
    for (const LineView& v : region.lines) lines.push_back(v.line);
    const ClusterRadii radii = cluster_radii(params, page_scale(page.tokens));
    const SignatureSet sigs =
        line_signatures(lines, index_tokens(region.tokens), radii.eps_x, params.dbscan_min_pts);

    for (std::size_t l = 0; l < region.lines.size(); ++l) {
        const LineView& v = region.lines[l];
        if (checks.keywords &&
            keyword_score(v.tokens, dict, params.header_match_max_dist) < kHeaderKeywordScore) {
            continue;
        }
        if (checks.no_stopwords && contains_stopword(v.tokens, dict)) continue;
        if (checks.alignment) {
            std::vector<int> distinct = sigs.signatures[l].symbols;
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            if (distinct.size() < 2) continue;
        }
        const double y0 = std::clamp(v.line.bbox.y0(), bbox.y0(), bbox.y1());
        return bbox.with_y0(y0);
    }
    return bbox;
}

BBox prune_once(const BBox& bbox, const Page& page, const ParamSet& params) {
    const std::vector<LineSuspicion> scored = score_lines(bbox, page, params);
    if (scored.size() <= 1) return bbox;
    for (std::size_t k = scored.size(); k-- > 0;) {
        const LineSuspicion& s = scored[k];
        if (s.core || s.score <= params.suspicious_threshold) {
            if (k + 1 == scored.size()) return bbox;
            const double y1 = std::clamp(s.line_bbox.y1(), bbox.y0(), bbox.y1());
            return bbox.with_y1(y1);
        }
    }
    return bbox;
}

// Each pass only ever shrinks the box, so iterating to a fixed point
// terminates and makes the refiners idempotent.
template <class Step>
BBox fixed_point(BBox bbox, Step step) {
    for (std::size_t guard = 0; guard < 10000; ++guard) {
        const BBox next = step(bbox);
        if (next == bbox) break;
        bbox = next;
    }
    return bbox;
}

}  // namespace

BBox refine_header(const BBox& bbox, const Page& page, const HeaderDictionary& dict,
                   const ParamSet& params, const HeaderChecks& checks) {
    return fixed_point(bbox, [&](const BBox& b) {
        return refine_header_once(b, page, dict, params, checks);
    });
}

std::vector<LineSuspicion> score_lines(const BBox& bbox, const Page& page, const ParamSet& params) {
    const RegionLines region = lines_in(bbox, page, params);
    std::vector<LineSuspicion> out;
    if (region.lines.empty()) return out;

    std::vector<TextLine> lines;
    for (const LineView& v : region.lines) lines.push_back(v.line);
    const ClusterRadii radii = cluster_radii(params, page_scale(page.tokens));
    const SignatureSet sigs =
        line_signatures(lines, index_tokens(region.tokens), radii.eps_x, params.dbscan_min_pts);

    for (std::size_t l = 0; l < lines.size(); ++l) {
        const LineSignature& sig = sigs.signatures[l];
        LineSuspicion s;
        s.line_bbox = lines[l].bbox;
        s.core = same_pattern(sig.symbols, sigs.core_pattern);
        s.score = params.outlier_weight * sig.outlier_count +
                  params.pattern_weight * pattern_distance(sig.symbols, sigs.core_pattern);
        out.push_back(s);
    }
    return out;
}

BBox prune_oversegmentation(const BBox& bbox, const Page& page, const ParamSet& params) {
    return fixed_point(bbox, [&](const BBox& b) { return prune_once(b, page, params); });
}

}  // namespace tabrefine
