#include "tabrefine/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "tabrefine/text.hpp"

namespace tabrefine {

std::vector<int> dbscan(std::span<const double> coords, std::size_t dims, double eps, int min_pts) {
    if (dims == 0 || coords.size() % dims != 0) {
        throw Error(Errc::InvalidValue, "dbscan: coordinates do not divide into points");
    }
    const std::size_t n = coords.size() / dims;
    const double eps2 = eps * eps;

    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i) {
        neighbours[i].push_back(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dims; ++k) {
                const double d = coords[i * dims + k] - coords[j * dims + k];
                d2 += d * d;
            }
            if (d2 <= eps2) {
                neighbours[i].push_back(j);
                neighbours[j].push_back(i);
            }
        }
    }
    for (auto& nb : neighbours) std::sort(nb.begin(), nb.end());

    constexpr int kUnvisited = -2;
    std::vector<int> label(n, kUnvisited);
    const auto core = [&](std::size_t i) {
        return neighbours[i].size() >= static_cast<std::size_t>(std::max(min_pts, 1));
    };
    int cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != kUnvisited) continue;
        if (!core(i)) {
            label[i] = kNoise;
            continue;
        }
        label[i] = cluster;
        std::deque<std::size_t> frontier(neighbours[i].begin(), neighbours[i].end());
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop_front();
            if (label[p] == kNoise) label[p] = cluster;  // border point
            if (label[p] != kUnvisited) continue;
            label[p] = cluster;
            if (core(p)) frontier.insert(frontier.end(), neighbours[p].begin(), neighbours[p].end());
        }
        ++cluster;
    }
    return label;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

PageScale page_scale(std::span<const Token> tokens) {
    std::vector<double> h, w;
    h.reserve(tokens.size());
    w.reserve(tokens.size());
    for (const Token& t : tokens) {
        h.push_back(t.bbox.height());
        w.push_back(t.bbox.width());
    }
    return {median(std::move(h)), median(std::move(w))};
}

ClusterRadii cluster_radii(const ParamSet& params, const PageScale& scale) {
    // A page of zero-size tokens still needs a positive radius.
    constexpr double kFloor = 1e-6;
    ClusterRadii r;
    r.eps_y = params.dbscan_eps_y.value_or(params.eps_y_factor * scale.median_height);
    r.eps_x = params.dbscan_eps_x.value_or(params.eps_x_factor * scale.median_width);
    r.eps_y = std::max(r.eps_y, kFloor);
    r.eps_x = std::max(r.eps_x, kFloor);
    return r;
}

std::vector<TextLine> estimate_lines(std::span<const Token> tokens, double eps_y, int min_pts) {
    if (tokens.empty()) return {};
    std::vector<double> ys;
    ys.reserve(tokens.size());
    for (const Token& t : tokens) ys.push_back(t.bbox.cy());
    const std::vector<int> labels = dbscan_1d(ys, eps_y, min_pts);

    std::map<int, std::vector<std::size_t>> groups;
    int singleton = *std::max_element(labels.begin(), labels.end()) + 1;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        groups[labels[i] == kNoise ? singleton++ : labels[i]].push_back(i);
    }

    std::vector<TextLine> lines;
    lines.reserve(groups.size());
    for (auto& [label, members] : groups) {
        std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return tokens[a].bbox.cx() < tokens[b].bbox.cx();
        });
        TextLine line;
        std::vector<BBox> boxes;
        double ysum = 0.0;
        for (std::size_t i : members) {
            line.token_ids.push_back(tokens[i].id);
            boxes.push_back(tokens[i].bbox);
            ysum += tokens[i].bbox.cy();
        }
        line.bbox = hull_of(boxes);
        line.y_center = ysum / static_cast<double>(members.size());
        lines.push_back(std::move(line));
    }
    std::stable_sort(lines.begin(), lines.end(), [](const TextLine& a, const TextLine& b) {
        return a.y_center < b.y_center;
    });
    return lines;
}

TokenIndex index_tokens(std::span<const Token> tokens) {
    TokenIndex index;
    index.reserve(tokens.size());
    for (const Token& t : tokens) index.emplace(t.id, &t);
    return index;
}

SignatureSet line_signatures(std::span<const TextLine> lines, const TokenIndex& tokens_by_id,
                             double eps_x, int min_pts) {
    if (lines.empty()) throw Error(Errc::NoLines, "no lines to sign");

    std::vector<const Token*> flat;
    for (const TextLine& line : lines) {
        for (int id : line.token_ids) flat.push_back(tokens_by_id.at(id));
    }
    std::vector<double> xs, xy;
    xs.reserve(flat.size());
    xy.reserve(2 * flat.size());
    for (const Token* t : flat) {
        xs.push_back(t->bbox.cx());
        xy.push_back(t->bbox.cx());
        xy.push_back(t->bbox.cy());
    }
    const std::vector<int> xlab = dbscan_1d(xs, eps_x, min_pts);
    const std::vector<int> xylab = dbscan(xy, 2, eps_x, min_pts);

    SignatureSet out;
    out.signatures.reserve(lines.size());
    std::size_t k = 0;
    for (const TextLine& line : lines) {
        LineSignature sig;
        for (std::size_t i = 0; i < line.token_ids.size(); ++i, ++k) {
            if (xlab[k] == kNoise || xylab[k] == kNoise) {
                ++sig.outlier_count;
            } else {
                sig.symbols.push_back(xlab[k]);
            }
        }
        out.signatures.push_back(std::move(sig));
    }

    // Most frequent signature; ties go to the pattern of the line nearest the
    // vertical middle of the lines.
    const double top = lines.front().bbox.y0();
    double bottom = top;
    for (const TextLine& l : lines) bottom = std::max(bottom, l.bbox.y1());
    const double middle = 0.5 * (top + bottom);

    struct Group {
        int count = 0;
        double distance = INFINITY;
        std::size_t representative = 0;
    };
    std::map<std::vector<int>, Group> freq;  // keyed by collapsed signature
    for (std::size_t i = 0; i < lines.size(); ++i) {
        Group& g = freq[collapse_runs(out.signatures[i].symbols)];
        g.count += 1;
        const double d = std::abs(lines[i].y_center - middle);
        if (d < g.distance) {
            g.distance = d;
            g.representative = i;
        }
    }
    const auto best = std::min_element(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        return a.second.distance < b.second.distance;
    });
    out.core_pattern = out.signatures[best->second.representative].symbols;
    return out;
}

std::vector<int> collapse_runs(std::span<const int> symbols) {
    std::vector<int> out;
    for (int s : symbols)
        if (out.empty() || out.back() != s) out.push_back(s);
    return out;
}

double pattern_distance(std::span<const int> signature, std::span<const int> core) {
    const std::vector<int> a = collapse_runs(signature);
    const std::vector<int> b = collapse_runs(core);
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

bool same_pattern(std::span<const int> a, std::span<const int> b) { return collapse_runs(a) == collapse_runs(b); }

}  // namespace tabrefine
