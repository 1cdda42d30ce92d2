#include "tabrefine/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabrefine/geometry.hpp"

namespace tabrefine {

std::size_t lcs_length(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double cell_similarity(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    return 2.0 * static_cast<double>(lcs_length(a, b)) / static_cast<double>(a.size() + b.size());
}

namespace {

using Matrix = std::vector<std::vector<double>>;

struct Alignment {
    double score = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // increasing in both indices
};

// Weighted LCS-style alignment: pick an order-preserving matching of rows of
// `sim` to columns maximizing the summed similarity. Ties prefer matching.
Alignment align(const Matrix& sim, std::size_t n, std::size_t m) {
    Matrix dp(n + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            dp[i][j] = std::max({dp[i - 1][j], dp[i][j - 1], dp[i - 1][j - 1] + sim[i - 1][j - 1]});
        }
    }
    Alignment out;
    out.score = dp[n][m];
    std::size_t i = n, j = m;
    while (i > 0 && j > 0) {
        if (dp[i][j] == dp[i - 1][j - 1] + sim[i - 1][j - 1]) {
            out.pairs.emplace_back(i - 1, j - 1);
            --i;
            --j;
        } else if (dp[i][j] == dp[i - 1][j]) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(out.pairs.begin(), out.pairs.end());
    return out;
}

// Same optimum, but ties resolved toward the earliest matches.
Alignment align_early(const Matrix& sim, std::size_t n, std::size_t m) {
    Matrix rev(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) rev[i][j] = sim[n - 1 - i][m - 1 - j];
    Alignment a = align(rev, n, m);
    for (auto& [i, j] : a.pairs) {
        i = n - 1 - i;
        j = m - 1 - j;
    }
    std::reverse(a.pairs.begin(), a.pairs.end());
    return a;
}

struct SimTable {
    std::size_t gr, gc, pr, pc;
    std::vector<double> values;  // [gi][gj][pi][pj]

    double at(std::size_t gi, std::size_t gj, std::size_t pi, std::size_t pj) const {
        return values[((gi * gc + gj) * pr + pi) * pc + pj];
    }
};

SimTable cell_table(const CellMatrix& gt, const CellMatrix& pred) {
    SimTable t{gt.rows(), gt.cols(), pred.rows(), pred.cols(), {}};
    t.values.resize(t.gr * t.gc * t.pr * t.pc);
    std::size_t k = 0;
    for (std::size_t gi = 0; gi < t.gr; ++gi)
        for (std::size_t gj = 0; gj < t.gc; ++gj)
            for (std::size_t pi = 0; pi < t.pr; ++pi)
                for (std::size_t pj = 0; pj < t.pc; ++pj)
                    t.values[k++] = cell_similarity(gt.cells[gi][gj], pred.cells[pi][pj]);
    return t;
}

GritsScore finish(double score, std::size_t gt_cells, std::size_t pred_cells) {
    GritsScore s;
    s.score = score;
    s.precision = score / static_cast<double>(pred_cells);
    s.recall = score / static_cast<double>(gt_cells);
    s.f1 = 2.0 * score / static_cast<double>(gt_cells + pred_cells);
    return s;
}

std::optional<GritsScore> trivial_case(const CellMatrix& gt, const CellMatrix& pred) {
    if (!gt.rectangular() || !pred.rectangular()) {
        throw Error(Errc::RaggedMatrix, "cell matrix rows differ in length");
    }
    const bool ge = gt.cell_count() == 0;
    const bool pe = pred.cell_count() == 0;
    if (ge && pe) return GritsScore{0.0, 1.0, 1.0, 1.0};
    if (ge || pe) return GritsScore{};
    return std::nullopt;
}

}  // namespace

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

// Best row alignment when the column alignment is fixed.
Alignment rows_given(const SimTable& cells, const Pairs& columns, bool early = false) {
    Matrix sim(cells.gr, std::vector<double>(cells.pr, 0.0));
    for (std::size_t gi = 0; gi < cells.gr; ++gi)
        for (std::size_t pi = 0; pi < cells.pr; ++pi)
            for (const auto& [gj, pj] : columns) sim[gi][pi] += cells.at(gi, gj, pi, pj);
    return early ? align_early(sim, cells.gr, cells.pr) : align(sim, cells.gr, cells.pr);
}

Alignment columns_given(const SimTable& cells, const Pairs& rows) {
    Matrix sim(cells.gc, std::vector<double>(cells.pc, 0.0));
    for (std::size_t gj = 0; gj < cells.gc; ++gj)
        for (std::size_t pj = 0; pj < cells.pc; ++pj)
            for (const auto& [gi, pi] : rows) sim[gj][pj] += cells.at(gi, gj, pi, pj);
    return align(sim, cells.gc, cells.pc);
}

// Coordinate ascent from a starting alignment. Each half-step is an exact
// optimum for the other axis held fixed, so the score never drops.
double polish(const SimTable& cells, Pairs rows, Pairs columns, double score) {
    for (std::size_t round = 0; round < 16; ++round) {
        const Alignment c = columns_given(cells, rows);
        const Alignment r = rows_given(cells, c.pairs);
        if (r.score <= score) break;
        score = r.score;
        rows = r.pairs;
        columns = c.pairs;
    }
    return score;
}

}  // namespace

GritsScore grits_con(const CellMatrix& gt, const CellMatrix& pred) {
    if (auto t = trivial_case(gt, pred)) return *t;
    const SimTable cells = cell_table(gt, pred);

    // Column pair similarity: best alignment of the two columns' cells.
    Matrix col_sim(cells.gc, std::vector<double>(cells.pc));
    Matrix row_cells(cells.gr, std::vector<double>(cells.pr));
    for (std::size_t gj = 0; gj < cells.gc; ++gj) {
        for (std::size_t pj = 0; pj < cells.pc; ++pj) {
            for (std::size_t gi = 0; gi < cells.gr; ++gi)
                for (std::size_t pi = 0; pi < cells.pr; ++pi) row_cells[gi][pi] = cells.at(gi, gj, pi, pj);
            col_sim[gj][pj] = align(row_cells, cells.gr, cells.pr).score;
        }
    }
    const Alignment columns = align(col_sim, cells.gc, cells.pc);
    // Rows over the aligned columns.
    const Alignment rows = rows_given(cells, columns.pairs);
    double best = polish(cells, rows.pairs, columns.pairs, rows.score);

    // Same procedure with the axes swapped; tied column matchings can leave
    // the first order stuck.
    Matrix row_sim(cells.gr, std::vector<double>(cells.pr));
    Matrix col_cells(cells.gc, std::vector<double>(cells.pc));
    for (std::size_t gi = 0; gi < cells.gr; ++gi) {
        for (std::size_t pi = 0; pi < cells.pr; ++pi) {
            for (std::size_t gj = 0; gj < cells.gc; ++gj)
                for (std::size_t pj = 0; pj < cells.pc; ++pj) col_cells[gj][pj] = cells.at(gi, gj, pi, pj);
            row_sim[gi][pi] = align(col_cells, cells.gc, cells.pc).score;
        }
    }
    const Alignment rows_first = align(row_sim, cells.gr, cells.pr);
    const Alignment then_columns = columns_given(cells, rows_first.pairs);
    const Alignment refit = rows_given(cells, then_columns.pairs);
    best = std::max(best, polish(cells, refit.pairs, then_columns.pairs, refit.score));

    // Below the size bound, restart the ascent from every single column pairing,
    // with row ties broken both ways.
    const double bound = static_cast<double>(std::min(cells.gr, cells.pr) * std::min(cells.gc, cells.pc));
    for (std::size_t gj = 0; gj < cells.gc && best < bound; ++gj) {
        for (std::size_t pj = 0; pj < cells.pc && best < bound; ++pj) {
            for (bool early : {false, true}) {
                const Alignment r = rows_given(cells, Pairs{{gj, pj}}, early);
                const Alignment c = columns_given(cells, r.pairs);
                const Alignment r2 = rows_given(cells, c.pairs);
                best = std::max(best, polish(cells, r2.pairs, c.pairs, r2.score));
            }
        }
    }

    return finish(best, gt.cell_count(), pred.cell_count());
}

namespace {

constexpr std::size_t kBruteForceLimit = 4;

// Every subset of {0..n-1} as an index list, grouped by size.
std::vector<std::vector<std::vector<std::size_t>>> subsets_by_size(std::size_t n) {
    std::vector<std::vector<std::vector<std::size_t>>> out(n + 1);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        out[s.size()].push_back(std::move(s));
    }
    return out;
}

// All (gt subsequence, pred subsequence) pairs of equal length.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> equal_length_pairs(
    std::size_t n, std::size_t m) {
    const auto a = subsets_by_size(n);
    const auto b = subsets_by_size(m);
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
    for (std::size_t k = 0; k <= std::min(n, m); ++k)
        for (const auto& x : a[k])
            for (const auto& y : b[k]) out.emplace_back(x, y);
    return out;
}

}  // namespace

GritsScore grits_con_bruteforce(const CellMatrix& gt, const CellMatrix& pred) {
    if (gt.rows() > kBruteForceLimit || gt.cols() > kBruteForceLimit ||
        pred.rows() > kBruteForceLimit || pred.cols() > kBruteForceLimit) {
        throw Error(Errc::TooLarge, "brute-force alignment is limited to 4x4 matrices");
    }
    if (auto t = trivial_case(gt, pred)) return *t;
    const SimTable cells = cell_table(gt, pred);
    const auto row_pairs = equal_length_pairs(cells.gr, cells.pr);
    const auto col_pairs = equal_length_pairs(cells.gc, cells.pc);

    double best = 0.0;
    for (const auto& [gr, pr] : row_pairs) {
        for (const auto& [gc, pc] : col_pairs) {
            double s = 0.0;
            for (std::size_t r = 0; r < gr.size(); ++r)
                for (std::size_t c = 0; c < gc.size(); ++c) s += cells.at(gr[r], gc[c], pr[r], pc[c]);
            best = std::max(best, s);
        }
    }
    return finish(best, gt.cell_count(), pred.cell_count());
}

PurityCompleteness purity_completeness(const BBox& pred, const BBox& gt, std::span<const Token> tokens) {
    bool pure = true, complete = true;
    bool any_pred = false, any_gt = false;
    for (const Token& t : tokens) {
        const bool in_pred = t.bbox.center_inside(pred);
        const bool in_gt = t.bbox.center_inside(gt);
        any_pred |= in_pred;
        any_gt |= in_gt;
        if (in_pred && !in_gt) pure = false;
        if (in_gt && !in_pred) complete = false;
    }
    if (!any_pred) complete = !any_gt;
    return {pure, complete};
}

MeanCi mean_ci95(std::span<const double> values) {
    MeanCi out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

TdReport summarize_td(std::span<const DocumentEval> docs) {
    TdReport r;
    r.per_document.assign(docs.begin(), docs.end());
    if (docs.empty()) return r;
    std::vector<double> gious;
    double pure = 0.0, complete = 0.0;
    for (const DocumentEval& d : docs) {
        const bool ok = !d.error;
        pure += ok && d.pure ? 1.0 : 0.0;
        complete += ok && d.complete ? 1.0 : 0.0;
        gious.push_back(100.0 * (ok ? d.giou : -1.0));
    }
    const double n = static_cast<double>(docs.size());
    r.purity_pct = 100.0 * pure / n;
    r.completeness_pct = 100.0 * complete / n;
    const MeanCi g = mean_ci95(gious);
    r.mean_giou_pct = g.mean;
    r.ci95_giou = g.ci95;
    return r;
}

TsrReport summarize_tsr(std::span<const DocumentEval> docs) {
    TsrReport r;
    r.per_document.assign(docs.begin(), docs.end());
    std::vector<double> p, rc, f;
    for (const DocumentEval& d : docs) {
        const bool ok = !d.error;
        p.push_back(ok ? d.grits.precision : 0.0);
        rc.push_back(ok ? d.grits.recall : 0.0);
        f.push_back(ok ? d.grits.f1 : 0.0);
    }
    r.precision = mean_ci95(p);
    r.recall = mean_ci95(rc);
    r.f1 = mean_ci95(f);
    return r;
}

}  // namespace tabrefine
