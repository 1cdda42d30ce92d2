#include "tabrefine/tsr_refine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "tabrefine/clustering.hpp"
#include "tabrefine/geometry.hpp"
#include "tabrefine/text.hpp"

namespace tabrefine {

namespace {

std::vector<Token> table_tokens(const TableGrid& grid, std::span<const Token> tokens) {
    return tokens_in(tokens, grid.table_bbox);
}

bool in_header_band(const TableGrid& grid, const Token& t) {
    for (std::size_t i = 0; i < grid.header_rows && i < grid.rows.size(); ++i) {
        if (t.bbox.center_inside(grid.rows[i])) return true;
    }
    return false;
}

// Header tokens per column. Each header token counts once, for the column
// covering most of its width; ties go to the nearest column center.
std::vector<std::size_t> header_counts(const TableGrid& grid, std::span<const Token> tokens) {
    std::vector<std::size_t> counts(grid.columns.size(), 0);
    for (const Token& t : tokens) {
        if (!in_header_band(grid, t)) continue;
        std::size_t best = grid.columns.size();
        double best_cov = 0.0, best_dist = 0.0;
        for (std::size_t c = 0; c < grid.columns.size(); ++c) {
            const BBox& col = grid.columns[c];
            const double w = t.bbox.width();
            const double cov = w > 0.0
                ? std::max(0.0, std::min(t.bbox.x1(), col.x1()) - std::max(t.bbox.x0(), col.x0())) / w
                : (t.bbox.cx() >= col.x0() && t.bbox.cx() <= col.x1() ? 1.0 : 0.0);
            const double dist = std::abs(t.bbox.cx() - col.cx());
            if (cov <= 0.0) continue;
            if (best == grid.columns.size() || cov > best_cov || (cov == best_cov && dist < best_dist)) {
                best = c;
                best_cov = cov;
                best_dist = dist;
            }
        }
        if (best < counts.size()) ++counts[best];
    }
    return counts;
}

double half_median_height(std::span<const Token> tokens) {
    return 0.5 * page_scale(tokens).median_height;
}

// Groups sorted y-centers into bands separated by more than `gap`; returns the
// mean of each band.
std::vector<double> vertical_bands(std::vector<double> ys, double gap) {
    std::sort(ys.begin(), ys.end());
    std::vector<double> means;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (i > 0 && ys[i] - ys[i - 1] > gap) {
            means.push_back(sum / static_cast<double>(count));
            sum = 0.0;
            count = 0;
        }
        sum += ys[i];
        ++count;
    }
    if (count > 0) means.push_back(sum / static_cast<double>(count));
    return means;
}

std::vector<Token> tokens_in_cell(std::span<const Token> tokens, const BBox& row, const BBox& column) {
    const auto cell = intersection(row, column);
    if (!cell) return {};
    return tokens_in(tokens, *cell);
}

// Class index 6 stands for an empty cell.
constexpr std::size_t kEmptyClass = 6;

std::size_t dominant_class(std::span<const Token> cell_tokens) {
    if (cell_tokens.empty()) return kEmptyClass;
    std::array<std::size_t, 6> counts{};
    for (const Token& t : cell_tokens) ++counts[static_cast<std::size_t>(classify_token(t.text))];
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

TableGrid resolve_overlapping_columns(const TableGrid& grid, std::span<const Token> tokens,
                                      const ParamSet& params) {
    TableGrid out = grid;
    const std::vector<Token> inside = table_tokens(grid, tokens);
    while (out.columns.size() > 1) {
        double worst = params.theta_iou;
        std::size_t a = 0, b = 0;
        bool found = false;
        for (std::size_t i = 0; i < out.columns.size(); ++i) {
            for (std::size_t j = i + 1; j < out.columns.size(); ++j) {
                const double v = iou(out.columns[i], out.columns[j]);
                if (v > worst) {
                    worst = v;
                    a = i;
                    b = j;
                    found = true;
                }
            }
        }
        if (!found) break;
        const auto counts = header_counts(out, inside);
        const std::size_t ha = counts[a];
        const std::size_t hb = counts[b];
        std::size_t drop;
        if (ha != hb) {
            drop = ha < hb ? a : b;
        } else if (out.columns[a].width() != out.columns[b].width()) {
            drop = out.columns[a].width() < out.columns[b].width() ? a : b;
        } else {
            drop = b;  // a is left of b
        }
        out.columns.erase(out.columns.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return out;
}

std::vector<RowSplit> find_row_splits(const TableGrid& grid, std::span<const Token> tokens,
                                      const ParamSet& params) {
    std::vector<RowSplit> splits;
    const std::vector<Token> inside = table_tokens(grid, tokens);
    const double gap = half_median_height(tokens);
    const auto min_bands = static_cast<std::size_t>(params.amount_min_count);

    for (std::size_t r = grid.header_rows; r < grid.rows.size(); ++r) {
        const BBox& row = grid.rows[r];
        bool fused = false;
        std::vector<double> amount_ys;
        for (const BBox& column : grid.columns) {
            std::vector<double> cell_ys;
            for (const Token& t : tokens_in_cell(inside, row, column)) {
                if (classify_token(t.text) == TokenClass::amount) cell_ys.push_back(t.bbox.cy());
            }
            if (vertical_bands(cell_ys, gap).size() >= min_bands) fused = true;
            amount_ys.insert(amount_ys.end(), cell_ys.begin(), cell_ys.end());
        }
        if (!fused) continue;
        const std::vector<double> bands = vertical_bands(std::move(amount_ys), gap);
        for (std::size_t k = 1; k < bands.size(); ++k) {
            const double y = 0.5 * (bands[k - 1] + bands[k]);
            if (y > row.y0() && y < row.y1()) splits.push_back({r, y});
        }
    }
    return splits;
}

TableGrid unfuse_lines(const TableGrid& grid, std::span<const Token> tokens, const ParamSet& params) {
    const std::vector<RowSplit> splits = find_row_splits(grid, tokens, params);
    if (splits.empty()) return grid;
    TableGrid out = grid;
    out.rows.clear();
    std::size_t k = 0;
    for (std::size_t r = 0; r < grid.rows.size(); ++r) {
        const BBox& row = grid.rows[r];
        double top = row.y0();
        for (; k < splits.size() && splits[k].row_index == r; ++k) {
            out.rows.emplace_back(row.x0(), top, row.x1(), splits[k].split_y);
            top = splits[k].split_y;
        }
        out.rows.emplace_back(row.x0(), top, row.x1(), row.y1());
    }
    return out;
}

namespace {

bool misaligned(const TableGrid& grid, std::span<const Token> row_tokens, double max_fraction) {
    if (row_tokens.empty()) return false;
    const auto outside = std::count_if(row_tokens.begin(), row_tokens.end(), [&](const Token& t) {
        return std::none_of(grid.columns.begin(), grid.columns.end(), [&](const BBox& c) {
            return t.bbox.cx() >= c.x0() && t.bbox.cx() <= c.x1();
        });
    });
    return static_cast<double>(outside) / static_cast<double>(row_tokens.size()) > max_fraction;
}

bool type_mismatch(const TableGrid& grid, std::size_t r, std::span<const Token> inside) {
    constexpr std::size_t kMinBodyRows = 3;
    if (grid.body_rows() < kMinBodyRows || grid.columns.empty()) return false;
    std::size_t mismatches = 0;
    for (const BBox& column : grid.columns) {
        std::array<std::size_t, 7> votes{};
        for (std::size_t o = grid.header_rows; o < grid.rows.size(); ++o) {
            if (o == r) continue;
            ++votes[dominant_class(tokens_in_cell(inside, grid.rows[o], column))];
        }
        const auto majority =
            static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        if (dominant_class(tokens_in_cell(inside, grid.rows[r], column)) != majority) ++mismatches;
    }
    return 2 * mismatches > grid.columns.size();
}

}  // namespace

TableGrid remove_extra_lines(const TableGrid& grid, std::span<const Token> tokens,
                             const ParamSet& params, std::vector<RowRemoval>* removed) {
    TableGrid out = grid;
    const std::vector<Token> inside = table_tokens(grid, tokens);
    // The top row of a header-less table always stays.
    const std::size_t first_removable = std::max<std::size_t>(grid.header_rows, 1);
    const auto note = [&](const BBox& row, RemovalReason why) {
        if (removed != nullptr) removed->push_back({row, why});
    };

    bool changed = true;
    while (changed && out.rows.size() > first_removable) {
        changed = false;

        double max_h = 0.0;
        for (const BBox& row : out.rows) max_h = std::max(max_h, row.height());
        const double limit = params.beta * max_h;
        for (std::size_t k = out.rows.size(); k-- > first_removable;) {
            if (out.rows[k].y0() - out.rows[k - 1].y1() > limit) {
                while (out.rows.size() > k) {
                    note(out.rows.back(), RemovalReason::gap);
                    out.rows.pop_back();
                }
                changed = true;
                break;
            }
        }
        if (changed) continue;

        const std::size_t r = out.rows.size() - 1;
        const BBox row = out.rows[r];
        const std::vector<Token> row_tokens = tokens_in(inside, row);
        if (misaligned(out, row_tokens, params.misalign_fraction)) {
            note(row, RemovalReason::misaligned);
        } else if (type_mismatch(out, r, inside)) {
            note(row, RemovalReason::type_mismatch);
        } else {
            break;
        }
        out.rows.pop_back();
        changed = true;
    }

    if (out.rows.size() != grid.rows.size() && !out.rows.empty()) {
        const BBox& t = out.table_bbox;
        const double y1 = std::clamp(out.rows.back().y1(), t.y0(), t.y1());
        out.table_bbox = t.with_y1(y1);
    }
    return out;
}

CellMatrix build_cell_matrix(const TableGrid& grid, std::span<const Token> tokens,
                             const ParamSet& params) {
    CellGrid cells = build_cells(grid);
    // Cells are clipped to the table box before assignment.
    for (auto& row : cells)
        for (CellRegion& c : row)
            if (const auto clipped = intersection(c.bbox, grid.table_bbox)) c.bbox = *clipped;
    const std::size_t nrows = cells.size();
    const std::size_t ncols = cells.front().size();
    std::vector<std::vector<std::vector<const Token*>>> members(
        nrows, std::vector<std::vector<const Token*>>(ncols));

    const std::vector<Token> inside = table_tokens(grid, tokens);
    for (const Token& t : inside) {
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < nrows; ++i) {
            for (std::size_t j = 0; j < ncols; ++j) {
                const double c = coverage(t.bbox, cells[i][j].bbox);
                if (c > best) {
                    best = c;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < params.token_assign_overlap) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < nrows; ++i) {
                for (std::size_t j = 0; j < ncols; ++j) {
                    const BBox& c = cells[i][j].bbox;
                    const double d = std::hypot(c.cx() - t.bbox.cx(), c.cy() - t.bbox.cy());
                    if (d < nearest) {
                        nearest = d;
                        bi = i;
                        bj = j;
                    }
                }
            }
        }
        members[bi][bj].push_back(&t);
    }

    // Reading order: lines top to bottom, words left to right.
    const double same_line = half_median_height(tokens);
    CellMatrix out;
    out.header_rows = std::min(grid.header_rows, nrows);
    out.cells.assign(nrows, std::vector<std::string>(ncols));
    for (std::size_t i = 0; i < nrows; ++i) {
        for (std::size_t j = 0; j < ncols; ++j) {
            auto& m = members[i][j];
            std::stable_sort(m.begin(), m.end(), [](const Token* a, const Token* b) {
                return a->bbox.cy() < b->bbox.cy();
            });
            std::size_t start = 0;
            while (start < m.size()) {
                std::size_t end = start + 1;
                while (end < m.size() && m[end]->bbox.cy() - m[start]->bbox.cy() <= same_line) ++end;
                std::stable_sort(m.begin() + static_cast<std::ptrdiff_t>(start),
                                 m.begin() + static_cast<std::ptrdiff_t>(end),
                                 [](const Token* a, const Token* b) { return a->bbox.x0() < b->bbox.x0(); });
                start = end;
            }
            std::string text;
            for (const Token* t : m) {
                if (!text.empty()) text += ' ';
                text += t->text;
            }
            out.cells[i][j] = std::move(text);
        }
    }
    return out;
}

}  // namespace tabrefine
