#include "tabrefine/geometry.hpp"

#include <algorithm>

namespace tabrefine {

std::optional<BBox> intersection(const BBox& a, const BBox& b) {
    const double x0 = std::max(a.x0(), b.x0());
    const double y0 = std::max(a.y0(), b.y0());
    const double x1 = std::min(a.x1(), b.x1());
    const double y1 = std::min(a.y1(), b.y1());
    if (x1 < x0 || y1 < y0) return std::nullopt;
    return BBox{x0, y0, x1, y1};
}

double intersection_area(const BBox& a, const BBox& b) {
    const auto inter = intersection(a, b);
    return inter ? inter->area() : 0.0;
}

BBox hull(const BBox& a, const BBox& b) {
    return {std::min(a.x0(), b.x0()), std::min(a.y0(), b.y0()), std::max(a.x1(), b.x1()),
            std::max(a.y1(), b.y1())};
}

double iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double giou(const BBox& a, const BBox& b) {
    if (a.area() <= 0.0 && b.area() <= 0.0) {
        throw Error(Errc::DegenerateInput, "giou of two zero-area boxes");
    }
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    const double enclosing = hull(a, b).area();
    return inter / uni - (enclosing - uni) / enclosing;
}

double coverage(const BBox& token, const BBox& region) {
    const double area = token.area();
    if (area <= 0.0) return token.center_inside(region) ? 1.0 : 0.0;
    return intersection_area(token, region) / area;
}

std::vector<int> assign_tokens(std::span<const Token> tokens, const BBox& region, AssignMode mode) {
    if (mode.kind == AssignMode::Kind::overlap && !(mode.fraction > 0.0 && mode.fraction <= 1.0)) {
        throw Error(Errc::InvalidValue, "overlap fraction must lie in (0, 1]");
    }
    std::vector<int> ids;
    for (const Token& t : tokens) {
        const bool in = mode.kind == AssignMode::Kind::center
                            ? t.bbox.center_inside(region)
                            : coverage(t.bbox, region) >= mode.fraction;
        if (in) ids.push_back(t.id);
    }
    return ids;
}

std::vector<Token> tokens_in(std::span<const Token> tokens, const BBox& region) {
    std::vector<Token> out;
    for (const Token& t : tokens) {
        if (t.bbox.center_inside(region)) out.push_back(t);
    }
    return out;
}

namespace {

// Overlap of [a0,a1] and [b0,b1], or the endpoint of `a` nearest to `b`.
std::pair<double, double> pin_interval(double a0, double a1, double b0, double b1) {
    const double lo = std::max(a0, b0);
    const double hi = std::min(a1, b1);
    if (lo <= hi) return {lo, hi};
    const double p = b1 < a0 ? a0 : a1;
    return {p, p};
}

}  // namespace

CellGrid build_cells(const TableGrid& grid) {
    if (grid.rows.empty() || grid.columns.empty()) {
        throw Error(Errc::EmptyGrid, "grid has no rows or no columns");
    }
    CellGrid cells(grid.rows.size());
    for (std::size_t i = 0; i < grid.rows.size(); ++i) {
        const BBox& r = grid.rows[i];
        cells[i].reserve(grid.columns.size());
        for (std::size_t j = 0; j < grid.columns.size(); ++j) {
            const BBox& c = grid.columns[j];
            const auto [x0, x1] = pin_interval(r.x0(), r.x1(), c.x0(), c.x1());
            const auto [y0, y1] = pin_interval(r.y0(), r.y1(), c.y0(), c.y1());
            cells[i].push_back({i, j, BBox{x0, y0, x1, y1}});
        }
    }
    return cells;
}

TableGrid clip_grid(const TableGrid& grid, const BBox& region) {
    TableGrid out;
    const auto table = intersection(grid.table_bbox, region);
    out.table_bbox = table.value_or(BBox{region.x0(), region.y0(), region.x0(), region.y0()});
    if (!table) return out;

    std::size_t dropped_header = 0;
    for (std::size_t i = 0; i < grid.rows.size(); ++i) {
        const auto r = intersection(grid.rows[i], *table);
        if (r && r->height() > 0.0 && r->width() > 0.0) {
            // Rows straddling the same edge collapse onto one y0; merge them.
            if (!out.rows.empty() && r->y0() <= out.rows.back().y0()) {
                out.rows.back() = hull(out.rows.back(), *r);
                if (i < grid.header_rows) ++dropped_header;
            } else {
                out.rows.push_back(*r);
            }
        } else if (i < grid.header_rows) {
            ++dropped_header;
        }
    }
    for (const BBox& col : grid.columns) {
        const auto c = intersection(col, *table);
        if (!c || c->width() <= 0.0 || c->height() <= 0.0) continue;
        if (!out.columns.empty() && c->x0() <= out.columns.back().x0()) {
            out.columns.back() = hull(out.columns.back(), *c);
        } else {
            out.columns.push_back(*c);
        }
    }
    out.header_rows = std::min(grid.header_rows - dropped_header, out.rows.size());
    return out;
}

}  // namespace tabrefine
