#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tabrefine/model.hpp"

namespace tabrefine {

/// Closed-interval intersection; touching boxes yield a zero-area box.
std::optional<BBox> intersection(const BBox& a, const BBox& b);
double intersection_area(const BBox& a, const BBox& b);
BBox hull(const BBox& a, const BBox& b);

/// |a∩b| / |a∪b|, 0 when the union has no area.
double iou(const BBox& a, const BBox& b);

/// Generalized IoU in (-1, 1]. Throws Error(DegenerateInput) when both boxes
/// have zero area.
double giou(const BBox& a, const BBox& b);

/// Fraction of `token` covered by `region`; zero-area tokens count as fully
/// covered when their center lies in the region.
double coverage(const BBox& token, const BBox& region);

struct AssignMode {
    enum class Kind { center, overlap };
    Kind kind = Kind::center;
    double fraction = 1.0;

    static AssignMode center() { return {Kind::center, 1.0}; }
    static AssignMode overlap(double fraction) { return {Kind::overlap, fraction}; }
};

std::vector<int> assign_tokens(std::span<const Token> tokens, const BBox& region, AssignMode mode);

/// Tokens whose center lies in `region`, in input order.
std::vector<Token> tokens_in(std::span<const Token> tokens, const BBox& region);

struct CellRegion {
    std::size_t row_index = 0;
    std::size_t col_index = 0;
    BBox bbox;
};

using CellGrid = std::vector<std::vector<CellRegion>>;

/// cell(i,j) = rows[i] ∩ columns[j]. A disjoint pair produces a zero-area box
/// pinned to the row edge nearest to the column. Throws Error(EmptyGrid).
CellGrid build_cells(const TableGrid& grid);

/// Intersects every row and column with `region`, dropping the ones left
/// without extent. Leading rows that disappear are subtracted from the header
/// count.
TableGrid clip_grid(const TableGrid& grid, const BBox& region);

}  // namespace tabrefine
