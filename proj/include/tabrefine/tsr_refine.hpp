#pragma once

#include <span>
#include <vector>

#include "tabrefine/model.hpp"

namespace tabrefine {

struct RowSplit {
    std::size_t row_index = 0;
    double split_y = 0.0;  // strictly inside the row
};

/// Drops the weaker member of every column pair whose IoU exceeds theta_iou.
/// The weaker column holds fewer header tokens; ties keep the wider column,
/// then the leftmost.
TableGrid resolve_overlapping_columns(const TableGrid& grid, std::span<const Token> tokens,
                                      const ParamSet& params);

/// Horizontal cuts for body rows whose cells stack several amounts.
std::vector<RowSplit> find_row_splits(const TableGrid& grid, std::span<const Token> tokens,
                                      const ParamSet& params);

/// Applies find_row_splits: every cell of a split row is cut at the same y.
TableGrid unfuse_lines(const TableGrid& grid, std::span<const Token> tokens, const ParamSet& params);

/// Why a trailing row was dropped.
enum class RemovalReason { misaligned, type_mismatch, gap };

struct RowRemoval {
    BBox row;
    RemovalReason reason;
};

/// Removes trailing body rows that are misaligned with the columns, disagree
/// with the column data types, or sit too far below the rest of the table.
/// Header rows are kept. The table box is shrunk to the last remaining row.
TableGrid remove_extra_lines(const TableGrid& grid, std::span<const Token> tokens,
                             const ParamSet& params, std::vector<RowRemoval>* removed = nullptr);

/// Fills the grid's cells with token text. Every token whose center lies in
/// the table box lands in exactly one cell. Throws Error(EmptyGrid).
CellMatrix build_cell_matrix(const TableGrid& grid, std::span<const Token> tokens,
                             const ParamSet& params);

}  // namespace tabrefine
