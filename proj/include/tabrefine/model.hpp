#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabrefine/error.hpp"

namespace tabrefine {

/// Axis-aligned rectangle in page pixels. Origin is the top-left corner of the
/// page and y grows downward. Zero-area boxes are valid; inverted ones are not.
class BBox {
public:
    constexpr BBox() = default;
    /// Throws Error(InvalidGeometry) when x1 < x0, y1 < y0 or a coordinate is not finite.
    BBox(double x0, double y0, double x1, double y1);

    double x0() const noexcept { return x0_; }
    double y0() const noexcept { return y0_; }
    double x1() const noexcept { return x1_; }
    double y1() const noexcept { return y1_; }

    double width() const noexcept { return x1_ - x0_; }
    double height() const noexcept { return y1_ - y0_; }
    double area() const noexcept { return width() * height(); }
    double cx() const noexcept { return 0.5 * (x0_ + x1_); }
    double cy() const noexcept { return 0.5 * (y0_ + y1_); }

    // Boundary points count as inside.
    bool contains_point(double x, double y) const noexcept {
        return x >= x0_ && x <= x1_ && y >= y0_ && y <= y1_;
    }
    bool contains(const BBox& other) const noexcept {
        return other.x0_ >= x0_ && other.x1_ <= x1_ && other.y0_ >= y0_ && other.y1_ <= y1_;
    }
    bool center_inside(const BBox& region) const noexcept {
        return region.contains_point(cx(), cy());
    }

    BBox with_y0(double y0) const { return {x0_, y0, x1_, y1_}; }
    BBox with_y1(double y1) const { return {x0_, y0_, x1_, y1}; }

    friend bool operator==(const BBox&, const BBox&) = default;

private:
    double x0_ = 0.0;
    double y0_ = 0.0;
    double x1_ = 0.0;
    double y1_ = 0.0;
};

struct Token {
    int id = 0;
    std::string text;
    BBox bbox;

    friend bool operator==(const Token&, const Token&) = default;
};

struct Page {
    double width = 0.0;
    double height = 0.0;
    std::vector<Token> tokens;

    friend bool operator==(const Page&, const Page&) = default;
};

enum class Source { detector_a, detector_b };

std::string_view to_string(Source source) noexcept;
Source source_from_string(std::string_view name);

struct CandidateTable {
    BBox bbox;
    double confidence = 0.0;
    Source source = Source::detector_a;

    friend bool operator==(const CandidateTable&, const CandidateTable&) = default;
};

/// Structural prediction: rows top to bottom, columns left to right, and the
/// number of leading rows that form the header.
struct TableGrid {
    BBox table_bbox;
    std::vector<BBox> rows;
    std::vector<BBox> columns;
    std::size_t header_rows = 0;

    std::size_t body_rows() const noexcept {
        return rows.size() > header_rows ? rows.size() - header_rows : 0;
    }

    friend bool operator==(const TableGrid&, const TableGrid&) = default;
};

struct CellMatrix {
    std::vector<std::vector<std::string>> cells;
    std::size_t header_rows = 0;

    std::size_t rows() const noexcept { return cells.size(); }
    std::size_t cols() const noexcept { return cells.empty() ? 0 : cells.front().size(); }
    std::size_t cell_count() const noexcept { return rows() * cols(); }
    bool rectangular() const noexcept;

    friend bool operator==(const CellMatrix&, const CellMatrix&) = default;
};

/// Tunable parameters of every refinement stage. The DBSCAN radii are derived
/// from the page's median token size unless an absolute value is given.
struct ParamSet {
    static constexpr std::size_t kChooserWeightCount = 5;
    enum ChooserWeight : std::size_t { w_confidence = 0, w_area, w_width, w_height, w_text };

    double alpha = 0.5;
    double beta = 3.0;
    double theta_iou = 0.34;
    std::optional<double> dbscan_eps_y;
    std::optional<double> dbscan_eps_x;
    double eps_y_factor = 0.6;
    double eps_x_factor = 2.0;
    int dbscan_min_pts = 2;
    std::array<double, kChooserWeightCount> chooser_weights{1.0, 0.25, 0.25, 0.25, 1.0};
    int header_match_max_dist = 1;
    double suspicious_threshold = 0.3;
    double outlier_weight = 0.5;
    double pattern_weight = 1.0;
    double misalign_fraction = 0.8;
    int amount_min_count = 2;
    double token_assign_overlap = 0.5;

    /// Throws Error(InvalidValue) naming the first field out of bounds.
    void validate() const;

    friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

struct ModuleToggles {
    bool ensemble = true;
    bool table_chooser = true;
    bool header_refiner = true;
    bool oversegmentation = true;
    bool overlap_columns = true;
    bool unfuse_lines = true;
    bool remove_extra_lines = true;

    static ModuleToggles all_off() noexcept {
        return {false, false, false, false, false, false, false};
    }
    static ModuleToggles without_td() noexcept {
        ModuleToggles t;
        t.ensemble = t.table_chooser = t.header_refiner = t.oversegmentation = false;
        return t;
    }
    static ModuleToggles without_tsr() noexcept {
        ModuleToggles t;
        t.overlap_columns = t.unfuse_lines = t.remove_extra_lines = false;
        return t;
    }
    bool any_td_refinement() const noexcept {
        return table_chooser || header_refiner || oversegmentation;
    }

    friend bool operator==(const ModuleToggles&, const ModuleToggles&) = default;
};

struct GroundTruth {
    BBox bbox;
    TableGrid grid;
    CellMatrix cells;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Document {
    Page page;
    std::vector<CandidateTable> candidates;
    std::optional<TableGrid> grid;
    std::optional<GroundTruth> gt;

    friend bool operator==(const Document&, const Document&) = default;
};

void validate_page(const Page& page);
void validate_grid(const TableGrid& grid, const Page& page);
void validate_cell_matrix(const CellMatrix& cells);

/// Checks every invariant of the inputs and aggregates them. Throws
/// Error(InvalidGeometry | DuplicateTokenId | EmptyTokenText | InvalidValue).
Document validate_document(Page page, std::vector<CandidateTable> candidates,
                           std::optional<TableGrid> grid,
                           std::optional<GroundTruth> gt = std::nullopt);

/// Re-validates an already assembled document.
void validate(const Document& doc);

/// Smallest box containing every box in the list. Empty input is an error.
BBox hull_of(std::span<const BBox> boxes);

}  // namespace tabrefine
