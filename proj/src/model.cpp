#include "tabrefine/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace tabrefine {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidGeometry: return "InvalidGeometry";
        case Errc::DuplicateTokenId: return "DuplicateTokenId";
        case Errc::EmptyTokenText: return "EmptyTokenText";
        case Errc::InvalidValue: return "InvalidValue";
        case Errc::DegenerateInput: return "DegenerateInput";
        case Errc::EmptyGrid: return "EmptyGrid";
        case Errc::EmptyText: return "EmptyText";
        case Errc::NoLines: return "NoLines";
        case Errc::NoCandidates: return "NoCandidates";
        case Errc::RaggedMatrix: return "RaggedMatrix";
        case Errc::TooLarge: return "TooLarge";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::UnsupportedKind: return "UnsupportedKind";
        case Errc::ParseError: return "ParseError";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

BBox::BBox(double x0, double y0, double x1, double y1) : x0_(x0), y0_(y0), x1_(x1), y1_(y1) {
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) || !std::isfinite(y1)) {
        throw Error(Errc::InvalidGeometry, "non-finite box coordinate");
    }
    if (x1 < x0 || y1 < y0) {
        std::ostringstream os;
        os << "inverted box [" << x0 << ", " << y0 << ", " << x1 << ", " << y1 << "]";
        throw Error(Errc::InvalidGeometry, os.str());
    }
}

std::string_view to_string(Source source) noexcept {
    return source == Source::detector_a ? "detector_a" : "detector_b";
}

Source source_from_string(std::string_view name) {
    if (name == "detector_a") return Source::detector_a;
    if (name == "detector_b") return Source::detector_b;
    throw Error(Errc::ParseError, "unknown candidate source '" + std::string(name) + "'");
}

bool CellMatrix::rectangular() const noexcept {
    const std::size_t c = cols();
    return std::all_of(cells.begin(), cells.end(), [c](const auto& row) { return row.size() == c; });
}

namespace {

void require(bool ok, Errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

bool within_page(const BBox& box, const Page& page) {
    return box.x0() >= 0.0 && box.y0() >= 0.0 && box.x1() <= page.width && box.y1() <= page.height;
}

bool touches(const BBox& a, const BBox& b) {
    return a.x0() <= b.x1() && b.x0() <= a.x1() && a.y0() <= b.y1() && b.y0() <= a.y1();
}

bool blank(std::string_view text) {
    return std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

void in_range(double v, double lo, double hi, const char* name, bool open_lo = false) {
    const bool ok = std::isfinite(v) && (open_lo ? v > lo : v >= lo) && v <= hi;
    require(ok, Errc::InvalidValue, std::string("parameter ") + name + " out of bounds");
}

}  // namespace

void ParamSet::validate() const {
    in_range(alpha, 0.0, 1.0, "alpha");
    in_range(beta, 0.0, 1e9, "beta", true);
    require(theta_iou > 0.0 && theta_iou < 1.0, Errc::InvalidValue, "parameter theta_iou out of bounds");
    if (dbscan_eps_y) in_range(*dbscan_eps_y, 0.0, 1e9, "dbscan_eps_y", true);
    if (dbscan_eps_x) in_range(*dbscan_eps_x, 0.0, 1e9, "dbscan_eps_x", true);
    in_range(eps_y_factor, 0.0, 1e6, "eps_y_factor", true);
    in_range(eps_x_factor, 0.0, 1e6, "eps_x_factor", true);
    require(dbscan_min_pts >= 1, Errc::InvalidValue, "parameter dbscan_min_pts out of bounds");
    for (double w : chooser_weights) in_range(w, 0.0, 1e9, "chooser_weights");
    require(header_match_max_dist >= 0, Errc::InvalidValue,
            "parameter header_match_max_dist out of bounds");
    in_range(suspicious_threshold, 0.0, 1e9, "suspicious_threshold");
    in_range(outlier_weight, 0.0, 1e9, "outlier_weight");
    in_range(pattern_weight, 0.0, 1e9, "pattern_weight");
    in_range(misalign_fraction, 0.0, 1.0, "misalign_fraction");
    require(amount_min_count >= 2, Errc::InvalidValue, "parameter amount_min_count out of bounds");
    in_range(token_assign_overlap, 0.0, 1.0, "token_assign_overlap", true);
}

void validate_page(const Page& page) {
    require(std::isfinite(page.width) && std::isfinite(page.height) && page.width > 0.0 &&
                page.height > 0.0,
            Errc::InvalidGeometry, "page must have positive size");
    std::unordered_set<int> ids;
    for (const Token& t : page.tokens) {
        require(!blank(t.text), Errc::EmptyTokenText,
                "token " + std::to_string(t.id) + " has empty text");
        require(ids.insert(t.id).second, Errc::DuplicateTokenId,
                "token id " + std::to_string(t.id) + " appears twice");
        require(within_page(t.bbox, page), Errc::InvalidGeometry,
                "token " + std::to_string(t.id) + " lies outside the page");
    }
}

void validate_grid(const TableGrid& grid, const Page& page) {
    require(within_page(grid.table_bbox, page), Errc::InvalidGeometry, "table bbox outside page");
    require(grid.header_rows <= grid.rows.size(), Errc::InvalidGeometry,
            "header_rows exceeds row count");
    for (std::size_t i = 0; i < grid.rows.size(); ++i) {
        const BBox& r = grid.rows[i];
        require(within_page(r, page), Errc::InvalidGeometry, "row outside page");
        require(touches(r, grid.table_bbox), Errc::InvalidGeometry, "row misses table bbox");
        require(i == 0 || grid.rows[i - 1].y0() < r.y0(), Errc::InvalidGeometry,
                "rows not strictly sorted by y0");
    }
    for (std::size_t j = 0; j < grid.columns.size(); ++j) {
        const BBox& c = grid.columns[j];
        require(within_page(c, page), Errc::InvalidGeometry, "column outside page");
        require(touches(c, grid.table_bbox), Errc::InvalidGeometry, "column misses table bbox");
        require(j == 0 || grid.columns[j - 1].x0() < c.x0(), Errc::InvalidGeometry,
                "columns not strictly sorted by x0");
    }
}

void validate_cell_matrix(const CellMatrix& cells) {
    require(cells.rectangular(), Errc::RaggedMatrix, "cell matrix rows differ in length");
    require(cells.header_rows <= cells.rows(), Errc::InvalidValue,
            "cell matrix header_rows exceeds row count");
}

Document validate_document(Page page, std::vector<CandidateTable> candidates,
                           std::optional<TableGrid> grid, std::optional<GroundTruth> gt) {
    Document doc{std::move(page), std::move(candidates), std::move(grid), std::move(gt)};
    validate(doc);
    return doc;
}

void validate(const Document& doc) {
    validate_page(doc.page);
    for (const CandidateTable& c : doc.candidates) {
        require(within_page(c.bbox, doc.page), Errc::InvalidGeometry, "candidate outside page");
        require(std::isfinite(c.confidence) && c.confidence >= 0.0 && c.confidence <= 1.0,
                Errc::InvalidValue, "candidate confidence outside [0,1]");
    }
    if (doc.grid) validate_grid(*doc.grid, doc.page);
    if (doc.gt) {
        require(within_page(doc.gt->bbox, doc.page), Errc::InvalidGeometry, "gt bbox outside page");
        validate_grid(doc.gt->grid, doc.page);
        validate_cell_matrix(doc.gt->cells);
    }
}

BBox hull_of(std::span<const BBox> boxes) {
    require(!boxes.empty(), Errc::DegenerateInput, "hull of no boxes");
    double x0 = boxes[0].x0(), y0 = boxes[0].y0(), x1 = boxes[0].x1(), y1 = boxes[0].y1();
    for (const BBox& b : boxes.subspan(1)) {
        x0 = std::min(x0, b.x0());
        y0 = std::min(y0, b.y0());
        x1 = std::max(x1, b.x1());
        y1 = std::max(y1, b.y1());
    }
    return {x0, y0, x1, y1};
}

}  // namespace tabrefine
