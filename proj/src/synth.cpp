#include "tabrefine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tabrefine/clustering.hpp"
#include "tabrefine/geometry.hpp"
#include "tabrefine/parallel.hpp"

namespace tabrefine {

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[pick_index(rng, items.size())];
}

// Coordinates are kept on a 0.001 px lattice so the interchange format
// reproduces them exactly.
double r3(double v) { return std::round(v * 1000.0) / 1000.0; }

BBox r3(const BBox& b) { return {r3(b.x0()), r3(b.y0()), r3(b.x1()), r3(b.y1())}; }

constexpr double kTokenHeight = 16.0;
constexpr double kRowPitch = 30.0;
constexpr double kRowPad = 7.0;
constexpr double kCharWidth = 9.0;
constexpr double kCellMargin = 8.0;
constexpr double kTableX0 = 100.0;

enum class ColumnKind { description, code, quantity, unit, unit_price, vat, amount };

const std::vector<ColumnKind>& layout_for(std::size_t cols) {
    using K = ColumnKind;
    static const std::vector<std::vector<ColumnKind>> layouts = {
        {K::description},
        {K::description, K::amount},
        {K::description, K::quantity, K::amount},
        {K::description, K::quantity, K::unit_price, K::amount},
        {K::code, K::description, K::quantity, K::unit_price, K::amount},
        {K::code, K::description, K::quantity, K::unit, K::unit_price, K::amount},
        {K::code, K::description, K::quantity, K::unit, K::unit_price, K::vat, K::amount},
    };
    return layouts[cols - 1];
}

double column_width(ColumnKind k) {
    switch (k) {
        case ColumnKind::description: return 360.0;
        case ColumnKind::code: return 120.0;
        case ColumnKind::quantity: return 90.0;
        case ColumnKind::unit: return 80.0;
        case ColumnKind::unit_price: return 140.0;
        case ColumnKind::vat: return 80.0;
        case ColumnKind::amount: return 150.0;
    }
    return 100.0;
}

bool right_aligned(ColumnKind k) {
    return k == ColumnKind::quantity || k == ColumnKind::unit_price || k == ColumnKind::vat ||
           k == ColumnKind::amount;
}

// Single-word headers taken from the shipped keyword list.
const std::vector<std::string>& header_words(ColumnKind k) {
    static const std::vector<std::string> description{"Description", "Item", "Product", "Designation",
                                                       "Article", "Details"};
    static const std::vector<std::string> code{"Code", "Ref", "SKU", "Reference"};
    static const std::vector<std::string> quantity{"Qty", "Quantity", "Units"};
    static const std::vector<std::string> unit{"Unit", "UoM"};
    static const std::vector<std::string> unit_price{"Price", "Rate"};
    static const std::vector<std::string> vat{"VAT"};
    static const std::vector<std::string> amount{"Amount", "Total", "Net", "Gross"};
    switch (k) {
        case ColumnKind::description: return description;
        case ColumnKind::code: return code;
        case ColumnKind::quantity: return quantity;
        case ColumnKind::unit: return unit;
        case ColumnKind::unit_price: return unit_price;
        case ColumnKind::vat: return vat;
        case ColumnKind::amount: return amount;
    }
    return description;
}

const std::vector<std::string> kAdjectives{"Steel", "Brass", "Copper", "Plastic", "Wooden", "Heavy",
                                           "Small", "Large", "Blue", "White", "Premium", "Standard"};
const std::vector<std::string> kNouns{"Bolt", "Washer", "Bracket", "Cable", "Hinge", "Panel", "Valve",
                                      "Bearing", "Spring", "Screw", "Clamp", "Filter", "Pump", "Sensor"};
const std::vector<std::string> kUnits{"pcs", "kg", "box", "pack", "roll", "pair"};
const std::vector<std::string> kVat{"0%", "7%", "19%", "20%"};
const std::vector<std::string> kProse{"we", "kindly", "ask", "you", "to", "check", "the", "goods",
                                      "upon", "arrival", "and", "report", "any", "damage", "within",
                                      "seven", "days", "of", "receipt", "all", "shipments", "are",
                                      "insured", "by", "our", "carrier"};
const std::vector<std::string> kCompanies{"Acme", "Northwind", "Bluebird", "Harbor", "Summit", "Vertex"};
const std::vector<std::string> kCompanySuffix{"Supplies", "Trading", "Industries", "Logistics"};
const std::vector<std::string> kStreets{"Harbour", "Mill", "Station", "Church", "Market"};
const std::vector<std::string> kCities{"Bristol", "Leeds", "Hamburg", "Lyon", "Porto", "Gdansk"};

std::string group_thousands(long long whole, char sep) {
    std::string digits = std::to_string(whole);
    std::string out;
    const std::size_t n = digits.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && (n - i) % 3 == 0) out.push_back(sep);
        out.push_back(digits[i]);
    }
    return out;
}

// Either "1,234.50" or "1.234,50".
std::string format_amount(double value, bool comma_decimal) {
    const long long cents = std::llround(value * 100.0);
    const long long whole = cents / 100;
    const long long frac = cents % 100;
    std::string s = group_thousands(whole, comma_decimal ? '.' : ',');
    s.push_back(comma_decimal ? ',' : '.');
    if (frac < 10) s.push_back('0');
    s += std::to_string(frac);
    return s;
}

std::string two_digits(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string random_date(Rng& rng) {
    const int d = 1 + static_cast<int>(pick_index(rng, 28));
    const int m = 1 + static_cast<int>(pick_index(rng, 12));
    return two_digits(d) + "." + two_digits(m) + ".2024";
}

std::string random_code(Rng& rng) {
    std::string s;
    s.push_back(static_cast<char>('A' + pick_index(rng, 26)));
    s.push_back(static_cast<char>('A' + pick_index(rng, 26)));
    s.push_back('-');
    s += std::to_string(1000 + pick_index(rng, 9000));
    return s;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double text_width(const std::string& word) { return kCharWidth * static_cast<double>(word.size()); }

class PageBuilder {
public:
    PageBuilder(Rng& rng, double jitter, double width, double height)
        : rng_(rng), jitter_(jitter), width_(width), height_(height) {}

    // Lays the words out from x with one character of spacing. Returns the
    // hull of the placed tokens.
    BBox place(const std::vector<std::string>& words, double x, double top) {
        std::vector<BBox> boxes;
        for (const std::string& w : words) {
            const double jx = uniform(rng_, -jitter_, jitter_);
            const double jy = uniform(rng_, -jitter_, jitter_);
            const double x0 = std::clamp(x + jx, 0.0, width_);
            const double y0 = std::clamp(top + jy, 0.0, height_);
            const BBox b = r3(BBox(x0, y0, std::min(x0 + text_width(w), width_),
                                   std::min(y0 + kTokenHeight, height_)));
            tokens_.push_back({next_id_++, w, b});
            boxes.push_back(b);
            x += text_width(w) + kCharWidth;
        }
        return hull_of(boxes);
    }

    BBox place_right(const std::vector<std::string>& words, double right, double top) {
        double w = -kCharWidth;
        for (const auto& word : words) w += text_width(word) + kCharWidth;
        return place(words, right - w, top);
    }

    std::vector<Token> take() { return std::move(tokens_); }

private:
    Rng& rng_;
    double jitter_;
    double width_;
    double height_;
    int next_id_ = 1;
    std::vector<Token> tokens_;
};

std::vector<std::string> prose_line(Rng& rng, std::size_t words) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < words; ++i) out.push_back(pick(rng, kProse));
    return out;
}

}  // namespace

Document generate_document(std::uint64_t seed, const GeneratorSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1 || spec.cols > 7) {
        throw Error(Errc::InvalidValue, "generator needs 1+ rows and 1..7 columns");
    }
    Rng rng = make_rng(seed, 0x9e3779b97f4a7c15ULL);
    PageBuilder page(rng, spec.jitter, spec.page_width, spec.page_height);
    const bool comma_decimal = uniform(rng, 0.0, 1.0) < 0.5;

    // Letterhead: sender address on the left, invoice identifiers on the right.
    const std::string company = pick(rng, kCompanies);
    page.place({company, pick(rng, kCompanySuffix), "Ltd"}, kTableX0, 70);
    page.place({pick(rng, kStreets), "Road", std::to_string(1 + pick_index(rng, 120))}, kTableX0, 94);
    page.place({pick(rng, kCities)}, kTableX0, 118);
    page.place({"Invoice", "No", "INV-" + std::to_string(1000 + pick_index(rng, 9000))}, 820, 70);
    page.place({"Invoice", "Date", random_date(rng)}, 820, 94);
    page.place({"Due", "Date", random_date(rng)}, 820, 118);

    for (int i = 0; i < 3; ++i) page.place(prose_line(rng, 9 + pick_index(rng, 4)), kTableX0, 190 + 22.0 * i);

    const double table_y0 = r3(300.0 + uniform(rng, 0.0, 40.0));
    page.place({"Order", "No", "PO-" + std::to_string(1000 + pick_index(rng, 9000)), "Customer",
                std::to_string(10000 + pick_index(rng, 90000))},
               kTableX0 + kCellMargin, table_y0 - 28.0);

    // Table.
    const std::vector<ColumnKind>& kinds = layout_for(spec.cols);
    std::vector<double> edges{kTableX0};
    for (ColumnKind k : kinds) edges.push_back(edges.back() + column_width(k));
    const double table_x1 = edges.back();
    const std::size_t total_rows = spec.rows + 1;
    const double table_y1 = table_y0 + kRowPitch * static_cast<double>(total_rows);

    CellMatrix cells;
    cells.header_rows = 1;
    cells.cells.assign(total_rows, std::vector<std::string>(kinds.size()));
    auto put_cell = [&](std::size_t r, std::size_t c, const std::string& text) {
        const auto words = split_words(text);
        const double top = table_y0 + kRowPitch * static_cast<double>(r) + kRowPad;
        if (right_aligned(kinds[c])) {
            page.place_right(words, edges[c + 1] - kCellMargin, top);
        } else {
            page.place(words, edges[c] + kCellMargin, top);
        }
        cells.cells[r][c] = text;
    };
    for (std::size_t c = 0; c < kinds.size(); ++c) put_cell(0, c, pick(rng, header_words(kinds[c])));
    double subtotal = 0.0;
    for (std::size_t r = 1; r < total_rows; ++r) {
        const int qty = 1 + static_cast<int>(pick_index(rng, 48));
        const double price = std::round(uniform(rng, 0.5, 900.0) * 100.0) / 100.0;
        const double line_total = qty * price;
        subtotal += line_total;
        for (std::size_t c = 0; c < kinds.size(); ++c) {
            std::string text;
            switch (kinds[c]) {
                case ColumnKind::description: {
                    const std::size_t adjectives = pick_index(rng, 3);
                    for (std::size_t a = 0; a < adjectives; ++a) text += pick(rng, kAdjectives) + " ";
                    text += pick(rng, kNouns);
                    break;
                }
                case ColumnKind::code: text = random_code(rng); break;
                case ColumnKind::quantity: text = std::to_string(qty); break;
                case ColumnKind::unit: text = pick(rng, kUnits); break;
                case ColumnKind::unit_price: text = format_amount(price, comma_decimal); break;
                case ColumnKind::vat: text = pick(rng, kVat); break;
                case ColumnKind::amount: text = format_amount(line_total, comma_decimal); break;
            }
            put_cell(r, c, text);
        }
    }

    // Totals block: amounts under the last column, labels right-aligned just
    // left of it.
    const double label_right = kinds.size() >= 2 ? edges[kinds.size() - 1] - 2.0 * kCellMargin : table_x1 - 160.0;
    const double vat = subtotal * 0.19;
    const std::vector<std::pair<std::vector<std::string>, double>> totals{
        {{"Subtotal"}, subtotal}, {{"VAT", "19%"}, vat}, {{"Total", "due"}, subtotal + vat}};
    double y = table_y1 + 18.0;
    for (const auto& [label, value] : totals) {
        page.place_right(label, label_right, y);
        page.place_right({format_amount(value, comma_decimal)}, table_x1 - kCellMargin, y);
        y += 26.0;
    }

    // Footer.
    const double footer_y = spec.page_height - 140.0;
    page.place({"Thank", "you", "for", "your", "business"}, 480, footer_y);
    page.place({"IBAN", "DE89", "3704", "0044", "0532", "0130", "00", "BIC", "COBADEFFXXX"}, 300, footer_y + 28);
    page.place({"Page", "1", "of", "1"}, 580, footer_y + 56);

    Page p{spec.page_width, spec.page_height, page.take()};

    GroundTruth gt;
    gt.bbox = BBox(kTableX0, table_y0, table_x1, r3(table_y1));
    gt.grid.table_bbox = gt.bbox;
    gt.grid.header_rows = 1;
    for (std::size_t r = 0; r < total_rows; ++r) {
        const double y0 = r3(table_y0 + kRowPitch * static_cast<double>(r));
        const double y1 = r3(table_y0 + kRowPitch * static_cast<double>(r + 1));
        gt.grid.rows.emplace_back(kTableX0, y0, table_x1, y1);
    }
    for (std::size_t c = 0; c < kinds.size(); ++c) {
        gt.grid.columns.emplace_back(edges[c], gt.bbox.y0(), edges[c + 1], gt.bbox.y1());
    }
    gt.cells = cells;

    // Two detectors agree on the table with slightly loose boxes.
    auto loosen = [&](double slack) {
        return r3(BBox(std::max(0.0, gt.bbox.x0() - uniform(rng, 0.0, slack)),
                       std::max(0.0, gt.bbox.y0() - uniform(rng, 0.0, slack)),
                       std::min(spec.page_width, gt.bbox.x1() + uniform(rng, 0.0, slack)),
                       std::min(spec.page_height, gt.bbox.y1() + uniform(rng, 0.0, slack))));
    };
    std::vector<CandidateTable> candidates;
    candidates.push_back({loosen(3.0), r3(uniform(rng, 0.70, 0.95)), Source::detector_a});
    candidates.push_back({loosen(4.0), r3(uniform(rng, 0.60, 0.90)), Source::detector_b});

    return validate_document(std::move(p), std::move(candidates), gt.grid, gt);
}

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::noise_below: return "noise_below";
        case ErrorKind::wrong_table: return "wrong_table";
        case ErrorKind::missing_elements: return "missing_elements";
        case ErrorKind::noise_above: return "noise_above";
        case ErrorKind::false_positive: return "false_positive";
        case ErrorKind::wrong_header: return "wrong_header";
        case ErrorKind::segmentation_error: return "segmentation_error";
        case ErrorKind::fused_lines: return "fused_lines";
        case ErrorKind::splitted_line: return "splitted_line";
    }
    return "unknown";
}

const std::vector<ErrorKind>& all_error_kinds() {
    static const std::vector<ErrorKind> kinds{
        ErrorKind::noise_below,    ErrorKind::wrong_table, ErrorKind::missing_elements,
        ErrorKind::noise_above,    ErrorKind::false_positive, ErrorKind::wrong_header,
        ErrorKind::segmentation_error, ErrorKind::fused_lines, ErrorKind::splitted_line};
    return kinds;
}

ErrorKind error_kind_from_string(std::string_view name) {
    for (ErrorKind k : all_error_kinds())
        if (to_string(k) == name) return k;
    throw Error(Errc::InvalidValue, "unknown error kind '" + std::string(name) + "'");
}

const std::vector<std::pair<ErrorKind, double>>& business_frequencies() {
    static const std::vector<std::pair<ErrorKind, double>> freq{
        {ErrorKind::noise_below, 22},       {ErrorKind::wrong_table, 18},
        {ErrorKind::missing_elements, 13},  {ErrorKind::noise_above, 11},
        {ErrorKind::false_positive, 8},     {ErrorKind::wrong_header, 6},
        {ErrorKind::segmentation_error, 4}, {ErrorKind::fused_lines, 3}};
    return freq;
}

namespace {

struct NearbyLines {
    std::vector<BBox> above;  // nearest first
    std::vector<BBox> below;  // nearest first
};

NearbyLines lines_outside(const Page& page, const BBox& table) {
    std::vector<Token> outside;
    for (const Token& t : page.tokens)
        if (!t.bbox.center_inside(table)) outside.push_back(t);
    NearbyLines out;
    if (outside.empty()) return out;
    const PageScale scale = page_scale(page.tokens);
    const auto lines = estimate_lines(outside, 0.6 * scale.median_height, 1);
    for (const TextLine& l : lines) {
        if (l.bbox.y1() <= table.y0()) out.above.push_back(l.bbox);
        if (l.bbox.y0() >= table.y1()) out.below.push_back(l.bbox);
    }
    std::sort(out.above.begin(), out.above.end(), [](const BBox& a, const BBox& b) { return a.y1() > b.y1(); });
    std::sort(out.below.begin(), out.below.end(), [](const BBox& a, const BBox& b) { return a.y0() < b.y0(); });
    return out;
}

BBox page_clamp(const BBox& b, const Page& page) {
    return r3(BBox(std::max(0.0, b.x0()), std::max(0.0, b.y0()), std::min(page.width, b.x1()),
                   std::min(page.height, b.y1())));
}

// Row boxes for text lines listed top to bottom, split at the midpoints of
// the gaps and kept within [lower, upper].
std::vector<std::pair<double, double>> line_rows(const std::vector<BBox>& lines, double lower, double upper) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const double pad = 0.4 * lines[i].height();
        double y0 = lines[i].y0() - pad;
        double y1 = lines[i].y1() + pad;
        if (i > 0) y0 = std::max(y0, 0.5 * (lines[i - 1].y1() + lines[i].y0()));
        if (i + 1 < lines.size()) y1 = std::min(y1, 0.5 * (lines[i].y1() + lines[i + 1].y0()));
        out.emplace_back(r3(std::max(y0, lower)), r3(std::min(y1, upper)));
    }
    return out;
}

// Grows the grid over extra text lines above and/or below, with every row
// spanning the new width and the outer columns stretched to it.
TableGrid extend_grid(const TableGrid& grid, const std::vector<BBox>& above_top_down,
                      const std::vector<BBox>& below_top_down) {
    std::vector<BBox> all{grid.table_bbox};
    all.insert(all.end(), above_top_down.begin(), above_top_down.end());
    all.insert(all.end(), below_top_down.begin(), below_top_down.end());
    const double first_top = grid.rows.empty() ? grid.table_bbox.y0() : grid.rows.front().y0();
    const double last_bottom = grid.rows.empty() ? grid.table_bbox.y1() : grid.rows.back().y1();
    auto top_rows = line_rows(above_top_down, 0.0, first_top);
    auto bottom_rows = line_rows(below_top_down, last_bottom, 1e18);

    BBox region = hull_of(all);
    for (const auto& r : top_rows) region = hull(region, BBox(region.x0(), r.first, region.x1(), region.y1()));
    for (const auto& r : bottom_rows) region = hull(region, BBox(region.x0(), region.y0(), region.x1(), r.second));
    region = r3(region);

    TableGrid out;
    out.table_bbox = region;
    for (const auto& [y0, y1] : top_rows) out.rows.emplace_back(region.x0(), y0, region.x1(), y1);
    for (const BBox& r : grid.rows) out.rows.emplace_back(region.x0(), r.y0(), region.x1(), r.y1());
    for (const auto& [y0, y1] : bottom_rows) out.rows.emplace_back(region.x0(), y0, region.x1(), y1);
    for (std::size_t c = 0; c < grid.columns.size(); ++c) {
        const BBox& col = grid.columns[c];
        const double x0 = c == 0 ? std::min(col.x0(), region.x0()) : col.x0();
        const double x1 = c + 1 == grid.columns.size() ? std::max(col.x1(), region.x1()) : col.x1();
        out.columns.emplace_back(x0, region.y0(), x1, region.y1());
    }
    out.header_rows = grid.header_rows + top_rows.size();
    return out;
}

std::vector<BBox> first_n(const std::vector<BBox>& v, std::size_t n) {
    return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size()))};
}

std::vector<BBox> reversed(std::vector<BBox> v) {
    std::reverse(v.begin(), v.end());
    return v;
}

double max_confidence(const std::vector<CandidateTable>& c) {
    double m = 0.0;
    for (const auto& x : c) m = std::max(m, x.confidence);
    return m;
}

[[noreturn]] void unsupported(ErrorKind kind, const std::string& why) {
    throw Error(Errc::UnsupportedKind, std::string(to_string(kind)) + ": " + why);
}

}  // namespace

DegradedPrediction inject_error(const Document& doc, ErrorKind kind, std::uint64_t seed) {
    if (!doc.gt) throw Error(Errc::InvalidValue, "error injection needs ground truth");
    const GroundTruth& gt = *doc.gt;
    Rng rng = make_rng(seed, 0xc2b2ae3d27d4eb4fULL + static_cast<std::uint64_t>(kind));

    DegradedPrediction out{doc.candidates, gt.grid, GtDelta{kind, std::nullopt, std::nullopt, std::nullopt, 0}};
    if (out.candidates.empty()) out.candidates.push_back({gt.bbox, 0.9, Source::detector_a});
    TableGrid& grid = out.grid;
    const std::size_t body = grid.body_rows();

    // Candidates that describe the true table.
    auto for_true_candidates = [&](auto&& fn) {
        for (auto& c : out.candidates)
            if (iou(c.bbox, gt.bbox) > 0.5) fn(c);
    };

    switch (kind) {
        case ErrorKind::noise_below: {
            const NearbyLines lines = lines_outside(doc.page, gt.bbox);
            if (lines.below.empty()) unsupported(kind, "no content below the table");
            const std::size_t k = 1 + pick_index(rng, std::min<std::size_t>(3, lines.below.size()));
            const auto swallowed = first_n(lines.below, k);
            grid = extend_grid(gt.grid, {}, swallowed);
            for_true_candidates([&](CandidateTable& c) { c.bbox = page_clamp(hull(c.bbox, grid.table_bbox), doc.page); });
            out.delta.noise_region = hull_of(swallowed);
            out.delta.lines = k;
            break;
        }
        case ErrorKind::noise_above: {
            const NearbyLines lines = lines_outside(doc.page, gt.bbox);
            if (lines.above.empty()) unsupported(kind, "no content above the table");
            const std::size_t k = 1 + pick_index(rng, std::min<std::size_t>(2, lines.above.size()));
            const auto swallowed = reversed(first_n(lines.above, k));
            grid = extend_grid(gt.grid, swallowed, {});
            for_true_candidates([&](CandidateTable& c) { c.bbox = page_clamp(hull(c.bbox, grid.table_bbox), doc.page); });
            out.delta.noise_region = hull_of(swallowed);
            out.delta.lines = k;
            break;
        }
        case ErrorKind::wrong_table: {
            const NearbyLines lines = lines_outside(doc.page, gt.bbox);
            if (lines.below.empty()) unsupported(kind, "no content below the table");
            const auto decoy_lines = first_n(lines.below, 3);
            const BBox h = hull_of(decoy_lines);
            const BBox decoy = page_clamp(BBox(h.x0() - 4, std::max(gt.bbox.y1(), h.y0() - 4), h.x1() + 4, h.y1() + 4), doc.page);
            const double conf = r3(std::min(1.0, max_confidence(out.candidates) + uniform(rng, 0.02, 0.08)));
            out.candidates.push_back({decoy, conf, Source::detector_a});
            grid = extend_grid(gt.grid, {}, decoy_lines);
            out.delta.noise_region = decoy;
            out.delta.lines = decoy_lines.size();
            break;
        }
        case ErrorKind::false_positive: {
            const NearbyLines lines = lines_outside(doc.page, gt.bbox);
            if (lines.above.size() < 2) unsupported(kind, "no paragraph above the table");
            // Skip the line right above the table; the paragraph sits beyond it.
            const std::size_t k = std::min<std::size_t>(3, lines.above.size() - 1);
            const std::vector<BBox> paragraph(lines.above.begin() + 1, lines.above.begin() + 1 + static_cast<std::ptrdiff_t>(k));
            const BBox h = hull_of(paragraph);
            const BBox fp = page_clamp(BBox(h.x0() - 4, h.y0() - 4, h.x1() + 4, std::min(h.y1() + 4, lines.above.front().y0())), doc.page);
            const double conf = r3(std::min(1.0, max_confidence(out.candidates) + uniform(rng, 0.02, 0.06)));
            out.candidates.push_back({fp, conf, Source::detector_b});
            grid = extend_grid(gt.grid, reversed(first_n(lines.above, k + 1)), {});
            out.delta.noise_region = fp;
            out.delta.lines = k + 1;
            break;
        }
        case ErrorKind::missing_elements: {
            if (grid.columns.size() < 2) unsupported(kind, "needs at least two columns");
            const std::size_t j = pick_index(rng, grid.columns.size());
            grid.columns.erase(grid.columns.begin() + static_cast<std::ptrdiff_t>(j));
            out.delta.column = j;
            break;
        }
        case ErrorKind::wrong_header: {
            if (grid.rows.size() < 2 || grid.header_rows >= grid.rows.size()) unsupported(kind, "needs a body row");
            grid.header_rows += 1;
            out.delta.row = grid.header_rows - 1;
            break;
        }
        case ErrorKind::segmentation_error: {
            if (grid.columns.empty()) unsupported(kind, "needs a column");
            const std::size_t j = pick_index(rng, grid.columns.size());
            const BBox col = grid.columns[j];
            const double shift = col.width() / 3.0;  // equal boxes shifted by w/3 have IoU 1/2
            const bool right = j + 1 < grid.columns.size() || j == 0;
            const BBox dup = right ? BBox(col.x0() + shift, col.y0(), col.x1() + shift, col.y1())
                                   : BBox(col.x0() - shift, col.y0(), col.x1() - shift, col.y1());
            if (dup.x1() > doc.page.width || dup.x0() < 0.0 || col.width() <= 0.0) unsupported(kind, "no room for a shifted column");
            grid.columns.insert(grid.columns.begin() + static_cast<std::ptrdiff_t>(right ? j + 1 : j), r3(dup));
            grid.table_bbox = r3(hull(grid.table_bbox, dup));
            out.delta.column = right ? j + 1 : j;
            break;
        }
        case ErrorKind::fused_lines: {
            if (body < 2) unsupported(kind, "needs two body rows");
            const std::size_t i = grid.header_rows + pick_index(rng, body - 1);
            grid.rows[i] = hull(grid.rows[i], grid.rows[i + 1]);
            grid.rows.erase(grid.rows.begin() + static_cast<std::ptrdiff_t>(i + 1));
            out.delta.row = i;
            break;
        }
        case ErrorKind::splitted_line: {
            if (body < 1) unsupported(kind, "needs a body row");
            const std::size_t i = grid.header_rows + pick_index(rng, body);
            const BBox r = grid.rows[i];
            const double mid = r3(0.5 * (r.y0() + r.y1()));
            if (!(mid > r.y0() && mid < r.y1())) unsupported(kind, "row too thin to split");
            grid.rows[i] = r.with_y1(mid);
            grid.rows.insert(grid.rows.begin() + static_cast<std::ptrdiff_t>(i + 1), r.with_y0(mid));
            out.delta.row = i;
            break;
        }
    }
    validate_grid(grid, doc.page);
    return out;
}

Document apply(const Document& doc, const DegradedPrediction& degraded) {
    Document out = doc;
    out.candidates = degraded.candidates;
    out.grid = degraded.grid;
    validate(out);
    return out;
}

std::vector<CorpusItem> make_corpus(std::uint64_t seed, const CorpusSpec& spec) {
    if (spec.min_rows < 1 || spec.min_rows > spec.max_rows || spec.min_cols < 1 || spec.min_cols > spec.max_cols ||
        spec.max_cols > 7) {
        throw Error(Errc::InvalidValue, "corpus row/column ranges are invalid");
    }
    // Every random choice is planned here, single-threaded.
    struct Plan {
        std::uint64_t seed;
        GeneratorSpec gen;
        std::optional<ErrorKind> kind;
    };
    Rng rng = make_rng(seed, 0x5851f42d4c957f2dULL);
    std::vector<double> weights;
    for (const auto& [k, w] : business_frequencies()) weights.push_back(w);
    std::discrete_distribution<std::size_t> business(weights.begin(), weights.end());

    std::vector<Plan> plans(spec.documents);
    for (std::size_t i = 0; i < spec.documents; ++i) {
        Plan& p = plans[i];
        p.seed = rng();
        p.gen.rows = spec.min_rows + pick_index(rng, spec.max_rows - spec.min_rows + 1);
        p.gen.cols = spec.min_cols + pick_index(rng, spec.max_cols - spec.min_cols + 1);
        switch (spec.mix) {
            case CorpusMix::clean: break;
            case CorpusMix::stratified: p.kind = all_error_kinds()[i % kErrorKindCount]; break;
            case CorpusMix::business: p.kind = business_frequencies()[business(rng)].first; break;
        }
    }

    std::vector<CorpusItem> items(spec.documents);
    parallel_for(spec.documents, [&](std::size_t i) {
        const Plan& p = plans[i];
        CorpusItem& item = items[i];
        std::string num = std::to_string(i + 1);
        item.id = "doc-" + std::string(num.size() < 4 ? 4 - num.size() : 0, '0') + num;
        item.seed = p.seed;
        item.kind = p.kind;
        item.doc = generate_document(p.seed, p.gen);
        if (p.kind) item.doc = apply(item.doc, inject_error(item.doc, *p.kind, p.seed));
    });
    return items;
}

}  // namespace tabrefine
