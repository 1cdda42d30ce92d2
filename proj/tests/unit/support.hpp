#pragma once

#include <string>
#include <vector>

#include "tabrefine/model.hpp"

namespace testing_support {

using tabrefine::BBox;
using tabrefine::Page;
using tabrefine::TableGrid;
using tabrefine::Token;

// Monospace-ish token: 9 px per character, 16 px tall.
inline Token word(int id, const std::string& text, double x, double y, double char_w = 9.0, double h = 16.0) {
    return Token{id, text, BBox(x, y, x + char_w * static_cast<double>(text.size()), y + h)};
}

inline Token box_token(int id, const std::string& text, double x0, double y0, double x1, double y1) {
    return Token{id, text, BBox(x0, y0, x1, y1)};
}

inline Page page_of(std::vector<Token> tokens, double w = 1000.0, double h = 1400.0) {
    return Page{w, h, std::move(tokens)};
}

inline TableGrid grid_of(std::vector<BBox> rows, std::vector<BBox> cols, std::size_t header_rows = 0) {
    std::vector<BBox> all = rows;
    all.insert(all.end(), cols.begin(), cols.end());
    TableGrid g;
    g.table_bbox = tabrefine::hull_of(all);
    g.rows = std::move(rows);
    g.columns = std::move(cols);
    g.header_rows = header_rows;
    return g;
}

// Invoice-like layout used by the detection tests. Columns sit at x = 100,
// 400, 600 and 800; the header line is at y = 300 and five body rows follow
// at a 30 px pitch (last row bottom 466). Address lines at y = 100 and 130,
// a three-word footer at y = 520 placed between the columns, and a small
// summary block at y = 600 and 630.
struct InvoiceLayout {
    Page page;
    double header_top = 300.0;
    double last_row_bottom = 466.0;
    BBox table{90.0, 290.0, 900.0, 470.0};
    BBox with_address{90.0, 90.0, 900.0, 470.0};
    BBox with_footer{90.0, 290.0, 900.0, 545.0};
    BBox summary{90.0, 590.0, 700.0, 650.0};
};

inline InvoiceLayout invoice_layout() {
    InvoiceLayout L;
    std::vector<Token> t;
    int id = 1;
    t.push_back(word(id++, "ACME", 100, 100));
    t.push_back(word(id++, "Trading", 400, 100));
    t.push_back(word(id++, "Harbour", 100, 130));
    t.push_back(word(id++, "Road", 400, 130));

    t.push_back(word(id++, "Description", 100, 300));
    t.push_back(word(id++, "Qty", 400, 300));
    t.push_back(word(id++, "Price", 600, 300));
    t.push_back(word(id++, "Amount", 800, 300));
    const char* names[] = {"Widget", "Bolt", "Gear", "Spring", "Nut"};
    const char* qty[] = {"3", "12", "1", "40", "7"};
    const char* price[] = {"12.50", "0.80", "99.00", "0.25", "1.10"};
    const char* amount[] = {"37.50", "9.60", "99.00", "10.00", "7.70"};
    for (int r = 0; r < 5; ++r) {
        const double y = 330.0 + 30.0 * r;
        t.push_back(word(id++, names[r], 100, y));
        t.push_back(word(id++, qty[r], 400, y));
        t.push_back(word(id++, price[r], 600, y));
        t.push_back(word(id++, amount[r], 800, y));
    }
    // Centers at 270, 510 and 712: farther than the x radius from every column.
    t.push_back(word(id++, "Thank", 270 - 22.5, 520));
    t.push_back(word(id++, "you", 510 - 13.5, 520));
    t.push_back(word(id++, "business", 712 - 36, 520));

    t.push_back(word(id++, "Summary", 100, 600));
    t.push_back(word(id++, "19.00", 600, 600));
    t.push_back(word(id++, "Shipping", 100, 630));
    t.push_back(word(id++, "5.00", 600, 630));
    L.page = page_of(std::move(t));
    return L;
}

inline tabrefine::ParamSet layout_params() {
    tabrefine::ParamSet p;
    p.dbscan_eps_x = 60.0;
    p.dbscan_eps_y = 8.0;
    return p;
}

}  // namespace testing_support
