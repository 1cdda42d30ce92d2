#include "tabrefine/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tabrefine {

namespace fs = std::filesystem;

double round3(double v) {
    const double r = std::round(v * 1000.0) / 1000.0;
    return r == 0.0 ? 0.0 : r;  // no negative zero
}

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(Errc::ParseError, what); }

const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) parse_error(std::string("missing field '") + name + "'");
    return j.at(name);
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) parse_error(std::string("field '") + what + "' must be a number");
    return j.get<double>();
}

long long integer(const Json& j, const char* what) {
    if (!j.is_number_integer()) parse_error(std::string("field '") + what + "' must be an integer");
    return j.get<long long>();
}

const Json& array(const Json& j, const char* what) {
    if (!j.is_array()) parse_error(std::string("field '") + what + "' must be an array");
    return j;
}

std::vector<BBox> boxes(const Json& j, const char* what) {
    std::vector<BBox> out;
    for (const Json& b : array(j, what)) out.push_back(bbox_from_json(b));
    return out;
}

}  // namespace

Json to_json(const BBox& b) {
    return Json::array({round3(b.x0()), round3(b.y0()), round3(b.x1()), round3(b.y1())});
}

BBox bbox_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) parse_error("bbox must be [x0, y0, x1, y1]");
    return BBox(number(j[0], "bbox"), number(j[1], "bbox"), number(j[2], "bbox"), number(j[3], "bbox"));
}

Json grid_to_json(const TableGrid& grid) {
    Json rows = Json::array(), cols = Json::array();
    for (const BBox& r : grid.rows) rows.push_back(to_json(r));
    for (const BBox& c : grid.columns) cols.push_back(to_json(c));
    return Json{{"rows", rows}, {"columns", cols}, {"header_rows", grid.header_rows}};
}

TableGrid grid_from_json(const Json& j) {
    TableGrid g;
    g.rows = boxes(field(j, "rows"), "rows");
    g.columns = boxes(field(j, "columns"), "columns");
    const long long h = j.contains("header_rows") ? integer(j.at("header_rows"), "header_rows") : 0;
    if (h < 0) parse_error("header_rows must be non-negative");
    g.header_rows = static_cast<std::size_t>(h);
    std::vector<BBox> all = g.rows;
    all.insert(all.end(), g.columns.begin(), g.columns.end());
    if (all.empty()) throw Error(Errc::EmptyGrid, "tsr grid has no rows and no columns");
    g.table_bbox = hull_of(all);
    return g;
}

Json document_to_json(const Document& doc) {
    Json tokens = Json::array();
    for (const Token& t : doc.page.tokens) tokens.push_back({{"id", t.id}, {"text", t.text}, {"bbox", to_json(t.bbox)}});
    Json candidates = Json::array();
    for (const CandidateTable& c : doc.candidates) {
        candidates.push_back({{"bbox", to_json(c.bbox)}, {"confidence", round3(c.confidence)},
                              {"source", std::string(to_string(c.source))}});
    }
    Json j{{"page", {{"width", round3(doc.page.width)}, {"height", round3(doc.page.height)}}},
           {"tokens", tokens},
           {"candidates", candidates}};
    if (doc.grid) j["tsr"] = grid_to_json(*doc.grid);
    if (doc.gt) {
        j["gt"] = {{"bbox", to_json(doc.gt->bbox)}, {"tsr", grid_to_json(doc.gt->grid)}, {"cells", doc.gt->cells.cells}};
    }
    return j;
}

Document document_from_json(const Json& j) {
    try {
        const Json& page_j = field(j, "page");
        Page page{number(field(page_j, "width"), "width"), number(field(page_j, "height"), "height"), {}};
        for (const Json& t : array(field(j, "tokens"), "tokens")) {
            const Json& text = field(t, "text");
            if (!text.is_string()) parse_error("token text must be a string");
            page.tokens.push_back({static_cast<int>(integer(field(t, "id"), "id")), text.get<std::string>(),
                                   bbox_from_json(field(t, "bbox"))});
        }
        std::vector<CandidateTable> candidates;
        if (j.contains("candidates")) {
            for (const Json& c : array(j.at("candidates"), "candidates")) {
                const Json& src = c.contains("source") ? c.at("source") : Json("detector_a");
                if (!src.is_string()) parse_error("candidate source must be a string");
                candidates.push_back({bbox_from_json(field(c, "bbox")), number(field(c, "confidence"), "confidence"),
                                      source_from_string(src.get<std::string>())});
            }
        }
        std::optional<TableGrid> grid;
        if (j.contains("tsr") && !j.at("tsr").is_null()) grid = grid_from_json(j.at("tsr"));
        std::optional<GroundTruth> gt;
        if (j.contains("gt") && !j.at("gt").is_null()) {
            const Json& g = j.at("gt");
            GroundTruth truth;
            truth.bbox = bbox_from_json(field(g, "bbox"));
            truth.grid = grid_from_json(field(g, "tsr"));
            for (const Json& row : array(field(g, "cells"), "cells")) {
                std::vector<std::string> r;
                for (const Json& cell : array(row, "cells row")) {
                    if (!cell.is_string()) parse_error("cells must be strings");
                    r.push_back(cell.get<std::string>());
                }
                truth.cells.cells.push_back(std::move(r));
            }
            truth.cells.header_rows = truth.grid.header_rows;
            gt = std::move(truth);
        }
        return validate_document(std::move(page), std::move(candidates), std::move(grid), std::move(gt));
    } catch (const Json::exception& e) {
        parse_error(e.what());
    }
}

Json params_to_json(const ParamSet& p) {
    Json j{{"alpha", p.alpha},
           {"beta", p.beta},
           {"theta_iou", p.theta_iou},
           {"eps_y_factor", p.eps_y_factor},
           {"eps_x_factor", p.eps_x_factor},
           {"dbscan_min_pts", p.dbscan_min_pts},
           {"chooser_weights", p.chooser_weights},
           {"header_match_max_dist", p.header_match_max_dist},
           {"suspicious_threshold", p.suspicious_threshold},
           {"outlier_weight", p.outlier_weight},
           {"pattern_weight", p.pattern_weight},
           {"misalign_fraction", p.misalign_fraction},
           {"amount_min_count", p.amount_min_count},
           {"token_assign_overlap", p.token_assign_overlap}};
    if (p.dbscan_eps_y) j["dbscan_eps_y"] = *p.dbscan_eps_y;
    if (p.dbscan_eps_x) j["dbscan_eps_x"] = *p.dbscan_eps_x;
    return j;
}

ParamSet params_from_json(const Json& j, const ParamSet& base) {
    if (!j.is_object()) parse_error("params must be an object");
    ParamSet p = base;
    auto real = [&](const char* name, double& dst) {
        if (j.contains(name)) dst = number(j.at(name), name);
    };
    auto whole = [&](const char* name, int& dst) {
        if (j.contains(name)) dst = static_cast<int>(integer(j.at(name), name));
    };
    auto optional_real = [&](const char* name, std::optional<double>& dst) {
        if (!j.contains(name)) return;
        if (j.at(name).is_null()) dst.reset();
        else dst = number(j.at(name), name);
    };
    real("alpha", p.alpha);
    real("beta", p.beta);
    real("theta_iou", p.theta_iou);
    optional_real("dbscan_eps_y", p.dbscan_eps_y);
    optional_real("dbscan_eps_x", p.dbscan_eps_x);
    real("eps_y_factor", p.eps_y_factor);
    real("eps_x_factor", p.eps_x_factor);
    whole("dbscan_min_pts", p.dbscan_min_pts);
    if (j.contains("chooser_weights")) {
        const Json& w = array(j.at("chooser_weights"), "chooser_weights");
        if (w.size() != ParamSet::kChooserWeightCount) parse_error("chooser_weights needs 5 values");
        for (std::size_t i = 0; i < w.size(); ++i) p.chooser_weights[i] = number(w[i], "chooser_weights");
    }
    whole("header_match_max_dist", p.header_match_max_dist);
    real("suspicious_threshold", p.suspicious_threshold);
    real("outlier_weight", p.outlier_weight);
    real("pattern_weight", p.pattern_weight);
    real("misalign_fraction", p.misalign_fraction);
    whole("amount_min_count", p.amount_min_count);
    real("token_assign_overlap", p.token_assign_overlap);
    p.validate();
    return p;
}

Json toggles_to_json(const ModuleToggles& t) {
    return Json{{"ensemble", t.ensemble},
                {"table_chooser", t.table_chooser},
                {"header_refiner", t.header_refiner},
                {"oversegmentation", t.oversegmentation},
                {"overlap_columns", t.overlap_columns},
                {"unfuse_lines", t.unfuse_lines},
                {"remove_extra_lines", t.remove_extra_lines}};
}

ModuleToggles toggles_from_json(const Json& j, const ModuleToggles& base) {
    if (!j.is_object()) parse_error("toggles must be an object");
    ModuleToggles t = base;
    auto flag = [&](const char* name, bool& dst) {
        if (!j.contains(name)) return;
        if (!j.at(name).is_boolean()) parse_error(std::string("toggle '") + name + "' must be true or false");
        dst = j.at(name).get<bool>();
    };
    flag("ensemble", t.ensemble);
    flag("table_chooser", t.table_chooser);
    flag("header_refiner", t.header_refiner);
    flag("oversegmentation", t.oversegmentation);
    flag("overlap_columns", t.overlap_columns);
    flag("unfuse_lines", t.unfuse_lines);
    flag("remove_extra_lines", t.remove_extra_lines);
    return t;
}

Json config_to_json(const RunConfig& c) {
    Json j{{"params", params_to_json(c.params)}, {"toggles", toggles_to_json(c.toggles)}};
    if (c.dictionary) j["dictionary"] = c.dictionary->string();
    if (c.input) j["input"] = c.input->string();
    if (c.output) j["output"] = c.output->string();
    if (c.rng_seed) j["rng_seed"] = *c.rng_seed;
    return j;
}

RunConfig config_from_json(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) parse_error("config must be an object");
    RunConfig c;
    if (j.contains("params")) c.params = params_from_json(j.at("params"));
    if (j.contains("toggles")) c.toggles = toggles_from_json(j.at("toggles"));
    auto path = [&](const char* name, bool must_exist) -> std::optional<fs::path> {
        if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
        if (!j.at(name).is_string()) parse_error(std::string("config '") + name + "' must be a path string");
        fs::path p = j.at(name).get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (must_exist && !fs::exists(p)) throw Error(Errc::IoError, std::string(name) + " not found: " + p.string());
        return p;
    };
    c.dictionary = path("dictionary", true);
    c.input = path("input", true);
    c.output = path("output", false);
    if (j.contains("rng_seed")) {
        const Json& s = j.at("rng_seed");
        if (!s.is_number_unsigned()) parse_error("rng_seed must be a non-negative integer");
        c.rng_seed = s.get<std::uint64_t>();
    }
    return c;
}

RunConfig load_config(const fs::path& path) { return config_from_json(read_json(path), path.parent_path()); }

Json trace_to_json(const std::vector<StageTrace>& trace) {
    Json out = Json::array();
    for (const StageTrace& t : trace) {
        Json s{{"stage", t.stage}, {"enabled", t.enabled}};
        s["input_bbox"] = t.input_bbox ? to_json(*t.input_bbox) : Json(nullptr);
        s["output_bbox"] = t.output_bbox ? to_json(*t.output_bbox) : Json(nullptr);
        if (t.rows_in || t.rows_out || t.cols_in || t.cols_out) {
            s["rows"] = {t.rows_in, t.rows_out};
            s["columns"] = {t.cols_in, t.cols_out};
        }
        if (!t.note.empty()) s["note"] = t.note;
        out.push_back(std::move(s));
    }
    return out;
}

Json result_to_json(const std::string& id, const PipelineResult& r) {
    Json j{{"id", id},
           {"table_bbox", to_json(r.table_bbox)},
           {"chosen", {{"bbox", to_json(r.chosen.bbox)}, {"confidence", round3(r.chosen.confidence)},
                       {"source", std::string(to_string(r.chosen.source))}}},
           {"chooser_fallback", r.chooser_fallback}};
    j["tsr"] = r.grid ? grid_to_json(*r.grid) : Json(nullptr);
    j["cells"] = r.cells ? Json(r.cells->cells) : Json(nullptr);
    j["trace"] = trace_to_json(r.trace);
    return j;
}

Json genome_to_json(const Genome& g) {
    Json j = Json::object();
    const auto& specs = gene_specs();
    for (std::size_t i = 0; i < specs.size() && i < g.genes.size(); ++i) j[specs[i].name] = g.genes[i];
    return j;
}

Json generation_to_json(const GenerationLog& g) {
    return Json{{"generation", g.generation}, {"best", g.best}, {"mean", g.mean}, {"worst", g.worst},
                {"best_genome", genome_to_json(g.best_genome)}};
}

Json evaluation_to_json(const TdReport& td, const TsrReport& tsr) {
    auto ci = [](const MeanCi& m) { return Json{{"mean", m.mean}, {"ci95", m.ci95}}; };
    Json aggregate{{"documents", td.per_document.size()},
                   {"td", {{"purity_pct", td.purity_pct}, {"completeness_pct", td.completeness_pct},
                           {"mean_giou_pct", td.mean_giou_pct}, {"ci95_giou", td.ci95_giou}}},
                   {"tsr", {{"precision", ci(tsr.precision)}, {"recall", ci(tsr.recall)}, {"f1", ci(tsr.f1)}}}};
    Json docs = Json::array();
    for (const DocumentEval& d : td.per_document) {
        Json row{{"id", d.id}};
        if (d.error) {
            row["error"] = *d.error;
        } else {
            row["pure"] = d.pure;
            row["complete"] = d.complete;
            row["giou"] = d.giou;
            row["precision"] = d.grits.precision;
            row["recall"] = d.grits.recall;
            row["f1"] = d.grits.f1;
        }
        docs.push_back(std::move(row));
    }
    return Json{{"aggregate", aggregate}, {"documents", docs}};
}

Json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

std::vector<fs::path> document_files(const fs::path& path) {
    if (!fs::exists(path)) throw Error(Errc::IoError, "not found: " + path.string());
    if (!fs::is_directory(path)) return {path};
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(path)) {
        const fs::path& p = entry.path();
        if (entry.is_regular_file() && p.extension() == ".json" && p.filename() != "manifest.json") out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

NamedDocument read_document(const fs::path& file) {
    try {
        return {file.stem().string(), document_from_json(read_json(file))};
    } catch (const Error& e) {
        throw Error(e.code(), file.string() + ": " + e.what());
    }
}

void write_corpus(const fs::path& dir, const std::vector<CorpusItem>& items, std::uint64_t seed) {
    fs::create_directories(dir);
    Json listing = Json::array();
    for (const CorpusItem& item : items) {
        const std::string file = item.id + ".json";
        write_json(dir / file, document_to_json(item.doc));
        listing.push_back({{"id", item.id}, {"file", file}, {"seed", item.seed},
                           {"kind", item.kind ? Json(std::string(to_string(*item.kind))) : Json(nullptr)}});
    }
    write_json(dir / "manifest.json", Json{{"seed", seed}, {"documents", listing}});
}

}  // namespace tabrefine
