// tabrefine: refine, evaluate, tune, synthesize, ablate.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "tabrefine/evaluation.hpp"
#include "tabrefine/ga.hpp"
#include "tabrefine/io.hpp"
#include "tabrefine/parallel.hpp"
#include "tabrefine/synth.hpp"

namespace fs = std::filesystem;
using namespace tabrefine;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::InvalidGeometry:
        case Errc::DuplicateTokenId:
        case Errc::EmptyTokenText:
        case Errc::InvalidValue:
        case Errc::ParseError:
        case Errc::IoError:
        case Errc::RaggedMatrix:
            return kValidation;
        default:
            return kRuntime;
    }
}

// Flags shared by every subcommand that runs the pipeline.
struct CommonOptions {
    std::string config;
    std::string params;
    std::string dictionary;
    std::string input;
    std::string output;
    std::vector<std::string> disable;
    std::vector<std::string> enable;
    std::size_t workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_io = true) {
    cmd->add_option("-c,--config", o.config, "run configuration file (JSON)");
    cmd->add_option("-p,--params", o.params, "parameter file (JSON), overrides the config");
    cmd->add_option("-d,--dictionary", o.dictionary, "header dictionary file");
    cmd->add_option("--disable", o.disable, "stages to switch off (or 'all', 'td', 'tsr')");
    cmd->add_option("--enable", o.enable, "stages to switch on after --disable");
    cmd->add_option("-j,--workers", o.workers, "worker threads (0 = all cores)");
    if (with_io) {
        cmd->add_option("-i,--input", o.input, "document file or directory");
        cmd->add_option("-o,--output", o.output, "output file or directory");
    }
}

void set_stage(ModuleToggles& t, const std::string& name, bool value) {
    static const std::map<std::string, bool ModuleToggles::*> stages{
        {"ensemble", &ModuleToggles::ensemble},
        {"table_chooser", &ModuleToggles::table_chooser},
        {"header_refiner", &ModuleToggles::header_refiner},
        {"oversegmentation", &ModuleToggles::oversegmentation},
        {"overlap_columns", &ModuleToggles::overlap_columns},
        {"unfuse_lines", &ModuleToggles::unfuse_lines},
        {"remove_extra_lines", &ModuleToggles::remove_extra_lines}};
    if (name == "all" || name == "td" || name == "tsr") {
        for (const auto& [stage, member] : stages) {
            const bool td = stage == "ensemble" || stage == "table_chooser" || stage == "header_refiner" ||
                            stage == "oversegmentation";
            if (name == "all" || (name == "td") == td) t.*member = value;
        }
        return;
    }
    const auto it = stages.find(name);
    if (it == stages.end()) throw Error(Errc::InvalidValue, "unknown stage '" + name + "'");
    t.*(it->second) = value;
}

struct Resolved {
    RunConfig config;
    std::optional<HeaderDictionary> dictionary;

    PipelineConfig pipeline() const {
        return {config.params, config.toggles, dictionary ? &*dictionary : nullptr};
    }
};

// Config file first, then flags on top.
Resolved resolve(const CommonOptions& o) {
    Resolved r;
    if (!o.config.empty()) r.config = load_config(o.config);
    if (!o.params.empty()) {
        const Json j = read_json(o.params);
        r.config.params = params_from_json(j.contains("params") ? j.at("params") : j, r.config.params);
    }
    if (!o.dictionary.empty()) r.config.dictionary = fs::path(o.dictionary);
    if (!o.input.empty()) r.config.input = fs::path(o.input);
    if (!o.output.empty()) r.config.output = fs::path(o.output);
    for (const auto& s : o.disable) set_stage(r.config.toggles, s, false);
    for (const auto& s : o.enable) set_stage(r.config.toggles, s, true);
    if (r.config.dictionary) r.dictionary = load_dictionary(*r.config.dictionary);
    return r;
}

fs::path require_input(const Resolved& r) {
    if (!r.config.input) throw Error(Errc::InvalidValue, "no input given (--input or config 'input')");
    return *r.config.input;
}

struct Loaded {
    std::vector<NamedDocument> docs;
    std::vector<std::pair<std::string, std::string>> failures;  // id, message
    int worst_exit = kOk;
};

Loaded load_documents(const fs::path& input) {
    Loaded out;
    for (const fs::path& f : document_files(input)) {
        try {
            out.docs.push_back(read_document(f));
        } catch (const Error& e) {
            out.failures.emplace_back(f.stem().string(), e.what());
            out.worst_exit = std::max(out.worst_exit, exit_code_for(e.code()));
            std::cerr << "error: " << e.what() << '\n';
        }
    }
    return out;
}

std::vector<LabeledDocument> labeled(const std::vector<NamedDocument>& docs) {
    std::vector<LabeledDocument> out;
    for (const auto& d : docs) out.push_back({d.id, &d.doc});
    return out;
}

int cmd_refine(const CommonOptions& o) {
    const Resolved r = resolve(o);
    const fs::path input = require_input(r);
    if (!r.config.output) throw Error(Errc::InvalidValue, "refine needs --output");
    const fs::path output = *r.config.output;
    Loaded loaded = load_documents(input);
    const PipelineConfig cfg = r.pipeline();

    std::vector<Json> results(loaded.docs.size());
    std::vector<int> codes(loaded.docs.size(), kOk);
    parallel_for(loaded.docs.size(), [&](std::size_t i) {
        const NamedDocument& d = loaded.docs[i];
        try {
            results[i] = result_to_json(d.id, run_pipeline(d.doc, cfg));
        } catch (const Error& e) {
            results[i] = Json{{"id", d.id}, {"error", e.what()}};
            codes[i] = exit_code_for(e.code());
        }
    }, o.workers);

    int exit_code = loaded.worst_exit;
    for (const auto& [id, msg] : loaded.failures) results.push_back(Json{{"id", id}, {"error", msg}});
    for (int c : codes) exit_code = std::max(exit_code, c);

    const bool single = !fs::is_directory(input) && output.extension() == ".json";
    if (single && results.size() == 1) {
        write_json(output, results.front());
    } else {
        fs::create_directories(output);
        for (const Json& res : results) write_json(output / (res.at("id").get<std::string>() + ".json"), res);
    }
    std::cout << "refined " << loaded.docs.size() << " document(s) into " << output.string() << '\n';
    return exit_code;
}

// Prediction files written by `refine`, keyed by id.
std::map<std::string, Json> load_predictions(const fs::path& dir) {
    std::map<std::string, Json> out;
    for (const fs::path& f : document_files(dir)) {
        Json j = read_json(f);
        const std::string id = j.contains("id") && j.at("id").is_string() ? j.at("id").get<std::string>() : f.stem().string();
        out[id] = std::move(j);
    }
    return out;
}

DocumentEval eval_prediction(const NamedDocument& d, const Json& pred) {
    DocumentEval e;
    e.id = d.id;
    if (pred.contains("error")) {
        e.error = pred.at("error").is_string() ? pred.at("error").get<std::string>() : "failed";
        return e;
    }
    PipelineResult r;
    r.table_bbox = bbox_from_json(pred.at("table_bbox"));
    if (pred.contains("tsr") && !pred.at("tsr").is_null()) r.grid = grid_from_json(pred.at("tsr"));
    if (pred.contains("cells") && !pred.at("cells").is_null()) {
        CellMatrix m;
        for (const Json& row : pred.at("cells")) m.cells.push_back(row.get<std::vector<std::string>>());
        r.cells = std::move(m);
    }
    return evaluate_result(d.id, d.doc, r);
}

void print_report(const TdReport& td, const TsrReport& tsr) {
    std::cout << std::fixed << std::setprecision(2);
    std::cout << "documents      " << td.per_document.size() << '\n'
              << "purity %       " << td.purity_pct << '\n'
              << "completeness % " << td.completeness_pct << '\n'
              << "mean GIoU %    " << td.mean_giou_pct << " +/- " << td.ci95_giou << '\n'
              << std::setprecision(4)
              << "GRITS-CON P    " << tsr.precision.mean << " +/- " << tsr.precision.ci95 << '\n'
              << "GRITS-CON R    " << tsr.recall.mean << " +/- " << tsr.recall.ci95 << '\n'
              << "GRITS-CON F1   " << tsr.f1.mean << " +/- " << tsr.f1.ci95 << '\n';
}

int cmd_eval(const CommonOptions& o, const std::string& predictions) {
    const Resolved r = resolve(o);
    Loaded loaded = load_documents(require_input(r));
    std::vector<DocumentEval> evals;
    if (predictions.empty()) {
        const auto docs = labeled(loaded.docs);
        evals = evaluate_all(docs, r.pipeline(), o.workers);
    } else {
        const auto preds = load_predictions(predictions);
        for (const NamedDocument& d : loaded.docs) {
            const auto it = preds.find(d.id);
            try {
                if (it == preds.end()) throw Error(Errc::IoError, "no prediction for " + d.id);
                evals.push_back(eval_prediction(d, it->second));
            } catch (const std::exception& e) {
                DocumentEval fail;
                fail.id = d.id;
                fail.error = e.what();
                evals.push_back(std::move(fail));
            }
        }
    }
    for (const auto& [id, msg] : loaded.failures) {
        DocumentEval fail;
        fail.id = id;
        fail.error = msg;
        evals.push_back(std::move(fail));
    }
    const TdReport td = summarize_td(evals);
    const TsrReport tsr = summarize_tsr(evals);
    print_report(td, tsr);
    if (r.config.output) write_json(*r.config.output, evaluation_to_json(td, tsr));
    return loaded.worst_exit;
}

int cmd_tune(const CommonOptions& o, std::uint64_t seed, GaConfig ga, const std::string& log_path) {
    const Resolved r = resolve(o);
    Loaded loaded = load_documents(require_input(r));
    std::vector<Document> dataset;
    for (const auto& d : loaded.docs)
        if (d.doc.gt) dataset.push_back(d.doc);
    ga.rng_seed = seed;
    ga.workers = o.workers;

    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw Error(Errc::IoError, "cannot write " + log_path);
    }
    EvolveOptions opts;
    opts.toggles = r.config.toggles;
    opts.dictionary = r.dictionary ? &*r.dictionary : nullptr;
    opts.on_generation = [&](const GenerationLog& g) {
        std::cout << "gen " << g.generation << "  best " << std::fixed << std::setprecision(4) << g.best
                  << "  mean " << g.mean << "  worst " << g.worst << std::endl;
        if (log) log << generation_to_json(g).dump() << '\n' << std::flush;
    };
    // The configured parameters seed the population.
    std::vector<Genome> initial{encode(r.config.params)};
    const EvolveResult best = evolve(ga, dataset, initial, opts);
    const ParamSet tuned = decode(best.best);
    const Json out{{"params", params_to_json(tuned)}, {"fitness", best.best_fitness}, {"seed", seed}};
    if (r.config.output) {
        write_json(*r.config.output, out);
    } else {
        std::cout << out.dump(2) << '\n';
    }
    return loaded.worst_exit;
}

int cmd_synth(std::uint64_t seed, const std::string& output, CorpusSpec spec, const std::string& mix) {
    if (mix == "clean") spec.mix = CorpusMix::clean;
    else if (mix == "stratified") spec.mix = CorpusMix::stratified;
    else if (mix == "business") spec.mix = CorpusMix::business;
    else throw Error(Errc::InvalidValue, "unknown mix '" + mix + "'");
    const auto items = make_corpus(seed, spec);
    write_corpus(output, items, seed);
    std::cout << "wrote " << items.size() << " documents to " << output << '\n';
    return kOk;
}

int cmd_ablate(const CommonOptions& o) {
    const Resolved r = resolve(o);
    Loaded loaded = load_documents(require_input(r));
    const auto docs = labeled(loaded.docs);
    const auto rows = run_ablation(docs, r.config.params, r.dictionary ? &*r.dictionary : nullptr, o.workers);
    std::cout << std::left << std::setw(14) << "config" << std::right << std::setw(10) << "F1" << std::setw(10)
              << "+/-" << std::setw(12) << "GIoU %" << std::setw(10) << "purity" << std::setw(10) << "compl."
              << '\n';
    Json out = Json::array();
    for (const AblationRow& row : rows) {
        std::cout << std::left << std::setw(14) << row.name << std::right << std::fixed << std::setprecision(4)
                  << std::setw(10) << row.tsr.f1.mean << std::setw(10) << row.tsr.f1.ci95 << std::setprecision(2)
                  << std::setw(12) << row.td.mean_giou_pct << std::setw(10) << row.td.purity_pct << std::setw(10)
                  << row.td.completeness_pct << '\n';
        Json entry = evaluation_to_json(row.td, row.tsr).at("aggregate");
        entry["config"] = row.name;
        entry["toggles"] = toggles_to_json(row.toggles);
        out.push_back(std::move(entry));
    }
    if (r.config.output) write_json(*r.config.output, out);
    return loaded.worst_exit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Table detection and structure refinement toolkit"};
    app.require_subcommand(1);

    CommonOptions refine_o, eval_o, tune_o, ablate_o;
    auto* refine = app.add_subcommand("refine", "refine predictions and write grids, cells and stage traces");
    add_common(refine, refine_o);

    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    add_common(eval, eval_o);
    std::string predictions;
    eval->add_option("--predictions", predictions, "directory written by 'refine'; without it the pipeline runs");

    auto* tune = app.add_subcommand("tune", "search parameters with the genetic algorithm");
    add_common(tune, tune_o);
    std::uint64_t tune_seed = 0;
    GaConfig ga;
    std::string log_path;
    tune->add_option("--seed", tune_seed, "random seed")->required();
    tune->add_option("--population", ga.population_size, "population size");
    tune->add_option("--generations", ga.generations, "generations");
    tune->add_option("--elite", ga.elite_count, "elite count");
    tune->add_option("--crossover-rate", ga.crossover_rate, "crossover rate");
    tune->add_option("--mutation-rate", ga.mutation_rate, "per-gene mutation rate");
    tune->add_option("--mutation-sigma", ga.mutation_sigma, "mutation sigma as a fraction of the gene range");
    tune->add_option("--log", log_path, "per-generation log (JSON lines)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    std::uint64_t synth_seed = 0;
    std::string synth_out, mix = "stratified";
    CorpusSpec corpus;
    synth->add_option("--seed", synth_seed, "random seed")->required();
    synth->add_option("-o,--output", synth_out, "output directory")->required();
    synth->add_option("-n,--count", corpus.documents, "number of documents");
    synth->add_option("--mix", mix, "clean, stratified or business")->check(CLI::IsMember({"clean", "stratified", "business"}));
    synth->add_option("--min-rows", corpus.min_rows, "fewest body rows");
    synth->add_option("--max-rows", corpus.max_rows, "most body rows");
    synth->add_option("--min-cols", corpus.min_cols, "fewest columns");
    synth->add_option("--max-cols", corpus.max_cols, "most columns (up to 7)");

    auto* ablate = app.add_subcommand("ablate", "compare baseline, without-TD, without-TSR and full pipelines");
    add_common(ablate, ablate_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*refine) return cmd_refine(refine_o);
        if (*eval) return cmd_eval(eval_o, predictions);
        if (*tune) return cmd_tune(tune_o, tune_seed, ga, log_path);
        if (*synth) return cmd_synth(synth_seed, synth_out, corpus, mix);
        if (*ablate) return cmd_ablate(ablate_o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
