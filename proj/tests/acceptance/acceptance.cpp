// Acceptance checks. Prints one PASS/FAIL line per criterion; lines starting
// with "  #" are details. Exit status is non-zero when any criterion fails.
// Optional arguments select criteria by name (AC1 ... AC7).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../oracles/oracles.hpp"
#include "tabrefine/clustering.hpp"
#include "tabrefine/evaluation.hpp"
#include "tabrefine/ga.hpp"
#include "tabrefine/geometry.hpp"
#include "tabrefine/metrics.hpp"
#include "tabrefine/pipeline.hpp"
#include "tabrefine/synth.hpp"
#include "tabrefine/td_refine.hpp"
#include "tabrefine/tsr_refine.hpp"

using namespace tabrefine;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back("failed: " + what);
        }
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

constexpr std::uint64_t kCorpusSeed = 42;
constexpr std::size_t kCorpusSize = 200;

const std::vector<CorpusItem>& corpus(CorpusMix mix) {
    static std::map<CorpusMix, std::vector<CorpusItem>> cache;
    auto it = cache.find(mix);
    if (it == cache.end()) {
        CorpusSpec spec;
        spec.documents = kCorpusSize;
        spec.mix = mix;
        it = cache.emplace(mix, make_corpus(kCorpusSeed, spec)).first;
    }
    return it->second;
}

std::vector<LabeledDocument> labeled(const std::vector<CorpusItem>& items) {
    std::vector<LabeledDocument> out;
    for (const CorpusItem& i : items) out.push_back({i.id, &i.doc});
    return out;
}

// ---------------------------------------------------------------- AC1

CellMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    static const std::vector<std::string> pool{"", "a", "b", "ab", "ba", "aab", "abc", "c", "bca", "12.5"};
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    CellMatrix m;
    m.cells.assign(rows, std::vector<std::string>(cols));
    for (auto& r : m.cells)
        for (auto& c : r) c = pool[pick(rng)];
    return m;
}

Verdict metric_correctness() {
    Verdict v;
    const auto t0 = Clock::now();

    const BBox a(0, 0, 10, 10);
    v.require(std::abs(giou(a, a) - 1.0) <= 1e-9, "giou identity");
    v.require(std::abs(giou(a, BBox(20, 0, 30, 10)) + 1.0 / 3.0) <= 1e-9, "giou disjoint in hull");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1000.0), side(0.01, 300.0);
    std::size_t bound_violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const double ax = u(rng), ay = u(rng), bx = u(rng), by = u(rng);
        const BBox p(ax, ay, ax + side(rng), ay + side(rng)), q(bx, by, bx + side(rng), by + side(rng));
        const double g = giou(p, q);
        const double ref = oracle::giou({p.x0(), p.y0(), p.x1(), p.y1()}, {q.x0(), q.y0(), q.x1(), q.y1()});
        if (!(g > -1.0 && g <= 1.0) || g > iou(p, q) + 1e-12 || std::abs(g - ref) > 1e-9) ++bound_violations;
    }
    v.require(bound_violations == 0, fmt("giou bounds on random pairs (%zu violations)", bound_violations));

    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::size_t unsound = 0, oracle_mismatch = 0;
    for (int i = 0; i < 1000; ++i) {
        const CellMatrix gt = random_matrix(rng, dim(rng), dim(rng));
        const CellMatrix pred = random_matrix(rng, dim(rng), dim(rng));
        const double h = grits_con(gt, pred).score;
        const double b = grits_con_bruteforce(gt, pred).score;
        if (h > b + 1e-9) ++unsound;
        if (i < 100 && std::abs(b - oracle::grits_score(gt.cells, pred.cells)) > 1e-9) ++oracle_mismatch;
    }
    v.require(unsound == 0, fmt("heuristic above brute force on %zu of 1000", unsound));
    v.require(oracle_mismatch == 0, fmt("brute force disagrees with the reference on %zu", oracle_mismatch));

    std::size_t inexact = 0;
    std::bernoulli_distribution keep(0.6);
    for (int i = 0; i < 1000; ++i) {
        const CellMatrix gt = random_matrix(rng, dim(rng), dim(rng));
        std::vector<std::size_t> rows, cols;
        for (std::size_t r = 0; r < gt.rows(); ++r)
            if (keep(rng)) rows.push_back(r);
        for (std::size_t c = 0; c < gt.cols(); ++c)
            if (keep(rng)) cols.push_back(c);
        if (rows.empty()) rows.push_back(0);
        if (cols.empty()) cols.push_back(gt.cols() - 1);
        CellMatrix pred;
        for (std::size_t r : rows) {
            pred.cells.emplace_back();
            for (std::size_t c : cols) pred.cells.back().push_back(gt.cells[r][c]);
        }
        const GritsScore h = grits_con(gt, pred), b = grits_con_bruteforce(gt, pred);
        const double expected = 2.0 * static_cast<double>(pred.cell_count()) /
                                static_cast<double>(gt.cell_count() + pred.cell_count());
        if (h.f1 != b.f1 || h.score != b.score || std::abs(b.f1 - expected) > 1e-12) ++inexact;
    }
    v.require(inexact == 0, fmt("deletion cases not exact: %zu of 1000", inexact));

    const double secs = seconds_since(t0);
    v.require(secs < 5.0, "runtime under 5 s");
    v.summary = fmt("giou suite, 10000 random pairs, 1000 random + 1000 deletion grids in %.2f s", secs);
    return v;
}

// ---------------------------------------------------------------- AC2

Verdict baseline_identity() {
    Verdict v;
    PipelineConfig cfg;
    cfg.toggles = ModuleToggles::all_off();
    std::size_t identical = 0;
    const auto& items = corpus(CorpusMix::stratified);
    for (const CorpusItem& item : items) {
        const PipelineResult r = run_pipeline(item.doc, cfg);
        const CandidateTable& best = most_confident(item.doc.candidates);
        if (r.chosen == best && r.table_bbox == best.bbox && r.grid == item.doc.grid) ++identical;
    }
    v.require(identical == items.size(), "every document equals its baseline");
    v.summary = fmt("%zu/%zu documents bit-identical to the most confident candidate and input grid", identical,
                    items.size());
    return v;
}

// ---------------------------------------------------------------- AC3

Verdict repair_efficacy() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto& items = corpus(CorpusMix::stratified);
    const auto docs = labeled(items);

    PipelineConfig base_cfg;
    base_cfg.toggles = ModuleToggles::all_off();
    const auto base = evaluate_all(docs, base_cfg);
    const PipelineConfig full_cfg;
    const auto full = evaluate_all(docs, full_cfg);

    struct Acc {
        double base = 0.0, full = 0.0;
        std::size_t n = 0;
    };
    std::map<ErrorKind, Acc> by_kind;
    std::size_t below_total = 0, below_ok = 0, seg_total = 0, seg_ok = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        Acc& a = by_kind[*items[i].kind];
        a.base += base[i].error ? 0.0 : base[i].grits.f1;
        a.full += full[i].error ? 0.0 : full[i].grits.f1;
        ++a.n;
        if (*items[i].kind == ErrorKind::noise_below) {
            ++below_total;
            const PipelineResult r = run_pipeline(items[i].doc, full_cfg);
            const double h = page_scale(items[i].doc.page.tokens).median_height;
            if (std::abs(r.table_bbox.y1() - items[i].doc.gt->bbox.y1()) <= h) ++below_ok;
        }
        if (*items[i].kind == ErrorKind::segmentation_error) {
            ++seg_total;
            const PipelineResult r = run_pipeline(items[i].doc, full_cfg);
            bool clean = true;
            for (std::size_t p = 0; r.grid && p < r.grid->columns.size(); ++p)
                for (std::size_t q = p + 1; q < r.grid->columns.size(); ++q)
                    if (iou(r.grid->columns[p], r.grid->columns[q]) > 0.34) clean = false;
            seg_ok += clean;
        }
    }
    std::size_t improved = 0;
    for (const auto& [kind, a] : by_kind) {
        const double b = a.base / static_cast<double>(a.n), f = a.full / static_cast<double>(a.n);
        const bool ok = f > b;
        improved += ok;
        v.details.push_back(fmt("%-20s n=%2zu baseline %.4f full %.4f %s", std::string(to_string(kind)).c_str(), a.n,
                                b, f, ok ? "improved" : "NOT improved"));
        if (!ok) v.pass = false;
    }
    const double below_rate = below_total ? static_cast<double>(below_ok) / static_cast<double>(below_total) : 0.0;
    v.require(by_kind.size() == kErrorKindCount, "every error kind present");
    v.require(below_rate >= 0.9, "noise_below bottom edge within one median token height in >= 90%");
    v.require(seg_ok == seg_total, "no overlapping column pair left after segmentation errors");
    const double secs = seconds_since(t0);
    v.require(secs < 60.0, "runtime under 60 s");
    v.summary = fmt("%zu/%zu kinds improved; noise_below bottom within tolerance %zu/%zu (%.1f%%); "
                    "segmentation outputs clean %zu/%zu; %.2f s",
                    improved, by_kind.size(), below_ok, below_total, 100.0 * below_rate, seg_ok, seg_total, secs);
    return v;
}

// ---------------------------------------------------------------- AC4

Verdict ablation_direction() {
    Verdict v;
    const auto& items = corpus(CorpusMix::business);
    const auto rows = run_ablation(labeled(items), ParamSet{});
    std::map<std::string, double> f1;
    for (const AblationRow& r : rows) f1[r.name] = r.tsr.f1.mean;
    const double b = f1["baseline"], wtd = f1["without_td"], wtsr = f1["without_tsr"], full = f1["full"];
    v.require(b < wtd, "baseline < without_td");
    v.require(b < wtsr, "baseline < without_tsr");
    v.require(wtd < full, "without_td < full");
    v.require(wtsr < full, "without_tsr < full");
    v.summary = fmt("mean F1 baseline %.4f, without_td %.4f, without_tsr %.4f, full %.4f", b, wtd, wtsr, full);
    return v;
}

// ---------------------------------------------------------------- AC5

TableGrid tsr_chain(const TableGrid& g, const std::vector<Token>& tokens, const ParamSet& p) {
    return remove_extra_lines(unfuse_lines(resolve_overlapping_columns(g, tokens, p), tokens, p), tokens, p);
}

Verdict refinement_contracts() {
    Verdict v;
    const ParamSet p;
    const HeaderDictionary& dict = default_dictionary();
    std::size_t docs = 0, boxes = 0, broken = 0;
    for (CorpusMix mix : {CorpusMix::stratified, CorpusMix::business}) {
        for (const CorpusItem& item : corpus(mix)) {
            ++docs;
            const Page& page = item.doc.page;
            std::vector<BBox> inputs;
            for (const CandidateTable& c : item.doc.candidates) inputs.push_back(c.bbox);
            inputs.push_back(item.doc.gt->bbox);
            for (const BBox& b : inputs) {
                ++boxes;
                const BBox h = refine_header(b, page, dict, p);
                const BBox o = prune_oversegmentation(b, page, p);
                bool ok = b.contains(h) && refine_header(h, page, dict, p) == h;
                ok = ok && b.contains(o) && prune_oversegmentation(o, page, p) == o;
                if (!ok) {
                    ++broken;
                    v.details.push_back(item.id + ": detection refiner contract broken");
                }
            }
            if (item.doc.grid) {
                const TableGrid once = tsr_chain(*item.doc.grid, page.tokens, p);
                const TableGrid twice = tsr_chain(once, page.tokens, p);
                const bool ok = once == twice && item.doc.grid->table_bbox.contains(once.table_bbox) &&
                                once.rows.size() >= once.header_rows;
                if (!ok) {
                    ++broken;
                    v.details.push_back(item.id + ": structure chain not idempotent");
                }
            }
            const PipelineResult r = run_pipeline(item.doc, PipelineConfig{});
            if (!r.chosen.bbox.contains(r.table_bbox)) {
                ++broken;
                v.details.push_back(item.id + ": refined box leaves the chosen candidate");
            }
        }
    }
    v.require(broken == 0, "all contracts hold");
    v.summary = fmt("%zu documents, %zu boxes: contraction and idempotence violations %zu", docs, boxes, broken);
    return v;
}

// ---------------------------------------------------------------- AC6

ParamSet detuned_params() {
    ParamSet p;
    p.alpha = 0.99;
    p.theta_iou = 0.95;
    p.amount_min_count = 5;
    p.suspicious_threshold = 3.0;
    p.beta = 10.0;
    p.chooser_weights = {2.0, 0.0, 0.0, 0.0, 0.0};
    return p;
}

std::vector<Document> tuning_set() {
    CorpusSpec spec;
    spec.documents = 60;
    spec.mix = CorpusMix::business;
    std::vector<Document> out;
    for (auto& item : make_corpus(7, spec)) out.push_back(std::move(item.doc));
    return out;
}

bool non_decreasing(const EvolveResult& r) {
    for (std::size_t i = 1; i < r.log.size(); ++i)
        if (r.log[i].best < r.log[i - 1].best) return false;
    return true;
}

Verdict ga_guarantees() {
    Verdict v;
    const auto t0 = Clock::now();
    const std::vector<Document> data = tuning_set();

    GaConfig small;
    small.population_size = 10;
    small.generations = 4;
    small.rng_seed = 123;
    const std::vector<Document> subset(data.begin(), data.begin() + 20);
    const EvolveResult r1 = evolve(small, subset);
    const EvolveResult r2 = evolve(small, subset);
    bool identical = r1.best == r2.best && r1.best_fitness == r2.best_fitness && r1.log.size() == r2.log.size();
    for (std::size_t i = 0; identical && i < r1.log.size(); ++i) {
        identical = r1.log[i].best == r2.log[i].best && r1.log[i].mean == r2.log[i].mean &&
                    r1.log[i].worst == r2.log[i].worst && r1.log[i].best_genome == r2.log[i].best_genome;
    }
    v.require(identical, "two seeded runs are bit-identical");

    GaConfig cfg;
    cfg.generations = 10;
    cfg.rng_seed = 1;
    const auto initial = population_around(encode(detuned_params()), cfg.population_size, 0.05, 99);
    const EvolveResult tuned = evolve(cfg, data, initial);
    const double start = tuned.log.front().best, end = tuned.log.back().best;
    v.require(end >= start + 0.05, "final best >= initial best + 0.05");
    v.require(non_decreasing(r1) && non_decreasing(r2) && non_decreasing(tuned), "best fitness non-decreasing");
    v.require(tuned.log.size() == 10, "10 generations");
    const double secs = seconds_since(t0);
    v.require(secs < 600.0, "runtime under 10 min");
    std::string trail;
    for (const GenerationLog& g : tuned.log) trail += fmt(" %.4f", g.best);
    v.details.push_back("best per generation:" + trail);
    v.summary = fmt("detuned task %.4f -> %.4f (+%.4f) in %zu generations; deterministic %s; %.1f s", start, end,
                    end - start, tuned.log.size(), identical ? "yes" : "no", secs);
    return v;
}

// ---------------------------------------------------------------- AC7

Verdict throughput() {
    Verdict v;
    const auto& items = corpus(CorpusMix::business);
    std::vector<double> ms;
    const PipelineConfig cfg;
    for (const CorpusItem& item : items) {
        const auto t0 = Clock::now();
        const PipelineResult r = run_pipeline(item.doc, cfg);
        ms.push_back(1000.0 * seconds_since(t0));
        if (!r.cells) v.require(false, item.id + " produced no cells");
    }
    std::sort(ms.begin(), ms.end());
    const double median = ms[ms.size() / 2];
    v.require(median < 100.0, "median under 100 ms");
    v.summary = fmt("median %.3f ms, max %.3f ms per document over %zu documents (one thread)", median, ms.back(),
                    ms.size());
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::pair<std::string, std::function<Verdict()>>>> criteria{
        {"AC1", {"metric correctness", metric_correctness}},
        {"AC2", {"baseline identity", baseline_identity}},
        {"AC3", {"repair efficacy per error kind", repair_efficacy}},
        {"AC4", {"ablation direction", ablation_direction}},
        {"AC5", {"refinement contracts", refinement_contracts}},
        {"AC6", {"GA guarantees", ga_guarantees}},
        {"AC7", {"throughput", throughput}},
    };
    std::set<std::string> selected(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& [id, entry] : criteria) {
        if (!selected.empty() && !selected.contains(id)) continue;
        Verdict v;
        try {
            v = entry.second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.summary = std::string("exception: ") + e.what();
        }
        for (const std::string& d : v.details) std::printf("  # %s\n", d.c_str());
        std::printf("%s %s %s: %s\n", v.pass ? "PASS" : "FAIL", id.c_str(), entry.first.c_str(), v.summary.c_str());
        std::fflush(stdout);
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
