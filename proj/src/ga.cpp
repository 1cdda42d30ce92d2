#include "tabrefine/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tabrefine/metrics.hpp"
#include "tabrefine/parallel.hpp"
#include "tabrefine/pipeline.hpp"

namespace tabrefine {

const std::vector<GeneSpec>& gene_specs() {
    static const std::vector<GeneSpec> specs{
        {"alpha", 0.0, 1.0, false},
        {"beta", 0.5, 10.0, false},
        {"theta_iou", 0.05, 0.95, false},
        {"eps_y_factor", 0.1, 2.0, false},
        {"eps_x_factor", 0.25, 6.0, false},
        {"dbscan_min_pts", 1.0, 5.0, true},
        {"w_confidence", 0.0, 2.0, false},
        {"w_area", 0.0, 2.0, false},
        {"w_width", 0.0, 2.0, false},
        {"w_height", 0.0, 2.0, false},
        {"w_text", 0.0, 2.0, false},
        {"header_match_max_dist", 0.0, 3.0, true},
        {"suspicious_threshold", 0.0, 3.0, false},
        {"outlier_weight", 0.0, 2.0, false},
        {"pattern_weight", 0.0, 2.0, false},
        {"misalign_fraction", 0.0, 1.0, false},
        {"amount_min_count", 2.0, 5.0, true},
        {"token_assign_overlap", 0.05, 1.0, false},
    };
    return specs;
}

Genome encode(const ParamSet& p) {
    const auto& w = p.chooser_weights;
    return Genome{{p.alpha, p.beta, p.theta_iou, p.eps_y_factor, p.eps_x_factor,
                   static_cast<double>(p.dbscan_min_pts), w[0], w[1], w[2], w[3], w[4],
                   static_cast<double>(p.header_match_max_dist), p.suspicious_threshold, p.outlier_weight,
                   p.pattern_weight, p.misalign_fraction, static_cast<double>(p.amount_min_count),
                   p.token_assign_overlap}};
}

ParamSet decode(const Genome& genome) {
    if (genome.genes.size() != gene_specs().size()) {
        throw Error(Errc::InvalidValue, "genome has " + std::to_string(genome.genes.size()) + " genes, expected " +
                                            std::to_string(gene_specs().size()));
    }
    const Genome g = clamp_to_bounds(genome);
    const auto& v = g.genes;
    auto as_int = [](double x) { return static_cast<int>(std::lround(x)); };
    ParamSet p;
    p.alpha = v[0];
    p.beta = v[1];
    p.theta_iou = v[2];
    p.eps_y_factor = v[3];
    p.eps_x_factor = v[4];
    p.dbscan_min_pts = as_int(v[5]);
    for (std::size_t i = 0; i < ParamSet::kChooserWeightCount; ++i) p.chooser_weights[i] = v[6 + i];
    p.header_match_max_dist = as_int(v[11]);
    p.suspicious_threshold = v[12];
    p.outlier_weight = v[13];
    p.pattern_weight = v[14];
    p.misalign_fraction = v[15];
    p.amount_min_count = as_int(v[16]);
    p.token_assign_overlap = v[17];
    p.validate();
    return p;
}

Genome clamp_to_bounds(Genome genome) {
    const auto& specs = gene_specs();
    for (std::size_t i = 0; i < genome.genes.size() && i < specs.size(); ++i) {
        double& x = genome.genes[i];
        if (!std::isfinite(x)) x = specs[i].lo;
        x = std::clamp(x, specs[i].lo, specs[i].hi);
    }
    return genome;
}

bool within_bounds(const Genome& genome) {
    const auto& specs = gene_specs();
    if (genome.genes.size() != specs.size()) return false;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!(genome.genes[i] >= specs[i].lo && genome.genes[i] <= specs[i].hi)) return false;
    }
    return true;
}

std::vector<Genome> population_around(const Genome& center, std::size_t size, double sigma, std::uint64_t seed) {
    const auto& specs = gene_specs();
    if (center.genes.size() != specs.size()) throw Error(Errc::InvalidValue, "genome has the wrong length");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Genome> out;
    if (size == 0) return out;
    out.push_back(clamp_to_bounds(center));
    while (out.size() < size) {
        Genome g = center;
        for (std::size_t i = 0; i < specs.size(); ++i) g.genes[i] += normal(rng) * sigma * (specs[i].hi - specs[i].lo);
        out.push_back(clamp_to_bounds(std::move(g)));
    }
    return out;
}

void GaConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidValue, "GA config: " + what); };
    if (population_size < 1) fail("population_size must be positive");
    if (generations < 1) fail("generations must be positive");
    if (elite_count >= population_size) fail("elite_count must be below population_size");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("crossover_rate must be in [0,1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("mutation_rate must be in [0,1]");
    if (!(mutation_sigma >= 0.0)) fail("mutation_sigma must be non-negative");
    if (tournament_size < 1) fail("tournament_size must be positive");
}

namespace {

double document_f1(const PipelineConfig& cfg, const Document& doc) {
    if (!doc.gt) return 0.0;
    try {
        const PipelineResult r = run_pipeline(doc, cfg);
        if (!r.cells) return 0.0;
        return grits_con(doc.gt->cells, *r.cells).f1;
    } catch (const Error&) {
        return 0.0;
    }
}

// Mean F1 per genome. The (genome, document) pairs run concurrently; sums are
// folded in document order so the result does not depend on scheduling.
std::vector<double> evaluate(std::span<const Genome> genomes, std::span<const Document> dataset,
                             const ModuleToggles& toggles, const HeaderDictionary* dict, std::size_t workers) {
    std::vector<PipelineConfig> configs;
    for (const Genome& g : genomes) configs.push_back({decode(g), toggles, dict});
    const std::size_t n = dataset.size();
    std::vector<double> f1(genomes.size() * n, 0.0);
    parallel_for(f1.size(), [&](std::size_t k) { f1[k] = document_f1(configs[k / n], dataset[k % n]); }, workers);
    std::vector<double> out(genomes.size(), 0.0);
    for (std::size_t g = 0; g < genomes.size(); ++g) {
        double s = 0.0;
        for (std::size_t d = 0; d < n; ++d) s += f1[g * n + d];
        out[g] = s / static_cast<double>(n);
    }
    return out;
}

}  // namespace

double fitness(const Genome& genome, std::span<const Document> dataset, const ModuleToggles& toggles,
               const HeaderDictionary* dict, std::size_t workers) {
    if (dataset.empty()) throw Error(Errc::EmptyDataset, "fitness needs at least one document");
    const Genome one[] = {genome};
    return evaluate(one, dataset, toggles, dict, workers).front();
}

EvolveResult evolve(const GaConfig& config, std::span<const Document> dataset,
                    std::optional<std::vector<Genome>> initial, const EvolveOptions& options) {
    config.validate();
    if (dataset.empty()) throw Error(Errc::EmptyDataset, "evolve needs at least one document");
    const auto& specs = gene_specs();
    std::mt19937_64 rng(config.rng_seed);

    std::vector<Genome> population;
    if (initial) {
        for (const Genome& g : *initial) {
            if (population.size() == config.population_size) break;
            if (g.genes.size() != specs.size()) throw Error(Errc::InvalidValue, "initial genome has the wrong length");
            population.push_back(clamp_to_bounds(g));
        }
    }
    while (population.size() < config.population_size) {
        Genome g;
        for (const GeneSpec& s : specs) g.genes.push_back(std::uniform_real_distribution<double>(s.lo, s.hi)(rng));
        population.push_back(std::move(g));
    }

    // Fitness of individuals copied unchanged is reused.
    std::vector<std::optional<double>> known(population.size());
    EvolveResult result;
    std::vector<double> scores;
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        std::vector<Genome> pending;
        std::vector<std::size_t> pending_index;
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (!known[i]) {
                pending.push_back(population[i]);
                pending_index.push_back(i);
            }
        }
        const auto fresh = evaluate(pending, dataset, options.toggles, options.dictionary, config.workers);
        for (std::size_t k = 0; k < pending.size(); ++k) known[pending_index[k]] = fresh[k];
        scores.assign(population.size(), 0.0);
        for (std::size_t i = 0; i < population.size(); ++i) scores[i] = *known[i];

        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

        GenerationLog entry;
        entry.generation = gen;
        entry.best = scores[order.front()];
        entry.worst = scores[order.back()];
        entry.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
        entry.best_genome = population[order.front()];
        result.log.push_back(entry);
        if (options.on_generation) options.on_generation(entry);
        result.best = entry.best_genome;
        result.best_fitness = entry.best;
        if (gen + 1 == config.generations) break;

        auto tournament = [&]() -> const Genome& {
            std::size_t best = std::uniform_int_distribution<std::size_t>(0, population.size() - 1)(rng);
            for (std::size_t t = 1; t < config.tournament_size; ++t) {
                const std::size_t c = std::uniform_int_distribution<std::size_t>(0, population.size() - 1)(rng);
                if (scores[c] > scores[best] || (scores[c] == scores[best] && c < best)) best = c;
            }
            return population[best];
        };

        std::vector<Genome> next;
        std::vector<std::optional<double>> next_known;
        for (std::size_t e = 0; e < config.elite_count; ++e) {
            next.push_back(population[order[e]]);
            next_known.push_back(scores[order[e]]);
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        while (next.size() < config.population_size) {
            const Genome& a = tournament();
            const Genome& b = tournament();
            Genome child = a;
            if (unit(rng) < config.crossover_rate) {
                for (std::size_t i = 0; i < specs.size(); ++i)
                    if (unit(rng) < 0.5) child.genes[i] = b.genes[i];
            }
            for (std::size_t i = 0; i < specs.size(); ++i) {
                if (unit(rng) < config.mutation_rate) {
                    child.genes[i] += normal(rng) * config.mutation_sigma * (specs[i].hi - specs[i].lo);
                }
            }
            next.push_back(clamp_to_bounds(std::move(child)));
            next_known.emplace_back();
        }
        population = std::move(next);
        known = std::move(next_known);
    }
    return result;
}

}  // namespace tabrefine
