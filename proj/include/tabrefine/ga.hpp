#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabrefine/model.hpp"
#include "tabrefine/text.hpp"

namespace tabrefine {

struct GeneSpec {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool integer = false;  // decoded by rounding
};

/// One gene per tunable ParamSet field. Absolute DBSCAN radii are not
/// genes; the radii are tuned through their median-size factors.
const std::vector<GeneSpec>& gene_specs();

struct Genome {
    std::vector<double> genes;

    friend bool operator==(const Genome&, const Genome&) = default;
};

Genome encode(const ParamSet& params);
/// Throws Error(InvalidValue) on a gene count mismatch.
ParamSet decode(const Genome& genome);
Genome clamp_to_bounds(Genome genome);
bool within_bounds(const Genome& genome);

/// `size` genomes: `center` itself followed by copies with every gene moved by
/// Gaussian noise of `sigma` × gene range, clamped. Deterministic in `seed`.
std::vector<Genome> population_around(const Genome& center, std::size_t size, double sigma, std::uint64_t seed);

struct GaConfig {
    std::size_t population_size = 30;
    std::size_t generations = 40;
    std::size_t elite_count = 2;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;   // per gene
    double mutation_sigma = 0.1;  // fraction of the gene range
    std::uint64_t rng_seed = 0;
    std::size_t tournament_size = 3;
    std::size_t workers = 0;      // 0 selects the hardware concurrency

    /// Throws Error(InvalidValue).
    void validate() const;
};


/// Mean GRITS-CON F1 of the full pipeline over the dataset. A document that
/// fails to process scores 0. Throws Error(EmptyDataset).
double fitness(const Genome& genome, std::span<const Document> dataset, const ModuleToggles& toggles = {},
               const HeaderDictionary* dict = nullptr, std::size_t workers = 0);

struct GenerationLog {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double worst = 0.0;
    Genome best_genome;
};

struct EvolveResult {
    Genome best;
    double best_fitness = 0.0;
    std::vector<GenerationLog> log;
};

struct EvolveOptions {
    ModuleToggles toggles;
    const HeaderDictionary* dictionary = nullptr;
    std::function<void(const GenerationLog&)> on_generation;
};

/// Generational GA with elitism, tournament selection, uniform crossover and
/// Gaussian mutation. Missing initial individuals are drawn uniformly within
/// the bounds. Throws Error(EmptyDataset), Error(InvalidValue).
EvolveResult evolve(const GaConfig& config, std::span<const Document> dataset,
                    std::optional<std::vector<Genome>> initial = std::nullopt, const EvolveOptions& options = {});

}  // namespace tabrefine
