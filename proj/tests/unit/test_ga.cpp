#include <doctest.h>

#include <cmath>

#include "tabrefine/ga.hpp"
#include "tabrefine/synth.hpp"

using namespace tabrefine;

namespace {

std::vector<Document> noisy_dataset(std::size_t n, std::uint64_t seed) {
    CorpusSpec spec;
    spec.documents = n;
    spec.mix = CorpusMix::business;
    spec.max_rows = 6;
    std::vector<Document> out;
    for (auto& item : make_corpus(seed, spec)) out.push_back(std::move(item.doc));
    return out;
}

}  // namespace

TEST_SUITE("ga") {

TEST_CASE("genes cover the parameters") {
    const auto& specs = gene_specs();
    CHECK(specs.size() == 18);
    const Genome g = encode(ParamSet{});
    CHECK(g.genes.size() == specs.size());
    CHECK(within_bounds(g));
    CHECK(decode(g) == ParamSet{});
    CHECK_THROWS_AS(decode(Genome{{0.5}}), Error);
}

TEST_CASE("decode rounds integer genes and clamps") {
    Genome g = encode(ParamSet{});
    const auto& specs = gene_specs();
    for (std::size_t i = 0; i < specs.size(); ++i) g.genes[i] = specs[i].hi + 10.0;
    CHECK_FALSE(within_bounds(g));
    const Genome c = clamp_to_bounds(g);
    CHECK(within_bounds(c));
    const ParamSet p = decode(g);
    CHECK_NOTHROW(p.validate());
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].integer) CHECK(std::round(c.genes[i]) == c.genes[i]);
}

TEST_CASE("population around a center") {
    const Genome center = encode(ParamSet{});
    const auto pop = population_around(center, 12, 0.1, 5);
    REQUIRE(pop.size() == 12);
    CHECK(pop[0] == center);
    for (const Genome& g : pop) CHECK(within_bounds(g));
    CHECK(pop == population_around(center, 12, 0.1, 5));
}

TEST_CASE("fitness on perfect predictions") {
    std::vector<Document> docs;
    for (std::uint64_t s = 0; s < 6; ++s) docs.push_back(generate_document(s, GeneratorSpec{3 + s, 2 + s % 5}));
    CHECK(fitness(encode(ParamSet{}), docs) == 1.0);
}

TEST_CASE("fitness without shared content") {
    std::vector<Document> docs;
    for (std::uint64_t s = 0; s < 4; ++s) {
        Document d = generate_document(s, GeneratorSpec{3, 3});
        for (auto& row : d.gt->cells.cells)
            for (auto& c : row) c = "~~~~";
        docs.push_back(std::move(d));
    }
    CHECK(fitness(encode(ParamSet{}), docs) == 0.0);
}

TEST_CASE("fitness errors and determinism") {
    CHECK_THROWS_AS(fitness(encode(ParamSet{}), std::vector<Document>{}), Error);
    const auto docs = noisy_dataset(20, 3);
    const double a = fitness(encode(ParamSet{}), docs, {}, nullptr, 1);
    const double b = fitness(encode(ParamSet{}), docs, {}, nullptr, 4);
    CHECK(a == b);
    CHECK(a > 0.0);
    CHECK(a < 1.0);
}

TEST_CASE("config validation") {
    GaConfig c;
    CHECK_NOTHROW(c.validate());
    c.elite_count = c.population_size + 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = GaConfig{};
    c.mutation_rate = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = GaConfig{};
    c.generations = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("one generation returns the best initial individual") {
    const auto docs = noisy_dataset(8, 5);
    GaConfig c;
    c.population_size = 6;
    c.generations = 1;
    c.rng_seed = 2;
    const auto init = population_around(encode(ParamSet{}), 6, 0.3, 8);
    const EvolveResult r = evolve(c, docs, init);
    double best = -1.0;
    for (const Genome& g : init) best = std::max(best, fitness(g, docs));
    CHECK(r.best_fitness == best);
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].best == best);
}

TEST_CASE("elitism, determinism and bounds") {
    const auto docs = noisy_dataset(10, 6);
    GaConfig c;
    c.population_size = 8;
    c.generations = 5;
    c.rng_seed = 17;
    std::vector<Genome> seen;
    EvolveOptions opt;
    opt.on_generation = [&](const GenerationLog& g) { seen.push_back(g.best_genome); };
    const EvolveResult a = evolve(c, docs, std::nullopt, opt);
    const EvolveResult b = evolve(c, docs);
    REQUIRE(a.log.size() == 5);
    CHECK(seen.size() == 5);
    for (std::size_t i = 1; i < a.log.size(); ++i) CHECK(a.log[i].best >= a.log[i - 1].best);
    CHECK(a.best == b.best);
    CHECK(a.best_fitness == b.best_fitness);
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].best == b.log[i].best);
        CHECK(a.log[i].mean == b.log[i].mean);
        CHECK(a.log[i].worst <= a.log[i].mean);
    }
    for (const Genome& g : seen) CHECK(within_bounds(g));
    CHECK(within_bounds(a.best));
    CHECK_THROWS_AS(evolve(c, std::vector<Document>{}), Error);
}

}
