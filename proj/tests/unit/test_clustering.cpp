#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "tabrefine/clustering.hpp"

using namespace tabrefine;
using namespace testing_support;

TEST_SUITE("clustering") {

TEST_CASE("dbscan examples") {
    const std::vector<double> ys{10, 11, 12, 50, 52};
    const std::vector<int> labels = dbscan_1d(ys, 5.0, 2);
    std::vector<std::vector<double>> pts;
    for (double y : ys) pts.push_back({y});
    CHECK(labels == oracle::dbscan(pts, 5.0, 2));
    CHECK(labels == std::vector<int>{0, 0, 0, 1, 1});

    CHECK(dbscan_1d(std::vector<double>{3.0}, 1.0, 2) == std::vector<int>{kNoise});
    CHECK(dbscan_1d(std::vector<double>{4, 4, 4, 4}, 0.5, 2) == std::vector<int>{0, 0, 0, 0});
    CHECK(dbscan_1d(std::vector<double>{}, 1.0, 2).empty());
}

TEST_CASE("dbscan matches the reference on random inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::uniform_int_distribution<int> npts(1, 40), mp(1, 4), dims(1, 2);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = npts(rng), d = dims(rng), m = mp(rng);
        const double eps = 1.0 + u(rng) / 10.0;
        std::vector<double> flat;
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < n; ++i) {
            std::vector<double> p;
            for (int k = 0; k < d; ++k) {
                p.push_back(u(rng));
                flat.push_back(p.back());
            }
            pts.push_back(p);
        }
        REQUIRE(dbscan(flat, static_cast<std::size_t>(d), eps, m) == oracle::dbscan(pts, eps, m));
    }
}

TEST_CASE("dbscan labels are scale equivariant") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xy, scaled;
        for (int i = 0; i < 30; ++i) {
            xy.push_back(u(rng));
            scaled.push_back(xy.back() * 4.0);
        }
        REQUIRE(dbscan(xy, 2, 9.0, 2) == dbscan(scaled, 2, 36.0, 2));
    }
}

TEST_CASE("estimate_lines") {
    std::vector<Token> tokens;
    int id = 1;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) tokens.push_back(word(id++, "w", 100.0 * c, 40.0 * r));
    const auto lines = estimate_lines(tokens, 8.0, 2);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].token_ids == std::vector<int>{1, 2, 3, 4});
    CHECK(lines[1].token_ids == std::vector<int>{5, 6, 7, 8});
    CHECK(lines[0].y_center < lines[1].y_center);

    CHECK(estimate_lines(std::vector<Token>{}, 8.0, 2).empty());
    const auto single = estimate_lines(std::vector<Token>{word(1, "a", 0, 0)}, 8.0, 2);
    REQUIRE(single.size() == 1);
    CHECK(single[0].token_ids == std::vector<int>{1});
}

TEST_CASE("estimate_lines partitions the tokens") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> x(0, 800), y(0, 1000);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Token> tokens;
        for (int i = 0; i < 60; ++i) tokens.push_back(word(i, "t", x(rng), y(rng)));
        std::multiset<int> seen;
        for (const auto& line : estimate_lines(tokens, 6.0, 2)) seen.insert(line.token_ids.begin(), line.token_ids.end());
        REQUIRE(seen.size() == tokens.size());
        for (const Token& t : tokens) REQUIRE(seen.count(t.id) == 1);
    }
}

namespace {

struct Signed {
    std::vector<Token> tokens;
    std::vector<TextLine> lines;
    SignatureSet sigs;
};

Signed sign(std::vector<Token> tokens, double eps_x = 40.0) {
    Signed s;
    s.tokens = std::move(tokens);
    s.lines = estimate_lines(s.tokens, 8.0, 2);
    s.sigs = line_signatures(s.lines, index_tokens(s.tokens), eps_x, 2);
    return s;
}

}  // namespace

TEST_CASE("core pattern with a stray footer") {
    std::vector<Token> tokens;
    int id = 1;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 3; ++c) tokens.push_back(word(id++, "cell", 100.0 + 200.0 * c, 30.0 * r));
    tokens.push_back(word(id++, "footer", 450, 220));
    const Signed s = sign(tokens);
    REQUIRE(s.sigs.signatures.size() == 6);
    // Three x-clusters numbered in first-visit order.
    const std::vector<int> expected{0, 1, 2};
    CHECK(s.sigs.core_pattern == expected);
    for (int r = 0; r < 5; ++r) CHECK(s.sigs.signatures[r].symbols == expected);
    const LineSignature& footer = s.sigs.signatures[5];
    CHECK(footer.outlier_count == 1);
    CHECK(pattern_distance(footer.symbols, s.sigs.core_pattern) > 0.0);
}

TEST_CASE("uniform table") {
    std::vector<Token> tokens;
    int id = 1;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) tokens.push_back(word(id++, "v", 100.0 * c, 30.0 * r));
    const Signed s = sign(tokens);
    for (const auto& sig : s.sigs.signatures) {
        CHECK(sig.symbols == s.sigs.core_pattern);
        CHECK(pattern_distance(sig.symbols, s.sigs.core_pattern) == 0.0);
    }
}

TEST_CASE("single line is its own core") {
    const Signed s = sign({word(1, "a", 0, 0), word(2, "b", 10, 0)});
    REQUIRE(s.sigs.signatures.size() == 1);
    CHECK(s.sigs.core_pattern == s.sigs.signatures[0].symbols);
}

TEST_CASE("no lines") {
    CHECK_THROWS_AS(line_signatures(std::vector<TextLine>{}, TokenIndex{}, 10.0, 2), Error);
}

TEST_CASE("signature bookkeeping on random pages") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> x(0, 900), y(0, 600);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Token> tokens;
        for (int i = 0; i < 50; ++i) tokens.push_back(word(i, "t", x(rng), y(rng)));
        const Signed s = sign(tokens);
        std::size_t counted = 0;
        bool core_seen = false;
        for (std::size_t l = 0; l < s.lines.size(); ++l) {
            const auto& sig = s.sigs.signatures[l];
            counted += sig.symbols.size() + static_cast<std::size_t>(sig.outlier_count);
            REQUIRE(sig.symbols.size() + static_cast<std::size_t>(sig.outlier_count) == s.lines[l].token_ids.size());
            core_seen |= sig.symbols == s.sigs.core_pattern;
        }
        REQUIRE(counted == tokens.size());
        REQUIRE(core_seen);
    }
}

TEST_CASE("collapsed comparison") {
    CHECK(collapse_runs(std::vector<int>{0, 0, 1, 1, 2}) == std::vector<int>{0, 1, 2});
    CHECK(same_pattern(std::vector<int>{0, 0, 0, 1}, std::vector<int>{0, 1}));
    CHECK(pattern_distance(std::vector<int>{0, 0, 1}, std::vector<int>{0, 1}) == 0.0);
    CHECK(pattern_distance(std::vector<int>{2}, std::vector<int>{0, 1}) == 1.0);
    CHECK(pattern_distance(std::vector<int>{}, std::vector<int>{}) == 0.0);
}

TEST_CASE("radii from page scale") {
    ParamSet p;
    const ClusterRadii r = cluster_radii(p, PageScale{20.0, 50.0});
    CHECK(r.eps_y == doctest::Approx(12.0));
    CHECK(r.eps_x == doctest::Approx(100.0));
    p.dbscan_eps_x = 7.0;
    CHECK(cluster_radii(p, PageScale{20.0, 50.0}).eps_x == 7.0);
}

}
