#include <doctest.h>

#include <random>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "tabrefine/text.hpp"

using namespace tabrefine;
using namespace testing_support;

TEST_SUITE("text") {

TEST_CASE("levenshtein examples") {
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("kitten", "sitting") == oracle::levenshtein("kitten", "sitting"));
    CHECK(levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("levenshtein is a metric") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(0, 7), ch(0, 2);
    auto rand_str = [&] {
        std::string s(static_cast<std::size_t>(len(rng)), 'a');
        for (char& c : s) c = static_cast<char>('a' + ch(rng));
        return s;
    };
    for (int i = 0; i < 1000; ++i) {
        const std::string a = rand_str(), b = rand_str(), c = rand_str();
        const std::size_t ab = levenshtein(a, b);
        REQUIRE(ab == oracle::levenshtein(a, b));
        REQUIRE(ab == levenshtein(b, a));
        REQUIRE(levenshtein(a, a) == 0);
        REQUIRE((ab == 0) == (a == b));
        REQUIRE(levenshtein(a, c) <= ab + levenshtein(b, c));
    }
}

TEST_CASE("classify_token") {
    CHECK(classify_token("1,234.56") == TokenClass::amount);
    CHECK(classify_token("12/05/2023") == TokenClass::date);
    CHECK(classify_token("AB-1029X") == TokenClass::code);
    CHECK(classify_token("1.234,56") == TokenClass::amount);
    CHECK(classify_token("€12.00") == TokenClass::amount);
    CHECK(classify_token("-7.50") == TokenClass::amount);
    CHECK(classify_token("2023-05-12") == TokenClass::date);
    CHECK(classify_token("42") == TokenClass::integer);
    CHECK(classify_token("Widget") == TokenClass::alphabetic);
    CHECK(classify_token("Crème") == TokenClass::alphabetic);
    CHECK(classify_token("50%") == TokenClass::other);
    CHECK(classify_token("(n/a)") == TokenClass::other);
    CHECK_THROWS_AS(classify_token("   "), Error);
}

TEST_CASE("normalize_word") {
    CHECK(normalize_word("Amount:") == "amount");
    CHECK(normalize_word("(Qty)") == "qty");
}

TEST_CASE("keyword_score") {
    const HeaderDictionary& dict = default_dictionary();
    CHECK(keyword_score(std::vector<Token>{word(1, "Description", 0, 0), word(2, "Qty", 200, 0),
                                           word(3, "Amount", 300, 0)},
                        dict, 0) == 1.0);
    CHECK(oracle::levenshtein("descripton", "description") == 1);
    CHECK(keyword_score(std::vector<Token>{word(1, "Descripton", 0, 0), word(2, "Qty", 200, 0)}, dict, 1) == 1.0);
    CHECK(keyword_score(std::vector<Token>{word(1, "Descripton", 0, 0), word(2, "Qty", 200, 0)}, dict, 0) == 0.5);
    CHECK(keyword_score(std::vector<Token>{word(1, "lorem", 0, 0), word(2, "ipsum", 100, 0)}, dict, 1) == 0.0);
    CHECK(keyword_score(std::vector<Token>{}, dict, 1) == 0.0);
}

TEST_CASE("multi-word keywords match adjacent pairs") {
    const HeaderDictionary& dict = default_dictionary();
    const std::vector<Token> line{word(1, "Unit", 0, 0), word(2, "Price", 60, 0), word(3, "Widget", 300, 0)};
    CHECK(keyword_score(line, dict, 0) >= 2.0 / 3.0);
}

TEST_CASE("keyword_score is monotone in the edit budget") {
    const HeaderDictionary& dict = default_dictionary();
    std::mt19937_64 rng(9);
    const std::vector<std::string> pool{"Descriptoin", "Qyt", "Amuont", "lorem", "Prize", "Totl", "Unti", "Itme", "x"};
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Token> line;
        for (int k = 0; k < 4; ++k) line.push_back(word(k + 1, pool[pick(rng)], 120.0 * k, 0));
        for (int d = 0; d < 4; ++d) REQUIRE(keyword_score(line, dict, d) <= keyword_score(line, dict, d + 1));
    }
}

TEST_CASE("stopwords") {
    const HeaderDictionary& dict = default_dictionary();
    CHECK(contains_stopword(std::vector<Token>{word(1, "Subtotal", 0, 0)}, dict));
    CHECK(contains_stopword(std::vector<Token>{word(1, "Total", 0, 0), word(2, "due", 60, 0)}, dict));
    CHECK_FALSE(contains_stopword(std::vector<Token>{word(1, "Qty", 0, 0), word(2, "Price", 60, 0)}, dict));
}

TEST_CASE("default dictionary") {
    const HeaderDictionary& dict = default_dictionary();
    CHECK(dict.keywords().size() >= 40);
    CHECK(dict.stopwords().size() >= 20);
    for (const std::string& k : dict.keywords()) CHECK_FALSE(dict.stopwords().contains(k));
}

TEST_CASE("dictionary parsing") {
    const HeaderDictionary d = parse_dictionary("# c\n[keywords]\nQty\nunit price\n\n[stopwords]\nsubtotal\n");
    CHECK(d.keywords() == std::set<std::string>{"qty", "unit price"});
    CHECK(d.stopwords() == std::set<std::string>{"subtotal"});
    CHECK_THROWS_AS(parse_dictionary("[keywords]\nqty\n[stopwords]\nqty\n"), Error);
    CHECK_THROWS_AS(load_dictionary("/nonexistent/dictionary.txt"), Error);
}

}
