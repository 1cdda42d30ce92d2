#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabrefine/model.hpp"

namespace tabrefine {

/// Unit-cost edit distance over any random-access sequence. Two-row DP.
template <class Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
    const std::size_t n = std::size(a);
    const std::size_t m = std::size(b);
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    return edit_distance(a, b);
}

enum class TokenClass { amount, integer, date, alphabetic, code, other };

std::string_view to_string(TokenClass cls) noexcept;

/// Total over non-empty text; throws Error(EmptyText) on blank input.
TokenClass classify_token(std::string_view text);

/// Lowercases ASCII letters and strips punctuation at both ends.
std::string normalize_word(std::string_view text);

class HeaderDictionary {
public:
    HeaderDictionary() = default;
    /// Entries are normalized on the way in. Throws Error(InvalidValue) if the
    /// two sets share an entry.
    HeaderDictionary(std::set<std::string> keywords, std::set<std::string> stopwords);

    const std::set<std::string>& keywords() const noexcept { return keywords_; }
    const std::set<std::string>& stopwords() const noexcept { return stopwords_; }

    /// True when `word` is within `max_dist` edits of some keyword of the
    /// requested arity (single-word or multi-word).
    bool matches_keyword(std::string_view word, std::size_t max_dist, bool multi_word) const;
    bool is_stopword(std::string_view word) const { return stopwords_.contains(std::string(word)); }

private:
    std::set<std::string> keywords_;
    std::set<std::string> stopwords_;
    std::vector<std::string> single_keywords_;
    std::vector<std::string> multi_keywords_;
};

/// Parses the sectioned text format ("[keywords]" / "[stopwords]", one entry per line).
HeaderDictionary parse_dictionary(std::string_view text);
HeaderDictionary load_dictionary(const std::filesystem::path& path);
const HeaderDictionary& default_dictionary();

/// Fraction of tokens matching a header keyword within `max_dist` edits.
/// Multi-word keywords are matched against pairs of adjacent tokens. Tokens
/// are taken left to right by x0.
double keyword_score(std::span<const Token> line_tokens, const HeaderDictionary& dict,
                     int max_dist);

/// Exact stopword hit on a token or on a pair of adjacent tokens.
bool contains_stopword(std::span<const Token> line_tokens, const HeaderDictionary& dict);

}  // namespace tabrefine
