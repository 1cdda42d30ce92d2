#include "tabrefine/text.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace tabrefine {

std::string_view to_string(TokenClass cls) noexcept {
    switch (cls) {
        case TokenClass::amount: return "amount";
        case TokenClass::integer: return "integer";
        case TokenClass::date: return "date";
        case TokenClass::alphabetic: return "alphabetic";
        case TokenClass::code: return "code";
        case TokenClass::other: return "other";
    }
    return "other";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Bytes >= 0x80 belong to UTF-8 multibyte letters such as 'é'.
bool is_letter(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }

const std::regex& date_re() {
    static const std::regex re(
        R"(^(\d{1,2}[-/.]\d{1,2}[-/.](\d{2}|\d{4})|\d{4}[-/.]\d{1,2}[-/.]\d{1,2})$)");
    return re;
}

// Sign, optional currency on either side, and a number in either separator
// locale ("1,234.56" or "1.234,56"), with or without thousands grouping.
const std::regex& amount_re() {
    static const std::regex re(
        R"(^[+-]?(\$|€|£|¥|EUR|USD|GBP|CHF)?\s?[+-]?)"
        R"((\d{1,3}(,\d{3})+(\.\d+)?|\d{1,3}(\.\d{3})+(,\d+)?|\d+([.,]\d+)?))"
        R"(\s?(\$|€|£|¥|EUR|USD|GBP|CHF)?-?$)");
    return re;
}

}  // namespace

TokenClass classify_token(std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) throw Error(Errc::EmptyText, "cannot classify blank text");

    const std::string s(text);
    if (std::regex_match(s, date_re())) return TokenClass::date;
    if (std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
        return TokenClass::integer;
    }
    if (std::regex_match(s, amount_re())) return TokenClass::amount;

    bool letters = false, digits = false, alpha_only = true, code_chars = true;
    for (unsigned char c : s) {
        const bool letter = is_letter(c);
        const bool digit = std::isdigit(c) != 0;
        letters |= letter;
        digits |= digit;
        if (!letter && c != ' ') alpha_only = false;
        if (!letter && !digit && c != '-' && c != '_' && c != '/' && c != '.' && c != '#') {
            code_chars = false;
        }
    }
    if (alpha_only && letters) return TokenClass::alphabetic;
    if (code_chars && letters && digits) return TokenClass::code;
    return TokenClass::other;
}

std::string normalize_word(std::string_view text) {
    std::size_t b = 0, e = text.size();
    auto strip = [](unsigned char c) { return std::ispunct(c) != 0 || std::isspace(c) != 0; };
    while (b < e && strip(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && strip(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string out(text.substr(b, e - b));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

HeaderDictionary::HeaderDictionary(std::set<std::string> keywords, std::set<std::string> stopwords) {
    auto normalize_all = [](const std::set<std::string>& in) {
        std::set<std::string> out;
        for (const std::string& entry : in) {
            // Normalize each word of a multi-word entry separately.
            std::istringstream words(entry);
            std::string w, joined;
            while (words >> w) {
                std::string n = normalize_word(w);
                if (n.empty()) continue;
                if (!joined.empty()) joined += ' ';
                joined += n;
            }
            if (!joined.empty()) out.insert(joined);
        }
        return out;
    };
    keywords_ = normalize_all(keywords);
    stopwords_ = normalize_all(stopwords);
    for (const std::string& k : keywords_) {
        if (stopwords_.contains(k)) {
            throw Error(Errc::InvalidValue, "'" + k + "' is both a keyword and a stopword");
        }
        (k.find(' ') == std::string::npos ? single_keywords_ : multi_keywords_).push_back(k);
    }
}

bool HeaderDictionary::matches_keyword(std::string_view word, std::size_t max_dist,
                                       bool multi_word) const {
    const auto& pool = multi_word ? multi_keywords_ : single_keywords_;
    return std::any_of(pool.begin(), pool.end(), [&](const std::string& k) {
        const std::size_t diff = k.size() > word.size() ? k.size() - word.size() : word.size() - k.size();
        return diff <= max_dist && levenshtein(word, k) <= max_dist;
    });
}

HeaderDictionary parse_dictionary(std::string_view text) {
    std::set<std::string> keywords, stopwords;
    std::set<std::string>* section = nullptr;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view entry = trim(line);
        if (entry.empty() || entry.front() == '#') continue;
        if (entry == "[keywords]") {
            section = &keywords;
        } else if (entry == "[stopwords]") {
            section = &stopwords;
        } else if (section == nullptr) {
            throw Error(Errc::ParseError,
                        "dictionary line " + std::to_string(lineno) + " precedes any section");
        } else {
            section->insert(std::string(entry));
        }
    }
    return HeaderDictionary(std::move(keywords), std::move(stopwords));
}

HeaderDictionary load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open dictionary " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dictionary(buf.str());
}

const HeaderDictionary& default_dictionary() {
    static const HeaderDictionary dict = parse_dictionary(
#include "tabrefine/default_dictionary.inc"
    );
    return dict;
}

namespace {

std::vector<std::string> ordered_words(std::span<const Token> tokens) {
    std::vector<const Token*> order;
    order.reserve(tokens.size());
    for (const Token& t : tokens) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(),
                     [](const Token* a, const Token* b) { return a->bbox.x0() < b->bbox.x0(); });
    std::vector<std::string> words;
    words.reserve(order.size());
    for (const Token* t : order) words.push_back(normalize_word(t->text));
    return words;
}

}  // namespace

double keyword_score(std::span<const Token> line_tokens, const HeaderDictionary& dict,
                     int max_dist) {
    if (line_tokens.empty()) return 0.0;
    const std::size_t dist = static_cast<std::size_t>(std::max(max_dist, 0));
    const std::vector<std::string> words = ordered_words(line_tokens);
    std::vector<bool> hit(words.size(), false);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].empty()) continue;
        if (dict.matches_keyword(words[i], dist, false)) hit[i] = true;
        if (i + 1 < words.size() && !words[i + 1].empty() &&
            dict.matches_keyword(words[i] + ' ' + words[i + 1], dist, true)) {
            hit[i] = hit[i + 1] = true;
        }
    }
    const auto hits = static_cast<double>(std::count(hit.begin(), hit.end(), true));
    return hits / static_cast<double>(words.size());
}

bool contains_stopword(std::span<const Token> line_tokens, const HeaderDictionary& dict) {
    const std::vector<std::string> words = ordered_words(line_tokens);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].empty()) continue;
        if (dict.is_stopword(words[i])) return true;
        if (i + 1 < words.size() && dict.is_stopword(words[i] + ' ' + words[i + 1])) return true;
    }
    return false;
}

}  // namespace tabrefine
