#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "storyweave/error.hpp"
#include "storyweave/text.hpp"

namespace storyweave {

inline const std::set<std::string>& builtin_stopwords() {
    static const std::set<std::string> words = {
        "a",       "about",   "above",  "after",   "again",   "against", "all",    "am",
        "an",      "and",     "any",    "are",     "aren",    "as",      "at",     "be",
        "because", "been",    "before", "being",   "below",   "between", "both",   "but",
        "by",      "can",     "cannot", "could",   "did",     "do",      "does",   "doing",
        "don",     "down",    "during", "each",    "few",     "for",     "from",   "further",
        "had",     "has",     "have",   "having",  "he",      "her",     "here",   "hers",
        "herself", "him",     "himself","his",     "how",     "i",       "if",     "in",
        "into",    "is",      "isn",    "it",      "its",     "itself",  "just",   "ll",
        "me",      "more",    "most",   "my",      "myself",  "no",      "nor",    "not",
        "now",     "of",      "off",    "on",      "once",    "only",    "or",     "other",
        "ought",   "our",     "ours",   "ourselves","out",    "over",    "own",    "re",
        "said",    "same",    "say",    "says",    "she",     "should",  "so",     "some",
        "such",    "than",    "that",   "the",     "their",   "theirs",  "them",   "themselves",
        "then",    "there",   "these",  "they",    "this",    "those",   "through","to",
        "too",     "under",   "until",  "up",      "ve",      "very",    "was",    "wasn",
        "we",      "were",    "what",   "when",    "where",   "which",   "while",  "who",
        "whom",    "why",     "will",   "with",    "won",     "would",   "you",    "your",
        "yours",   "yourself","yourselves",
    };
    return words;
}

inline std::set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_not_found, "stopword list not found: " + path.string());
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (!w.empty()) words.insert(ascii_lower(w));
    }
    return words;
}

// Lowercase alphanumeric tokens with punctuation stripped and stopwords
// removed; phrases are built over what remains.
inline std::vector<std::string> sumgram_tokens(const std::string& text,
                                               const std::set<std::string>& stopwords) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty() && !stopwords.count(cur)) out.push_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            cur.push_back(ascii_lower_char(c));
        else
            flush();
    }
    flush();
    return out;
}

struct Sumgram {
    std::vector<std::string> phrase;
    int document_frequency = 0;

    std::string text() const { return join(phrase, " "); }

    friend bool operator==(const Sumgram&, const Sumgram&) = default;
};

struct SumgramParams {
    int base_n = 2;
    int k = 20;
    double conjoin_threshold = 0.8;
    int max_len = 6;
};

namespace detail_sumgram {

// DF of every n-gram of one length, counted once per document.
inline std::map<std::string, int> ngram_df(const std::vector<std::vector<std::string>>& docs,
                                           size_t n) {
    std::map<std::string, int> df;
    for (const auto& tokens : docs) {
        if (tokens.size() < n) continue;
        std::unordered_set<std::string> seen;
        for (size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (size_t k = 1; k < n; ++k) {
                gram.push_back(' ');
                gram += tokens[i + k];
            }
            seen.insert(std::move(gram));
        }
        for (const auto& g : seen) ++df[g];
    }
    return df;
}

inline std::vector<std::string> split_gram(const std::string& gram) { return split(gram, ' '); }

inline bool contains_contiguous(const std::vector<std::string>& big,
                                const std::vector<std::string>& small) {
    if (small.size() > big.size()) return false;
    for (size_t i = 0; i + small.size() <= big.size(); ++i) {
        bool match = true;
        for (size_t k = 0; k < small.size(); ++k)
            if (big[i + k] != small[k]) { match = false; break; }
        if (match) return true;
    }
    return false;
}

} // namespace detail_sumgram

// Top base-n-grams by document frequency, greedily grown into longer phrases
// whenever a one-token-longer phrase keeps enough of the base's DF.
inline std::vector<Sumgram> compute_sumgrams(const std::vector<std::string>& docs,
                                             const SumgramParams& params = {},
                                             const std::set<std::string>& stopwords =
                                                 builtin_stopwords()) {
    using namespace detail_sumgram;
    if (params.base_n < 1) throw Error(Errc::config_invalid, "base_n must be >= 1");
    if (params.conjoin_threshold <= 0.0 || params.conjoin_threshold > 1.0)
        throw Error(Errc::config_invalid, "conjoin threshold must lie in (0,1]");

    std::vector<std::vector<std::string>> token_docs;
    token_docs.reserve(docs.size());
    for (const auto& d : docs) token_docs.push_back(sumgram_tokens(d, stopwords));

    std::map<size_t, std::map<std::string, int>> df_by_len;
    auto df_for = [&](size_t n) -> const std::map<std::string, int>& {
        auto it = df_by_len.find(n);
        if (it == df_by_len.end()) it = df_by_len.emplace(n, ngram_df(token_docs, n)).first;
        return it->second;
    };

    const auto& base_df = df_for(static_cast<size_t>(params.base_n));
    std::vector<std::pair<std::string, int>> base(base_df.begin(), base_df.end());
    std::sort(base.begin(), base.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (base.size() > static_cast<size_t>(params.k)) base.resize(params.k);

    struct Retained {
        std::vector<std::string> phrase;
        int df = 0;
    };
    std::vector<Retained> retained;
    for (const auto& [gram, df] : base) retained.push_back({split_gram(gram), df});

    for (auto& r : retained) {
        while (static_cast<int>(r.phrase.size()) < params.max_len) {
            const auto& supers = df_for(r.phrase.size() + 1);
            const std::string* best = nullptr;
            int best_df = 0;
            for (const auto& [gram, df] : supers) {
                if (df < params.conjoin_threshold * r.df) continue;
                auto words = split_gram(gram);
                if (!contains_contiguous(words, r.phrase)) continue;
                if (!best || df > best_df || (df == best_df && gram < *best)) {
                    best = &gram;
                    best_df = df;
                }
            }
            if (!best) break;
            r.phrase = split_gram(*best);
            r.df = best_df;
        }
    }

    // merge duplicates, then drop phrases subsumed by a longer retained one
    std::map<std::string, int> unique;
    for (const auto& r : retained) unique.emplace(join(r.phrase, " "), r.df);
    std::vector<Sumgram> result;
    for (const auto& [gram, df] : unique) {
        auto words = split_gram(gram);
        bool subsumed = false;
        for (const auto& [other, odf] : unique) {
            if (other == gram) continue;
            auto owords = split_gram(other);
            if (owords.size() > words.size() && contains_contiguous(owords, words)) {
                subsumed = true;
                break;
            }
        }
        if (!subsumed) result.push_back(Sumgram{std::move(words), df});
    }
    std::sort(result.begin(), result.end(), [](const Sumgram& a, const Sumgram& b) {
        if (a.document_frequency != b.document_frequency)
            return a.document_frequency > b.document_frequency;
        return a.phrase < b.phrase;
    });
    return result;
}

} // namespace storyweave
