#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyweave/error.hpp"
#include "storyweave/model.hpp"
#include "storyweave/text.hpp"

namespace storyweave {

struct Gazetteer {
    std::set<std::string> locations;     // lowercase phrases
    std::set<std::string> organizations; // lowercase phrases
    std::set<std::string> honorifics;    // lowercase, no trailing period
};

inline const Gazetteer& builtin_gazetteer() {
    static const Gazetteer g = {
        {
            "united states", "america", "china",      "south korea",  "singapore",
            "taiwan",        "italy",   "spain",      "france",       "germany",
            "iran",          "india",   "japan",      "russia",       "canada",
            "mexico",        "brazil",  "australia",  "israel",       "egypt",
            "united kingdom","england", "new york",   "new york city","brooklyn",
            "coney island",  "manhattan","queens",    "washington",   "seattle",
            "california",    "texas",   "florida",    "virginia",     "chicago",
            "boston",        "london",  "paris",      "rome",         "madrid",
            "wuhan",         "beijing", "hong kong",  "europe",       "asia",
            "africa",        "east river",
        },
        {
            "congress",            "senate",           "white house",
            "pentagon",            "supreme court",    "house of representatives",
            "federal reserve",     "state department",  "united nations",
            "world health organization", "cdc",        "who",
            "fda",                 "nih",              "fbi",
            "cia",                 "nasa",             "army",
            "navy",                "national guard",    "red cross",
        },
        {
            "mr",   "mrs",  "ms",       "dr",       "president", "senator",
            "sen",  "rep",  "gov",      "governor", "secretary", "justice",
            "judge","mayor","professor","prof",     "gen",       "capt",
            "col",  "lt",   "sgt",      "rev",      "chancellor",
        },
    };
    return g;
}

inline Gazetteer load_gazetteer(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_not_found, "gazetteer not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::config_invalid, path.string() + ": " + e.what());
    }
    Gazetteer g;
    auto fill = [&](const char* key, std::set<std::string>& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_array())
            throw Error(Errc::config_invalid, std::string(key) + " must be an array");
        for (const auto& v : j[key]) out.insert(ascii_lower(collapse_ws(v.get<std::string>())));
    };
    fill("locations", g.locations);
    fill("organizations", g.organizations);
    fill("honorifics", g.honorifics);
    return g;
}

class EntityExtractor {
public:
    virtual ~EntityExtractor() = default;
    virtual std::vector<Entity> extract(const std::string& text) const = 0;
    virtual std::string version() const = 0;
};

namespace detail_entities {

// Common sentence-case words that a capitalization rule would otherwise
// promote to single-token entities.
inline const std::set<std::string>& single_token_noise() {
    static const std::set<std::string> words = {
        "a",   "an",  "and", "as",   "at",   "but", "by",   "for", "from", "he",
        "her", "his", "i",   "if",   "in",   "it",  "its",  "my",  "of",   "on",
        "or",  "our", "she", "so",   "that", "the", "they", "this","to",   "we",
        "with","you", "yes", "no",   "not",  "now", "then", "when","while","after",
        "also","because",
    };
    return words;
}

struct Token {
    std::string surface;  // punctuation-trimmed
    bool capitalized = false;
    bool sentence_start = false;
    bool ends_sentence = false;
    bool honorific = false;
    bool initial = false; // "J."
};

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-' || c == '.' ||
           c == '&';
}

inline std::vector<Token> tokenize(const std::string& text, const Gazetteer& gaz) {
    std::vector<Token> out;
    size_t i = 0;
    bool next_starts_sentence = true;
    while (i < text.size()) {
        while (i < text.size() &&
               !std::isalnum(static_cast<unsigned char>(text[i]))) {
            if (text[i] == '\n') next_starts_sentence = true;
            if (text[i] == '.' || text[i] == '!' || text[i] == '?')
                if (!out.empty()) out.back().ends_sentence = true;
            ++i;
        }
        if (i >= text.size()) break;
        size_t start = i;
        while (i < text.size() && is_word_char(text[i])) ++i;
        std::string raw = text.substr(start, i - start);

        // keep a trailing period only on single initials and dotted acronyms
        std::string surface = raw;
        while (!surface.empty() &&
               (surface.back() == '.' || surface.back() == '\'' || surface.back() == '-')) {
            if (surface.back() == '.') {
                bool initial_like = surface.size() == 2 &&
                                    std::isupper(static_cast<unsigned char>(surface[0]));
                bool dotted = std::count(surface.begin(), surface.end(), '.') > 1;
                if (initial_like || dotted) break;
            }
            surface.pop_back();
        }
        if (surface.empty()) {
            if (raw.find('.') != std::string::npos && !out.empty())
                out.back().ends_sentence = true;
            continue;
        }

        Token t;
        t.surface = surface;
        t.capitalized = std::isupper(static_cast<unsigned char>(surface[0]));
        t.sentence_start = next_starts_sentence;
        std::string low = ascii_lower(surface);
        if (!low.empty() && low.back() == '.') low.pop_back();
        t.honorific = gaz.honorifics.count(low) > 0;
        t.initial = surface.size() == 2 && surface[1] == '.' &&
                    std::isupper(static_cast<unsigned char>(surface[0]));

        bool raw_dot = !raw.empty() && (raw.back() == '.' || raw.back() == '!' || raw.back() == '?');
        t.ends_sentence = raw_dot && !t.initial && !t.honorific &&
                          std::count(raw.begin(), raw.end(), '.') <= 1;
        next_starts_sentence = t.ends_sentence;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace detail_entities

// Deterministic capitalization-run extractor: maximal runs of capitalized
// tokens count as mentions, except a lone sentence-initial word (plain
// sentence case). Classes come from the gazetteer; honorific-led runs are
// people; otherwise UNLABELED.
class RuleBasedExtractor : public EntityExtractor {
public:
    explicit RuleBasedExtractor(Gazetteer gazetteer = builtin_gazetteer())
        : gaz_(std::move(gazetteer)) {}

    std::string version() const override { return "storyweave-rules/1"; }

    std::vector<Entity> extract(const std::string& text) const override {
        using namespace detail_entities;
        std::vector<Token> tokens = tokenize(text, gaz_);
        std::vector<Entity> out;
        size_t i = 0;
        while (i < tokens.size()) {
            if (!tokens[i].capitalized) {
                ++i;
                continue;
            }
            size_t j = i;
            while (j < tokens.size() && tokens[j].capitalized) {
                ++j;
                if (tokens[j - 1].ends_sentence) break;
            }
            size_t len = j - i;
            bool sentence_case_only = tokens[i].sentence_start && len == 1;
            if (!sentence_case_only) {
                if (auto e = classify(tokens, i, j)) out.push_back(std::move(*e));
            }
            i = j;
        }
        return out;
    }

    const Gazetteer& gazetteer() const { return gaz_; }

private:
    std::optional<Entity> classify(const std::vector<detail_entities::Token>& tokens,
                                   size_t begin, size_t end) const {
        using namespace detail_entities;
        size_t first = begin;
        bool honorific_led = false;
        while (first < end && tokens[first].honorific) {
            honorific_led = true;
            ++first;
        }
        if (first == end) return std::nullopt; // honorific with no name after it

        std::vector<std::string> words;
        for (size_t k = first; k < end; ++k) words.push_back(tokens[k].surface);
        std::string surface = join(words, " ");
        std::string key = ascii_lower(surface);
        if (end - first == 1 && !honorific_led && single_token_noise().count(key))
            return std::nullopt;

        Entity e;
        e.entity = surface;
        if (honorific_led) {
            e.cls = "PERSON";
        } else if (gaz_.locations.count(key)) {
            e.cls = "LOCATION";
        } else if (gaz_.organizations.count(key)) {
            e.cls = "ORGANIZATION";
        } else if (has_initial(tokens, first, end)) {
            e.cls = "PERSON";
        } else {
            e.cls = "UNLABELED";
        }
        return e;
    }

    static bool has_initial(const std::vector<detail_entities::Token>& tokens, size_t begin,
                            size_t end) {
        if (end - begin < 2) return false;
        for (size_t k = begin; k < end; ++k)
            if (tokens[k].initial) return true;
        return false;
    }

    Gazetteer gaz_;
};

struct RankedEntity {
    std::string entity; // normalized (lowercase, whitespace-collapsed)
    std::string cls;
    int frequency = 0;

    friend bool operator==(const RankedEntity&, const RankedEntity&) = default;
};

enum class EntityCountMode { term_frequency, document_frequency };

// Aggregates mentions across documents: frequency descending, ties
// alphabetical; each key's class is its most common mention class.
inline std::vector<RankedEntity> extract_entities(
    const std::vector<std::string>& docs, const EntityExtractor& extractor,
    EntityCountMode mode = EntityCountMode::term_frequency) {
    std::map<std::string, int> freq;
    std::map<std::string, std::map<std::string, int>> class_votes;
    for (const auto& doc : docs) {
        std::map<std::string, int> in_doc;
        for (const auto& mention : extractor.extract(doc)) {
            std::string key = ascii_lower(collapse_ws(mention.entity));
            ++in_doc[key];
            ++class_votes[key][mention.cls];
        }
        for (const auto& [key, count] : in_doc)
            freq[key] += (mode == EntityCountMode::term_frequency) ? count : 1;
    }
    std::vector<RankedEntity> ranked;
    ranked.reserve(freq.size());
    for (const auto& [key, count] : freq) {
        RankedEntity r;
        r.entity = key;
        r.frequency = count;
        const auto& votes = class_votes[key];
        int best = 0;
        for (const auto& [cls, v] : votes) {
            if (v > best || (v == best && (r.cls.empty() || cls < r.cls))) {
                best = v;
                r.cls = cls;
            }
        }
        ranked.push_back(std::move(r));
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedEntity& a, const RankedEntity& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.entity < b.entity;
    });
    return ranked;
}

} // namespace storyweave
