#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "storyweave/error.hpp"
#include "storyweave/markup.hpp"
#include "storyweave/text.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

namespace storyweave {

struct ImageCandidate {
    std::string src;   // absolute URL
    bool is_meta = false;
    int position = 0;  // 1-based, over the full candidate list

    friend bool operator==(const ImageCandidate&, const ImageCandidate&) = default;
};

struct ArticleExtract {
    std::string title;
    std::string text;
    std::string favicon;
    std::optional<Timestamp> published_meta;
    std::vector<ImageCandidate> image_candidates;
};

namespace detail_extract {

inline std::optional<std::string> meta_content(const MarkupNode& root, std::string_view key,
                                               std::string_view value) {
    std::optional<std::string> found;
    walk_elements(root, [&](const MarkupNode& n) {
        if (found || !n.is_element("meta")) return;
        auto k = n.attr(key);
        if (!k || !iequals(*k, value)) return;
        auto content = n.attr("content");
        if (content && !trim(*content).empty()) found = std::string(trim(*content));
    });
    return found;
}

inline size_t count_links(const MarkupNode& n) {
    size_t count = 0;
    walk_elements(n, [&](const MarkupNode& e) {
        if (e.is_element("a")) ++count;
    });
    return count;
}

inline bool is_block_candidate(const MarkupNode& n) {
    return n.is_element("article") || n.is_element("main") || n.is_element("section") ||
           n.is_element("div") || n.is_element("body");
}

// Readability-style: favor long text blocks, penalize link farms.
inline long block_score(const MarkupNode& n) {
    std::string text = collapse_ws(text_content(n));
    return static_cast<long>(text.size()) - 25L * static_cast<long>(count_links(n));
}

inline std::string block_text(const MarkupNode& n) {
    std::vector<std::string> paragraphs;
    walk_elements(n, [&](const MarkupNode& e) {
        if (!e.is_element("p")) return;
        std::string p = collapse_ws(text_content(e));
        if (!p.empty()) paragraphs.push_back(std::move(p));
    });
    if (!paragraphs.empty()) return join(paragraphs, "\n\n");
    return collapse_ws(text_content(n));
}

} // namespace detail_extract

inline std::vector<ImageCandidate> enumerate_image_candidates(const MarkupDoc& doc,
                                                              const std::string& base_url) {
    using namespace detail_extract;
    std::vector<ImageCandidate> out;
    std::unordered_set<std::string> seen;
    auto push = [&](const std::string& raw, bool is_meta) {
        if (trim(raw).empty()) return;
        std::string abs = resolve_reference(base_url, std::string(trim(raw)));
        if (!is_http_url(abs)) return;
        if (!seen.insert(normalize_url(abs)).second) return;
        out.push_back(ImageCandidate{std::move(abs), is_meta, static_cast<int>(out.size()) + 1});
    };
    walk_elements(*doc.root, [&](const MarkupNode& n) {
        if (!n.is_element("meta")) return;
        auto key = n.attr("property");
        if (!key) key = n.attr("name");
        if (!key) return;
        std::string k = ascii_lower(*key);
        if (k != "og:image" && k != "og:image:url" && k != "twitter:image" &&
            k != "twitter:image:src")
            return;
        if (auto content = n.attr("content")) push(*content, true);
    });
    walk_elements(*doc.root, [&](const MarkupNode& n) {
        if (!n.is_element("img")) return;
        if (auto src = n.attr("src")) push(*src, false);
    });
    return out;
}

inline ArticleExtract extract_article(const std::string& html, const std::string& base_url) {
    using namespace detail_extract;
    MarkupDoc doc = parse_html(html);
    ArticleExtract art;

    if (auto og = meta_content(*doc.root, "property", "og:title")) {
        art.title = collapse_ws(*og);
    } else if (const MarkupNode* t = find_first(*doc.root, "title")) {
        art.title = collapse_ws(text_content(*t));
    }

    const MarkupNode* best = nullptr;
    long best_score = 0;
    walk_elements(*doc.root, [&](const MarkupNode& n) {
        if (!is_block_candidate(n)) return;
        long score = block_score(n);
        if (!best || score > best_score) {
            best = &n;
            best_score = score;
        }
    });
    if (best) art.text = block_text(*best);
    if (art.text.empty() && art.title.empty())
        throw Error(Errc::empty_extraction, "no title or body text in " + base_url);

    std::optional<std::string> icon_href;
    walk_elements(*doc.root, [&](const MarkupNode& n) {
        if (icon_href || !n.is_element("link")) return;
        if (!n.attr_has_token("rel", "icon")) return;
        if (auto href = n.attr("href"); href && !trim(*href).empty())
            icon_href = std::string(trim(*href));
    });
    art.favicon = icon_href ? resolve_reference(base_url, *icon_href)
                            : url_origin(base_url) + "/favicon.ico";

    auto published = meta_content(*doc.root, "property", "article:published_time");
    if (!published) published = meta_content(*doc.root, "name", "date");
    if (published) art.published_meta = parse_timestamp(*published);

    art.image_candidates = enumerate_image_candidates(doc, base_url);
    return art;
}

} // namespace storyweave
