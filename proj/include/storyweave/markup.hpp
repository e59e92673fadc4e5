#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "storyweave/text.hpp"

namespace storyweave {

// Small DOM for the HTML/XML this toolkit actually meets: news pages, RSS 2.0
// and Atom feeds. HTML parsing is lenient (unmatched tags are tolerated,
// common auto-close rules applied); XML parsing reports broken nesting.

struct MarkupError {
    std::string message;
    size_t offset = 0;
};

struct MarkupNode {
    enum class Kind { element, text };
    Kind kind = Kind::element;
    std::string tag;  // lowercased; empty for text nodes
    std::string text; // text nodes only, entities decoded
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<std::unique_ptr<MarkupNode>> children;

    bool is_element(std::string_view t) const {
        return kind == Kind::element && tag == t;
    }

    std::optional<std::string> attr(std::string_view name) const {
        for (const auto& [k, v] : attrs)
            if (iequals(k, name)) return v;
        return std::nullopt;
    }

    // True when the (space-separated) attribute value contains `token`.
    bool attr_has_token(std::string_view name, std::string_view token) const {
        auto v = attr(name);
        if (!v) return false;
        for (const auto& part : split(*v, ' '))
            if (iequals(trim(part), token)) return true;
        return false;
    }
};

struct MarkupDoc {
    std::unique_ptr<MarkupNode> root; // synthetic container element
};

namespace detail_markup {

inline void append_codepoint(std::string& out, unsigned long cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0x10FFFF) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline const std::unordered_map<std::string, const char*>& named_entities() {
    static const std::unordered_map<std::string, const char*> map = {
        {"amp", "&"},      {"lt", "<"},       {"gt", ">"},       {"quot", "\""},
        {"apos", "'"},     {"nbsp", "\xC2\xA0"}, {"copy", "\xC2\xA9"}, {"reg", "\xC2\xAE"},
        {"mdash", "\xE2\x80\x94"}, {"ndash", "\xE2\x80\x93"}, {"hellip", "\xE2\x80\xA6"},
        {"lsquo", "\xE2\x80\x98"}, {"rsquo", "\xE2\x80\x99"}, {"ldquo", "\xE2\x80\x9C"},
        {"rdquo", "\xE2\x80\x9D"}, {"trade", "\xE2\x84\xA2"},
    };
    return map;
}

} // namespace detail_markup

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (size_t k = 2; k < name.size() && ok; ++k) {
                    char c = ascii_lower_char(name[k]);
                    if (c >= '0' && c <= '9') cp = cp * 16 + static_cast<unsigned long>(c - '0');
                    else if (c >= 'a' && c <= 'f') cp = cp * 16 + static_cast<unsigned long>(c - 'a' + 10);
                    else ok = false;
                }
            } else {
                for (size_t k = 1; k < name.size() && ok; ++k) {
                    if (name[k] < '0' || name[k] > '9') ok = false;
                    else cp = cp * 10 + static_cast<unsigned long>(name[k] - '0');
                }
            }
            if (ok && cp > 0 && cp <= 0x10FFFF) {
                detail_markup::append_codepoint(out, cp);
                i = semi + 1;
                continue;
            }
        } else {
            auto it = detail_markup::named_entities().find(std::string(name));
            if (it != detail_markup::named_entities().end()) {
                out += it->second;
                i = semi + 1;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

namespace detail_markup {

inline const std::unordered_set<std::string>& void_elements() {
    static const std::unordered_set<std::string> set = {
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "link", "meta", "param", "source", "track", "wbr"};
    return set;
}

inline const std::unordered_set<std::string>& raw_text_elements() {
    static const std::unordered_set<std::string> set = {"script", "style"};
    return set;
}

inline bool closes_open_p(const std::string& tag) {
    static const std::unordered_set<std::string> set = {
        "p", "div", "section", "article", "aside", "header", "footer", "ul", "ol",
        "li", "table", "blockquote", "h1", "h2", "h3", "h4", "h5", "h6", "pre",
        "form", "figure", "figcaption", "main", "nav", "dl", "dd", "dt"};
    return set.count(tag) > 0;
}

struct Parser {
    std::string_view src;
    size_t pos = 0;
    bool html_mode = true;

    MarkupDoc doc;
    std::vector<MarkupNode*> stack;

    explicit Parser(std::string_view s, bool html) : src(s), html_mode(html) {
        doc.root = std::make_unique<MarkupNode>();
        doc.root->tag = "#root";
        stack.push_back(doc.root.get());
    }

    [[noreturn]] void error(const std::string& msg) { throw MarkupError{msg, pos}; }

    MarkupNode* top() { return stack.back(); }

    void add_text(std::string_view raw, bool decode) {
        if (raw.empty()) return;
        auto node = std::make_unique<MarkupNode>();
        node->kind = MarkupNode::Kind::text;
        node->text = decode ? decode_entities(raw) : std::string(raw);
        top()->children.push_back(std::move(node));
    }

    void open_element(std::unique_ptr<MarkupNode> el, bool self_closing) {
        const std::string tag = el->tag;
        if (html_mode) {
            if (closes_open_p(tag) && top()->tag == "p") stack.pop_back();
            if (tag == "li" && top()->tag == "li") stack.pop_back();
            if ((tag == "td" || tag == "th") && (top()->tag == "td" || top()->tag == "th"))
                stack.pop_back();
            if (tag == "tr") {
                while (top()->tag == "td" || top()->tag == "th" || top()->tag == "tr")
                    stack.pop_back();
            }
            if (tag == "option" && top()->tag == "option") stack.pop_back();
        }
        MarkupNode* raw = el.get();
        top()->children.push_back(std::move(el));
        bool is_void = html_mode && void_elements().count(tag) > 0;
        if (!self_closing && !is_void) stack.push_back(raw);
    }

    void close_element(const std::string& tag) {
        for (size_t i = stack.size(); i-- > 1;) {
            if (stack[i]->tag == tag) {
                stack.resize(i);
                return;
            }
        }
        if (!html_mode) error("unmatched closing tag </" + tag + ">");
        // lenient: ignore stray close tags
    }

    void skip_raw_text(const std::string& tag) {
        std::string close = "</" + tag;
        size_t end = pos;
        while (end < src.size()) {
            size_t hit = src.find('<', end);
            if (hit == std::string_view::npos) { pos = src.size(); return; }
            if (hit + close.size() <= src.size() &&
                iequals(src.substr(hit, close.size()), close)) {
                size_t gt = src.find('>', hit);
                pos = (gt == std::string_view::npos) ? src.size() : gt + 1;
                return;
            }
            end = hit + 1;
        }
        pos = src.size();
    }

    std::string read_name() {
        size_t start = pos;
        while (pos < src.size()) {
            char c = src[pos];
            if (is_ascii_space(c) || c == '>' || c == '/' || c == '=') break;
            ++pos;
        }
        return ascii_lower(std::string(src.substr(start, pos - start)));
    }

    void skip_ws() {
        while (pos < src.size() && is_ascii_space(src[pos])) ++pos;
    }

    void parse_attrs(MarkupNode& el, bool& self_closing) {
        self_closing = false;
        while (pos < src.size()) {
            skip_ws();
            if (pos >= src.size()) break;
            if (src[pos] == '>') { ++pos; return; }
            if (src[pos] == '/') {
                ++pos;
                skip_ws();
                if (pos < src.size() && src[pos] == '>') { ++pos; self_closing = true; return; }
                continue;
            }
            std::string name = read_name();
            if (name.empty()) { ++pos; continue; }
            std::string value;
            skip_ws();
            if (pos < src.size() && src[pos] == '=') {
                ++pos;
                skip_ws();
                if (pos < src.size() && (src[pos] == '"' || src[pos] == '\'')) {
                    char quote = src[pos++];
                    size_t end = src.find(quote, pos);
                    if (end == std::string_view::npos) {
                        if (!html_mode) error("unterminated attribute value");
                        end = src.size();
                    }
                    value = decode_entities(src.substr(pos, end - pos));
                    pos = (end < src.size()) ? end + 1 : end;
                } else {
                    size_t start = pos;
                    while (pos < src.size() && !is_ascii_space(src[pos]) && src[pos] != '>') ++pos;
                    value = decode_entities(src.substr(start, pos - start));
                }
            }
            if (!el.attr(name)) el.attrs.emplace_back(std::move(name), std::move(value));
        }
        if (!html_mode) error("unterminated tag");
    }

    void run() {
        while (pos < src.size()) {
            size_t lt = src.find('<', pos);
            if (lt == std::string_view::npos) {
                add_text(src.substr(pos), true);
                break;
            }
            add_text(src.substr(pos, lt - pos), true);
            pos = lt;
            if (pos + 1 >= src.size()) break;
            char next = src[pos + 1];
            if (next == '!') {
                if (src.substr(pos, 4) == "<!--") {
                    size_t end = src.find("-->", pos + 4);
                    pos = (end == std::string_view::npos) ? src.size() : end + 3;
                } else if (src.substr(pos, 9) == "<![CDATA[") {
                    size_t end = src.find("]]>", pos + 9);
                    size_t stop = (end == std::string_view::npos) ? src.size() : end;
                    add_text(src.substr(pos + 9, stop - pos - 9), false);
                    pos = (end == std::string_view::npos) ? src.size() : end + 3;
                } else { // <!DOCTYPE ...>
                    size_t end = src.find('>', pos);
                    pos = (end == std::string_view::npos) ? src.size() : end + 1;
                }
            } else if (next == '?') {
                size_t end = src.find('>', pos);
                pos = (end == std::string_view::npos) ? src.size() : end + 1;
            } else if (next == '/') {
                pos += 2;
                std::string tag = read_name();
                size_t end = src.find('>', pos);
                pos = (end == std::string_view::npos) ? src.size() : end + 1;
                close_element(tag);
            } else if (std::isalpha(static_cast<unsigned char>(next))) {
                ++pos;
                auto el = std::make_unique<MarkupNode>();
                el->tag = read_name();
                bool self_closing = false;
                parse_attrs(*el, self_closing);
                std::string tag = el->tag;
                open_element(std::move(el), self_closing);
                if (html_mode && !self_closing && raw_text_elements().count(tag)) {
                    skip_raw_text(tag);
                    stack.pop_back();
                }
            } else {
                add_text(src.substr(pos, 1), false);
                ++pos;
            }
        }
        if (!html_mode && stack.size() > 1)
            error("unclosed element <" + top()->tag + ">");
    }
};

} // namespace detail_markup

inline MarkupDoc parse_html(std::string_view text) {
    detail_markup::Parser p(text, /*html=*/true);
    p.run();
    return std::move(p.doc);
}

// Throws MarkupError on malformed input.
inline MarkupDoc parse_xml(std::string_view text) {
    detail_markup::Parser p(text, /*html=*/false);
    p.run();
    return std::move(p.doc);
}

// Document-order traversal helpers.

template <typename F>
inline void walk_elements(const MarkupNode& node, F&& fn) {
    if (node.kind == MarkupNode::Kind::element && node.tag != "#root") fn(node);
    for (const auto& c : node.children) walk_elements(*c, fn);
}

inline std::vector<const MarkupNode*> find_all(const MarkupNode& root, std::string_view tag) {
    std::vector<const MarkupNode*> out;
    walk_elements(root, [&](const MarkupNode& n) {
        if (n.tag == tag) out.push_back(&n);
    });
    return out;
}

inline const MarkupNode* find_first(const MarkupNode& root, std::string_view tag) {
    auto all = find_all(root, tag);
    return all.empty() ? nullptr : all.front();
}

inline void collect_text(const MarkupNode& node, std::string& out) {
    if (node.kind == MarkupNode::Kind::text) {
        out += node.text;
        return;
    }
    for (const auto& c : node.children) collect_text(*c, out);
}

inline std::string text_content(const MarkupNode& node) {
    std::string out;
    collect_text(node, out);
    return out;
}

} // namespace storyweave
