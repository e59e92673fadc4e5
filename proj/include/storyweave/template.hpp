#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyweave/error.hpp"
#include "storyweave/story.hpp"
#include "storyweave/text.hpp"

namespace storyweave {

// Two-construct template language: `{{ path.to.field }}` substitutes a value
// (HTML-escaped), `{% for x in path %}...{% endfor %}` iterates. A loop body
// runs once per array element, zero times over null, and exactly once over
// any other value, which doubles as an optional-presence test.

namespace detail_template {

struct TNode {
    enum class Kind { text, subst, loop } kind = Kind::text;
    std::string text;              // text: literal; subst/loop: dotted path
    std::string var;               // loop variable name
    size_t offset = 0;             // template offset, for error messages
    std::vector<TNode> children;   // loop body
};

[[noreturn]] inline void syntax_error(const std::string& msg, size_t offset) {
    throw Error(Errc::template_syntax,
                msg + " at offset " + std::to_string(offset));
}

inline bool valid_path(std::string_view path) {
    if (path.empty()) return false;
    bool segment_started = false;
    for (char c : path) {
        if (c == '.') {
            if (!segment_started) return false;
            segment_started = false;
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
            segment_started = true;
        } else {
            return false;
        }
    }
    return segment_started;
}

inline std::vector<TNode> parse_template(const std::string& tmpl) {
    std::vector<TNode> root;
    std::vector<std::pair<TNode, size_t>> loop_stack; // node, opening offset
    auto top = [&]() -> std::vector<TNode>& {
        return loop_stack.empty() ? root : loop_stack.back().first.children;
    };

    size_t i = 0;
    while (i < tmpl.size()) {
        size_t brace = tmpl.find('{', i);
        if (brace == std::string::npos || brace + 1 >= tmpl.size()) {
            TNode t;
            t.kind = TNode::Kind::text;
            t.text = tmpl.substr(i);
            if (!t.text.empty()) top().push_back(std::move(t));
            break;
        }
        char next = tmpl[brace + 1];
        if (next != '{' && next != '%') {
            TNode t;
            t.kind = TNode::Kind::text;
            t.text = tmpl.substr(i, brace + 1 - i);
            top().push_back(std::move(t));
            i = brace + 1;
            continue;
        }
        if (brace > i) {
            TNode t;
            t.kind = TNode::Kind::text;
            t.text = tmpl.substr(i, brace - i);
            top().push_back(std::move(t));
        }
        if (next == '{') {
            size_t close = tmpl.find("}}", brace + 2);
            if (close == std::string::npos) syntax_error("unclosed '{{'", brace);
            std::string path = trim(tmpl.substr(brace + 2, close - brace - 2));
            if (!valid_path(path)) syntax_error("bad substitution path \"" + path + "\"", brace);
            TNode t;
            t.kind = TNode::Kind::subst;
            t.text = path;
            t.offset = brace;
            top().push_back(std::move(t));
            i = close + 2;
        } else {
            size_t close = tmpl.find("%}", brace + 2);
            if (close == std::string::npos) syntax_error("unclosed '{%'", brace);
            std::string body = collapse_ws(tmpl.substr(brace + 2, close - brace - 2));
            if (body == "endfor") {
                if (loop_stack.empty()) syntax_error("'endfor' without matching 'for'", brace);
                TNode done = std::move(loop_stack.back().first);
                loop_stack.pop_back();
                top().push_back(std::move(done));
            } else if (body.rfind("for ", 0) == 0) {
                auto words = split(body, ' ');
                if (words.size() != 4 || words[2] != "in" || !valid_path(words[3]) ||
                    !valid_path(words[1]) || words[1].find('.') != std::string::npos)
                    syntax_error("expected '{% for <var> in <path> %}'", brace);
                TNode loop;
                loop.kind = TNode::Kind::loop;
                loop.var = words[1];
                loop.text = words[3];
                loop.offset = brace;
                loop_stack.emplace_back(std::move(loop), brace);
            } else {
                syntax_error("unknown tag '{% " + body + " %}'", brace);
            }
            i = close + 2;
        }
    }
    if (!loop_stack.empty())
        syntax_error("'for' without matching 'endfor'", loop_stack.back().second);
    return root;
}

struct Scope {
    std::string name;
    const ojson* value;
};

inline const ojson* resolve_path(const std::string& path, const ojson& model,
                                 const std::vector<Scope>& scopes) {
    auto segments = split(path, '.');
    const ojson* cur = nullptr;
    size_t start = 0;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        if (it->name == segments[0]) {
            cur = it->value;
            start = 1;
            break;
        }
    }
    if (!cur) cur = &model;
    for (size_t k = start; k < segments.size(); ++k) {
        if (!cur->is_object()) return nullptr;
        auto found = cur->find(segments[k]);
        if (found == cur->end()) return nullptr;
        cur = &*found;
    }
    return cur;
}

inline std::string value_text(const ojson& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    return v.dump();
}

inline void render_nodes(const std::vector<TNode>& nodes, const ojson& model,
                         std::vector<Scope>& scopes, std::string& out) {
    for (const auto& node : nodes) {
        switch (node.kind) {
            case TNode::Kind::text:
                out += node.text;
                break;
            case TNode::Kind::subst: {
                const ojson* v = resolve_path(node.text, model, scopes);
                if (!v)
                    throw Error(Errc::unknown_field,
                                "\"" + node.text + "\" is not in the story model (offset " +
                                    std::to_string(node.offset) + ")");
                out += html_escape(value_text(*v));
                break;
            }
            case TNode::Kind::loop: {
                const ojson* v = resolve_path(node.text, model, scopes);
                if (!v)
                    throw Error(Errc::unknown_field,
                                "\"" + node.text + "\" is not in the story model (offset " +
                                    std::to_string(node.offset) + ")");
                if (v->is_null()) break;
                if (v->is_array()) {
                    for (const auto& item : *v) {
                        scopes.push_back({node.var, &item});
                        render_nodes(node.children, model, scopes, out);
                        scopes.pop_back();
                    }
                } else {
                    scopes.push_back({node.var, v});
                    render_nodes(node.children, model, scopes, out);
                    scopes.pop_back();
                }
                break;
            }
        }
    }
}

} // namespace detail_template

inline std::string render_template(const std::string& tmpl, const ojson& model) {
    auto nodes = detail_template::parse_template(tmpl);
    std::string out;
    out.reserve(tmpl.size());
    std::vector<detail_template::Scope> scopes;
    detail_template::render_nodes(nodes, model, scopes, out);
    return out;
}

// The render context is the story JSON plus presentation-only derived fields.
inline ojson build_render_context(const StoryDocument& story) {
    ojson model = story_to_json(story);
    for (auto& el : model["elements"]) {
        el["live-badge"] = el["archived"].get<bool>() ? ojson(nullptr) : ojson("live web");
        const ojson& pd = el["pubdate"];
        const ojson& md = el["memento-datetime"];
        el["date-display"] = !pd.is_null() ? pd : (!md.is_null() ? md : ojson(""));
    }
    return model;
}

inline const char* default_story_template() {
    return R"(---
title: {{ title }}
date: {{ date }}
generated_at: {{ generated-at }}
---
<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{{ title }}</title>
</head>
<body>
<header>
<h1>{{ title }}</h1>
<p class="story-date">{{ date }}</p>
<p class="story-metrics">{{ metrics.node-count }} articles from {{ metrics.unique-source-count }} sources</p>
</header>
{% for img in striking-image %}<figure class="striking-image">
<img src="{{ img.src }}" width="{{ img.width }}" height="{{ img.height }}" alt="{{ title }}">
</figure>
{% endfor %}<section class="top-entities">
<h2>Top entities</h2>
<ul>
{% for e in top-entities %}<li><span class="entity">{{ e.entity }}</span> <span class="entity-class">{{ e.class }}</span> <span class="entity-frequency">{{ e.frequency }}</span></li>
{% endfor %}</ul>
</section>
<section class="top-sumgrams">
<h2>Top phrases</h2>
<ul>
{% for s in top-sumgrams %}<li><span class="sumgram">{{ s.text }}</span> <span class="sumgram-df">{{ s.document-frequency }}</span></li>
{% endfor %}</ul>
</section>
<section class="cards">
{% for e in elements %}<article class="card">
<h3><a href="{{ e.uri-m }}">{{ e.title }}</a></h3>
{% for badge in e.live-badge %}<span class="live-badge">{{ badge }}</span>
{% endfor %}<p class="snippet">{{ e.snippet }}</p>
{% for img in e.image %}<img class="card-image" src="{{ img.src }}" width="{{ img.width }}" height="{{ img.height }}" alt="{{ e.title }}">
{% endfor %}<p class="card-source"><img class="favicon" src="{{ e.favicon }}" alt=""> {{ e.domain }} <time>{{ e.date-display }}</time></p>
</article>
{% endfor %}</section>
</body>
</html>
)";
}

inline std::string render_story(const StoryDocument& story,
                                const std::string& tmpl = default_story_template()) {
    return render_template(tmpl, build_render_context(story));
}

} // namespace storyweave
