#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "storyweave/error.hpp"
#include "storyweave/text.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

namespace storyweave {

using ojson = nlohmann::ordered_json;

struct Entity {
    std::string cls;    // "PERSON", "LOCATION", "ORGANIZATION", "UNLABELED", ...
    std::string entity; // surface form
    ojson extras = ojson::object();

    friend bool operator==(const Entity&, const Entity&) = default;
};

struct NodeDetails {
    std::string annotation;
    std::string color;
    std::optional<std::string> connected_comp_type;
    std::optional<std::string> type; // polarity: left | center | right
    ojson extras = ojson::object();

    friend bool operator==(const NodeDetails&, const NodeDetails&) = default;
};

struct ArticleNode {
    std::string id; // "{registered-domain}-{per-domain index}"
    std::string link;
    std::string title;
    std::string text;
    std::optional<Timestamp> published;
    std::optional<std::string> favicon;
    std::optional<std::string> rss_uri_m;
    std::vector<Entity> entities;
    Timestamp extraction_time;
    NodeDetails node_details;
    ojson extras = ojson::object();

    // Registered domain encoded in the id ("nytimes.com-1" -> "nytimes.com").
    std::string source_domain() const {
        size_t dash = id.rfind('-');
        return dash == std::string::npos ? id : id.substr(0, dash);
    }

    friend bool operator==(const ArticleNode&, const ArticleNode&) = default;
};

struct EdgeRecord {
    size_t source = 0; // index into nodes
    size_t target = 0;
    double sim = 0;    // [0,1], stored rounded to 2 decimals
    int rank = 0;      // 1..E
    std::string label; // "{rank} ({sim})"
    std::string label_description = "rank (sim)";
    ojson extras = ojson::object();

    friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

inline std::string edge_label(int rank, double sim) {
    return std::to_string(rank) + " (" + format_sim(sim) + ")";
}

struct ConnectedComponent {
    std::vector<size_t> nodes;
    double avg_degree = 0;
    double density = 0;
    int unique_source_count = 0;
    NodeDetails node_details;
    ojson extras = ojson::object();

    friend bool operator==(const ConnectedComponent&, const ConnectedComponent&) = default;
};

struct GraphPointer {
    std::int64_t cursor = 0;
    std::int64_t hist = 1440; // minutes
    std::string cur_path;     // "YYYY/MM/DD"
    ojson extras = ojson::object();

    friend bool operator==(const GraphPointer&, const GraphPointer&) = default;
};

struct GraphDocument {
    std::vector<ArticleNode> nodes;
    std::vector<EdgeRecord> links;
    std::vector<ConnectedComponent> connected_comps;
    Timestamp timestamp;
    std::string ner_version;
    std::string self_uri;
    GraphPointer graph_pointer;
    std::string config;
    ojson extras = ojson::object();

    friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string path;
    std::string message;
};

namespace detail_model {

inline bool near(double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; }

inline bool valid_node_id(const std::string& id) {
    size_t dash = id.rfind('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= id.size()) return false;
    std::string num = id.substr(dash + 1);
    if (!all_digits(num)) return false;
    return num != "0" && !(num.size() > 1 && num[0] == '0');
}

inline bool valid_polarity(const std::string& p) {
    return p == "left" || p == "center" || p == "right";
}

} // namespace detail_model

// First violated invariant, or nullopt when the document is valid.
inline std::optional<Violation> validate_graph(const GraphDocument& g) {
    using namespace detail_model;
    const size_t n = g.nodes.size();

    std::unordered_set<std::string> seen_ids;
    for (size_t i = 0; i < n; ++i) {
        const auto& node = g.nodes[i];
        std::string at = "nodes[" + std::to_string(i) + "]";
        if (!valid_node_id(node.id))
            return Violation{at + ".id", "id must match \"<domain>-<positive integer>\": " + node.id};
        if (!seen_ids.insert(node.id).second)
            return Violation{at + ".id", "duplicate node id: " + node.id};
        if (!is_http_url(node.link))
            return Violation{at + ".link", "link must be an absolute http(s) URI: " + node.link};
        if (node.node_details.type && !valid_polarity(*node.node_details.type))
            return Violation{at + ".node-details.type",
                             "polarity must be left|center|right: " + *node.node_details.type};
        for (size_t k = 0; k < node.entities.size(); ++k) {
            const auto& e = node.entities[k];
            std::string ep = at + ".entities[" + std::to_string(k) + "]";
            if (e.entity.empty()) return Violation{ep + ".entity", "entity must be non-empty"};
            if (e.cls.empty()) return Violation{ep + ".class", "class must be non-empty"};
            for (char c : e.cls)
                if (c >= 'a' && c <= 'z')
                    return Violation{ep + ".class", "class must be uppercase: " + e.cls};
        }
    }

    std::set<std::pair<size_t, size_t>> pairs;
    std::vector<int> ranks;
    ranks.reserve(g.links.size());
    for (size_t i = 0; i < g.links.size(); ++i) {
        const auto& e = g.links[i];
        std::string at = "links[" + std::to_string(i) + "]";
        if (e.source >= n) return Violation{at + ".source", "node index out of range"};
        if (e.target >= n) return Violation{at + ".target", "node index out of range"};
        if (e.source == e.target) return Violation{at, "self-loop edge"};
        auto key = std::minmax(e.source, e.target);
        if (!pairs.insert(key).second) return Violation{at, "duplicate edge for node pair"};
        if (e.sim < 0.0 || e.sim > 1.0) return Violation{at + ".sim", "sim must be within [0,1]"};
        if (!near(e.sim * 100.0, std::round(e.sim * 100.0)))
            return Violation{at + ".sim", "sim must be rounded to 2 decimals"};
        if (e.rank < 1) return Violation{at + ".rank", "rank must be positive"};
        if (e.label != edge_label(e.rank, e.sim))
            return Violation{at + ".label",
                             "label must be \"" + edge_label(e.rank, e.sim) + "\", got \"" + e.label + "\""};
        if (e.label_description != "rank (sim)")
            return Violation{at + ".label-description", "must be \"rank (sim)\""};
        ranks.push_back(e.rank);
    }
    {
        std::vector<int> sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<int>(i) + 1)
                return Violation{"links", "ranks must form exactly 1..E with no gaps"};
        // rank order must be non-increasing in sim
        std::vector<const EdgeRecord*> byrank(g.links.size());
        for (const auto& e : g.links) byrank[e.rank - 1] = &e;
        for (size_t i = 1; i < byrank.size(); ++i)
            if (byrank[i]->sim > byrank[i - 1]->sim + 1e-12)
                return Violation{"links", "ranks must be non-increasing in sim"};
    }

    std::unordered_set<size_t> non_isolated;
    for (const auto& e : g.links) {
        non_isolated.insert(e.source);
        non_isolated.insert(e.target);
    }
    std::unordered_set<size_t> in_comp;
    for (size_t ci = 0; ci < g.connected_comps.size(); ++ci) {
        const auto& c = g.connected_comps[ci];
        std::string at = "connected-comps[" + std::to_string(ci) + "]";
        if (c.nodes.size() < 2) return Violation{at + ".nodes", "component must have >= 2 nodes"};
        std::unordered_set<size_t> members;
        for (size_t idx : c.nodes) {
            if (idx >= n) return Violation{at + ".nodes", "node index out of range"};
            if (!members.insert(idx).second)
                return Violation{at + ".nodes", "node index repeated within component"};
            if (!in_comp.insert(idx).second)
                return Violation{at + ".nodes",
                                 "node " + std::to_string(idx) + " appears in two components"};
        }
        size_t internal_edges = 0;
        for (const auto& e : g.links)
            if (members.count(e.source) && members.count(e.target)) ++internal_edges;
        const double cn = static_cast<double>(c.nodes.size());
        if (!near(c.avg_degree, 2.0 * static_cast<double>(internal_edges) / cn))
            return Violation{at + ".avg-degree", "avg_degree must equal 2*E_c/|nodes|"};
        if (!near(c.density, 2.0 * static_cast<double>(internal_edges) / (cn * (cn - 1.0))))
            return Violation{at + ".density", "density must equal 2*E_c/(|nodes|*(|nodes|-1))"};
        if (c.density <= 0.0 || c.density > 1.0 + 1e-12)
            return Violation{at + ".density", "density must lie in (0,1]"};
        if (c.unique_source_count < 1 ||
            c.unique_source_count > static_cast<int>(c.nodes.size()))
            return Violation{at + ".unique-source-count", "must lie in 1..|nodes|"};
        if (c.node_details.connected_comp_type != "event" &&
            c.node_details.connected_comp_type != "cluster")
            return Violation{at + ".node-details.connected-comp-type",
                             "must be \"event\" or \"cluster\""};
    }
    if (in_comp != non_isolated)
        return Violation{"connected-comps", "components must partition the non-isolated nodes"};

    if (g.graph_pointer.cursor < 0)
        return Violation{"graph-pointer.cursor", "cursor must be non-negative"};
    if (g.graph_pointer.hist < 1)
        return Violation{"graph-pointer.hist", "hist must be a positive number of minutes"};
    if (g.graph_pointer.cur_path != format_date(g.timestamp.date(), '/'))
        return Violation{"graph-pointer.cur-path",
                         "cur-path must match the timestamp's UTC date: expected " +
                             format_date(g.timestamp.date(), '/')};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON codec (schema and key order per the live graph documents)

namespace detail_model {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw Error(Errc::schema_violation, path + ": " + msg);
}

inline const ojson& require(const ojson& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing required key \"") + key + "\"");
    return *it;
}

inline std::string require_string(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = require(obj, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline double require_number(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = require(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

inline std::int64_t require_int(const ojson& obj, const char* key, const std::string& path) {
    const ojson& v = require(obj, key, path);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

inline Timestamp require_timestamp(const ojson& obj, const char* key, const std::string& path) {
    auto t = parse_timestamp(require_string(obj, key, path));
    if (!t) fail(path + "." + key, "unparseable datetime");
    return *t;
}

inline ojson collect_extras(const ojson& obj, std::initializer_list<const char*> known) {
    ojson extras = ojson::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool is_known = false;
        for (const char* k : known)
            if (it.key() == k) { is_known = true; break; }
        if (!is_known) extras[it.key()] = it.value();
    }
    return extras;
}

inline void append_extras(ojson& out, const ojson& extras) {
    if (!extras.is_object()) return;
    for (auto it = extras.begin(); it != extras.end(); ++it) out[it.key()] = it.value();
}

// Metric values that happen to be integral are printed as JSON integers
// (the live service prints "avg-degree": 1, not 1.0).
inline ojson number_value(double v) {
    if (std::floor(v) == v && std::fabs(v) < 9.0e15) return ojson(static_cast<std::int64_t>(v));
    return ojson(v);
}

inline NodeDetails parse_node_details(const ojson& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    NodeDetails nd;
    nd.annotation = require_string(j, "annotation", path);
    nd.color = require_string(j, "color", path);
    if (j.contains("connected-comp-type")) {
        if (!j["connected-comp-type"].is_string()) fail(path + ".connected-comp-type", "expected a string");
        nd.connected_comp_type = j["connected-comp-type"].get<std::string>();
    }
    if (j.contains("type")) {
        if (!j["type"].is_string()) fail(path + ".type", "expected a string");
        nd.type = j["type"].get<std::string>();
    }
    nd.extras = collect_extras(j, {"annotation", "color", "connected-comp-type", "type"});
    return nd;
}

inline ojson dump_node_details(const NodeDetails& nd) {
    ojson j = ojson::object();
    j["annotation"] = nd.annotation;
    j["color"] = nd.color;
    if (nd.connected_comp_type) j["connected-comp-type"] = *nd.connected_comp_type;
    if (nd.type) j["type"] = *nd.type;
    append_extras(j, nd.extras);
    return j;
}

} // namespace detail_model

inline GraphDocument parse_graph_json(const ojson& j) {
    using namespace detail_model;
    if (!j.is_object()) fail("$", "top level must be an object");
    GraphDocument g;

    const ojson& jnodes = require(j, "nodes", "$");
    if (!jnodes.is_array()) fail("nodes", "expected an array");
    for (size_t i = 0; i < jnodes.size(); ++i) {
        const ojson& jn = jnodes[i];
        std::string at = "nodes[" + std::to_string(i) + "]";
        if (!jn.is_object()) fail(at, "expected an object");
        ArticleNode node;
        node.id = require_string(jn, "id", at);
        node.link = require_string(jn, "link", at);
        node.title = require_string(jn, "title", at);
        node.text = require_string(jn, "text", at);
        node.extraction_time = require_timestamp(jn, "extraction-time", at);
        if (jn.contains("published")) {
            if (!jn["published"].is_string()) fail(at + ".published", "expected a string");
            auto t = parse_timestamp(jn["published"].get<std::string>());
            if (!t) fail(at + ".published", "unparseable datetime");
            node.published = *t;
        }
        if (jn.contains("favicon")) {
            if (!jn["favicon"].is_string()) fail(at + ".favicon", "expected a string");
            node.favicon = jn["favicon"].get<std::string>();
        }
        if (jn.contains("rss-uri-m")) {
            if (!jn["rss-uri-m"].is_string()) fail(at + ".rss-uri-m", "expected a string");
            node.rss_uri_m = jn["rss-uri-m"].get<std::string>();
        }
        const ojson& jents = require(jn, "entities", at);
        if (!jents.is_array()) fail(at + ".entities", "expected an array");
        for (size_t k = 0; k < jents.size(); ++k) {
            const ojson& je = jents[k];
            std::string ep = at + ".entities[" + std::to_string(k) + "]";
            if (!je.is_object()) fail(ep, "expected an object");
            Entity e;
            e.cls = require_string(je, "class", ep);
            e.entity = require_string(je, "entity", ep);
            e.extras = collect_extras(je, {"class", "entity"});
            node.entities.push_back(std::move(e));
        }
        node.node_details = parse_node_details(require(jn, "node-details", at), at + ".node-details");
        node.extras = collect_extras(jn, {"entities", "extraction-time", "favicon", "id", "link",
                                          "node-details", "published", "rss-uri-m", "text", "title"});
        g.nodes.push_back(std::move(node));
    }

    const ojson& jlinks = require(j, "links", "$");
    if (!jlinks.is_array()) fail("links", "expected an array");
    for (size_t i = 0; i < jlinks.size(); ++i) {
        const ojson& jl = jlinks[i];
        std::string at = "links[" + std::to_string(i) + "]";
        if (!jl.is_object()) fail(at, "expected an object");
        EdgeRecord e;
        std::int64_t src = require_int(jl, "source", at);
        std::int64_t dst = require_int(jl, "target", at);
        if (src < 0) fail(at + ".source", "node index must be non-negative");
        if (dst < 0) fail(at + ".target", "node index must be non-negative");
        e.source = static_cast<size_t>(src);
        e.target = static_cast<size_t>(dst);
        e.sim = require_number(jl, "sim", at);
        e.rank = static_cast<int>(require_int(jl, "rank", at));
        e.label = require_string(jl, "label", at);
        e.label_description = require_string(jl, "label-description", at);
        e.extras = collect_extras(jl, {"rank", "sim", "source", "target", "label", "label-description"});
        g.links.push_back(std::move(e));
    }

    const ojson& jcomps = require(j, "connected-comps", "$");
    if (!jcomps.is_array()) fail("connected-comps", "expected an array");
    for (size_t i = 0; i < jcomps.size(); ++i) {
        const ojson& jc = jcomps[i];
        std::string at = "connected-comps[" + std::to_string(i) + "]";
        if (!jc.is_object()) fail(at, "expected an object");
        ConnectedComponent c;
        c.avg_degree = require_number(jc, "avg-degree", at);
        c.density = require_number(jc, "density", at);
        const ojson& jm = require(jc, "nodes", at);
        if (!jm.is_array()) fail(at + ".nodes", "expected an array");
        for (const auto& v : jm) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                fail(at + ".nodes", "expected non-negative node indices");
            c.nodes.push_back(static_cast<size_t>(v.get<std::int64_t>()));
        }
        c.unique_source_count = static_cast<int>(require_int(jc, "unique-source-count", at));
        c.node_details = parse_node_details(require(jc, "node-details", at), at + ".node-details");
        c.extras = collect_extras(jc, {"avg-degree", "density", "node-details", "nodes",
                                       "unique-source-count"});
        g.connected_comps.push_back(std::move(c));
    }

    g.ner_version = require_string(j, "ner-version", "$");
    g.self_uri = require_string(j, "self", "$");
    g.timestamp = require_timestamp(j, "timestamp", "$");
    g.config = require_string(j, "config", "$");

    const ojson& jp = require(j, "graph-pointer", "$");
    if (!jp.is_object()) fail("graph-pointer", "expected an object");
    g.graph_pointer.cursor = require_int(jp, "cursor", "graph-pointer");
    g.graph_pointer.hist = require_int(jp, "hist", "graph-pointer");
    g.graph_pointer.cur_path = require_string(jp, "cur-path", "graph-pointer");
    g.graph_pointer.extras = collect_extras(jp, {"cursor", "hist", "cur-path"});

    g.extras = collect_extras(j, {"config", "connected-comps", "links", "ner-version", "nodes",
                                  "self", "timestamp", "graph-pointer"});

    if (auto v = validate_graph(g)) detail_model::fail(v->path, v->message);
    return g;
}

inline GraphDocument parse_graph(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::malformed_json, e.what());
    }
    return parse_graph_json(j);
}

inline ojson graph_to_json(const GraphDocument& g) {
    using namespace detail_model;
    ojson j = ojson::object();
    j["config"] = g.config;

    ojson comps = ojson::array();
    for (const auto& c : g.connected_comps) {
        ojson jc = ojson::object();
        jc["avg-degree"] = number_value(c.avg_degree);
        jc["density"] = number_value(c.density);
        jc["node-details"] = dump_node_details(c.node_details);
        jc["nodes"] = c.nodes;
        jc["unique-source-count"] = c.unique_source_count;
        append_extras(jc, c.extras);
        comps.push_back(std::move(jc));
    }
    j["connected-comps"] = std::move(comps);

    ojson links = ojson::array();
    for (const auto& e : g.links) {
        ojson jl = ojson::object();
        jl["rank"] = e.rank;
        jl["sim"] = number_value(e.sim);
        jl["source"] = e.source;
        jl["target"] = e.target;
        jl["label"] = e.label;
        jl["label-description"] = e.label_description;
        append_extras(jl, e.extras);
        links.push_back(std::move(jl));
    }
    j["links"] = std::move(links);

    j["ner-version"] = g.ner_version;

    ojson nodes = ojson::array();
    for (const auto& n : g.nodes) {
        ojson jn = ojson::object();
        ojson ents = ojson::array();
        for (const auto& e : n.entities) {
            ojson je = ojson::object();
            je["class"] = e.cls;
            je["entity"] = e.entity;
            append_extras(je, e.extras);
            ents.push_back(std::move(je));
        }
        jn["entities"] = std::move(ents);
        jn["extraction-time"] = n.extraction_time.to_string();
        if (n.favicon) jn["favicon"] = *n.favicon;
        jn["id"] = n.id;
        jn["link"] = n.link;
        jn["node-details"] = dump_node_details(n.node_details);
        if (n.published) jn["published"] = n.published->to_string();
        if (n.rss_uri_m) jn["rss-uri-m"] = *n.rss_uri_m;
        jn["text"] = n.text;
        jn["title"] = n.title;
        append_extras(jn, n.extras);
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);

    j["self"] = g.self_uri;
    j["timestamp"] = g.timestamp.to_string();

    ojson jp = ojson::object();
    jp["cursor"] = g.graph_pointer.cursor;
    jp["hist"] = g.graph_pointer.hist;
    jp["cur-path"] = g.graph_pointer.cur_path;
    append_extras(jp, g.graph_pointer.extras);
    j["graph-pointer"] = std::move(jp);

    append_extras(j, g.extras);
    return j;
}

inline std::string serialize_graph(const GraphDocument& g) {
    if (auto v = validate_graph(g))
        throw Error(Errc::invariant_violation, v->path + ": " + v->message);
    return graph_to_json(g).dump(2) + "\n";
}

} // namespace storyweave
