#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "storyweave/error.hpp"
#include "storyweave/feed.hpp"
#include "storyweave/model.hpp"
#include "storyweave/text.hpp"
#include "storyweave/time.hpp"

namespace storyweave {

using EntityVector = std::map<std::string, int>;

inline EntityVector entity_vector(const ArticleNode& node) {
    EntityVector v;
    for (const auto& e : node.entities) {
        std::string key = ascii_lower(collapse_ws(e.entity));
        if (key.empty()) continue;
        ++v[key];
    }
    return v;
}

inline double similarity(const EntityVector& a, const EntityVector& b) {
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0;
    const EntityVector& small = a.size() <= b.size() ? a : b;
    const EntityVector& big = a.size() <= b.size() ? b : a;
    for (const auto& [k, w] : small) {
        auto it = big.find(k);
        if (it != big.end()) dot += double(w) * double(it->second);
    }
    if (dot == 0) return 0.0;
    double na = 0, nb = 0;
    for (const auto& [k, w] : a) na += double(w) * double(w);
    for (const auto& [k, w] : b) nb += double(w) * double(w);
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline std::vector<EdgeRecord> build_edges(const std::vector<ArticleNode>& nodes,
                                           double edge_threshold = 0.30) {
    struct Scored {
        double sim;
        size_t source, target;
    };
    std::vector<EntityVector> vectors;
    vectors.reserve(nodes.size());
    for (const auto& n : nodes) vectors.push_back(entity_vector(n));

    std::vector<Scored> scored;
    for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            double sim = similarity(vectors[i], vectors[j]);
            if (sim >= edge_threshold) scored.push_back({sim, i, j});
        }
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });
    std::vector<EdgeRecord> edges;
    edges.reserve(scored.size());
    for (size_t k = 0; k < scored.size(); ++k) {
        EdgeRecord e;
        e.source = scored[k].source;
        e.target = scored[k].target;
        e.rank = static_cast<int>(k) + 1;
        e.sim = round2(scored[k].sim);
        e.label = edge_label(e.rank, e.sim);
        edges.push_back(std::move(e));
    }
    return edges;
}

struct RawComponent {
    std::vector<size_t> nodes; // ascending
    size_t edge_count = 0;
};

// Components over nodes touched by at least one edge; isolated nodes are
// skipped. Sorted by size descending, ties by smallest member index.
inline std::vector<RawComponent> raw_components(size_t n_nodes,
                                                const std::vector<EdgeRecord>& edges) {
    std::vector<std::vector<size_t>> adjacency(n_nodes);
    for (const auto& e : edges) {
        adjacency[e.source].push_back(e.target);
        adjacency[e.target].push_back(e.source);
    }
    std::vector<int> comp_of(n_nodes, -1);
    std::vector<RawComponent> comps;
    for (size_t start = 0; start < n_nodes; ++start) {
        if (comp_of[start] != -1 || adjacency[start].empty()) continue;
        int id = static_cast<int>(comps.size());
        comps.emplace_back();
        std::deque<size_t> queue{start};
        comp_of[start] = id;
        while (!queue.empty()) {
            size_t u = queue.front();
            queue.pop_front();
            comps[id].nodes.push_back(u);
            for (size_t v : adjacency[u]) {
                if (comp_of[v] != -1) continue;
                comp_of[v] = id;
                queue.push_back(v);
            }
        }
        std::sort(comps[id].nodes.begin(), comps[id].nodes.end());
    }
    for (const auto& e : edges) comps[comp_of[e.source]].edge_count++;
    std::sort(comps.begin(), comps.end(), [](const RawComponent& a, const RawComponent& b) {
        if (a.nodes.size() != b.nodes.size()) return a.nodes.size() > b.nodes.size();
        return a.nodes.front() < b.nodes.front();
    });
    return comps;
}

struct ComponentMetrics {
    double avg_degree = 0;
    double density = 0;
    int unique_source_count = 0;
};

inline ComponentMetrics component_metrics(const std::vector<size_t>& members, size_t edge_count,
                                          const std::vector<ArticleNode>& nodes) {
    size_t n = members.size();
    if (n < 2)
        throw Error(Errc::degenerate_component,
                    "component must have at least 2 nodes, got " + std::to_string(n));
    ComponentMetrics m;
    m.avg_degree = 2.0 * double(edge_count) / double(n);
    m.density = 2.0 * double(edge_count) / (double(n) * double(n - 1));
    std::unordered_set<std::string> domains;
    for (size_t idx : members) domains.insert(nodes[idx].source_domain());
    m.unique_source_count = static_cast<int>(domains.size());
    return m;
}

inline std::string classify_component(ConnectedComponent& c, int event_min_sources = 3) {
    bool event = c.unique_source_count >= event_min_sources;
    c.node_details.annotation = "polarity";
    c.node_details.color = event ? "green" : "red";
    c.node_details.connected_comp_type = event ? "event" : "cluster";
    return *c.node_details.connected_comp_type;
}

inline std::vector<ConnectedComponent> connected_components(const std::vector<ArticleNode>& nodes,
                                                            const std::vector<EdgeRecord>& edges,
                                                            int event_min_sources = 3) {
    std::vector<ConnectedComponent> out;
    for (const auto& raw : raw_components(nodes.size(), edges)) {
        ConnectedComponent c;
        c.nodes = raw.nodes;
        ComponentMetrics m = component_metrics(raw.nodes, raw.edge_count, nodes);
        c.avg_degree = m.avg_degree;
        c.density = m.density;
        c.unique_source_count = m.unique_source_count;
        classify_component(c, event_min_sources);
        out.push_back(std::move(c));
    }
    return out;
}

// Largest by node count, then source diversity, then average degree; the
// smallest contained node index settles exact ties.
inline const ConnectedComponent& select_biggest_story(const GraphDocument& g) {
    if (g.connected_comps.empty())
        throw Error(Errc::no_story, "graph has no connected components");
    const ConnectedComponent* best = nullptr;
    for (const auto& c : g.connected_comps) {
        if (!best) {
            best = &c;
            continue;
        }
        auto key = [](const ConnectedComponent& x) {
            return std::make_tuple(x.nodes.size(), x.unique_source_count, x.avg_degree);
        };
        if (key(c) > key(*best) ||
            (key(c) == key(*best) && c.nodes.front() < best->nodes.front()))
            best = &c;
    }
    return *best;
}

inline std::string polarity_color(Polarity p) {
    switch (p) {
        case Polarity::left: return "blue";
        case Polarity::center: return "green";
        case Polarity::right: return "red";
    }
    return "";
}

// Ids look like "nytimes.com-3": registered domain of the link plus a
// 1-based per-domain counter in input order.
inline void assign_node_ids(std::vector<ArticleNode>& nodes) {
    std::unordered_map<std::string, int> counters;
    for (auto& n : nodes) {
        if (!n.id.empty()) continue;
        std::string domain = registered_domain_of_url(n.link);
        n.id = domain + "-" + std::to_string(++counters[domain]);
    }
}

struct GraphBuildOptions {
    double edge_threshold = 0.30;
    int event_min_sources = 3;
    int hist = 1440;
    long cursor = 0;
    std::string ner_version = "storyweave-rules/1";
    std::string config = "/files/config/polar-media-consensus-graph/00000000000000000000000000000000/";
    std::string self_base = "http://storygraph.cs.odu.edu/graphs/polar-media-consensus-graph/";
};

inline GraphDocument build_graph(std::vector<ArticleNode> nodes, UtcMicros now,
                                 const GraphBuildOptions& options = {}) {
    assign_node_ids(nodes);
    for (auto& n : nodes) {
        n.node_details.annotation = "polarity";
        if (n.node_details.type) {
            if (auto p = polarity_from(*n.node_details.type))
                n.node_details.color = polarity_color(*p);
        }
        n.node_details.connected_comp_type.reset();
    }

    GraphDocument g;
    g.links = build_edges(nodes, options.edge_threshold);
    g.connected_comps = connected_components(nodes, g.links, options.event_min_sources);
    for (const auto& c : g.connected_comps)
        for (size_t idx : c.nodes)
            nodes[idx].node_details.connected_comp_type = c.node_details.connected_comp_type;
    g.nodes = std::move(nodes);

    g.timestamp = make_timestamp(now);
    g.ner_version = options.ner_version;
    g.config = options.config;
    g.graph_pointer.cursor = options.cursor;
    g.graph_pointer.hist = options.hist;
    g.graph_pointer.cur_path = format_date(g.timestamp.date(), '/');

    auto secs = std::chrono::floor<std::chrono::seconds>(now);
    g.self_uri = options.self_base + "#cursor=" + std::to_string(options.cursor) +
                 "&hist=" + std::to_string(options.hist) + "&t=" +
                 format_iso8601(std::chrono::time_point_cast<std::chrono::microseconds>(secs))
                     .substr(0, 19);
    return g;
}

} // namespace storyweave
