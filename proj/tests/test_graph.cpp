#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>
#include <set>

#include "storyweave/graph.hpp"
#include "test_support.hpp"

using namespace storyweave;

namespace {

ArticleNode node_with(const std::string& link, std::vector<std::string> entities,
                      const std::string& polarity = "") {
    ArticleNode n;
    n.link = link;
    n.title = "t";
    n.text = "x";
    n.extraction_time = make_timestamp(2020, 3, 23, 0, 9, 10);
    if (!polarity.empty()) n.node_details.type = polarity;
    for (auto& e : entities) n.entities.push_back(Entity{"UNLABELED", std::move(e)});
    return n;
}

EntityVector vec(std::initializer_list<std::pair<const char*, int>> weights) {
    EntityVector v;
    for (const auto& [k, w] : weights) v[k] = w;
    return v;
}

// Disjoint-set oracle for component membership.
struct Dsu {
    std::vector<size_t> parent;
    explicit Dsu(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), size_t{0}); }
    size_t find(size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

} // namespace

TEST_CASE("entity vectors count normalized surfaces", "[unit][graph]") {
    ArticleNode n = node_with("https://x.example/a", {});
    n.entities = {
        {"PERSON", "Trump"},
        {"PERSON", "trump"},
        {"ORGANIZATION", "  White \t House "},
        {"UNLABELED", ""},
    };
    EntityVector v = entity_vector(n);
    REQUIRE(v.size() == 2);
    CHECK(v["trump"] == 2);
    CHECK(v["white house"] == 1);
}

TEST_CASE("cosine similarity matches hand calculations", "[unit][graph]") {
    constexpr double eps = 1e-12;

    CHECK(similarity(vec({{"a", 1}, {"b", 1}}), vec({{"a", 1}, {"c", 1}})) ==
          Catch::Approx(0.5).margin(eps));
    CHECK(similarity(vec({{"a", 1}, {"b", 1}}), vec({{"a", 1}, {"b", 1}})) ==
          Catch::Approx(1.0).margin(eps));
    CHECK(similarity(vec({{"a", 2}}), vec({{"a", 1}})) == Catch::Approx(1.0).margin(eps));
    CHECK(similarity(vec({{"a", 1}, {"b", 2}}), vec({{"b", 2}, {"c", 3}})) ==
          Catch::Approx(4.0 / std::sqrt(5.0 * 13.0)).margin(eps));
    CHECK(similarity(vec({{"a", 1}}), vec({{"b", 1}})) == 0.0);
    CHECK(similarity(EntityVector{}, vec({{"a", 1}})) == 0.0);
    CHECK(similarity(EntityVector{}, EntityVector{}) == 0.0);
}

TEST_CASE("edges form at the threshold and carry ranked labels", "[unit][graph]") {
    std::vector<ArticleNode> nodes;
    nodes.push_back(node_with("https://a.example/1", {"a", "b"}));
    nodes.push_back(node_with("https://b.example/1", {"a", "c"}));
    nodes.push_back(node_with("https://c.example/1", {"a", "b"}));

    // sims: (0,1) = 0.5, (0,2) = 1.0, (1,2) = 0.5, all a hair under in
    // floating point because sqrt(2)*sqrt(2) lands just above 2
    std::vector<EdgeRecord> edges = build_edges(nodes, 0.49);
    REQUIRE(edges.size() == 3);
    CHECK(edges[0].source == 0);
    CHECK(edges[0].target == 2);
    CHECK(edges[0].sim == 1.0);
    CHECK(edges[0].rank == 1);
    CHECK(edges[0].label == "1 (1)"); // trailing zeros trimmed, so 1.0 prints as 1
    CHECK(edges[0].label_description == "rank (sim)");
    // equal sims fall back to (source, target) order
    CHECK(edges[1].source == 0);
    CHECK(edges[1].target == 1);
    CHECK(edges[1].rank == 2);
    CHECK(edges[2].source == 1);
    CHECK(edges[2].target == 2);
    CHECK(edges[2].rank == 3);
    CHECK(edges[2].label == "3 (0.5)");

    CHECK(build_edges(nodes, 0.51).size() == 1); // the 0.5 pair drops out
}

TEST_CASE("thresholding uses full precision even though stored sims are rounded",
          "[unit][graph]") {
    // sim = 1/sqrt(3) = 0.57735..., which rounds to 0.58
    std::vector<ArticleNode> nodes;
    nodes.push_back(node_with("https://a.example/1", {"a"}));
    nodes.push_back(node_with("https://b.example/1", {"a", "b", "c"}));

    std::vector<EdgeRecord> kept = build_edges(nodes, 0.577);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].sim == 0.58);
    CHECK(kept[0].label == "1 (0.58)");

    // 0.577 < 0.578 <= round2 value: the rounded value must not rescue it
    CHECK(build_edges(nodes, 0.578).empty());
}

TEST_CASE("components sort by size then smallest member and skip isolated nodes",
          "[unit][graph]") {
    // 0-1 small pair; 2-3-4 triangle; 5 isolated
    std::vector<ArticleNode> nodes = {
        node_with("https://a.example/1", {"x", "y"}),
        node_with("https://b.example/1", {"x", "y"}),
        node_with("https://c.example/1", {"p", "q"}),
        node_with("https://d.example/1", {"p", "q"}),
        node_with("https://e.example/1", {"p", "q"}),
        node_with("https://f.example/1", {"zzz"}),
    };
    assign_node_ids(nodes);
    std::vector<EdgeRecord> edges = build_edges(nodes, 0.49);
    std::vector<ConnectedComponent> comps = connected_components(nodes, edges);

    REQUIRE(comps.size() == 2);
    CHECK(comps[0].nodes == std::vector<size_t>{2, 3, 4});
    CHECK(comps[0].unique_source_count == 3);
    CHECK(comps[0].node_details.connected_comp_type == "event");
    CHECK(comps[0].node_details.color == "green");
    CHECK(comps[1].nodes == std::vector<size_t>{0, 1});
    CHECK(comps[1].unique_source_count == 2);
    CHECK(comps[1].node_details.connected_comp_type == "cluster");
    CHECK(comps[1].node_details.color == "red");
}

TEST_CASE("component metrics match the published formulas", "[unit][graph]") {
    constexpr double eps = 1e-12;

    std::vector<ArticleNode> nodes;
    for (int i = 0; i < 44; ++i)
        nodes.push_back(node_with("https://s" + std::to_string(i) + ".example/a", {}));
    assign_node_ids(nodes);
    std::vector<size_t> members(44);
    std::iota(members.begin(), members.end(), size_t{0});

    ComponentMetrics m = component_metrics(members, 95, nodes);
    CHECK(m.avg_degree == Catch::Approx(4.318181818181818).margin(eps));
    CHECK(m.density == Catch::Approx(0.10042283298097252).margin(eps));
    CHECK(m.unique_source_count == 44);

    std::vector<size_t> pair = {0, 1};
    ComponentMetrics tiny = component_metrics(pair, 1, nodes);
    CHECK(tiny.avg_degree == Catch::Approx(1.0).margin(eps));
    CHECK(tiny.density == Catch::Approx(1.0).margin(eps));

    std::vector<size_t> lonely = {0};
    try {
        component_metrics(lonely, 0, nodes);
        FAIL("single-node component must throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_component);
    }
}

TEST_CASE("event classification needs three distinct sources", "[unit][graph]") {
    ConnectedComponent c;
    c.unique_source_count = 2;
    CHECK(classify_component(c) == "cluster");
    CHECK(c.node_details.color == "red");
    c.unique_source_count = 3;
    CHECK(classify_component(c) == "event");
    CHECK(c.node_details.color == "green");
    c.unique_source_count = 4;
    CHECK(classify_component(c, 5) == "cluster"); // configurable minimum
}

TEST_CASE("random graphs agree with a union-find oracle", "[property][graph]") {
    std::mt19937 rng(424242);
    for (int round = 0; round < 1000; ++round) {
        size_t n = 2 + rng() % 39;
        std::vector<EdgeRecord> edges;
        std::set<std::pair<size_t, size_t>> seen;
        size_t want = std::min(rng() % (2 * n), n * (n - 1) / 2);
        while (edges.size() < want) {
            size_t i = rng() % n, j = rng() % n;
            if (i == j) continue;
            auto key = std::minmax(i, j);
            if (!seen.insert({key.first, key.second}).second) continue;
            EdgeRecord e;
            e.source = key.first;
            e.target = key.second;
            edges.push_back(e);
        }

        Dsu dsu(n);
        for (const auto& e : edges) dsu.unite(e.source, e.target);
        std::map<size_t, std::set<size_t>> expected;
        std::set<size_t> touched;
        for (const auto& e : edges) {
            touched.insert(e.source);
            touched.insert(e.target);
        }
        for (size_t v : touched) expected[dsu.find(v)].insert(v);

        std::vector<RawComponent> comps = raw_components(n, edges);
        REQUIRE(comps.size() == expected.size());

        std::set<size_t> covered;
        size_t edge_total = 0;
        for (const auto& comp : comps) {
            REQUIRE(!comp.nodes.empty());
            CHECK(std::is_sorted(comp.nodes.begin(), comp.nodes.end()));
            std::set<size_t> as_set(comp.nodes.begin(), comp.nodes.end());
            CHECK(expected.at(dsu.find(comp.nodes.front())) == as_set);
            covered.insert(as_set.begin(), as_set.end());
            edge_total += comp.edge_count;
        }
        CHECK(covered == touched);
        CHECK(edge_total == edges.size());
        for (size_t i = 1; i < comps.size(); ++i) {
            CHECK(comps[i - 1].nodes.size() >= comps[i].nodes.size());
            if (comps[i - 1].nodes.size() == comps[i].nodes.size())
                CHECK(comps[i - 1].nodes.front() < comps[i].nodes.front());
        }
    }
}

TEST_CASE("biggest story prefers node count, then sources, then degree", "[unit][graph]") {
    GraphDocument g;
    auto comp = [](std::vector<size_t> nodes, int usc, double deg) {
        ConnectedComponent c;
        c.nodes = std::move(nodes);
        c.unique_source_count = usc;
        c.avg_degree = deg;
        return c;
    };

    g.connected_comps = {comp({0, 1, 2}, 3, 2.0), comp({3, 4}, 2, 1.0)};
    CHECK(select_biggest_story(g).nodes == std::vector<size_t>{0, 1, 2});

    g.connected_comps = {comp({0, 1}, 2, 1.0), comp({2, 3}, 3, 0.5)};
    CHECK(select_biggest_story(g).nodes == std::vector<size_t>{2, 3}); // sources break the tie

    g.connected_comps = {comp({0, 1}, 2, 1.0), comp({2, 3}, 2, 1.5)};
    CHECK(select_biggest_story(g).nodes == std::vector<size_t>{2, 3}); // then degree

    g.connected_comps = {comp({4, 5}, 2, 1.0), comp({0, 1}, 2, 1.0)};
    CHECK(select_biggest_story(g).nodes == std::vector<size_t>{0, 1}); // then first index

    g.connected_comps.clear();
    try {
        select_biggest_story(g);
        FAIL("empty graph has no story");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_story);
    }
}

TEST_CASE("node ids combine registered domain and per-domain counter", "[unit][graph]") {
    std::vector<ArticleNode> nodes = {
        node_with("https://www.cnn.com/one", {}),
        node_with("https://edition.cnn.com/two", {}),
        node_with("https://thehill.com/three", {}),
        node_with("http://www.cnn.com/four", {}),
    };
    nodes[2].id = "custom-7"; // pre-assigned ids survive
    assign_node_ids(nodes);
    CHECK(nodes[0].id == "cnn.com-1");
    CHECK(nodes[1].id == "cnn.com-2");
    CHECK(nodes[2].id == "custom-7");
    CHECK(nodes[3].id == "cnn.com-3");
}

TEST_CASE("build_graph stamps colors, components, and the pointer", "[unit][graph]") {
    std::vector<ArticleNode> nodes = {
        node_with("https://www.politicususa.com/a", {"trump", "congress"}, "left"),
        node_with("https://www.cnn.com/b", {"trump", "congress"}, "center"),
        node_with("https://www.foxnews.com/c", {"trump", "congress"}, "right"),
        node_with("https://www.breitbart.com/d", {"nothing shared"}, "right"),
    };
    GraphDocument g = build_graph(std::move(nodes), make_timestamp(2020, 3, 23, 0, 9, 10).value);

    CHECK(g.nodes[0].node_details.color == "blue");
    CHECK(g.nodes[1].node_details.color == "green");
    CHECK(g.nodes[2].node_details.color == "red");
    CHECK(g.nodes[0].node_details.annotation == "polarity");

    REQUIRE(g.connected_comps.size() == 1);
    CHECK(g.connected_comps[0].nodes == std::vector<size_t>{0, 1, 2});
    CHECK(g.connected_comps[0].unique_source_count == 3);
    CHECK(g.nodes[0].node_details.connected_comp_type == "event");
    CHECK_FALSE(g.nodes[3].node_details.connected_comp_type.has_value());

    CHECK(g.links.size() == 3);
    CHECK(g.timestamp.to_string() == "2020-03-23T00:09:10Z");
    CHECK(g.ner_version == "storyweave-rules/1");
    CHECK(g.graph_pointer.cursor == 0);
    CHECK(g.graph_pointer.hist == 1440);
    CHECK(g.graph_pointer.cur_path == "2020/03/23");
    CHECK(g.self_uri ==
          "http://storygraph.cs.odu.edu/graphs/polar-media-consensus-graph/"
          "#cursor=0&hist=1440&t=2020-03-23T00:09:10");
    CHECK(g.config ==
          "/files/config/polar-media-consensus-graph/00000000000000000000000000000000/");
}

TEST_CASE("edge ranks are a dense permutation respecting similarity order",
          "[property][graph]") {
    std::mt19937 rng(77);
    const char* alphabet[6] = {"a", "b", "c", "d", "e", "f"};
    for (int round = 0; round < 300; ++round) {
        size_t n = 2 + rng() % 12;
        std::vector<ArticleNode> nodes;
        for (size_t i = 0; i < n; ++i) {
            std::vector<std::string> ents;
            for (const char* e : alphabet)
                if (rng() % 2) ents.push_back(e);
            nodes.push_back(node_with("https://s" + std::to_string(i) + ".example/x", ents));
        }

        std::vector<EdgeRecord> edges = build_edges(nodes, 0.30);
        std::vector<EntityVector> vectors;
        for (const auto& nd : nodes) vectors.push_back(entity_vector(nd));

        std::set<int> ranks;
        std::set<std::pair<size_t, size_t>> pairs;
        for (size_t k = 0; k < edges.size(); ++k) {
            const EdgeRecord& e = edges[k];
            CHECK(e.source < e.target);
            CHECK(pairs.insert({e.source, e.target}).second);
            ranks.insert(e.rank);
            CHECK(similarity(vectors[e.source], vectors[e.target]) >= 0.30);
            CHECK(e.sim == round2(similarity(vectors[e.source], vectors[e.target])));
            CHECK(e.label == edge_label(e.rank, e.sim));
            if (k > 0) {
                double prev = similarity(vectors[edges[k - 1].source], vectors[edges[k - 1].target]);
                double cur = similarity(vectors[e.source], vectors[e.target]);
                CHECK(prev >= cur);
            }
        }
        if (!edges.empty()) {
            CHECK(*ranks.begin() == 1);
            CHECK(*ranks.rbegin() == static_cast<int>(edges.size()));
            CHECK(ranks.size() == edges.size());
        }

        // every skipped pair really is below threshold
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (!pairs.count({i, j}))
                    CHECK(similarity(vectors[i], vectors[j]) < 0.30);
    }
}
