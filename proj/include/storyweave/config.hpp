#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyweave/client.hpp"
#include "storyweave/error.hpp"
#include "storyweave/graph.hpp"
#include "storyweave/images.hpp"
#include "storyweave/memento.hpp"
#include "storyweave/story.hpp"
#include "storyweave/sumgram.hpp"

namespace storyweave {

// Single JSON file wiring every module. Each field's default is the value its
// module documents; an empty path means "use the built-in data".
struct Config {
    // feed ingestion
    std::string feed_roster;              // roster JSON path, empty => built-in list
    int fetch_parallelism = 4;
    int poll_interval_seconds = 600;
    bool archive_feeds = false;           // populate rss_uri_m during ingestion

    // graph service client
    std::string service_base = "http://storygraph.cs.odu.edu";
    std::string endpoint_template = kDefaultEndpointTemplate;
    int hist = 1440;
    long cursor = 0;

    // graph construction
    double edge_threshold = 0.30;
    int event_min_sources = 3;
    std::string graph_config_id =
        "/files/config/polar-media-consensus-graph/00000000000000000000000000000000/";

    // mementos
    std::string aggregator_base = "https://aggregator.example/timegate/";
    std::vector<ArchiveAdapter> archives = builtin_adapters();
    std::vector<std::string> archive_priority = {"archive-a", "archive-b"};
    int memento_parallelism = 4;
    int archive_min_interval_ms = 1000;

    // analysis
    SumgramParams sumgrams;
    ImageScoreParams image_score;
    std::string stopwords;                // newline list path, empty => built-in
    std::string gazetteer;                // gazetteer JSON path, empty => built-in

    // story assembly and rendering
    StoryLimits limits;
    std::string story_template;           // template path, empty => built-in

    // roots
    std::string cache_root = "cache";
    std::string output_root = ".";
};

namespace detail_config {

using ojson = nlohmann::ordered_json;

inline const ojson& expect(const ojson& j, const char* key, ojson::value_t type,
                           const char* type_name) {
    const ojson& v = j.at(key);
    bool ok = v.type() == type ||
              (type == ojson::value_t::number_float && v.is_number()) ||
              (type == ojson::value_t::number_integer && v.is_number_integer());
    if (!ok)
        throw Error(Errc::config_invalid,
                    std::string("\"") + key + "\" must be a " + type_name);
    return v;
}

inline void read_string(const ojson& j, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    out = expect(j, key, ojson::value_t::string, "string").get<std::string>();
}

inline void read_int(const ojson& j, const char* key, int& out, int min_value) {
    if (!j.contains(key)) return;
    long v = expect(j, key, ojson::value_t::number_integer, "integer").get<long>();
    if (v < min_value)
        throw Error(Errc::config_invalid,
                    std::string("\"") + key + "\" must be >= " + std::to_string(min_value));
    out = static_cast<int>(v);
}

inline void read_long(const ojson& j, const char* key, long& out, long min_value) {
    if (!j.contains(key)) return;
    long v = expect(j, key, ojson::value_t::number_integer, "integer").get<long>();
    if (v < min_value)
        throw Error(Errc::config_invalid,
                    std::string("\"") + key + "\" must be >= " + std::to_string(min_value));
    out = v;
}

inline void read_real(const ojson& j, const char* key, double& out, double lo, double hi) {
    if (!j.contains(key)) return;
    double v = expect(j, key, ojson::value_t::number_float, "number").get<double>();
    if (v < lo || v > hi)
        throw Error(Errc::config_invalid, std::string("\"") + key + "\" must lie in [" +
                                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out = v;
}

inline void read_bool(const ojson& j, const char* key, bool& out) {
    if (!j.contains(key)) return;
    out = expect(j, key, ojson::value_t::boolean, "boolean").get<bool>();
}

} // namespace detail_config

inline Config config_from_json(const nlohmann::ordered_json& j) {
    using namespace detail_config;
    if (!j.is_object()) throw Error(Errc::config_invalid, "config root must be an object");
    Config c;

    read_string(j, "feed-roster", c.feed_roster);
    read_int(j, "fetch-parallelism", c.fetch_parallelism, 1);
    read_int(j, "poll-interval-seconds", c.poll_interval_seconds, 1);
    read_bool(j, "archive-feeds", c.archive_feeds);

    read_string(j, "service-base", c.service_base);
    read_string(j, "endpoint-template", c.endpoint_template);
    read_int(j, "hist", c.hist, 1);
    read_long(j, "cursor", c.cursor, 0);

    read_real(j, "edge-threshold", c.edge_threshold, 0.0, 1.0);
    read_int(j, "event-min-sources", c.event_min_sources, 1);
    read_string(j, "graph-config-id", c.graph_config_id);

    read_string(j, "aggregator-base", c.aggregator_base);
    if (j.contains("archives")) {
        const ojson& arr = expect(j, "archives", ojson::value_t::array, "array");
        c.archives.clear();
        for (size_t i = 0; i < arr.size(); ++i) {
            const ojson& a = arr[i];
            if (!a.is_object() || !a.contains("id") || !a["id"].is_string())
                throw Error(Errc::config_invalid,
                            "archives[" + std::to_string(i) + "] needs a string \"id\"");
            ArchiveAdapter ad;
            ad.id = a["id"].get<std::string>();
            read_string(a, "method", ad.method);
            if (ad.method != "GET" && ad.method != "POST")
                throw Error(Errc::config_invalid, "archives[" + std::to_string(i) +
                                                      "].method must be GET or POST");
            read_string(a, "url-template", ad.url_template);
            if (ad.url_template.empty())
                throw Error(Errc::config_invalid,
                            "archives[" + std::to_string(i) + "] needs a \"url-template\"");
            read_string(a, "result", ad.result);
            if (ad.result != "location" && ad.result != "body-regex")
                throw Error(Errc::config_invalid,
                            "archives[" + std::to_string(i) +
                                "].result must be \"location\" or \"body-regex\"");
            read_string(a, "body-regex", ad.body_regex);
            if (ad.result == "body-regex" && ad.body_regex.empty())
                throw Error(Errc::config_invalid,
                            "archives[" + std::to_string(i) + "] needs a \"body-regex\"");
            read_string(a, "post-body", ad.post_body);
            c.archives.push_back(std::move(ad));
        }
    }
    if (j.contains("archive-priority")) {
        const ojson& arr = expect(j, "archive-priority", ojson::value_t::array, "array");
        c.archive_priority.clear();
        for (const auto& v : arr) {
            if (!v.is_string())
                throw Error(Errc::config_invalid, "archive-priority entries must be strings");
            c.archive_priority.push_back(v.get<std::string>());
        }
    }
    for (const auto& id : c.archive_priority) {
        bool known = false;
        for (const auto& a : c.archives) known = known || a.id == id;
        if (!known)
            throw Error(Errc::config_invalid,
                        "archive-priority names undefined archive \"" + id + "\"");
    }
    read_int(j, "memento-parallelism", c.memento_parallelism, 1);
    read_int(j, "archive-min-interval-ms", c.archive_min_interval_ms, 0);

    if (j.contains("sumgrams")) {
        const ojson& s = expect(j, "sumgrams", ojson::value_t::object, "object");
        read_int(s, "base-n", c.sumgrams.base_n, 1);
        read_int(s, "top-k", c.sumgrams.k, 1);
        read_real(s, "conjoin-threshold", c.sumgrams.conjoin_threshold, 0.0, 1.0);
        read_int(s, "max-len", c.sumgrams.max_len, c.sumgrams.base_n);
    }
    if (j.contains("image-score")) {
        const ojson& s = expect(j, "image-score", ojson::value_t::object, "object");
        read_real(s, "meta-bonus", c.image_score.meta_bonus, 0.0, 1e9);
        read_real(s, "pixel-norm", c.image_score.pixel_norm, 1.0, 1e12);
        read_real(s, "color-norm", c.image_score.color_norm, 1.0, 1e12);
        long mpc = c.image_score.min_pixel_count;
        read_long(s, "min-pixel-count", mpc, 0);
        c.image_score.min_pixel_count = mpc;
        read_real(s, "max-aspect", c.image_score.max_aspect, 1.0, 1e6);
    }
    read_string(j, "stopwords", c.stopwords);
    read_string(j, "gazetteer", c.gazetteer);

    if (j.contains("top-entities")) {
        int v = static_cast<int>(c.limits.top_entities);
        read_int(j, "top-entities", v, 1);
        c.limits.top_entities = static_cast<size_t>(v);
    }
    if (j.contains("top-sumgrams")) {
        int v = static_cast<int>(c.limits.top_sumgrams);
        read_int(j, "top-sumgrams", v, 1);
        c.limits.top_sumgrams = static_cast<size_t>(v);
    }
    if (j.contains("snippet-length")) {
        int v = static_cast<int>(c.limits.snippet_chars);
        read_int(j, "snippet-length", v, 1);
        c.limits.snippet_chars = static_cast<size_t>(v);
    }
    read_string(j, "template", c.story_template);

    read_string(j, "cache-root", c.cache_root);
    read_string(j, "output-root", c.output_root);
    return c;
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config_not_found, "cannot open config " + path.string());
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::config_invalid, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline GraphBuildOptions graph_options(const Config& c) {
    GraphBuildOptions o;
    o.edge_threshold = c.edge_threshold;
    o.event_min_sources = c.event_min_sources;
    o.hist = c.hist;
    o.cursor = c.cursor;
    o.config = c.graph_config_id;
    o.self_base = c.service_base + "/graphs/polar-media-consensus-graph/";
    return o;
}

} // namespace storyweave
