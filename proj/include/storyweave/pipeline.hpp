#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyweave/cache.hpp"
#include "storyweave/client.hpp"
#include "storyweave/config.hpp"
#include "storyweave/entities.hpp"
#include "storyweave/extract.hpp"
#include "storyweave/graph.hpp"
#include "storyweave/http.hpp"
#include "storyweave/images.hpp"
#include "storyweave/memento.hpp"
#include "storyweave/net.hpp"
#include "storyweave/ordering.hpp"
#include "storyweave/story.hpp"
#include "storyweave/sumgram.hpp"
#include "storyweave/template.hpp"

namespace storyweave {

// One article after the memento and page analysis passes.
struct AnalyzedElement {
    MementoRecord record;
    std::optional<Timestamp> feed_published;
    std::optional<Timestamp> meta_published;
    std::string title;
    std::string text;
    std::string favicon;
    std::vector<ScoredImage> images;

    friend bool operator==(const AnalyzedElement&, const AnalyzedElement&) = default;
};

// Everything the assemble stage needs, detached from the graph document.
struct StoryAnalysis {
    std::string date;             // YYYY-MM-DD
    Timestamp graph_timestamp;
    StoryMetrics component;
    std::vector<AnalyzedElement> elements; // URI-R extraction order
    std::vector<RankedEntity> entities;
    std::vector<Sumgram> sumgrams;

    friend bool operator==(const StoryAnalysis&, const StoryAnalysis&) = default;
};

// ---------------------------------------------------------------------------
// Artifact codecs. Hyphenated keys, explicit nulls, dump(2)+"\n", like the
// graph and story codecs, so cached artifacts are stable bytes.

namespace detail_pipeline {

using ojson = nlohmann::ordered_json;

inline ojson timestamp_or_null(const std::optional<Timestamp>& t) {
    return t ? ojson(t->to_string()) : ojson(nullptr);
}

inline std::optional<Timestamp> timestamp_from(const ojson& v, const char* what) {
    if (v.is_null()) return std::nullopt;
    if (!v.is_string())
        throw Error(Errc::schema_violation, std::string(what) + " must be a string or null");
    auto t = parse_timestamp(v.get<std::string>());
    if (!t)
        throw Error(Errc::schema_violation,
                    std::string(what) + " is not a datetime: " + v.get<std::string>());
    return t;
}

} // namespace detail_pipeline

inline nlohmann::ordered_json memento_to_json(const MementoRecord& r) {
    using detail_pipeline::ojson;
    ojson j = ojson::object();
    j["uri-r"] = r.uri_r;
    j["uri-m"] = r.uri_m;
    j["memento-datetime"] = detail_pipeline::timestamp_or_null(r.memento_datetime);
    j["archive-id"] = r.archive_id.empty() ? ojson(nullptr) : ojson(r.archive_id);
    j["archived"] = r.archived;
    j["diagnostics"] = r.diagnostics;
    return j;
}

inline MementoRecord memento_from_json(const nlohmann::ordered_json& j) {
    MementoRecord r;
    r.uri_r = j.at("uri-r").get<std::string>();
    r.uri_m = j.at("uri-m").get<std::string>();
    r.memento_datetime = detail_pipeline::timestamp_from(j.at("memento-datetime"),
                                                         "memento-datetime");
    if (j.contains("archive-id") && !j["archive-id"].is_null())
        r.archive_id = j["archive-id"].get<std::string>();
    r.archived = j.at("archived").get<bool>();
    if (j.contains("diagnostics"))
        r.diagnostics = j["diagnostics"].get<std::vector<std::string>>();
    return r;
}

inline std::string serialize_urirs(const std::string& date, const std::vector<std::string>& urirs) {
    detail_pipeline::ojson j = detail_pipeline::ojson::object();
    j["date"] = date;
    j["uri-rs"] = urirs;
    return j.dump(2) + "\n";
}

inline std::vector<std::string> parse_urirs(const std::string& text) {
    try {
        auto j = nlohmann::ordered_json::parse(text);
        return j.at("uri-rs").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::malformed_json, std::string("uri-r artifact: ") + e.what());
    }
}

inline std::string serialize_mementos(const std::string& date,
                                      const Timestamp& accept_datetime,
                                      const std::vector<MementoRecord>& records) {
    detail_pipeline::ojson j = detail_pipeline::ojson::object();
    j["date"] = date;
    j["accept-datetime"] = accept_datetime.to_string();
    auto arr = detail_pipeline::ojson::array();
    for (const auto& r : records) arr.push_back(memento_to_json(r));
    j["mementos"] = std::move(arr);
    return j.dump(2) + "\n";
}

inline std::vector<MementoRecord> parse_mementos(const std::string& text) {
    try {
        auto j = nlohmann::ordered_json::parse(text);
        std::vector<MementoRecord> out;
        for (const auto& rj : j.at("mementos")) out.push_back(memento_from_json(rj));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::malformed_json, std::string("memento artifact: ") + e.what());
    }
}

inline std::string serialize_analysis(const StoryAnalysis& a) {
    using detail_pipeline::ojson;
    ojson j = ojson::object();
    j["date"] = a.date;
    j["graph-timestamp"] = a.graph_timestamp.to_string();

    ojson comp = ojson::object();
    comp["avg-degree"] = detail_model::number_value(a.component.avg_degree);
    comp["density"] = detail_model::number_value(a.component.density);
    comp["node-count"] = a.component.node_count;
    comp["unique-source-count"] = a.component.unique_source_count;
    comp["type"] = a.component.type;
    j["component"] = std::move(comp);

    ojson elements = ojson::array();
    for (const auto& el : a.elements) {
        ojson e = ojson::object();
        e["record"] = memento_to_json(el.record);
        e["feed-published"] = detail_pipeline::timestamp_or_null(el.feed_published);
        e["meta-published"] = detail_pipeline::timestamp_or_null(el.meta_published);
        e["title"] = el.title;
        e["text"] = el.text;
        e["favicon"] = el.favicon;
        ojson imgs = ojson::array();
        for (const auto& img : el.images) imgs.push_back(detail_story::image_to_json(img));
        e["images"] = std::move(imgs);
        elements.push_back(std::move(e));
    }
    j["elements"] = std::move(elements);

    ojson ents = ojson::array();
    for (const auto& e : a.entities) {
        ojson ej = ojson::object();
        ej["entity"] = e.entity;
        ej["class"] = e.cls;
        ej["frequency"] = e.frequency;
        ents.push_back(std::move(ej));
    }
    j["entities"] = std::move(ents);

    ojson grams = ojson::array();
    for (const auto& s : a.sumgrams) {
        ojson sj = ojson::object();
        sj["phrase"] = s.phrase;
        sj["document-frequency"] = s.document_frequency;
        grams.push_back(std::move(sj));
    }
    j["sumgrams"] = std::move(grams);
    return j.dump(2) + "\n";
}

inline StoryAnalysis parse_analysis(const std::string& text) {
    try {
        auto j = nlohmann::ordered_json::parse(text);
        StoryAnalysis a;
        a.date = j.at("date").get<std::string>();
        auto ts = parse_timestamp(j.at("graph-timestamp").get<std::string>());
        if (!ts) throw Error(Errc::schema_violation, "graph-timestamp is not a datetime");
        a.graph_timestamp = *ts;

        const auto& comp = j.at("component");
        a.component.avg_degree = comp.at("avg-degree").get<double>();
        a.component.density = comp.at("density").get<double>();
        a.component.node_count = comp.at("node-count").get<int>();
        a.component.unique_source_count = comp.at("unique-source-count").get<int>();
        a.component.type = comp.at("type").get<std::string>();

        for (const auto& ej : j.at("elements")) {
            AnalyzedElement el;
            el.record = memento_from_json(ej.at("record"));
            el.feed_published = detail_pipeline::timestamp_from(ej.at("feed-published"),
                                                                "feed-published");
            el.meta_published = detail_pipeline::timestamp_from(ej.at("meta-published"),
                                                                "meta-published");
            el.title = ej.at("title").get<std::string>();
            el.text = ej.at("text").get<std::string>();
            el.favicon = ej.at("favicon").get<std::string>();
            for (const auto& ij : ej.at("images"))
                el.images.push_back(detail_story::image_from_json(ij));
            a.elements.push_back(std::move(el));
        }
        for (const auto& ej : j.at("entities")) {
            RankedEntity e;
            e.entity = ej.at("entity").get<std::string>();
            e.cls = ej.at("class").get<std::string>();
            e.frequency = ej.at("frequency").get<int>();
            a.entities.push_back(std::move(e));
        }
        for (const auto& sj : j.at("sumgrams")) {
            Sumgram s;
            s.phrase = sj.at("phrase").get<std::vector<std::string>>();
            s.document_frequency = sj.at("document-frequency").get<int>();
            a.sumgrams.push_back(std::move(s));
        }
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::malformed_json, std::string("analysis artifact: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Wiring: transports, sources, resolvers per run mode.

struct Pipeline {
    Config config;
    bool offline = false;
    std::filesystem::path snapshot_dir;

    std::shared_ptr<HttpClient> http;
    std::shared_ptr<GraphSource> graphs;
    RetryPolicy retry;
    Clock clock = system_utc_now;
};

// Offline runs read graphs from <snapshot_dir>/graphs/... and the web from the
// <snapshot_dir>/web fixture; nothing is submitted to archives and transient
// failures are not retried, so a run never waits on anything.
inline Pipeline make_pipeline(Config config, bool offline = false,
                              std::filesystem::path snapshot_dir = {}) {
    Pipeline p;
    p.config = std::move(config);
    p.offline = offline;
    p.snapshot_dir = std::move(snapshot_dir);
    if (offline) {
        if (p.snapshot_dir.empty())
            throw Error(Errc::usage, "--offline needs --snapshot-dir");
        p.http = std::make_shared<FixtureHttpClient>(p.snapshot_dir / "web");
        p.graphs = std::make_shared<LocalGraphSource>(p.snapshot_dir);
        p.retry.max_attempts = 1;
        p.retry.sleeper = [](std::chrono::milliseconds) {};
        p.config.archive_priority.clear();
    } else {
        p.http = std::make_shared<NetHttpClient>();
        p.graphs = std::make_shared<HttpGraphSource>(p.config.service_base, *p.http, p.retry,
                                                     p.config.endpoint_template);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Stages. Each is pure given its inputs; caching wraps them below.

inline std::vector<std::string> stage_extract_urirs(const GraphDocument& g) {
    return extract_story_urirs(g);
}

inline std::vector<MementoRecord> stage_ensure_mementos(Pipeline& p,
                                                        const std::vector<std::string>& urirs,
                                                        const Timestamp& accept_datetime) {
    MementoResolver resolver(p.config.aggregator_base, *p.http, p.retry);
    RateLimiter limiter(std::chrono::milliseconds(p.config.archive_min_interval_ms));
    ArchiveSubmitter submitter(p.config.archives, *p.http, p.retry, p.clock,
                               p.offline ? nullptr : &limiter);
    return ensure_mementos(urirs, accept_datetime, p.config.archive_priority, resolver, submitter,
                           p.config.memento_parallelism);
}

inline StoryAnalysis stage_analyze(Pipeline& p, Date date, const GraphDocument& g,
                                   const std::vector<MementoRecord>& records) {
    const ConnectedComponent& comp = select_biggest_story(g);
    StoryAnalysis out;
    out.date = format_date(date);
    out.graph_timestamp = g.timestamp;
    out.component.avg_degree = comp.avg_degree;
    out.component.density = comp.density;
    out.component.node_count = static_cast<int>(comp.nodes.size());
    out.component.unique_source_count = comp.unique_source_count;
    out.component.type = comp.node_details.connected_comp_type.value_or("event");

    std::map<std::string, const ArticleNode*> by_url;
    for (const auto& n : g.nodes) by_url.emplace(normalize_url(n.link), &n);

    Gazetteer gazetteer =
        p.config.gazetteer.empty() ? builtin_gazetteer() : load_gazetteer(p.config.gazetteer);
    std::set<std::string> stopwords =
        p.config.stopwords.empty() ? builtin_stopwords() : load_stopwords(p.config.stopwords);
    HttpImageFetcher fetcher(*p.http, p.config.image_score.max_bytes);

    std::vector<std::string> corpus;
    for (const auto& rec : records) {
        const ArticleNode* node = nullptr;
        if (auto it = by_url.find(normalize_url(rec.uri_r)); it != by_url.end())
            node = it->second;

        AnalyzedElement el;
        el.record = rec;
        if (node) el.feed_published = node->published;

        HttpResponse res = p.http->get(rec.uri_m);
        if (res.ok()) {
            try {
                ArticleExtract ext = extract_article(res.body, rec.uri_m);
                el.title = ext.title;
                el.text = ext.text;
                el.favicon = ext.favicon;
                el.meta_published = ext.published_meta;
                el.images = score_image_candidates(ext.image_candidates, fetcher,
                                                   p.config.image_score);
            } catch (const Error& e) {
                el.record.diagnostics.push_back(e.what());
            }
        } else {
            el.record.diagnostics.push_back(
                rec.uri_m + ": " + (res.transport_failed() ? res.error
                                                           : "HTTP " + std::to_string(res.status)));
        }
        if (el.title.empty() && node) el.title = node->title;
        if (el.text.empty() && node) el.text = node->text;
        if (el.favicon.empty() && node && node->favicon) el.favicon = *node->favicon;
        if (el.title.empty()) el.title = rec.uri_r;

        corpus.push_back(el.title + "\n" + el.text);
        out.elements.push_back(std::move(el));
    }

    RuleBasedExtractor ner(gazetteer);
    out.entities = extract_entities(corpus, ner);
    out.sumgrams = compute_sumgrams(corpus, p.config.sumgrams, stopwords);
    return out;
}

// Step order (publication date, then capture date) applied to analyzed
// elements; remaining ties break on URI-R so permuted inputs cannot differ.
inline std::vector<AnalyzedElement> order_elements(std::vector<AnalyzedElement> elements) {
    std::stable_sort(elements.begin(), elements.end(),
                     [](const AnalyzedElement& x, const AnalyzedElement& y) {
                         DatedRecord a{x.record,
                                       extract_pubdate(x.record, x.feed_published,
                                                       x.meta_published),
                                       x.feed_published, x.meta_published};
                         DatedRecord b{y.record,
                                       extract_pubdate(y.record, y.feed_published,
                                                       y.meta_published),
                                       y.feed_published, y.meta_published};
                         if (detail_ordering::dated_less(a, b)) return true;
                         if (detail_ordering::dated_less(b, a)) return false;
                         return x.record.uri_r < y.record.uri_r;
                     });
    return elements;
}

inline StoryDocument stage_assemble(const Pipeline& p, const StoryAnalysis& analysis) {
    auto date = parse_date(analysis.date);
    if (!date) throw Error(Errc::schema_violation, "bad analysis date " + analysis.date);

    ConnectedComponent comp;
    comp.nodes.resize(std::max(analysis.component.node_count, 0));
    for (size_t i = 0; i < comp.nodes.size(); ++i) comp.nodes[i] = i;
    comp.avg_degree = analysis.component.avg_degree;
    comp.density = analysis.component.density;
    comp.unique_source_count = analysis.component.unique_source_count;
    comp.node_details.connected_comp_type = analysis.component.type;

    std::vector<ElementInput> inputs;
    for (const auto& el : order_elements(analysis.elements)) {
        ElementInput in;
        in.record = el.record;
        in.pubdate = extract_pubdate(el.record, el.feed_published, el.meta_published);
        in.title = el.title;
        in.text = el.text;
        in.favicon = el.favicon;
        in.images = el.images;
        inputs.push_back(std::move(in));
    }

    // Offline reruns must be byte-identical, so "now" is the graph's own
    // timestamp rather than the wall clock.
    UtcMicros now = p.offline ? analysis.graph_timestamp.value : p.clock();
    return assemble_story(comp, *date, inputs, analysis.entities, analysis.sumgrams, now,
                          p.config.limits);
}

inline std::string stage_render(const Pipeline& p, const StoryDocument& story) {
    if (p.config.story_template.empty()) return render_story(story);
    std::ifstream in(p.config.story_template, std::ios::binary);
    if (!in)
        throw Error(Errc::config_not_found,
                    "cannot open template " + p.config.story_template);
    std::ostringstream buf;
    buf << in.rdbuf();
    return render_story(story, buf.str());
}

// ---------------------------------------------------------------------------
// Cached orchestration. Artifacts live under <cache>/<stage>/<sha256>.json
// keyed by the serialized stage input; a per-date pointer file lets the next
// subcommand find them without re-deriving the key.

inline void store_stage_artifact(const ArtifactCache& cache, const std::string& stage,
                                 const std::string& key, const std::string& value,
                                 const std::string& date) {
    cache.put(stage, key, value);
    detail_pipeline::ojson ptr = detail_pipeline::ojson::object();
    ptr["artifact"] = sha256_hex(key);
    cache.put(stage, "date:" + date, ptr.dump() + "\n");
}

inline std::optional<std::string> load_stage_artifact(const ArtifactCache& cache,
                                                      const std::string& stage,
                                                      const std::string& date) {
    auto ptr = cache.get(stage, "date:" + date);
    if (!ptr) return std::nullopt;
    try {
        auto j = detail_pipeline::ojson::parse(*ptr);
        return cache.get_by_hash(stage, j.at("artifact").get<std::string>());
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

inline std::string graph_cache_key(const Pipeline& p, Date date) {
    if (p.offline)
        return "local\n" + p.snapshot_dir.string() + "\n" + format_date(date);
    return "http\n" + expand_endpoint(p.config.endpoint_template, p.config.service_base, date,
                                      p.config.cursor, p.config.hist);
}

// Fetch with cache fallback: a fresh snapshot is preferred, but if the
// service is down and we have yesterday's bytes, the run can still proceed.
inline GraphDocument cached_fetch_graph(Pipeline& p, const ArtifactCache& cache, Date date) {
    const std::string key = graph_cache_key(p, date);
    const std::string date_s = format_date(date);
    try {
        GraphDocument g = p.graphs->fetch(date, p.config.hist, p.config.cursor);
        store_stage_artifact(cache, "fetch-graph", key, serialize_graph(g), date_s);
        return g;
    } catch (const Error& e) {
        if (e.code() != Errc::service_unavailable) throw;
        if (auto hit = cache.get("fetch-graph", key)) return parse_graph(*hit);
        throw;
    }
}

inline std::vector<std::string> cached_extract_urirs(const ArtifactCache& cache, Date date,
                                                     const GraphDocument& g) {
    const std::string date_s = format_date(date);
    std::vector<std::string> urirs = stage_extract_urirs(g);
    store_stage_artifact(cache, "extract-urirs", serialize_graph(g),
                         serialize_urirs(date_s, urirs), date_s);
    return urirs;
}

inline std::string memento_stage_key(const Pipeline& p, const std::string& date_s,
                                     const Timestamp& accept_datetime,
                                     const std::vector<std::string>& urirs) {
    return serialize_urirs(date_s, urirs) + "accept:" + accept_datetime.to_string() +
           "\npriority:" + join(p.config.archive_priority, ",");
}

inline std::vector<MementoRecord> cached_ensure_mementos(Pipeline& p, const ArtifactCache& cache,
                                                         Date date, const GraphDocument& g,
                                                         const std::vector<std::string>& urirs) {
    const std::string date_s = format_date(date);
    const std::string key = memento_stage_key(p, date_s, g.timestamp, urirs);
    if (auto hit = cache.get("ensure-mementos", key)) return parse_mementos(*hit);
    std::vector<MementoRecord> records = stage_ensure_mementos(p, urirs, g.timestamp);
    store_stage_artifact(cache, "ensure-mementos", key,
                         serialize_mementos(date_s, g.timestamp, records), date_s);
    return records;
}

inline StoryAnalysis cached_analyze(Pipeline& p, const ArtifactCache& cache, Date date,
                                    const GraphDocument& g,
                                    const std::vector<MementoRecord>& records) {
    const std::string date_s = format_date(date);
    const std::string key = serialize_mementos(date_s, g.timestamp, records);
    if (auto hit = cache.get("analyze", key)) return parse_analysis(*hit);
    StoryAnalysis analysis = stage_analyze(p, date, g, records);
    store_stage_artifact(cache, "analyze", key, serialize_analysis(analysis), date_s);
    return analysis;
}

inline StoryDocument cached_assemble(const Pipeline& p, const ArtifactCache& cache,
                                     const StoryAnalysis& analysis) {
    StoryDocument story = stage_assemble(p, analysis);
    store_stage_artifact(cache, "assemble", serialize_analysis(analysis),
                         serialize_story(story), analysis.date);
    return story;
}

inline std::string cached_render(const Pipeline& p, const ArtifactCache& cache,
                                 const StoryDocument& story) {
    std::string html = stage_render(p, story);
    store_stage_artifact(cache, "render", serialize_story(story), html, story.date);
    return html;
}

struct PipelineResult {
    std::filesystem::path html_path;
    std::filesystem::path json_path;
    StoryDocument story;
};

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
        throw Error(Errc::store_error,
                    "cannot create " + path.parent_path().string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error(Errc::store_error, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error(Errc::store_error, "cannot commit " + path.string() + ": " + ec.message());
}

// Steps 1-8 over one date: graph, story URI-Rs, mementos, page analysis,
// ordering, assembly, rendering, and the two output files.
inline PipelineResult run_pipeline(Pipeline& p, Date date) {
    ArtifactCache cache(p.config.cache_root);
    CacheLock lock(cache.root());

    GraphDocument graph = cached_fetch_graph(p, cache, date);
    std::vector<std::string> urirs = cached_extract_urirs(cache, date, graph);
    if (urirs.empty()) throw Error(Errc::no_story, "biggest component has no resolvable links");
    std::vector<MementoRecord> records = cached_ensure_mementos(p, cache, date, graph, urirs);
    StoryAnalysis analysis = cached_analyze(p, cache, date, graph, records);
    StoryDocument story = cached_assemble(p, cache, analysis);
    std::string html = cached_render(p, cache, story);

    namespace fs = std::filesystem;
    fs::path out_dir = fs::path(p.config.output_root) / "stories" / format_date(date, '/');
    PipelineResult result;
    result.html_path = out_dir / "index.html";
    result.json_path = out_dir / "story.json";
    write_file_atomic(result.json_path, serialize_story(story));
    write_file_atomic(result.html_path, html);
    result.story = std::move(story);
    return result;
}

} // namespace storyweave
