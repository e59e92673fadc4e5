#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>

#include "storyweave/config.hpp"
#include "storyweave/feed.hpp"
#include "storyweave/pipeline.hpp"

namespace sw = storyweave;
namespace fs = std::filesystem;

namespace {

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sw::Error(sw::Errc::store_error, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    sw::write_file_atomic(out_path, content);
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

struct CommonArgs {
    std::string config_path;
    std::string date_str;
    std::string cache_root;
    std::string output_root;
    std::string snapshot_dir;
    bool offline = false;

    void attach(CLI::App* cmd, bool wants_date = true) {
        cmd->add_option("--config", config_path, "config JSON (default: $STORYWEAVE_CONFIG)");
        if (wants_date) cmd->add_option("--date", date_str, "date YYYY-MM-DD")->required();
        cmd->add_option("--cache", cache_root, "cache root (default: $STORYWEAVE_CACHE)");
        cmd->add_option("--output", output_root, "output root for stories/");
        cmd->add_flag("--offline", offline, "no network; read everything from --snapshot-dir");
        cmd->add_option("--snapshot-dir", snapshot_dir, "local snapshot root for offline runs");
    }

    sw::Config load() const {
        std::string path = config_path.empty() ? env_or("STORYWEAVE_CONFIG", "") : config_path;
        sw::Config cfg = path.empty() ? sw::Config{} : sw::load_config(path);
        std::string cache = cache_root.empty() ? env_or("STORYWEAVE_CACHE", "") : cache_root;
        if (!cache.empty()) cfg.cache_root = cache;
        if (!output_root.empty()) cfg.output_root = output_root;
        return cfg;
    }

    sw::Date date() const {
        auto d = sw::parse_date(date_str);
        if (!d)
            throw sw::Error(sw::Errc::usage, "bad date \"" + date_str + "\", expected YYYY-MM-DD");
        return *d;
    }

    sw::Pipeline pipeline() const { return sw::make_pipeline(load(), offline, snapshot_dir); }
};

// Previous-stage artifact: an explicit --in wins, else the cache pointer the
// stage left behind for this date.
std::string stage_input(const std::string& in_path, const sw::ArtifactCache& cache,
                        const std::string& stage, const std::string& date_s) {
    if (!in_path.empty()) return read_file_or_throw(in_path);
    if (auto hit = sw::load_stage_artifact(cache, stage, date_s)) return *hit;
    throw sw::Error(sw::Errc::no_snapshot,
                    "no cached " + stage + " artifact for " + date_s + "; pass --in or run " +
                        stage + " first");
}

int cmd_run(const CommonArgs& args) {
    sw::Date date = args.date();
    sw::Pipeline p = args.pipeline();
    sw::PipelineResult result = sw::run_pipeline(p, date);
    std::cout << result.html_path.string() << "\n" << result.json_path.string() << "\n";
    return 0;
}

int cmd_fetch_graph(const CommonArgs& args, const std::string& out_path) {
    sw::Date date = args.date();
    sw::Pipeline p = args.pipeline();
    sw::ArtifactCache cache(p.config.cache_root);
    sw::CacheLock lock(cache.root());
    sw::GraphDocument g = sw::cached_fetch_graph(p, cache, date);
    write_output(out_path, sw::serialize_graph(g));
    return 0;
}

int cmd_build_graph(const CommonArgs& args, const std::string& snapshots_dir,
                    const std::string& out_path) {
    sw::Date date = args.date();
    sw::Pipeline p = args.pipeline();
    sw::ArtifactCache cache(p.config.cache_root);
    sw::CacheLock lock(cache.root());

    std::vector<fs::path> files;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(snapshots_dir, ec), end; !ec && it != end;
         it.increment(ec))
        if (it->path().extension() == ".json") files.push_back(it->path());
    if (files.empty())
        throw sw::Error(sw::Errc::no_snapshot, "no feed snapshots under " + snapshots_dir);
    std::sort(files.begin(), files.end());

    sw::Gazetteer gazetteer = p.config.gazetteer.empty() ? sw::builtin_gazetteer()
                                                         : sw::load_gazetteer(p.config.gazetteer);
    sw::RuleBasedExtractor ner(gazetteer);
    sw::Timestamp extraction_time = sw::make_timestamp(p.clock());

    std::vector<sw::ArticleNode> nodes;
    std::unordered_set<std::string> seen;
    for (const auto& file : files) {
        sw::FeedSnapshot snap = sw::load_feed_snapshot(file);
        for (const auto& item : snap.items) {
            if (!seen.insert(sw::normalize_url(item.url)).second) continue;
            sw::ArticleNode node;
            node.link = item.url;
            node.title = item.title;
            node.published = item.published;
            node.rss_uri_m = snap.rss_uri_m;
            node.extraction_time = extraction_time;
            node.node_details.type = sw::polarity_name(snap.source.polarity);

            sw::HttpResponse res = p.http->get(item.url);
            if (res.ok()) {
                try {
                    sw::ArticleExtract ext = sw::extract_article(res.body, item.url);
                    if (!ext.title.empty()) node.title = ext.title;
                    node.text = ext.text;
                    node.favicon = ext.favicon;
                } catch (const sw::Error&) {
                    // keep the feed-provided fields
                }
            }
            node.entities = ner.extract(node.title + "\n" + node.text);
            nodes.push_back(std::move(node));
        }
    }

    sw::GraphBuildOptions options = sw::graph_options(p.config);
    options.ner_version = ner.version();
    sw::GraphDocument g = sw::build_graph(std::move(nodes), p.clock(), options);

    const std::string date_s = sw::format_date(date);
    sw::store_stage_artifact(cache, "fetch-graph", "built\n" + snapshots_dir + "\n" + date_s,
                             sw::serialize_graph(g), date_s);
    write_output(out_path, sw::serialize_graph(g));
    return 0;
}

int cmd_ensure_mementos(const CommonArgs& args, const std::string& in_path,
                        const std::string& out_path) {
    sw::Date date = args.date();
    sw::Pipeline p = args.pipeline();
    sw::ArtifactCache cache(p.config.cache_root);
    sw::CacheLock lock(cache.root());
    const std::string date_s = sw::format_date(date);

    sw::GraphDocument g = sw::parse_graph(stage_input(in_path, cache, "fetch-graph", date_s));
    std::vector<std::string> urirs = sw::cached_extract_urirs(cache, date, g);
    if (urirs.empty())
        throw sw::Error(sw::Errc::no_story, "biggest component has no resolvable links");
    std::vector<sw::MementoRecord> records = sw::cached_ensure_mementos(p, cache, date, g, urirs);
    write_output(out_path, sw::serialize_mementos(date_s, g.timestamp, records));
    return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& in_path, const std::string& graph_path,
                const std::string& out_path) {
    sw::Date date = args.date();
    sw::Pipeline p = args.pipeline();
    sw::ArtifactCache cache(p.config.cache_root);
    sw::CacheLock lock(cache.root());
    const std::string date_s = sw::format_date(date);

    sw::GraphDocument g = sw::parse_graph(stage_input(graph_path, cache, "fetch-graph", date_s));
    std::vector<sw::MementoRecord> records =
        sw::parse_mementos(stage_input(in_path, cache, "ensure-mementos", date_s));
    sw::StoryAnalysis analysis = sw::cached_analyze(p, cache, date, g, records);
    write_output(out_path, sw::serialize_analysis(analysis));
    return 0;
}

int cmd_assemble(const CommonArgs& args, const std::string& in_path, const std::string& out_path) {
    const std::string date_s = sw::format_date(args.date());
    sw::Pipeline p = args.pipeline();
    sw::ArtifactCache cache(p.config.cache_root);
    sw::CacheLock lock(cache.root());

    sw::StoryAnalysis analysis = sw::parse_analysis(stage_input(in_path, cache, "analyze", date_s));
    sw::StoryDocument story = sw::cached_assemble(p, cache, analysis);
    write_output(out_path, sw::serialize_story(story));
    return 0;
}

int cmd_render(const CommonArgs& args, const std::string& in_path, const std::string& out_path) {
    const std::string date_s = sw::format_date(args.date());
    sw::Pipeline p = args.pipeline();
    sw::ArtifactCache cache(p.config.cache_root);
    sw::CacheLock lock(cache.root());

    sw::StoryDocument story = sw::parse_story(stage_input(in_path, cache, "assemble", date_s));
    write_output(out_path, sw::cached_render(p, cache, story));
    return 0;
}

int cmd_ingest(const CommonArgs& args, const std::string& store_dir, bool once, int interval) {
    sw::Pipeline p = args.pipeline();
    std::vector<sw::FeedSource> roster = p.config.feed_roster.empty()
                                             ? sw::default_roster()
                                             : sw::load_feed_config(p.config.feed_roster);
    fs::path store = store_dir.empty() ? fs::path(p.config.output_root) / "snapshots"
                                       : fs::path(store_dir);
    int seconds = interval > 0 ? interval : p.config.poll_interval_seconds;
    for (;;) {
        sw::SnapshotRun run =
            sw::snapshot_feeds(roster, p.clock, store, *p.http, p.config.fetch_parallelism);
        std::cout << run.directory.string() << "\n";
        for (const auto& f : run.failures)
            std::cerr << "WARN " << f.source << ": " << f.message << "\n";
        if (once) break;
        std::this_thread::sleep_for(std::chrono::seconds(seconds));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"news story pipeline: graph in, archived story page out"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run_cmd = app.add_subcommand("run", "execute the full pipeline for one date");
    run_args.attach(run_cmd);

    CommonArgs fetch_args;
    std::string fetch_out;
    CLI::App* fetch_cmd = app.add_subcommand("fetch-graph", "fetch and cache the day's graph");
    fetch_args.attach(fetch_cmd);
    fetch_cmd->add_option("--out", fetch_out, "write the graph JSON here (default: stdout)");

    CommonArgs build_args;
    std::string build_snapshots, build_out;
    CLI::App* build_cmd =
        app.add_subcommand("build-graph", "build a graph from local feed snapshots");
    build_args.attach(build_cmd);
    build_cmd->add_option("--snapshots", build_snapshots, "feed snapshot directory")->required();
    build_cmd->add_option("--out", build_out, "write the graph JSON here (default: stdout)");

    CommonArgs memento_args;
    std::string memento_in, memento_out;
    CLI::App* memento_cmd =
        app.add_subcommand("ensure-mementos", "resolve or create mementos for the story links");
    memento_args.attach(memento_cmd);
    memento_cmd->add_option("--in", memento_in, "graph JSON (default: cached fetch-graph)");
    memento_cmd->add_option("--out", memento_out, "write the memento list here (default: stdout)");

    CommonArgs analyze_args;
    std::string analyze_in, analyze_graph, analyze_out;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "extract text, entities, sumgrams, and images");
    analyze_args.attach(analyze_cmd);
    analyze_cmd->add_option("--in", analyze_in, "memento list (default: cached ensure-mementos)");
    analyze_cmd->add_option("--graph", analyze_graph, "graph JSON (default: cached fetch-graph)");
    analyze_cmd->add_option("--out", analyze_out, "write the analysis here (default: stdout)");

    CommonArgs assemble_args;
    std::string assemble_in, assemble_out;
    CLI::App* assemble_cmd = app.add_subcommand("assemble", "consolidate the story JSON");
    assemble_args.attach(assemble_cmd);
    assemble_cmd->add_option("--in", assemble_in, "analysis JSON (default: cached analyze)");
    assemble_cmd->add_option("--out", assemble_out, "write the story JSON here (default: stdout)");

    CommonArgs render_args;
    std::string render_in, render_out;
    CLI::App* render_cmd = app.add_subcommand("render", "render the story to HTML");
    render_args.attach(render_cmd);
    render_cmd->add_option("--in", render_in, "story JSON (default: cached assemble)");
    render_cmd->add_option("--out", render_out, "write the HTML here (default: stdout)");

    CommonArgs ingest_args;
    std::string ingest_store;
    bool ingest_once = false;
    int ingest_interval = 0;
    CLI::App* ingest_cmd = app.add_subcommand("ingest", "poll the feed roster into snapshots");
    ingest_args.attach(ingest_cmd, /*wants_date=*/false);
    ingest_cmd->add_option("--store", ingest_store, "snapshot store root");
    ingest_cmd->add_flag("--once", ingest_once, "poll a single round and exit");
    ingest_cmd->add_option("--interval", ingest_interval, "seconds between polls");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_args);
        if (fetch_cmd->parsed()) return cmd_fetch_graph(fetch_args, fetch_out);
        if (build_cmd->parsed()) return cmd_build_graph(build_args, build_snapshots, build_out);
        if (memento_cmd->parsed()) return cmd_ensure_mementos(memento_args, memento_in, memento_out);
        if (analyze_cmd->parsed())
            return cmd_analyze(analyze_args, analyze_in, analyze_graph, analyze_out);
        if (assemble_cmd->parsed()) return cmd_assemble(assemble_args, assemble_in, assemble_out);
        if (render_cmd->parsed()) return cmd_render(render_args, render_in, render_out);
        if (ingest_cmd->parsed())
            return cmd_ingest(ingest_args, ingest_store, ingest_once, ingest_interval);
    } catch (const sw::Error& e) {
        std::cerr << "ERROR " << e.code_name() << ": " << e.message() << "\n";
        return e.code() == sw::Errc::usage ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR Internal: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
