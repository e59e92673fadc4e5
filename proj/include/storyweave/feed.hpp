#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "storyweave/error.hpp"
#include "storyweave/http.hpp"
#include "storyweave/markup.hpp"
#include "storyweave/text.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

namespace storyweave {

enum class Polarity { left, center, right };

inline const char* polarity_name(Polarity p) {
    switch (p) {
        case Polarity::left: return "left";
        case Polarity::center: return "center";
        case Polarity::right: return "right";
    }
    return "";
}

inline std::optional<Polarity> polarity_from(std::string_view s) {
    if (s == "left") return Polarity::left;
    if (s == "center") return Polarity::center;
    if (s == "right") return Polarity::right;
    return std::nullopt;
}

struct FeedSource {
    std::string name;
    std::string feed_url;
    Polarity polarity = Polarity::center;

    friend bool operator==(const FeedSource&, const FeedSource&) = default;
};

struct FeedItem {
    std::string url; // absolute, resolved against the feed base
    std::string title;
    std::optional<Timestamp> published;

    friend bool operator==(const FeedItem&, const FeedItem&) = default;
};

struct FeedSnapshot {
    Timestamp fetched_at;
    FeedSource source;
    std::vector<FeedItem> items;
    std::optional<std::string> rss_uri_m;
};

// The 17 sources the polar-media consensus graph polls.
inline const std::vector<FeedSource>& default_roster() {
    static const std::vector<FeedSource> roster = {
        {"Politicus USA", "http://www.politicususa.com/feed", Polarity::left},
        {"Vox", "https://www.vox.com/rss/index.xml", Polarity::left},
        {"Huffington Post", "http://www.huffingtonpost.com/section/front-page/feed", Polarity::left},
        {"MSNBC", "http://www.msnbc.com/feeds/latest", Polarity::left},
        {"New York Times", "http://rss.nytimes.com/services/xml/rss/nyt/HomePage.xml", Polarity::left},
        {"Washington Post", "http://feeds.washingtonpost.com/rss/politics", Polarity::left},
        {"CNN", "http://rss.cnn.com/rss/cnn_topstories.rss", Polarity::center},
        {"Politico", "http://www.politico.com/rss/politics.xml", Polarity::center},
        {"ABC News", "http://abcnews.go.com/abcnews/topstories", Polarity::center},
        {"The Hill", "http://thehill.com/rss/syndicator/19109", Polarity::center},
        {"Real Clear Politics", "http://feeds.feedburner.com/realclearpolitics/qlMj", Polarity::center},
        {"Washington Examiner", "http://www.washingtonexaminer.com/rss/news", Polarity::right},
        {"Fox News", "http://feeds.foxnews.com/foxnews/latest", Polarity::right},
        {"Daily Caller", "http://feeds.feedburner.com/dailycaller", Polarity::right},
        {"Conservative Tribune", "http://conservativetribune.com/feed/", Polarity::right},
        {"Breitbart", "http://feeds.feedburner.com/breitbart", Polarity::right},
        {"The Gateway Pundit", "http://www.thegatewaypundit.com/feed/", Polarity::right},
    };
    return roster;
}

// Roster file: JSON array of {name, feed_url, polarity}.
inline std::vector<FeedSource> load_feed_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_not_found, "feed roster not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::config_invalid, path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw Error(Errc::config_invalid, "feed roster must be a JSON array");
    std::vector<FeedSource> roster;
    std::unordered_set<std::string> seen_urls;
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        std::string at = "entry " + std::to_string(i);
        if (!e.is_object() || !e.contains("name") || !e.contains("feed_url") || !e.contains("polarity"))
            throw Error(Errc::config_invalid, at + ": need {name, feed_url, polarity}");
        FeedSource src;
        src.name = e["name"].get<std::string>();
        src.feed_url = e["feed_url"].get<std::string>();
        auto pol = polarity_from(e["polarity"].get<std::string>());
        if (!pol)
            throw Error(Errc::config_invalid,
                        at + ": bad polarity \"" + e["polarity"].get<std::string>() + "\"");
        src.polarity = *pol;
        if (!seen_urls.insert(src.feed_url).second)
            throw Error(Errc::config_invalid, at + ": duplicate feed_url " + src.feed_url);
        roster.push_back(std::move(src));
    }
    return roster;
}

namespace detail_feed {

inline const MarkupNode* child_element(const MarkupNode& parent, std::string_view tag) {
    for (const auto& c : parent.children)
        if (c->is_element(tag)) return c.get();
    return nullptr;
}

inline std::string child_text(const MarkupNode& parent, std::string_view tag) {
    const MarkupNode* c = child_element(parent, tag);
    return c ? collapse_ws(text_content(*c)) : std::string();
}

inline std::optional<Timestamp> child_datetime(const MarkupNode& parent, std::string_view tag) {
    std::string raw = child_text(parent, tag);
    if (raw.empty()) return std::nullopt;
    return parse_timestamp(raw);
}

// Atom <link>: prefer rel="alternate", fall back to a rel-less link.
inline std::string atom_entry_link(const MarkupNode& entry) {
    std::string fallback;
    for (const auto& c : entry.children) {
        if (!c->is_element("link")) continue;
        auto href = c->attr("href");
        if (!href || href->empty()) continue;
        auto rel = c->attr("rel");
        if (rel && iequals(*rel, "alternate")) return *href;
        if (!rel && fallback.empty()) fallback = *href;
    }
    return fallback;
}

} // namespace detail_feed

// Accepts RSS 2.0 and Atom. Items with no usable URL are skipped; item URLs
// are resolved against the feed URL and deduplicated after normalization.
inline std::vector<FeedItem> parse_feed_items(const std::string& body, const std::string& feed_url) {
    using namespace detail_feed;
    MarkupDoc doc;
    try {
        doc = parse_xml(body);
    } catch (const MarkupError& e) {
        throw Error(Errc::feed_parse_error,
                    "malformed feed XML at offset " + std::to_string(e.offset) + ": " + e.message);
    }

    std::vector<FeedItem> items;
    std::unordered_set<std::string> seen;
    auto push = [&](std::string url, std::string title, std::optional<Timestamp> published) {
        if (url.empty()) return;
        std::string abs = resolve_reference(feed_url, url);
        if (!is_http_url(abs)) return;
        if (!seen.insert(normalize_url(abs)).second) return;
        items.push_back(FeedItem{std::move(abs), std::move(title), std::move(published)});
    };

    if (const MarkupNode* rss = find_first(*doc.root, "rss"); rss || find_first(*doc.root, "channel")) {
        const MarkupNode* channel = find_first(*doc.root, "channel");
        if (!channel) throw Error(Errc::feed_parse_error, "RSS document has no <channel>");
        for (const auto& c : channel->children) {
            if (!c->is_element("item")) continue;
            std::string url = child_text(*c, "link");
            if (url.empty()) {
                // guid fallback, used by feeds that only set a permalink guid
                const MarkupNode* guid = child_element(*c, "guid");
                if (guid) {
                    std::string g = collapse_ws(text_content(*guid));
                    if (is_http_url(g)) url = g;
                }
            }
            push(std::move(url), child_text(*c, "title"), child_datetime(*c, "pubdate"));
        }
        return items;
    }

    if (const MarkupNode* feed = find_first(*doc.root, "feed")) {
        for (const auto& c : feed->children) {
            if (!c->is_element("entry")) continue;
            auto published = child_datetime(*c, "published");
            if (!published) published = child_datetime(*c, "updated");
            push(atom_entry_link(*c), child_text(*c, "title"), std::move(published));
        }
        return items;
    }

    throw Error(Errc::feed_parse_error, "document is neither RSS 2.0 nor Atom");
}

inline FeedSnapshot fetch_feed(const FeedSource& source, HttpClient& http,
                               const Clock& clock = system_utc_now) {
    HttpResponse res = http.get(source.feed_url);
    if (res.transport_failed())
        throw Error(Errc::fetch_error, source.name + ": " + res.error);
    if (!res.ok())
        throw Error(Errc::fetch_error,
                    source.name + ": HTTP " + std::to_string(res.status), res.status);
    FeedSnapshot snap;
    snap.fetched_at = make_timestamp(clock());
    snap.source = source;
    snap.items = parse_feed_items(res.body, source.feed_url);
    return snap;
}

inline std::string source_slug(const std::string& name) {
    std::string out;
    bool pending_dash = false;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_dash && !out.empty()) out.push_back('-');
            pending_dash = false;
            out.push_back(ascii_lower_char(c));
        } else {
            pending_dash = true;
        }
    }
    return out.empty() ? "feed" : out;
}

inline nlohmann::ordered_json snapshot_to_json(const FeedSnapshot& snap) {
    nlohmann::ordered_json j;
    j["source"] = {{"name", snap.source.name},
                   {"feed-url", snap.source.feed_url},
                   {"polarity", polarity_name(snap.source.polarity)}};
    j["fetched-at"] = snap.fetched_at.to_string();
    if (snap.rss_uri_m) j["rss-uri-m"] = *snap.rss_uri_m;
    auto items = nlohmann::ordered_json::array();
    for (const auto& it : snap.items) {
        nlohmann::ordered_json ji;
        ji["url"] = it.url;
        ji["title"] = it.title;
        if (it.published) ji["published"] = it.published->to_string();
        items.push_back(std::move(ji));
    }
    j["items"] = std::move(items);
    return j;
}

inline FeedSnapshot snapshot_from_json(const nlohmann::ordered_json& j) {
    FeedSnapshot snap;
    snap.source.name = j.at("source").at("name").get<std::string>();
    snap.source.feed_url = j.at("source").at("feed-url").get<std::string>();
    auto pol = polarity_from(j.at("source").at("polarity").get<std::string>());
    if (!pol) throw Error(Errc::schema_violation, "snapshot source.polarity invalid");
    snap.source.polarity = *pol;
    auto t = parse_timestamp(j.at("fetched-at").get<std::string>());
    if (!t) throw Error(Errc::schema_violation, "snapshot fetched-at unparseable");
    snap.fetched_at = *t;
    if (j.contains("rss-uri-m")) snap.rss_uri_m = j["rss-uri-m"].get<std::string>();
    for (const auto& ji : j.at("items")) {
        FeedItem it;
        it.url = ji.at("url").get<std::string>();
        it.title = ji.value("title", "");
        if (ji.contains("published"))
            it.published = parse_timestamp(ji["published"].get<std::string>());
        snap.items.push_back(std::move(it));
    }
    return snap;
}

inline FeedSnapshot load_feed_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::store_error, "cannot read snapshot " + path.string());
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::malformed_json, path.string() + ": " + e.what());
    }
    return snapshot_from_json(j);
}

struct FeedFailure {
    std::string source;
    std::string message;
};

struct SnapshotRun {
    std::filesystem::path directory; // snapshots/YYYY/MM/DD/HHMM
    std::vector<FeedSnapshot> snapshots;
    std::vector<FeedFailure> failures;
    std::vector<std::filesystem::path> written;
};

// Polls every roster feed with bounded parallelism and writes one snapshot
// file per source under <store>/YYYY/MM/DD/HHMM/. Per-source failures are
// collected, not fatal; only store problems throw.
inline SnapshotRun snapshot_feeds(const std::vector<FeedSource>& roster, const Clock& clock,
                                  const std::filesystem::path& store, HttpClient& http,
                                  int parallelism = 4) {
    using namespace std::chrono;
    SnapshotRun run;
    UtcMicros now = clock();
    auto dp = floor<days>(now);
    year_month_day ymd(dp);
    auto tod = now - dp;
    auto h = duration_cast<hours>(tod);
    auto mi = duration_cast<minutes>(tod - h);
    char leaf[16];
    std::snprintf(leaf, sizeof(leaf), "%02d%02d", int(h.count()), int(mi.count()));
    run.directory = store / format_date(ymd, '/') / leaf;

    std::error_code ec;
    std::filesystem::create_directories(run.directory, ec);
    if (ec) throw Error(Errc::store_error, "cannot create " + run.directory.string());

    std::vector<std::optional<FeedSnapshot>> results(roster.size());
    std::vector<std::optional<FeedFailure>> errors(roster.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= roster.size()) return;
            try {
                results[i] = fetch_feed(roster[i], http, clock);
            } catch (const Error& e) {
                errors[i] = FeedFailure{roster[i].name, e.what()};
            }
        }
    };
    size_t n_threads = std::min<size_t>(std::max(parallelism, 1), roster.size());
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    for (size_t i = 0; i < roster.size(); ++i) {
        if (errors[i]) {
            run.failures.push_back(*errors[i]);
            continue;
        }
        if (!results[i]) continue;
        auto path = run.directory / (source_slug(roster[i].name) + ".json");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(Errc::store_error, "cannot write " + path.string());
        out << snapshot_to_json(*results[i]).dump(2) << "\n";
        if (!out.good()) throw Error(Errc::store_error, "write failed for " + path.string());
        run.written.push_back(path);
        run.snapshots.push_back(std::move(*results[i]));
    }
    return run;
}

} // namespace storyweave
