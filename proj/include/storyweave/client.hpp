#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "storyweave/error.hpp"
#include "storyweave/graph.hpp"
#include "storyweave/http.hpp"
#include "storyweave/model.hpp"
#include "storyweave/retry.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

namespace storyweave {

// First day the public service has data for.
inline constexpr std::chrono::year_month_day kServiceInception{
    std::chrono::year{2017}, std::chrono::month{8}, std::chrono::day{8}};

inline const char* kDefaultEndpointTemplate =
    "{base}/graphs/polar-media-consensus-graph/{yyyy}/{mm}/{dd}/graph.json"
    "?cursor={cursor}&hist={hist}";

inline std::string expand_endpoint(std::string tmpl, const std::string& base, Date date,
                                   long cursor, int hist) {
    auto replace = [&](const std::string& key, const std::string& value) {
        for (size_t pos; (pos = tmpl.find(key)) != std::string::npos;)
            tmpl.replace(pos, key.size(), value);
    };
    char yyyy[8], mm[4], dd[4];
    std::snprintf(yyyy, sizeof(yyyy), "%04d", int(date.year()));
    std::snprintf(mm, sizeof(mm), "%02u", unsigned(date.month()));
    std::snprintf(dd, sizeof(dd), "%02u", unsigned(date.day()));
    replace("{base}", base);
    replace("{yyyy}", yyyy);
    replace("{mm}", mm);
    replace("{dd}", dd);
    replace("{cursor}", std::to_string(cursor));
    replace("{hist}", std::to_string(hist));
    return tmpl;
}

class GraphSource {
public:
    virtual ~GraphSource() = default;
    virtual GraphDocument fetch(Date date, int hist = 1440, long cursor = 0) = 0;
};

class HttpGraphSource : public GraphSource {
public:
    HttpGraphSource(std::string base_uri, HttpClient& http, RetryPolicy retry = {},
                    std::string endpoint_template = kDefaultEndpointTemplate)
        : base_(std::move(base_uri)), http_(http), retry_(std::move(retry)),
          template_(std::move(endpoint_template)) {}

    GraphDocument fetch(Date date, int hist = 1440, long cursor = 0) override {
        if (date < kServiceInception)
            throw Error(Errc::date_out_of_range,
                        "service has no data before 2017-08-08, requested " +
                            format_date(date, '-'));
        std::string url = expand_endpoint(template_, base_, date, cursor, hist);
        HttpRequest req;
        req.method = "GET";
        req.url = url;
        HttpResponse res = send_with_retry(http_, req, retry_);
        if (res.transport_failed())
            throw Error(Errc::service_unavailable, url + ": " + res.error);
        if (res.status == 404)
            throw Error(Errc::no_snapshot, "no graph snapshot at " + url, 404);
        if (!res.ok())
            throw Error(Errc::service_unavailable, url + ": HTTP " + std::to_string(res.status),
                        res.status);
        return parse_graph(res.body);
    }

private:
    std::string base_;
    HttpClient& http_;
    RetryPolicy retry_;
    std::string template_;
};

// Reads snapshots from <root>/graphs/polar-media-consensus-graph/YYYY/MM/DD/.
// A date can hold many snapshots; the one whose biggest component wins the
// biggest-story ordering is returned (earliest file on exact ties).
class LocalGraphSource : public GraphSource {
public:
    explicit LocalGraphSource(std::filesystem::path root) : root_(std::move(root)) {}

    GraphDocument fetch(Date date, int hist = 1440, long cursor = 0) override {
        (void)hist;
        (void)cursor;
        namespace fs = std::filesystem;
        fs::path dir = root_ / "graphs" / "polar-media-consensus-graph" / format_date(date, '/');
        std::error_code ec;
        std::vector<fs::path> files;
        for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
            if (it->path().extension() == ".json") files.push_back(it->path());
        if (files.empty())
            throw Error(Errc::no_snapshot, "no graph snapshots under " + dir.string());
        std::sort(files.begin(), files.end());

        std::optional<GraphDocument> best;
        auto best_key = std::make_tuple(size_t(0), 0, 0.0);
        std::optional<GraphDocument> last;
        for (const auto& path : files) {
            std::ifstream in(path, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            GraphDocument g = parse_graph(buf.str());
            if (g.connected_comps.empty()) {
                last = std::move(g);
                continue;
            }
            const ConnectedComponent& top = select_biggest_story(g);
            auto key = std::make_tuple(top.nodes.size(), top.unique_source_count, top.avg_degree);
            if (!best || key > best_key) {
                best_key = key;
                best = std::move(g);
            }
        }
        if (best) return std::move(*best);
        return std::move(*last);
    }

private:
    std::filesystem::path root_;
};

inline GraphDocument fetch_graph_for_date(const std::string& base_uri, Date date, HttpClient& http,
                                          int hist = 1440, long cursor = 0,
                                          const RetryPolicy& retry = {}) {
    HttpGraphSource source(base_uri, http, retry);
    return source.fetch(date, hist, cursor);
}

// Links of the biggest component's members, node-index order, deduplicated
// after URL normalization.
inline std::vector<std::string> extract_story_urirs(const GraphDocument& g) {
    const ConnectedComponent& story = select_biggest_story(g);
    std::vector<std::string> urirs;
    std::unordered_set<std::string> seen;
    for (size_t idx : story.nodes) {
        const std::string& link = g.nodes[idx].link;
        if (!seen.insert(normalize_url(link)).second) continue;
        urirs.push_back(link);
    }
    return urirs;
}

} // namespace storyweave
