#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyweave/error.hpp"
#include "storyweave/text.hpp"
#include "storyweave/version.hpp"

namespace storyweave {

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string content_type;

    std::optional<std::string> header(std::string_view name) const {
        for (const auto& [k, v] : headers)
            if (iequals(k, name)) return v;
        return std::nullopt;
    }
};

struct HttpResponse {
    int status = 0; // 0 => transport failure
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string error; // transport failure description

    bool ok() const { return status >= 200 && status < 300; }
    bool transport_failed() const { return status == 0; }

    std::optional<std::string> header(std::string_view name) const {
        for (const auto& [k, v] : headers)
            if (iequals(k, name)) return v;
        return std::nullopt;
    }
};

// Transport interface. Implementations do not follow redirects; negotiation
// logic that cares about 3xx handles them itself.
class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual HttpResponse send(const HttpRequest& req) = 0;

    HttpResponse get(const std::string& url,
                     std::vector<std::pair<std::string, std::string>> headers = {}) {
        HttpRequest req;
        req.url = url;
        req.headers = std::move(headers);
        return send(req);
    }
};

// Serves canned responses from a fixture directory; the offline pipeline's
// only transport. Layout:
//   <root>/index.json   {"<url>": {"status": 200, "headers": {...},
//                                  "file": "relative/path" | "body": "..."}}
// Unknown URLs yield a transport failure.
class FixtureHttpClient : public HttpClient {
public:
    explicit FixtureHttpClient(std::filesystem::path root) : root_(std::move(root)) {
        auto index_path = root_ / "index.json";
        std::ifstream in(index_path);
        if (!in)
            throw Error(Errc::no_snapshot, "no web fixture index at " + index_path.string());
        try {
            index_ = nlohmann::ordered_json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(Errc::malformed_json, index_path.string() + ": " + e.what());
        }
    }

    HttpResponse send(const HttpRequest& req) override {
        {
            std::lock_guard lock(mu_);
            log_.push_back(req);
        }
        auto it = index_.find(req.url);
        if (it == index_.end()) {
            HttpResponse r;
            r.error = "no fixture entry for " + req.url;
            return r;
        }
        const auto& entry = *it;
        HttpResponse r;
        r.status = entry.value("status", 200);
        if (entry.contains("headers"))
            for (auto h = entry["headers"].begin(); h != entry["headers"].end(); ++h)
                r.headers.emplace_back(h.key(), h.value().get<std::string>());
        if (entry.contains("file")) {
            std::ifstream f(root_ / entry["file"].get<std::string>(), std::ios::binary);
            if (!f) {
                r.status = 0;
                r.error = "fixture file missing for " + req.url;
                return r;
            }
            r.body.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
        } else if (entry.contains("body")) {
            r.body = entry["body"].get<std::string>();
        }
        return r;
    }

    std::vector<HttpRequest> requests() const {
        std::lock_guard lock(mu_);
        return log_;
    }

private:
    std::filesystem::path root_;
    nlohmann::ordered_json index_;
    mutable std::mutex mu_;
    std::vector<HttpRequest> log_;
};

} // namespace storyweave
