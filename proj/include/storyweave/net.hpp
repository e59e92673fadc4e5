#pragma once

#include <chrono>
#include <memory>
#include <string>

#include <httplib.h>

#include "storyweave/http.hpp"
#include "storyweave/url.hpp"
#include "storyweave/version.hpp"

namespace storyweave {

// Real transport over cpp-httplib. One client object per request keeps the
// implementation simple; connection reuse is not worth it at feed-poll rates.
class NetHttpClient : public HttpClient {
public:
    explicit NetHttpClient(std::string user_agent = kUserAgent,
                           std::chrono::seconds timeout = std::chrono::seconds(30))
        : user_agent_(std::move(user_agent)), timeout_(timeout) {}

    HttpResponse send(const HttpRequest& req) override {
        HttpResponse out;
        auto u = parse_url(req.url);
        if (!u || u->host.empty() || (u->scheme != "http" && u->scheme != "https")) {
            out.error = "unsupported URL: " + req.url;
            return out;
        }
        std::string origin = u->scheme + "://" + u->host;
        if (!u->port.empty()) origin += ":" + u->port;
        httplib::Client cli(origin);
        cli.set_follow_location(false);
        cli.set_connection_timeout(timeout_.count(), 0);
        cli.set_read_timeout(timeout_.count(), 0);

        httplib::Headers headers;
        bool has_ua = false;
        for (const auto& [k, v] : req.headers) {
            if (iequals(k, "User-Agent")) has_ua = true;
            headers.emplace(k, v);
        }
        if (!has_ua) headers.emplace("User-Agent", user_agent_);

        std::string target = u->path.empty() ? "/" : u->path;
        if (u->has_query) target += "?" + u->query;

        httplib::Result res;
        if (req.method == "POST") {
            res = cli.Post(target, headers, req.body,
                           req.content_type.empty() ? "application/x-www-form-urlencoded"
                                                    : req.content_type);
        } else if (req.method == "HEAD") {
            res = cli.Head(target, headers);
        } else {
            res = cli.Get(target, headers);
        }
        if (!res) {
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        for (const auto& [k, v] : res->headers) out.headers.emplace_back(k, v);
        out.body = res->body;
        return out;
    }

private:
    std::string user_agent_;
    std::chrono::seconds timeout_;
};

} // namespace storyweave
