#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "storyweave/error.hpp"
#include "storyweave/http.hpp"
#include "storyweave/retry.hpp"
#include "storyweave/text.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

namespace storyweave {

struct LinkRelation {
    std::string target;
    std::vector<std::string> rels; // lowercased relation types
    std::optional<Timestamp> datetime;
    std::vector<std::pair<std::string, std::string>> other_params;

    bool has_rel(std::string_view rel) const {
        return std::find(rels.begin(), rels.end(), rel) != rels.end();
    }

    friend bool operator==(const LinkRelation&, const LinkRelation&) = default;
};

namespace detail_link {

inline void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && is_ascii_space(s[pos])) ++pos;
}

inline std::string parse_quoted(const std::string& s, size_t& pos) {
    ++pos; // opening quote
    std::string out;
    while (pos < s.size() && s[pos] != '"') {
        if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
        out.push_back(s[pos++]);
    }
    if (pos >= s.size()) throw Error(Errc::link_header_malformed, "unterminated quoted string");
    ++pos; // closing quote
    return out;
}

inline std::string parse_token(const std::string& s, size_t& pos) {
    std::string out;
    while (pos < s.size() && s[pos] != ';' && s[pos] != ',' && s[pos] != '=' &&
           !is_ascii_space(s[pos]))
        out.push_back(s[pos++]);
    return out;
}

} // namespace detail_link

// RFC 7089 / RFC 8288 Link header: comma-separated link-values, each
// `<target>; param=value; ...`. Quoted values may escape with backslash.
inline std::vector<LinkRelation> parse_link_header(const std::string& value) {
    using namespace detail_link;
    std::vector<LinkRelation> out;
    size_t pos = 0;
    skip_ws(value, pos);
    while (pos < value.size()) {
        if (value[pos] != '<')
            throw Error(Errc::link_header_malformed,
                        "expected '<' at offset " + std::to_string(pos));
        size_t close = value.find('>', pos);
        if (close == std::string::npos)
            throw Error(Errc::link_header_malformed, "unterminated target URI");
        LinkRelation rel;
        rel.target = value.substr(pos + 1, close - pos - 1);
        pos = close + 1;
        skip_ws(value, pos);
        while (pos < value.size() && value[pos] == ';') {
            ++pos;
            skip_ws(value, pos);
            std::string name = ascii_lower(parse_token(value, pos));
            if (name.empty())
                throw Error(Errc::link_header_malformed,
                            "empty parameter name at offset " + std::to_string(pos));
            skip_ws(value, pos);
            std::string val;
            if (pos < value.size() && value[pos] == '=') {
                ++pos;
                skip_ws(value, pos);
                if (pos < value.size() && value[pos] == '"')
                    val = parse_quoted(value, pos);
                else
                    val = parse_token(value, pos);
            }
            if (name == "rel") {
                for (const auto& r : split(val, ' '))
                    if (!r.empty()) rel.rels.push_back(ascii_lower(r));
            } else if (name == "datetime") {
                rel.datetime = parse_timestamp(val);
                if (!rel.datetime)
                    throw Error(Errc::link_header_malformed, "unparseable datetime \"" + val + "\"");
            } else {
                rel.other_params.emplace_back(name, val);
            }
            skip_ws(value, pos);
        }
        out.push_back(std::move(rel));
        if (pos < value.size()) {
            if (value[pos] != ',')
                throw Error(Errc::link_header_malformed,
                            "expected ',' at offset " + std::to_string(pos));
            ++pos;
            skip_ws(value, pos);
            if (pos >= value.size())
                throw Error(Errc::link_header_malformed, "trailing comma");
        }
    }
    return out;
}

inline std::string format_link_header(const std::vector<LinkRelation>& rels) {
    std::vector<std::string> parts;
    for (const auto& r : rels) {
        std::string s = "<" + r.target + ">";
        if (!r.rels.empty()) s += "; rel=\"" + join(r.rels, " ") + "\"";
        if (r.datetime) s += "; datetime=\"" + format_http_date(r.datetime->value) + "\"";
        for (const auto& [k, v] : r.other_params) s += "; " + k + "=\"" + v + "\"";
        parts.push_back(std::move(s));
    }
    return join(parts, ", ");
}

struct MementoRecord {
    std::string uri_r;
    std::string uri_m;
    std::optional<Timestamp> memento_datetime;
    std::string archive_id;
    bool archived = false;
    std::vector<std::string> diagnostics;

    friend bool operator==(const MementoRecord&, const MementoRecord&) = default;
};

inline std::optional<std::string> memento_invariant_violation(const MementoRecord& r) {
    if (r.archived) {
        if (r.uri_m == r.uri_r) return "archived record must have uri_m distinct from uri_r";
        if (!r.memento_datetime) return "archived record must carry memento_datetime";
    } else if (r.uri_m != r.uri_r) {
        return "live-web fallback must have uri_m equal to uri_r";
    }
    return std::nullopt;
}

class Resolver {
public:
    virtual ~Resolver() = default;
    virtual std::optional<MementoRecord> resolve(const std::string& uri_r,
                                                 const Timestamp& accept_datetime) = 0;
};

// TimeGate client: datetime content negotiation against a Memento aggregator.
class MementoResolver : public Resolver {
public:
    MementoResolver(std::string aggregator_base, HttpClient& http, RetryPolicy retry = {})
        : base_(std::move(aggregator_base)), http_(http), retry_(std::move(retry)) {
        if (!base_.empty() && base_.back() != '/') base_.push_back('/');
    }

    std::optional<MementoRecord> resolve(const std::string& uri_r,
                                         const Timestamp& accept_datetime) override {
        std::string url = base_ + uri_r;
        HttpRequest req;
        req.method = "GET";
        req.url = url;
        req.headers.emplace_back("Accept-Datetime", format_http_date(accept_datetime.value));
        HttpResponse res = send_with_retry(http_, req, retry_);
        if (res.transport_failed())
            throw Error(Errc::aggregator_unavailable, url + ": " + res.error);
        if (res.status == 404) return std::nullopt;
        if (res.status >= 300 && res.status < 400) {
            auto location = res.header("Location");
            if (!location) return std::nullopt;
            std::string uri_m = resolve_reference(url, *location);
            auto dt = datetime_from_link(res, uri_m);
            if (!dt) dt = fetch_memento_datetime(uri_m);
            if (!dt) return std::nullopt;
            return make_record(uri_r, uri_m, *dt);
        }
        if (res.ok()) {
            if (auto link = res.header("Link")) {
                for (const auto& rel : parse_link_header(*link)) {
                    if (!rel.has_rel("memento") || !rel.datetime) continue;
                    return make_record(uri_r, rel.target, *rel.datetime);
                }
            }
            return std::nullopt;
        }
        throw Error(Errc::aggregator_unavailable, url + ": HTTP " + std::to_string(res.status),
                    res.status);
    }

private:
    static MementoRecord make_record(const std::string& uri_r, std::string uri_m, Timestamp dt) {
        MementoRecord rec;
        rec.uri_r = uri_r;
        rec.uri_m = std::move(uri_m);
        rec.memento_datetime = std::move(dt);
        rec.archive_id = "aggregator";
        rec.archived = true;
        return rec;
    }

    static std::optional<Timestamp> datetime_from_link(const HttpResponse& res,
                                                       const std::string& uri_m) {
        if (auto md = res.header("Memento-Datetime")) return parse_timestamp(*md);
        auto link = res.header("Link");
        if (!link) return std::nullopt;
        std::optional<Timestamp> first;
        for (const auto& rel : parse_link_header(*link)) {
            if (!rel.has_rel("memento") || !rel.datetime) continue;
            if (rel.target == uri_m) return rel.datetime;
            if (!first) first = rel.datetime;
        }
        return first;
    }

    std::optional<Timestamp> fetch_memento_datetime(const std::string& uri_m) {
        HttpRequest req;
        req.method = "GET";
        req.url = uri_m;
        HttpResponse res = send_with_retry(http_, req, retry_);
        if (auto md = res.header("Memento-Datetime")) return parse_timestamp(*md);
        return std::nullopt;
    }

    std::string base_;
    HttpClient& http_;
    RetryPolicy retry_;
};

struct ArchiveAdapter {
    std::string id;
    std::string method = "GET";        // GET or POST
    std::string url_template;          // {uri} expands to the page URL
    std::string result = "location";   // "location" | "body-regex"
    std::string body_regex;            // capture group 1 yields the URI-M
    std::string post_body = "url={uri}";
};

inline std::vector<ArchiveAdapter> builtin_adapters() {
    ArchiveAdapter a;
    a.id = "archive-a";
    a.method = "GET";
    a.url_template = "https://archive-a.example/save/{uri}";
    a.result = "location";
    ArchiveAdapter b;
    b.id = "archive-b";
    b.method = "POST";
    b.url_template = "https://archive-b.example/submit";
    b.result = "body-regex";
    b.body_regex = "<uri-m>([^<]+)</uri-m>";
    return {a, b};
}

inline std::string expand_uri_template(std::string tmpl, const std::string& uri) {
    for (size_t pos; (pos = tmpl.find("{uri}")) != std::string::npos;)
        tmpl.replace(pos, 5, uri);
    return tmpl;
}

// Per-key minimum spacing between requests; time source injectable for tests.
class RateLimiter {
public:
    using Now = std::function<std::chrono::steady_clock::time_point()>;
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit RateLimiter(std::chrono::milliseconds min_interval,
                         Now now = [] { return std::chrono::steady_clock::now(); },
                         Sleeper sleeper = [](std::chrono::milliseconds d) {
                             std::this_thread::sleep_for(d);
                         })
        : min_interval_(min_interval), now_(std::move(now)), sleeper_(std::move(sleeper)) {}

    void acquire(const std::string& key) {
        std::chrono::milliseconds wait{0};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto t = now_();
            auto it = last_.find(key);
            if (it != last_.end()) {
                auto elapsed =
                    std::chrono::duration_cast<std::chrono::milliseconds>(t - it->second);
                if (elapsed < min_interval_) wait = min_interval_ - elapsed;
            }
            last_[key] = t + wait;
        }
        if (wait.count() > 0) sleeper_(wait);
    }

private:
    std::chrono::milliseconds min_interval_;
    Now now_;
    Sleeper sleeper_;
    std::mutex mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> last_;
};

class Submitter {
public:
    virtual ~Submitter() = default;
    virtual MementoRecord submit(const std::string& uri_r, const std::string& archive_id) = 0;
};

class ArchiveSubmitter : public Submitter {
public:
    ArchiveSubmitter(std::vector<ArchiveAdapter> adapters, HttpClient& http,
                     RetryPolicy retry = {}, Clock clock = system_utc_now,
                     RateLimiter* limiter = nullptr)
        : adapters_(std::move(adapters)), http_(http), retry_(std::move(retry)),
          clock_(std::move(clock)), limiter_(limiter) {}

    MementoRecord submit(const std::string& uri_r, const std::string& archive_id) override {
        const ArchiveAdapter* adapter = nullptr;
        for (const auto& a : adapters_)
            if (a.id == archive_id) adapter = &a;
        if (!adapter)
            throw Error(Errc::unknown_archive, "no archive adapter named \"" + archive_id + "\"");
        if (limiter_) limiter_->acquire(archive_id);

        HttpRequest req;
        req.url = expand_uri_template(adapter->url_template, uri_r);
        if (iequals(adapter->method, "POST")) {
            req.method = "POST";
            req.body = expand_uri_template(adapter->post_body, url_encode_component(uri_r));
            req.content_type = "application/x-www-form-urlencoded";
        } else {
            req.method = "GET";
        }
        HttpResponse res = send_with_retry(http_, req, retry_);
        if (res.transport_failed())
            throw Error(Errc::submission_failed, archive_id + ": " + res.error);
        if (res.status >= 400)
            throw Error(Errc::submission_failed,
                        archive_id + ": HTTP " + std::to_string(res.status), res.status);

        std::string uri_m;
        if (adapter->result == "body-regex") {
            std::smatch m;
            if (std::regex_search(res.body, m, std::regex(adapter->body_regex)) && m.size() > 1)
                uri_m = m[1].str();
        } else {
            if (auto loc = res.header("Location")) uri_m = resolve_reference(req.url, *loc);
        }
        if (uri_m.empty() || uri_m == uri_r)
            throw Error(Errc::submission_failed,
                        archive_id + ": response carried no new memento URI", res.status);

        MementoRecord rec;
        rec.uri_r = uri_r;
        rec.uri_m = std::move(uri_m);
        rec.archive_id = archive_id;
        rec.archived = true;
        if (auto md = res.header("Memento-Datetime")) rec.memento_datetime = parse_timestamp(*md);
        if (!rec.memento_datetime) rec.memento_datetime = datetime_from_path(rec.uri_m);
        if (!rec.memento_datetime) rec.memento_datetime = make_timestamp(clock_());
        return rec;
    }

private:
    // Wayback-style URI-Ms embed the capture moment as 14 digits in the path.
    static std::optional<Timestamp> datetime_from_path(const std::string& uri_m) {
        for (size_t i = 0; i + 14 <= uri_m.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(uri_m[i]))) continue;
            size_t j = i;
            while (j < uri_m.size() && std::isdigit(static_cast<unsigned char>(uri_m[j]))) ++j;
            if (j - i == 14) {
                const std::string d = uri_m.substr(i, 14);
                return make_timestamp(std::stoi(d.substr(0, 4)), std::stoi(d.substr(4, 2)),
                                      std::stoi(d.substr(6, 2)), std::stoi(d.substr(8, 2)),
                                      std::stoi(d.substr(10, 2)), std::stoi(d.substr(12, 2)));
            }
            i = j;
        }
        return std::nullopt;
    }

    std::vector<ArchiveAdapter> adapters_;
    HttpClient& http_;
    RetryPolicy retry_;
    Clock clock_;
    RateLimiter* limiter_;
};

inline MementoRecord submit_to_archive(const std::string& uri_r, const std::string& archive_id,
                                       const std::vector<ArchiveAdapter>& adapters,
                                       HttpClient& http, const RetryPolicy& retry = {}) {
    ArchiveSubmitter submitter(adapters, http, retry);
    return submitter.submit(uri_r, archive_id);
}

// Resolve first; if absent, submit in priority order; if everything fails,
// fall back to the live web so the story can still render.
inline MementoRecord ensure_memento(const std::string& uri_r, const Timestamp& accept_datetime,
                                    const std::vector<std::string>& archive_priority,
                                    Resolver& resolver, Submitter& submitter) {
    std::vector<std::string> diagnostics;
    try {
        if (auto found = resolver.resolve(uri_r, accept_datetime)) return *found;
    } catch (const Error& e) {
        diagnostics.push_back(e.what());
    }
    for (const auto& archive_id : archive_priority) {
        try {
            MementoRecord rec = submitter.submit(uri_r, archive_id);
            rec.diagnostics = diagnostics;
            return rec;
        } catch (const Error& e) {
            diagnostics.push_back(e.what());
        }
    }
    MementoRecord rec;
    rec.uri_r = uri_r;
    rec.uri_m = uri_r;
    rec.archived = false;
    rec.diagnostics = std::move(diagnostics);
    return rec;
}

inline std::vector<MementoRecord> ensure_mementos(const std::vector<std::string>& uri_rs,
                                                  const Timestamp& accept_datetime,
                                                  const std::vector<std::string>& archive_priority,
                                                  Resolver& resolver, Submitter& submitter,
                                                  int parallelism = 4) {
    std::vector<MementoRecord> out(uri_rs.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= uri_rs.size()) return;
            out[i] = ensure_memento(uri_rs[i], accept_datetime, archive_priority, resolver,
                                    submitter);
        }
    };
    size_t n_threads = std::min<size_t>(std::max(parallelism, 1), uri_rs.size());
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return out;
}

} // namespace storyweave
