#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "storyweave/text.hpp"

namespace storyweave {

struct Url {
    std::string scheme;
    std::string userinfo;
    std::string host;
    std::string port;
    std::string path;
    std::string query;    // without '?'
    std::string fragment; // without '#'
    bool has_authority = false;
    bool has_query = false;
    bool has_fragment = false;

    std::string authority() const {
        std::string a;
        if (!userinfo.empty()) a += userinfo + "@";
        a += host;
        if (!port.empty()) a += ":" + port;
        return a;
    }

    std::string to_string() const {
        std::string s;
        if (!scheme.empty()) s += scheme + ":";
        if (has_authority) s += "//" + authority();
        s += path;
        if (has_query) s += "?" + query;
        if (has_fragment) s += "#" + fragment;
        return s;
    }
};

inline std::optional<Url> parse_url(std::string_view in) {
    Url u;
    std::string_view s = in;
    // scheme
    size_t colon = std::string_view::npos;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == ':') { colon = i; break; }
        bool ok = (i == 0) ? std::isalpha(static_cast<unsigned char>(c))
                           : (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.');
        if (!ok) break;
    }
    if (colon != std::string_view::npos && colon > 0) {
        u.scheme = ascii_lower(s.substr(0, colon));
        s = s.substr(colon + 1);
    }
    // fragment
    if (size_t h = s.find('#'); h != std::string_view::npos) {
        u.has_fragment = true;
        u.fragment = std::string(s.substr(h + 1));
        s = s.substr(0, h);
    }
    // query
    if (size_t q = s.find('?'); q != std::string_view::npos) {
        u.has_query = true;
        u.query = std::string(s.substr(q + 1));
        s = s.substr(0, q);
    }
    // authority
    if (s.size() >= 2 && s[0] == '/' && s[1] == '/') {
        u.has_authority = true;
        s = s.substr(2);
        size_t end = s.find('/');
        std::string_view auth = (end == std::string_view::npos) ? s : s.substr(0, end);
        s = (end == std::string_view::npos) ? std::string_view{} : s.substr(end);
        if (size_t at = auth.rfind('@'); at != std::string_view::npos) {
            u.userinfo = std::string(auth.substr(0, at));
            auth = auth.substr(at + 1);
        }
        if (size_t pc = auth.rfind(':'); pc != std::string_view::npos && auth.find(']') == std::string_view::npos) {
            u.port = std::string(auth.substr(pc + 1));
            auth = auth.substr(0, pc);
        }
        u.host = std::string(auth);
    }
    u.path = std::string(s);
    if (!u.scheme.empty() && u.host.empty() && !u.has_authority && u.path.empty() && !u.has_query)
        return std::nullopt;
    return u;
}

inline bool is_http_url(std::string_view s) {
    auto u = parse_url(s);
    return u && (u->scheme == "http" || u->scheme == "https") && !u->host.empty();
}

// RFC 3986 §5.2.4.
inline std::string remove_dot_segments(std::string_view path) {
    std::string input(path);
    std::string output;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.erase(0, 2);
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0 || input == "/..") {
            input.erase(0, (input == "/..") ? 3 : 3);
            if (input.empty()) input = "/";
            size_t slash = output.rfind('/');
            output.erase(slash == std::string::npos ? 0 : slash);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            size_t next = input.find('/', 1);
            output += input.substr(0, next);
            input.erase(0, next == std::string::npos ? input.size() : next);
        }
    }
    return output;
}

// RFC 3986 §5.2 reference resolution; returns ref unchanged when it is absolute.
inline std::string resolve_reference(std::string_view base_str, std::string_view ref_str) {
    auto ref = parse_url(ref_str);
    if (!ref) return std::string(ref_str);
    if (!ref->scheme.empty()) {
        ref->path = remove_dot_segments(ref->path);
        return ref->to_string();
    }
    auto base = parse_url(base_str);
    if (!base) return std::string(ref_str);
    Url t;
    t.scheme = base->scheme;
    if (ref->has_authority) {
        t.has_authority = true;
        t.userinfo = ref->userinfo;
        t.host = ref->host;
        t.port = ref->port;
        t.path = remove_dot_segments(ref->path);
        t.has_query = ref->has_query;
        t.query = ref->query;
    } else {
        t.has_authority = base->has_authority;
        t.userinfo = base->userinfo;
        t.host = base->host;
        t.port = base->port;
        if (ref->path.empty()) {
            t.path = base->path;
            t.has_query = ref->has_query ? true : base->has_query;
            t.query = ref->has_query ? ref->query : base->query;
        } else {
            if (ref->path[0] == '/') {
                t.path = remove_dot_segments(ref->path);
            } else {
                std::string merged;
                if (base->has_authority && base->path.empty()) {
                    merged = "/" + ref->path;
                } else {
                    size_t slash = base->path.rfind('/');
                    merged = (slash == std::string::npos)
                                 ? ref->path
                                 : base->path.substr(0, slash + 1) + ref->path;
                }
                t.path = remove_dot_segments(merged);
            }
            t.has_query = ref->has_query;
            t.query = ref->query;
        }
    }
    t.has_fragment = ref->has_fragment;
    t.fragment = ref->fragment;
    return t.to_string();
}

// Canonical form used for dedup: lowercase scheme and host, drop the
// fragment, drop a default port. Idempotent.
inline std::string normalize_url(std::string_view s) {
    auto u = parse_url(s);
    if (!u) return std::string(s);
    u->host = ascii_lower(u->host);
    u->has_fragment = false;
    u->fragment.clear();
    if ((u->scheme == "http" && u->port == "80") || (u->scheme == "https" && u->port == "443"))
        u->port.clear();
    if (u->has_authority && u->path.empty()) u->path = "/";
    u->path = remove_dot_segments(u->path);
    return u->to_string();
}

inline std::string url_origin(std::string_view s) {
    auto u = parse_url(s);
    if (!u || u->host.empty()) return "";
    std::string o = u->scheme + "://" + u->host;
    if (!u->port.empty()) o += ":" + u->port;
    return o;
}

inline std::string url_encode_component(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

// eTLD+1 approximation: the last two host labels, or three when the last two
// form a well-known second-level public suffix.
inline std::string registered_domain(std::string_view host_in) {
    static const std::unordered_set<std::string> kTwoPartSuffixes = {
        "co.uk", "org.uk", "gov.uk", "ac.uk", "me.uk", "net.uk",
        "co.jp", "ne.jp", "or.jp", "ac.jp",
        "com.au", "net.au", "org.au", "edu.au", "gov.au",
        "co.nz", "net.nz", "org.nz",
        "com.br", "com.mx", "co.in", "co.kr", "com.cn", "com.tw", "com.sg", "com.hk",
    };
    std::string host = ascii_lower(host_in);
    auto labels = split(host, '.');
    if (labels.size() <= 2) return host;
    std::string last2 = labels[labels.size() - 2] + "." + labels.back();
    if (kTwoPartSuffixes.count(last2))
        return labels[labels.size() - 3] + "." + last2;
    return last2;
}

inline std::string registered_domain_of_url(std::string_view url) {
    auto u = parse_url(url);
    return u ? registered_domain(u->host) : "";
}

} // namespace storyweave
