#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "storyweave/text.hpp"

namespace storyweave {

using UtcMicros = std::chrono::sys_time<std::chrono::microseconds>;
using Date = std::chrono::year_month_day;
using Clock = std::function<UtcMicros()>;

inline UtcMicros system_utc_now() {
    return std::chrono::time_point_cast<std::chrono::microseconds>(
        std::chrono::system_clock::now());
}

// A UTC instant plus the text it was parsed from. Parsed values serialize
// back to their original spelling; programmatically built values serialize
// in canonical ISO-8601 ("YYYY-MM-DDTHH:MM:SS[.ffffff]Z").
struct Timestamp {
    UtcMicros value{};
    std::string raw;

    std::string to_string() const;
    Date date() const {
        return Date(std::chrono::floor<std::chrono::days>(value));
    }

    friend bool operator==(const Timestamp& a, const Timestamp& b) {
        return a.value == b.value && a.to_string() == b.to_string();
    }
    friend bool operator!=(const Timestamp& a, const Timestamp& b) { return !(a == b); }
    friend bool operator<(const Timestamp& a, const Timestamp& b) { return a.value < b.value; }
};

namespace detail_time {

inline bool parse_int(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

inline std::optional<UtcMicros> make_utc(int y, int mo, int d, int h, int mi, int sec,
                                         long micros, int offset_minutes) {
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
    auto tp = sys_days(ymd) + hours(h) + minutes(mi) + seconds(sec) + microseconds(micros);
    tp -= minutes(offset_minutes);
    return time_point_cast<microseconds>(tp);
}

inline const char* const kMonthNames[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
inline const char* const kDayNames[7] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};

inline int month_from_name(std::string_view name) {
    for (int i = 0; i < 12; ++i)
        if (iequals(name, kMonthNames[i])) return i + 1;
    return 0;
}

} // namespace detail_time

// "YYYY-MM-DD[Thh:mm:ss[.frac][Z|±hh:mm|±hhmm]]"; a missing zone means UTC.
inline std::optional<UtcMicros> parse_iso8601(std::string_view s) {
    using namespace detail_time;
    int y, mo, d;
    if (s.size() < 10) return std::nullopt;
    if (!parse_int(s, 0, 4, y) || s[4] != '-' || !parse_int(s, 5, 2, mo) || s[7] != '-' ||
        !parse_int(s, 8, 2, d))
        return std::nullopt;
    int h = 0, mi = 0, sec = 0;
    long micros = 0;
    int offset = 0;
    size_t i = 10;
    if (i < s.size()) {
        if (s[i] != 'T' && s[i] != 't' && s[i] != ' ') return std::nullopt;
        ++i;
        if (!parse_int(s, i, 2, h) || i + 2 >= s.size() || s[i + 2] != ':') return std::nullopt;
        if (!parse_int(s, i + 3, 2, mi)) return std::nullopt;
        i += 5;
        if (i < s.size() && s[i] == ':') {
            if (!parse_int(s, i + 1, 2, sec)) return std::nullopt;
            i += 3;
        }
        if (i < s.size() && s[i] == '.') {
            ++i;
            size_t start = i;
            long frac = 0;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
                if (i - start < 6) frac = frac * 10 + (s[i] - '0');
                ++i;
            }
            size_t digits = i - start;
            if (digits == 0) return std::nullopt;
            for (size_t k = digits; k < 6; ++k) frac *= 10;
            micros = frac;
        }
        if (i < s.size()) {
            if (s[i] == 'Z' || s[i] == 'z') {
                ++i;
            } else if (s[i] == '+' || s[i] == '-') {
                int sign = (s[i] == '+') ? 1 : -1;
                ++i;
                int oh, om = 0;
                if (!parse_int(s, i, 2, oh)) return std::nullopt;
                i += 2;
                if (i < s.size() && s[i] == ':') ++i;
                if (i + 2 <= s.size() && parse_int(s, i, 2, om)) i += 2;
                offset = sign * (oh * 60 + om);
            }
        }
        if (i != s.size()) return std::nullopt;
    }
    return make_utc(y, mo, d, h, mi, sec, micros, offset);
}

// RFC 2822 / RFC 1123: "[Day, ]DD Mon YYYY hh:mm[:ss] (+hhmm|-hhmm|GMT|UT|UTC)".
inline std::optional<UtcMicros> parse_rfc2822(std::string_view in) {
    using namespace detail_time;
    std::string s = collapse_ws(in);
    size_t comma = s.find(',');
    size_t i = (comma != std::string::npos) ? comma + 1 : 0;
    while (i < s.size() && s[i] == ' ') ++i;

    auto next_token = [&]() -> std::string_view {
        size_t start = i;
        while (i < s.size() && s[i] != ' ') ++i;
        std::string_view tok(s.data() + start, i - start);
        while (i < s.size() && s[i] == ' ') ++i;
        return tok;
    };

    std::string_view day_tok = next_token();
    std::string_view mon_tok = next_token();
    std::string_view year_tok = next_token();
    std::string_view time_tok = next_token();
    std::string_view zone_tok = next_token();
    if (day_tok.empty() || mon_tok.empty() || year_tok.empty() || time_tok.empty())
        return std::nullopt;

    int d = 0;
    if (!all_digits(day_tok) || day_tok.size() > 2) return std::nullopt;
    for (char c : day_tok) d = d * 10 + (c - '0');
    int mo = month_from_name(mon_tok);
    if (mo == 0) return std::nullopt;
    int y = 0;
    if (!all_digits(year_tok) || year_tok.size() != 4) return std::nullopt;
    for (char c : year_tok) y = y * 10 + (c - '0');

    int h = 0, mi = 0, sec = 0;
    auto parts = split(time_tok, ':');
    if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
    if (!all_digits(parts[0]) || !all_digits(parts[1])) return std::nullopt;
    h = std::stoi(parts[0]);
    mi = std::stoi(parts[1]);
    if (parts.size() == 3) {
        if (!all_digits(parts[2])) return std::nullopt;
        sec = std::stoi(parts[2]);
    }

    int offset = 0;
    if (!zone_tok.empty()) {
        if (zone_tok[0] == '+' || zone_tok[0] == '-') {
            if (zone_tok.size() != 5 || !all_digits(zone_tok.substr(1))) return std::nullopt;
            int sign = (zone_tok[0] == '+') ? 1 : -1;
            int oh = (zone_tok[1] - '0') * 10 + (zone_tok[2] - '0');
            int om = (zone_tok[3] - '0') * 10 + (zone_tok[4] - '0');
            offset = sign * (oh * 60 + om);
        } else if (!(iequals(zone_tok, "GMT") || iequals(zone_tok, "UT") ||
                     iequals(zone_tok, "UTC") || iequals(zone_tok, "Z"))) {
            return std::nullopt;
        }
    }
    return make_utc(y, mo, d, h, mi, sec, 0, offset);
}

inline std::optional<UtcMicros> parse_datetime(std::string_view s) {
    if (auto t = parse_iso8601(s)) return t;
    return parse_rfc2822(s);
}

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    auto v = parse_datetime(s);
    if (!v) return std::nullopt;
    return Timestamp{*v, std::string(s)};
}

inline std::string format_iso8601(UtcMicros tp) {
    using namespace std::chrono;
    auto dp = floor<days>(tp);
    year_month_day ymd(dp);
    auto tod = tp - dp;
    auto h = duration_cast<hours>(tod);
    auto mi = duration_cast<minutes>(tod - h);
    auto sec = duration_cast<seconds>(tod - h - mi);
    auto us = duration_cast<microseconds>(tod - h - mi - sec);
    char buf[48];
    if (us.count() != 0) {
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ld.%06ldZ",
                      int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                      long(h.count()), long(mi.count()), long(sec.count()), long(us.count()));
    } else {
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                      int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                      long(h.count()), long(mi.count()), long(sec.count()));
    }
    return buf;
}

// RFC 1123 HTTP-date, e.g. "Mon, 23 Mar 2020 00:06:09 GMT".
inline std::string format_http_date(UtcMicros tp) {
    using namespace std::chrono;
    auto dp = floor<days>(tp);
    year_month_day ymd(dp);
    weekday wd(dp);
    auto tod = tp - dp;
    auto h = duration_cast<hours>(tod);
    auto mi = duration_cast<minutes>(tod - h);
    auto sec = duration_cast<seconds>(tod - h - mi);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s, %02u %s %04d %02ld:%02ld:%02ld GMT",
                  detail_time::kDayNames[wd.c_encoding()], unsigned(ymd.day()),
                  detail_time::kMonthNames[unsigned(ymd.month()) - 1], int(ymd.year()),
                  long(h.count()), long(mi.count()), long(sec.count()));
    return buf;
}

inline std::string Timestamp::to_string() const {
    return raw.empty() ? format_iso8601(value) : raw;
}

inline Timestamp make_timestamp(UtcMicros tp) { return Timestamp{tp, ""}; }

inline Timestamp make_timestamp(int y, int mo, int d, int h = 0, int mi = 0, int sec = 0,
                                long micros = 0) {
    auto v = detail_time::make_utc(y, mo, d, h, mi, sec, micros, 0);
    return Timestamp{*v, ""};
}

inline std::optional<Date> parse_date(std::string_view s) {
    using namespace detail_time;
    int y, mo, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_int(s, 0, 4, y) || !parse_int(s, 5, 2, mo) || !parse_int(s, 8, 2, d))
        return std::nullopt;
    Date ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
             std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return ymd;
}

inline std::string format_date(Date d, char sep = '-') {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d%c%02u%c%02u", int(d.year()), sep, unsigned(d.month()),
                  sep, unsigned(d.day()));
    return buf;
}

} // namespace storyweave
