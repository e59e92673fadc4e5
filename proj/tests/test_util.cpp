#include <catch2/catch_amalgamated.hpp>

#include "storyweave/text.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

using namespace storyweave;

TEST_CASE("collapse_ws squeezes runs and trims", "[unit][text]") {
    CHECK(collapse_ws("  a \t b\n\nc ") == "a b c");
    CHECK(collapse_ws("") == "");
    CHECK(collapse_ws(" \n ") == "");
    CHECK(collapse_ws("one") == "one");
}

TEST_CASE("round2 rounds half away from zero", "[unit][text]") {
    CHECK(round2(0.125) == Catch::Approx(0.13).epsilon(1e-12)); // exact binary half
    CHECK(round2(-0.125) == Catch::Approx(-0.13).epsilon(1e-12));
    CHECK(round2(0.304) == Catch::Approx(0.30).epsilon(1e-12));
    CHECK(round2(0.566) == Catch::Approx(0.57).epsilon(1e-12));
    CHECK(round2(1.0) == 1.0);
}

TEST_CASE("format_sim trims trailing zeros", "[unit][text]") {
    CHECK(format_sim(0.57) == "0.57");
    CHECK(format_sim(0.3) == "0.3");
    CHECK(format_sim(0.30) == "0.3");
    CHECK(format_sim(1.0) == "1");
    CHECK(format_sim(0.0) == "0");
}

TEST_CASE("html_escape covers the five specials", "[unit][text]") {
    CHECK(html_escape(R"(<a href="x">&'</a>)") == "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;");
    CHECK(html_escape("plain") == "plain");
}

TEST_CASE("utf8_prefix never splits a sequence", "[unit][text]") {
    CHECK(utf8_prefix("abcdef", 3) == "abc");
    CHECK(utf8_prefix("ab", 10) == "ab");
    std::string s = "a\xC3\xA9z"; // a, e-acute, z
    CHECK(utf8_prefix(s, 2) == "a\xC3\xA9");
    CHECK(utf8_prefix(s, 1) == "a");
}

TEST_CASE("split and join invert each other", "[unit][text]") {
    auto parts = split("a,b,,c", ',');
    REQUIRE(parts == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(join(parts, ",") == "a,b,,c");
}

TEST_CASE("iso-8601 parsing handles zones and fractions", "[unit][time]") {
    auto t = parse_iso8601("2020-03-23T00:09:10.707796Z");
    REQUIRE(t);
    CHECK(format_iso8601(*t) == "2020-03-23T00:09:10.707796Z");

    auto bare = parse_iso8601("2020-03-23T00:09:10.325362");
    REQUIRE(bare);
    CHECK(format_iso8601(*bare) == "2020-03-23T00:09:10.325362Z");

    auto offset = parse_iso8601("2020-03-22T18:00:00-04:00");
    REQUIRE(offset);
    CHECK(format_iso8601(*offset) == "2020-03-22T22:00:00Z");

    auto compact = parse_iso8601("2020-03-22T18:00:00+0530");
    REQUIRE(compact);
    CHECK(format_iso8601(*compact) == "2020-03-22T12:30:00Z");

    auto date_only = parse_iso8601("2020-03-23");
    REQUIRE(date_only);
    CHECK(format_iso8601(*date_only) == "2020-03-23T00:00:00Z");

    CHECK_FALSE(parse_iso8601("23-03-2020"));
    CHECK_FALSE(parse_iso8601("2020-13-01"));
    CHECK_FALSE(parse_iso8601("2020-03-23T25:00:00Z"));
    CHECK_FALSE(parse_iso8601("2020-03-23Tjunk"));
}

TEST_CASE("rfc-2822 parsing handles day names and zones", "[unit][time]") {
    auto t = parse_rfc2822("Sun, 22 Mar 2020 22:00:52 +0000");
    REQUIRE(t);
    CHECK(format_iso8601(*t) == "2020-03-22T22:00:52Z");

    auto gmt = parse_rfc2822("Mon, 23 Mar 2020 00:06:09 GMT");
    REQUIRE(gmt);
    CHECK(format_iso8601(*gmt) == "2020-03-23T00:06:09Z");

    auto no_day = parse_rfc2822("22 Mar 2020 18:30:00 -0400");
    REQUIRE(no_day);
    CHECK(format_iso8601(*no_day) == "2020-03-22T22:30:00Z");

    CHECK_FALSE(parse_rfc2822("not a date"));
    CHECK_FALSE(parse_rfc2822("32 Mar 2020 00:00:00 GMT"));
}

TEST_CASE("http date formatting is rfc-1123", "[unit][time]") {
    auto t = parse_iso8601("2020-03-23T00:06:09Z");
    REQUIRE(t);
    CHECK(format_http_date(*t) == "Mon, 23 Mar 2020 00:06:09 GMT");
    CHECK(parse_rfc2822(format_http_date(*t)) == *t);
}

TEST_CASE("timestamps keep their original spelling", "[unit][time]") {
    auto ts = parse_timestamp("Sun, 22 Mar 2020 22:00:52 +0000");
    REQUIRE(ts);
    CHECK(ts->to_string() == "Sun, 22 Mar 2020 22:00:52 +0000");
    CHECK(ts->date() == Date{std::chrono::year{2020}, std::chrono::month{3}, std::chrono::day{22}});

    auto built = make_timestamp(2020, 3, 22, 22, 0, 52);
    CHECK(built.to_string() == "2020-03-22T22:00:52Z");
    CHECK(built.value == ts->value);
    CHECK(built != *ts); // equal instants, distinct spellings
}

TEST_CASE("parse_date accepts only YYYY-MM-DD", "[unit][time]") {
    auto d = parse_date("2020-03-23");
    REQUIRE(d);
    CHECK(format_date(*d) == "2020-03-23");
    CHECK(format_date(*d, '/') == "2020/03/23");
    CHECK_FALSE(parse_date("23-03-2020"));
    CHECK_FALSE(parse_date("2020-02-30"));
    CHECK_FALSE(parse_date("2020-3-23"));
}

TEST_CASE("parse_url decomposes components", "[unit][url]") {
    auto u = parse_url("https://user@www.example.com:8443/a/b?q=1#frag");
    REQUIRE(u);
    CHECK(u->scheme == "https");
    CHECK(u->userinfo == "user");
    CHECK(u->host == "www.example.com");
    CHECK(u->port == "8443");
    CHECK(u->path == "/a/b");
    CHECK(u->query == "q=1");
    CHECK(u->fragment == "frag");
    CHECK(u->to_string() == "https://user@www.example.com:8443/a/b?q=1#frag");

    CHECK(is_http_url("http://a.example/x"));
    CHECK_FALSE(is_http_url("ftp://a.example/x"));
    CHECK_FALSE(is_http_url("not a url"));
}

TEST_CASE("resolve_reference follows rfc-3986 section 5.4", "[unit][url]") {
    const std::string base = "http://a/b/c/d;p?q";
    CHECK(resolve_reference(base, "g") == "http://a/b/c/g");
    CHECK(resolve_reference(base, "./g") == "http://a/b/c/g");
    CHECK(resolve_reference(base, "g/") == "http://a/b/c/g/");
    CHECK(resolve_reference(base, "/g") == "http://a/g");
    CHECK(resolve_reference(base, "//g") == "http://g");
    CHECK(resolve_reference(base, "?y") == "http://a/b/c/d;p?y");
    CHECK(resolve_reference(base, "g?y") == "http://a/b/c/g?y");
    CHECK(resolve_reference(base, "#s") == "http://a/b/c/d;p?q#s");
    CHECK(resolve_reference(base, "") == "http://a/b/c/d;p?q");
    CHECK(resolve_reference(base, "..") == "http://a/b/");
    CHECK(resolve_reference(base, "../g") == "http://a/b/g");
    CHECK(resolve_reference(base, "../../g") == "http://a/g");
    CHECK(resolve_reference(base, "../../../g") == "http://a/g");
    CHECK(resolve_reference(base, "http://x/y") == "http://x/y");
}

TEST_CASE("normalize_url is idempotent", "[unit][url]") {
    CHECK(normalize_url("HTTP://WWW.Example.COM:80/a/../b#frag") == "http://www.example.com/b");
    CHECK(normalize_url("https://example.com:443/") == "https://example.com/");
    CHECK(normalize_url("https://example.com") == "https://example.com/");
    std::vector<std::string> samples = {
        "http://A.example/x/./y",
        "https://example.com:443/a/b/../c?q=1",
        "http://example.com:8080/p",
        "http://example.com/%7Euser",
    };
    for (const auto& s : samples) {
        auto once = normalize_url(s);
        CHECK(normalize_url(once) == once);
    }
}

TEST_CASE("registered_domain approximates eTLD+1", "[unit][url]") {
    CHECK(registered_domain("www.nytimes.com") == "nytimes.com");
    CHECK(registered_domain("nytimes.com") == "nytimes.com");
    CHECK(registered_domain("a.b.co.uk") == "b.co.uk");
    CHECK(registered_domain("localhost") == "localhost");
    CHECK(registered_domain_of_url("https://www.nytimes.com/2020/03/22/health/x.html") ==
          "nytimes.com");
}

TEST_CASE("url_origin and component encoding", "[unit][url]") {
    CHECK(url_origin("https://www.vox.com/rss/index.xml") == "https://www.vox.com");
    CHECK(url_origin("http://example.com:8080/x") == "http://example.com:8080");
    CHECK(url_encode_component("http://a.example/x?y=1") ==
          "http%3A%2F%2Fa.example%2Fx%3Fy%3D1");
    CHECK(url_encode_component("safe-._~chars") == "safe-._~chars");
}
