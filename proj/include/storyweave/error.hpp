#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace storyweave {

// Machine-readable error codes. The CLI prints them as "ERROR <code>: <message>".
enum class Errc {
    malformed_json,
    schema_violation,
    invariant_violation,
    config_not_found,
    config_invalid,
    fetch_error,
    feed_parse_error,
    empty_extraction,
    store_error,
    date_out_of_range,
    service_unavailable,
    no_story,
    no_snapshot,
    link_header_malformed,
    aggregator_unavailable,
    unknown_archive,
    submission_failed,
    degenerate_component,
    empty_story,
    template_syntax,
    unknown_field,
    cache_locked,
    usage,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::malformed_json: return "MalformedJson";
        case Errc::schema_violation: return "SchemaViolation";
        case Errc::invariant_violation: return "InvariantViolation";
        case Errc::config_not_found: return "ConfigNotFound";
        case Errc::config_invalid: return "ConfigInvalid";
        case Errc::fetch_error: return "FetchError";
        case Errc::feed_parse_error: return "FeedParseError";
        case Errc::empty_extraction: return "EmptyExtraction";
        case Errc::store_error: return "StoreError";
        case Errc::date_out_of_range: return "DateOutOfRange";
        case Errc::service_unavailable: return "ServiceUnavailable";
        case Errc::no_story: return "NoStory";
        case Errc::no_snapshot: return "NoSnapshot";
        case Errc::link_header_malformed: return "LinkHeaderMalformed";
        case Errc::aggregator_unavailable: return "AggregatorUnavailable";
        case Errc::unknown_archive: return "UnknownArchive";
        case Errc::submission_failed: return "SubmissionFailed";
        case Errc::degenerate_component: return "DegenerateComponent";
        case Errc::empty_story: return "EmptyStory";
        case Errc::template_syntax: return "TemplateSyntaxError";
        case Errc::unknown_field: return "UnknownField";
        case Errc::cache_locked: return "CacheLocked";
        case Errc::usage: return "Usage";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code), message_(std::move(message)) {}

    Error(Errc code, std::string message, int status)
        : Error(code, std::move(message)) { status_ = status; }

    Errc code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }
    const char* code_name() const noexcept { return errc_name(code_); }
    // HTTP status associated with the failure, 0 when not applicable.
    int status() const noexcept { return status_; }

private:
    Errc code_;
    std::string message_;
    int status_ = 0;
};

} // namespace storyweave
