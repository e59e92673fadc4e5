#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "storyweave/memento.hpp"
#include "storyweave/time.hpp"

namespace storyweave {

struct DatedRecord {
    MementoRecord record;
    std::optional<Timestamp> pubdate;
    std::optional<Timestamp> feed_published;
    std::optional<Timestamp> meta_published;

    friend bool operator==(const DatedRecord&, const DatedRecord&) = default;
};

// Publication date priority: the feed said it, the page's meta tags said it,
// else fall back to when the archive captured it.
inline std::optional<Timestamp> extract_pubdate(const MementoRecord& record,
                                                const std::optional<Timestamp>& feed_published,
                                                const std::optional<Timestamp>& meta_published) {
    if (feed_published) return feed_published;
    if (meta_published) return meta_published;
    if (record.memento_datetime) return record.memento_datetime;
    return std::nullopt;
}

namespace detail_ordering {

inline bool dated_less(const DatedRecord& a, const DatedRecord& b) {
    if (a.pubdate.has_value() != b.pubdate.has_value()) return a.pubdate.has_value();
    if (a.pubdate && b.pubdate && a.pubdate->value != b.pubdate->value)
        return a.pubdate->value < b.pubdate->value;
    const auto& amd = a.record.memento_datetime;
    const auto& bmd = b.record.memento_datetime;
    if (amd.has_value() != bmd.has_value()) return amd.has_value();
    if (amd && bmd && amd->value != bmd->value) return amd->value < bmd->value;
    return a.record.uri_m < b.record.uri_m;
}

} // namespace detail_ordering

// Ascending by (pubdate, memento-datetime, uri_m); undated records sort after
// every dated one. Total, so the result is independent of input order.
inline std::vector<DatedRecord> order_mementos(std::vector<DatedRecord> records) {
    std::stable_sort(records.begin(), records.end(), detail_ordering::dated_less);
    return records;
}

} // namespace storyweave
