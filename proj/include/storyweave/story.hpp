#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyweave/entities.hpp"
#include "storyweave/error.hpp"
#include "storyweave/images.hpp"
#include "storyweave/memento.hpp"
#include "storyweave/model.hpp"
#include "storyweave/sumgram.hpp"
#include "storyweave/text.hpp"
#include "storyweave/time.hpp"
#include "storyweave/url.hpp"

namespace storyweave {

struct StoryElement {
    MementoRecord record;
    std::string title;
    std::string snippet; // first N code points of the article text
    std::string favicon;
    std::string domain;  // registered domain of the original URL
    std::optional<Timestamp> pubdate;
    std::vector<ScoredImage> images; // ranked, best first

    friend bool operator==(const StoryElement&, const StoryElement&) = default;
};

struct StoryMetrics {
    double avg_degree = 0;
    double density = 0;
    int unique_source_count = 0;
    int node_count = 0;
    std::string type; // "event" | "cluster"

    friend bool operator==(const StoryMetrics&, const StoryMetrics&) = default;
};

struct StoryDocument {
    std::string title;
    std::string date; // YYYY-MM-DD
    Timestamp generated_at;
    StoryMetrics metrics;
    std::optional<ScoredImage> striking_image;
    std::vector<RankedEntity> top_entities;
    std::vector<Sumgram> top_sumgrams;
    std::vector<StoryElement> elements; // publication order

    friend bool operator==(const StoryDocument&, const StoryDocument&) = default;
};

struct ElementInput {
    MementoRecord record;
    std::optional<Timestamp> pubdate;
    std::string title;
    std::string text;
    std::string favicon;
    std::vector<ScoredImage> images;
};

struct StoryLimits {
    size_t top_entities = 10;
    size_t top_sumgrams = 20;
    size_t snippet_chars = 200;
};

// Consolidates the analysis outputs. `ordered` must already be in
// publication order; the striking image is the global score maximum across
// all elements (ties: earlier element, then position, then src).
inline StoryDocument assemble_story(const ConnectedComponent& component, Date date,
                                    const std::vector<ElementInput>& ordered,
                                    const std::vector<RankedEntity>& entities,
                                    const std::vector<Sumgram>& sumgrams, UtcMicros now,
                                    const StoryLimits& limits = {}) {
    if (ordered.empty())
        throw Error(Errc::empty_story, "a story needs at least one element");

    StoryDocument story;
    story.date = format_date(date);
    story.title = "StoryGraph Biggest Story " + story.date;
    story.generated_at = make_timestamp(now);
    story.metrics.avg_degree = component.avg_degree;
    story.metrics.density = component.density;
    story.metrics.unique_source_count = component.unique_source_count;
    story.metrics.node_count = static_cast<int>(component.nodes.size());
    story.metrics.type = component.node_details.connected_comp_type.value_or("event");

    story.top_entities = entities;
    if (story.top_entities.size() > limits.top_entities)
        story.top_entities.resize(limits.top_entities);
    story.top_sumgrams = sumgrams;
    if (story.top_sumgrams.size() > limits.top_sumgrams)
        story.top_sumgrams.resize(limits.top_sumgrams);

    for (const auto& in : ordered) {
        StoryElement el;
        el.record = in.record;
        el.pubdate = in.pubdate;
        el.title = in.title;
        el.snippet = utf8_prefix(collapse_ws(in.text), limits.snippet_chars);
        el.favicon = in.favicon;
        el.domain = registered_domain_of_url(in.record.uri_r);
        el.images = in.images;
        story.elements.push_back(std::move(el));
    }

    for (size_t ei = 0; ei < story.elements.size(); ++ei) {
        for (const auto& img : story.elements[ei].images) {
            if (!story.striking_image || img.score > story.striking_image->score)
                story.striking_image = img;
        }
    }
    return story;
}

// ---------------------------------------------------------------------------
// Story JSON: hyphenated keys, deterministic order, explicit nulls.

namespace detail_story {

inline ojson image_to_json(const ScoredImage& img) {
    ojson j = ojson::object();
    j["src"] = img.src;
    j["is-meta"] = img.is_meta;
    j["width"] = img.width;
    j["height"] = img.height;
    j["pixel-count"] = img.pixel_count;
    j["color-count"] = img.color_count;
    j["position"] = img.position;
    j["score"] = img.score;
    return j;
}

inline ScoredImage image_from_json(const ojson& j) {
    ScoredImage img;
    img.src = j.at("src").get<std::string>();
    img.is_meta = j.at("is-meta").get<bool>();
    img.width = j.at("width").get<int>();
    img.height = j.at("height").get<int>();
    img.pixel_count = j.at("pixel-count").get<long>();
    img.color_count = j.at("color-count").get<int>();
    img.position = j.at("position").get<int>();
    img.score = j.at("score").get<double>();
    return img;
}

} // namespace detail_story

inline ojson story_to_json(const StoryDocument& story) {
    using namespace detail_story;
    ojson j = ojson::object();
    j["title"] = story.title;
    j["date"] = story.date;
    j["generated-at"] = story.generated_at.to_string();

    ojson metrics = ojson::object();
    metrics["avg-degree"] = detail_model::number_value(story.metrics.avg_degree);
    metrics["density"] = detail_model::number_value(story.metrics.density);
    metrics["node-count"] = story.metrics.node_count;
    metrics["unique-source-count"] = story.metrics.unique_source_count;
    metrics["type"] = story.metrics.type;
    j["metrics"] = std::move(metrics);

    j["striking-image"] = story.striking_image ? image_to_json(*story.striking_image)
                                               : ojson(nullptr);

    ojson ents = ojson::array();
    for (const auto& e : story.top_entities) {
        ojson je = ojson::object();
        je["entity"] = e.entity;
        je["class"] = e.cls;
        je["frequency"] = e.frequency;
        ents.push_back(std::move(je));
    }
    j["top-entities"] = std::move(ents);

    ojson grams = ojson::array();
    for (const auto& s : story.top_sumgrams) {
        ojson jg = ojson::object();
        jg["text"] = s.text();
        jg["phrase"] = s.phrase;
        jg["document-frequency"] = s.document_frequency;
        grams.push_back(std::move(jg));
    }
    j["top-sumgrams"] = std::move(grams);

    ojson elements = ojson::array();
    for (const auto& el : story.elements) {
        ojson je = ojson::object();
        je["uri-r"] = el.record.uri_r;
        je["uri-m"] = el.record.uri_m;
        je["archived"] = el.record.archived;
        je["archive-id"] = el.record.archive_id.empty() ? ojson(nullptr)
                                                        : ojson(el.record.archive_id);
        je["memento-datetime"] = el.record.memento_datetime
                                     ? ojson(el.record.memento_datetime->to_string())
                                     : ojson(nullptr);
        je["pubdate"] = el.pubdate ? ojson(el.pubdate->to_string()) : ojson(nullptr);
        je["title"] = el.title;
        je["snippet"] = el.snippet;
        je["favicon"] = el.favicon;
        je["domain"] = el.domain;
        je["image"] = el.images.empty() ? ojson(nullptr) : image_to_json(el.images.front());
        elements.push_back(std::move(je));
    }
    j["elements"] = std::move(elements);
    return j;
}

inline std::string serialize_story(const StoryDocument& story) {
    return story_to_json(story).dump(2) + "\n";
}

inline StoryDocument story_from_json(const ojson& j) {
    using namespace detail_story;
    try {
        StoryDocument story;
        story.title = j.at("title").get<std::string>();
        story.date = j.at("date").get<std::string>();
        auto gen = parse_timestamp(j.at("generated-at").get<std::string>());
        if (!gen) throw Error(Errc::schema_violation, "generated-at unparseable");
        story.generated_at = *gen;

        const ojson& metrics = j.at("metrics");
        story.metrics.avg_degree = metrics.at("avg-degree").get<double>();
        story.metrics.density = metrics.at("density").get<double>();
        story.metrics.node_count = metrics.at("node-count").get<int>();
        story.metrics.unique_source_count = metrics.at("unique-source-count").get<int>();
        story.metrics.type = metrics.at("type").get<std::string>();

        if (!j.at("striking-image").is_null())
            story.striking_image = image_from_json(j["striking-image"]);

        for (const auto& je : j.at("top-entities")) {
            RankedEntity e;
            e.entity = je.at("entity").get<std::string>();
            e.cls = je.at("class").get<std::string>();
            e.frequency = je.at("frequency").get<int>();
            story.top_entities.push_back(std::move(e));
        }
        for (const auto& jg : j.at("top-sumgrams")) {
            Sumgram s;
            s.phrase = jg.at("phrase").get<std::vector<std::string>>();
            s.document_frequency = jg.at("document-frequency").get<int>();
            story.top_sumgrams.push_back(std::move(s));
        }
        for (const auto& je : j.at("elements")) {
            StoryElement el;
            el.record.uri_r = je.at("uri-r").get<std::string>();
            el.record.uri_m = je.at("uri-m").get<std::string>();
            el.record.archived = je.at("archived").get<bool>();
            if (!je.at("archive-id").is_null())
                el.record.archive_id = je.at("archive-id").get<std::string>();
            if (!je.at("memento-datetime").is_null())
                el.record.memento_datetime =
                    parse_timestamp(je.at("memento-datetime").get<std::string>());
            if (!je.at("pubdate").is_null())
                el.pubdate = parse_timestamp(je.at("pubdate").get<std::string>());
            el.title = je.at("title").get<std::string>();
            el.snippet = je.at("snippet").get<std::string>();
            el.favicon = je.at("favicon").get<std::string>();
            el.domain = je.at("domain").get<std::string>();
            if (!je.at("image").is_null()) el.images.push_back(image_from_json(je["image"]));
            story.elements.push_back(std::move(el));
        }
        return story;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::schema_violation, std::string("story document: ") + e.what());
    }
}

inline StoryDocument parse_story(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::malformed_json, e.what());
    }
    return story_from_json(j);
}

} // namespace storyweave
