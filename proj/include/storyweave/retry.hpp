#pragma once

#include <chrono>
#include <functional>
#include <thread>

#include "storyweave/http.hpp"

namespace storyweave {

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    std::function<void(std::chrono::milliseconds)> sleeper =
        [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

inline bool transient_failure(const HttpResponse& res) {
    return res.transport_failed() || res.status == 429 || res.status >= 500;
}

// Retries transport failures, 429 and 5xx with exponential backoff; returns
// the last response either way.
inline HttpResponse send_with_retry(HttpClient& http, const HttpRequest& req,
                                    const RetryPolicy& policy = {}) {
    HttpResponse res;
    auto backoff = policy.initial_backoff;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        res = http.send(req);
        if (!transient_failure(res)) return res;
        if (attempt < policy.max_attempts) {
            policy.sleeper(backoff);
            backoff *= 2;
        }
    }
    return res;
}

} // namespace storyweave
