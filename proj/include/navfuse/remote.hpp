#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "navfuse/backend.hpp"
#include "navfuse/promptfmt.hpp"

namespace navfuse {

inline constexpr const char* kLlmUrlEnvVar = "NAVFUSE_LLM_URL";

struct RemoteConfig {
    std::string url;
    double timeout_s = 30.0;
    int max_retries = 2;
    std::size_t variant = 0;  // prompt template variant
};

struct RemoteResult {
    ActionDistribution dist;
    bool used_fallback = false;
    std::string note;  // why the fallback fired, when it did
};

namespace detail {

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
    std::string path;              // e.g. "/complete"
};

inline ParsedUrl parse_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw Error("remote: url must start with http:// : " + url);
    const std::size_t path_at = url.find('/', scheme + 3);
    ParsedUrl p;
    if (path_at == std::string::npos) {
        p.scheme_host_port = url;
        p.path = "/";
    } else {
        p.scheme_host_port = url.substr(0, path_at);
        p.path = url.substr(path_at);
    }
    return p;
}

}  // namespace detail

// POSTs {"prompt": ...} to the endpoint and parses the {"text": ...} reply
// through the distribution grammar. Parse failures and timeouts retry up to
// max_retries; on exhaustion the suggested p_sota is returned as a declared
// fallback. Transport failures after retries and HTTP errors are thrown.
inline RemoteResult remote_act(const RemoteConfig& config, GoalCategory goal,
                               const Observation& obs, const std::string& history_summary,
                               const ActionDistribution& p_sota,
                               const std::vector<std::string>& templates = default_templates()) {
    const std::string prompt =
        render_prompt(goal, obs, history_summary, p_sota, config.variant, templates);
    nlohmann::json body;
    body["prompt"] = prompt;
    const std::string payload = body.dump();

    const detail::ParsedUrl url = detail::parse_url(config.url);
    httplib::Client client(url.scheme_host_port);
    const auto secs = static_cast<time_t>(config.timeout_s);
    const auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);

    std::string last_note;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        httplib::Result res = client.Post(url.path, payload, "application/json");
        if (!res) {
            last_note = "transport failure: " + httplib::to_string(res.error());
            continue;  // retry; thrown below if retries exhaust
        }
        if (res->status >= 400) {
            std::string excerpt = res->body.substr(0, 200);
            throw Error("remote: HTTP " + std::to_string(res->status) + " from " + config.url +
                        ": " + excerpt);
        }
        std::string text;
        try {
            text = nlohmann::json::parse(res->body).at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            last_note = std::string("bad reply json: ") + e.what();
            continue;
        }
        try {
            return RemoteResult{parse_distribution(text), false, ""};
        } catch (const ParseError& e) {
            last_note = std::string("reply did not parse: ") + e.what();
            continue;
        }
    }
    if (last_note.rfind("transport failure", 0) == 0)
        throw Error("remote: " + last_note + " after " + std::to_string(config.max_retries + 1) +
                    " attempts against " + config.url);
    return RemoteResult{p_sota, true, last_note};
}

// Remote policy over the frozen history policy: p_sota comes from the local
// recurrent policy, the action distribution from the endpoint.
class RemoteBackend : public PolicyBackend {
public:
    RemoteBackend(RemoteConfig config, PolicyParams frozen,
                  std::vector<std::string> templates = default_templates())
        : config_(std::move(config)), frozen_(std::move(frozen)),
          templates_(std::move(templates)) {}

    void reset(const Episode&) override {
        state_ = initial_state(frozen_);
        t_ = 0;
        fallbacks_ = 0;
    }

    ActionDistribution act(const Observation& obs) override {
        if (state_.empty()) throw Error("RemoteBackend: act before reset");
        auto [p_sota, next] = forward_step(frozen_, state_, obs);
        state_ = std::move(next);
        std::ostringstream hist;
        hist << "step " << t_ << ", last action "
             << (obs.prev_action.has_value()
                     ? kActionPhrases[static_cast<std::size_t>(*obs.prev_action)]
                     : std::string_view("none"))
             << (obs.collided_last ? ", collided" : "");
        RemoteResult res = remote_act(config_, obs.goal, obs, hist.str(), p_sota, templates_);
        fallbacks_ += res.used_fallback ? 1 : 0;
        ++t_;
        return res.dist;
    }

    int fallback_count() const override { return fallbacks_; }

private:
    RemoteConfig config_;
    PolicyParams frozen_;
    std::vector<std::string> templates_;
    RecurrentState state_;
    int t_ = 0;
    int fallbacks_ = 0;
};

}  // namespace navfuse
