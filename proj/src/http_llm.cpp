// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/http_llm.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "capekg/errors.hpp"

namespace capekg {

namespace {

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : std::string();
}

// Splits scheme://host[:port][/prefix] into origin and path prefix and
// appends /v1 unless the prefix already ends with it.
void split_url(const std::string& base_url, std::string& origin, std::string& path) {
    std::size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw OracleUnavailableError("malformed base URL: " + base_url);
    }
    std::size_t path_start = base_url.find('/', scheme_end + 3);
    std::string prefix;
    if (path_start == std::string::npos) {
        origin = base_url;
    } else {
        origin = base_url.substr(0, path_start);
        prefix = base_url.substr(path_start);
    }
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    if (prefix.size() < 3 || prefix.compare(prefix.size() - 3, 3, "/v1") != 0) {
        prefix += "/v1";
    }
    path = prefix + "/chat/completions";
}

}  // namespace

struct HttpLlmClient::Slot {
    HttpLlmClient* client;

    explicit Slot(HttpLlmClient* c) : client(c) {
        std::unique_lock lock(client->mutex_);
        client->slot_free_.wait(lock,
                                [&] { return client->in_flight_ < client->config_.max_in_flight; });
        ++client->in_flight_;
    }

    ~Slot() {
        {
            std::scoped_lock lock(client->mutex_);
            --client->in_flight_;
        }
        client->slot_free_.notify_one();
    }
};

HttpLlmClient::HttpLlmClient(HttpLlmConfig config, Transcript* transcript)
    : config_(std::move(config)), transcript_(transcript) {
    if (config_.max_in_flight < 1) config_.max_in_flight = 1;
    split_url(config_.base_url, origin_, path_);
}

std::optional<HttpLlmConfig> HttpLlmClient::config_from_env() {
    HttpLlmConfig config;
    config.base_url = env_or_empty("CAPEKG_LLM_BASE_URL");
    if (config.base_url.empty()) return std::nullopt;
    config.model = env_or_empty("CAPEKG_LLM_MODEL");
    config.api_key = env_or_empty("CAPEKG_LLM_API_KEY");
    return config;
}

std::optional<std::string> HttpLlmClient::complete(const std::string& prompt) {
    Slot slot(this);

    nlohmann::ordered_json body{
        {"model", config_.model},
        {"messages", nlohmann::ordered_json::array(
                         {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
    };
    std::string payload = body.dump();

    // httplib clients are not thread-safe; one client per request keeps the
    // bounded-concurrency path simple.
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    httplib::Result result = client.Post(path_, headers, payload, "application/json");
    if (!result) {
        throw OracleUnavailableError("llm transport failure: " + httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
        throw OracleUnavailableError("llm http status " + std::to_string(result->status) + ": " +
                                     result->body.substr(0, 256));
    }

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw OracleUnavailableError(std::string("llm reply is not JSON: ") + e.what());
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
        throw OracleUnavailableError("llm reply has no choices");
    }
    const auto& message = reply["choices"][0];
    if (!message.contains("message") || !message["message"].contains("content") ||
        !message["message"]["content"].is_string()) {
        throw OracleUnavailableError("llm reply has no message content");
    }
    std::string content = message["message"]["content"].get<std::string>();

    if (transcript_) transcript_->append({"complete", prompt, content, payload});
    return content;
}

}  // namespace capekg
