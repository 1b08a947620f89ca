// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <condition_variable>
#include <mutex>
#include <optional>
#include <string>

#include "capekg/oracle.hpp"

namespace capekg {

struct HttpLlmConfig {
    std::string base_url;  // scheme://host[:port][/prefix]; /v1 appended if absent
    std::string model;
    std::string api_key;        // sent as a bearer token when non-empty
    double temperature = 0.0;   // decoding is pinned to temperature zero
    int max_in_flight = 4;      // concurrent request cap
    int timeout_seconds = 120;
};

// Chat-completion client for OpenAI-compatible endpoints. Posts
// {model, messages, temperature} and returns choices[0].message.content.
// Transport, HTTP, and shape failures throw OracleUnavailableError. Every
// successful call is appended to the transcript with the serialized request
// payload so the temperature-zero contract stays auditable.
class HttpLlmClient final : public LLMOracle {
public:
    explicit HttpLlmClient(HttpLlmConfig config, Transcript* transcript = nullptr);

    // Reads CAPEKG_LLM_BASE_URL, CAPEKG_LLM_MODEL and CAPEKG_LLM_API_KEY;
    // nullopt when the base URL is unset or empty (mock mode).
    static std::optional<HttpLlmConfig> config_from_env();

    std::optional<std::string> complete(const std::string& prompt) override;

private:
    struct Slot;  // RAII in-flight permit

    HttpLlmConfig config_;
    Transcript* transcript_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;    // request path including /v1 prefix

    std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

}  // namespace capekg
