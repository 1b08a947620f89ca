// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "capekg/symbols.hpp"

namespace capekg {

// Scored entity guess; scores live in [0, 1].
struct Candidate {
    Symbol entity;
    double score = 0.0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ScoredRelation {
    Symbol relation;
    double score = 0.0;
};

// Pre-intern triple text from the extraction path of a detector.
struct ExtractedTriple {
    std::string subject;
    std::string relation;
    std::string object;
    double score = 0.0;
};

// One oracle request/response pair. request carries the serialized wire
// payload for live clients (empty for mocks).
struct TranscriptEntry {
    std::string role;  // detect_entities | detect_relation | extract_triple | complete | embed
    std::string prompt_or_query;
    std::string response;
    std::string request;
};

// Append-only audit log shared by every oracle in a session. Thread-safe.
class Transcript {
public:
    void append(TranscriptEntry entry);
    std::size_t size() const;
    std::vector<TranscriptEntry> entries() const;
    void clear();
    void write_jsonl(std::ostream& out) const;

private:
    mutable std::mutex mutex_;
    std::vector<TranscriptEntry> entries_;
};

// Entity/relation detector. Empty results mean "no guess" and are never a
// fault; routing treats missing guesses as non-membership.
class DetectorOracle {
public:
    virtual ~DetectorOracle() = default;

    virtual std::vector<Candidate> detect_entities(const std::string& query) = 0;
    virtual std::optional<ScoredRelation> detect_relation(const std::string& query) = 0;

    // Top-scoring (subject, relation, object) reading of an edit statement.
    virtual std::optional<ExtractedTriple> extract_triple(const std::string& text) = 0;
};

// Completion-style language model. nullopt is a script miss (mock has no
// matching pattern) and is treated as Unanswered upstream; transport failures
// throw OracleUnavailableError instead.
class LLMOracle {
public:
    virtual ~LLMOracle() = default;
    virtual std::optional<std::string> complete(const std::string& prompt) = 0;
};

class EmbedderOracle {
public:
    virtual ~EmbedderOracle() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
};

// Borrowed oracle handles threaded through retrieval and reasoning.
struct Oracles {
    DetectorOracle* detector = nullptr;
    LLMOracle* llm = nullptr;
    EmbedderOracle* embedder = nullptr;
};

// Cosine similarity; 0.0 when either vector is all zeros or sizes differ.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace capekg
