// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "capekg/oracle.hpp"

namespace capekg {

// Deterministic detector stand-in: scores every lexicon entry by token-level
// Jaccard overlap with the query and keeps nonzero scores, best first (ties
// stay in lexicon insertion order). No randomness anywhere.
class LexiconDetector final : public DetectorOracle {
public:
    explicit LexiconDetector(SymbolTable& symbols, Transcript* transcript = nullptr)
        : symbols_(&symbols), transcript_(transcript) {}

    void add_entity(Symbol entity);
    void add_entity(std::string_view text);
    void add_relation(Symbol relation);
    void add_relation(std::string_view text);

    std::vector<Candidate> detect_entities(const std::string& query) override;
    std::optional<ScoredRelation> detect_relation(const std::string& query) override;

    // Lexicon reading of an edit statement: subject = earliest entity
    // occurrence in the text, object = latest distinct occurrence after it,
    // relation = best lexicon relation; score = min of the three.
    std::optional<ExtractedTriple> extract_triple(const std::string& text) override;

    static double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

private:
    struct LexiconEntry {
        Symbol symbol;
        std::vector<std::string> token_set;  // sorted unique tokens
    };

    std::vector<Candidate> score_entities(const std::string& query) const;
    std::optional<ScoredRelation> score_relation(const std::string& query) const;
    void add(std::vector<LexiconEntry>& side, Symbol symbol);

    SymbolTable* symbols_;
    Transcript* transcript_;
    std::vector<LexiconEntry> entities_;
    std::vector<LexiconEntry> relations_;
};

// Fixture-driven detector keyed by exact query text. Misses defer to the
// optional fallback detector (constructed without a transcript so one logical
// call logs once) or come back empty.
class ScriptedDetector final : public DetectorOracle {
public:
    struct Entry {
        std::vector<std::pair<std::string, double>> entities;
        std::optional<std::pair<std::string, double>> relation;
        std::optional<ExtractedTriple> triple;
    };

    ScriptedDetector(SymbolTable& symbols, Transcript* transcript = nullptr,
                     std::unique_ptr<DetectorOracle> fallback = nullptr)
        : symbols_(&symbols), transcript_(transcript), fallback_(std::move(fallback)) {}

    void script(std::string query, Entry entry);

    std::vector<Candidate> detect_entities(const std::string& query) override;
    std::optional<ScoredRelation> detect_relation(const std::string& query) override;
    std::optional<ExtractedTriple> extract_triple(const std::string& text) override;

private:
    const Entry* lookup(const std::string& query) const;

    SymbolTable* symbols_;
    Transcript* transcript_;
    std::unique_ptr<DetectorOracle> fallback_;
    std::unordered_map<std::string, Entry> entries_;
};

// Pattern-keyed completion mock: the longest registered pattern occurring as
// a substring of the prompt wins; ties go to the earliest registration; no
// match is a script miss (nullopt).
class ScriptedLlm final : public LLMOracle {
public:
    explicit ScriptedLlm(Transcript* transcript = nullptr) : transcript_(transcript) {}

    void script(std::string pattern, std::string response);
    std::size_t script_size() const { return scripts_.size(); }

    std::optional<std::string> complete(const std::string& prompt) override;

private:
    Transcript* transcript_;
    std::vector<std::pair<std::string, std::string>> scripts_;
};

// L2-normalized bag-of-words term frequencies over a fixed hashed vocabulary.
class HashedBowEmbedder final : public EmbedderOracle {
public:
    explicit HashedBowEmbedder(std::size_t dimensions = 512, Transcript* transcript = nullptr)
        : dimensions_(dimensions), transcript_(transcript) {}

    std::vector<double> embed(const std::string& text) override;

private:
    std::size_t dimensions_;
    Transcript* transcript_;
};

// Parsed --mock-fixtures file: JSONL rows tagged by "kind" ("detector",
// "llm", "decomposition"); bare {"match","response"} rows count as llm.
struct MockFixtures {
    std::vector<std::pair<std::string, ScriptedDetector::Entry>> detector_entries;
    std::vector<std::pair<std::string, std::string>> llm_entries;
    std::vector<std::pair<std::string, std::vector<std::string>>> decompositions;

    bool has_detector() const { return !detector_entries.empty(); }
    bool has_llm() const { return !llm_entries.empty(); }

    static MockFixtures load(const std::filesystem::path& path);  // ParseError
};

}  // namespace capekg
