// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "capekg/io.hpp"
#include "capekg/reasoner.hpp"
#include "capekg/retrieval.hpp"
#include "capekg/store.hpp"

namespace capekg {

// One requested rewrite (s, r, o -> o*) of a dataset case.
struct RewriteSpec {
    std::string subject;
    std::string relation;
    std::optional<std::string> target_true;
    std::string target_new;
};

// One multi-hop editing case. gold_new_chain is the post-edit chain the
// reasoner should walk; orig_chain is the pre-edit chain used for base
// synthesis. Invariants enforced at ingestion: >=1 rewrite, >=1 question,
// chain continuity s_{i+1} = o_i.
struct CaseRecord {
    std::string case_id;
    std::vector<RewriteSpec> rewrites;
    std::vector<std::string> questions;
    std::string new_answer;
    std::vector<std::string> aliases;
    std::vector<RawTriple> gold_new_chain;
    std::vector<RawTriple> orig_chain;
};

// Contiguous batch size; k == 0 means the whole dataset in one batch.
struct BatchSetting {
    std::size_t k = 0;

    std::string name() const { return k == 0 ? "all" : std::to_string(k); }
};

struct AblationFlags {
    bool disable_construction = false;  // merge facts and edits into one flat graph per batch
    bool disable_retrieval = false;     // decompose, then answer each hop with a direct LLM call
    bool disable_update = false;        // all batch edits share one overlay (no case isolation)

    bool any() const { return disable_construction || disable_retrieval || disable_update; }
    friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

nlohmann::ordered_json flags_json(const AblationFlags& flags);

// Parses a dataset document (JSON array of case objects). Unknown extra
// fields are ignored; violations raise SchemaError with the case index.
std::vector<CaseRecord> ingest_dataset(const nlohmann::ordered_json& doc);

// File variant: SchemaError for an unreadable file, ParseError for malformed
// JSON, then ingest.
std::vector<CaseRecord> load_dataset(const std::string& path);

// Base-graph synthesis: every case's original chain, plus post-edit chain
// hops not produced by that case's own rewrites, plus external facts last.
// Duplicates are tolerated (the graph builder deduplicates).
std::vector<RawTriple> evaluation_facts(std::span<const CaseRecord> cases,
                                        std::span<const RawTriple> extra_facts);

struct Score {
    bool m_hit = false;
    bool h_hit = false;
};

// m_hit: final answer equals new_answer or an alias under fold-key equality.
// h_hit: hop count equals the gold chain length and every carried entity
// matches the gold object in order.
Score score_case(const CaseAnswer& answer, const CaseRecord& record);

// Fully assembled oracle bundle for one knowledge world. The decomposer is
// wired against the bundle's own llm/embedder by the factory.
struct OracleSet {
    std::unique_ptr<DetectorOracle> detector;
    std::unique_ptr<LLMOracle> llm;
    std::unique_ptr<EmbedderOracle> embedder;
    Decomposer decomposer;

    Oracles oracles() const { return Oracles{detector.get(), llm.get(), embedder.get()}; }
};

// Builds the oracle bundle for a world. Called once per evaluation store —
// again for each per-batch store when construction is ablated — so detector
// candidates always intern into the store they are resolved against.
using OracleFactory = std::function<OracleSet(Store&)>;

struct EvalContext {
    RetrievalConfig retrieval;
    BatchSetting batch;
    AblationFlags flags;
    unsigned jobs = 0;  // 0 = hardware concurrency
    std::optional<std::uint64_t> shuffle_seed;
    std::vector<RawTriple> extra_facts;
};

// Per-case result. Trace JSON is rendered eagerly because ablation worlds
// (and their symbol tables) do not outlive their batch.
struct CaseOutcome {
    std::string case_id;
    bool evaluated = false;
    bool m_hit = false;
    bool h_hit = false;
    int paraphrase_index = -1;  // 0-based question index of the match hit
    std::string question;       // paraphrase the scores came from
    std::string answer;          // final answer text; empty when unanswered
    std::string error;           // per-case engine error, if any
    std::vector<nlohmann::ordered_json> runs;  // one rendered chain per paraphrase tried
};

struct MetricsReport {
    double m_acc = 0.0;
    double h_acc = 0.0;
    std::string setting;
    AblationFlags flags;
    std::size_t n_cases = 0;
    std::size_t m_hits = 0;
    std::size_t h_hits = 0;
    bool complete = true;
    std::string error;  // set when complete is false
    std::vector<CaseOutcome> per_case;

    nlohmann::ordered_json to_json() const;
};

// Batched evaluation. Edits of a batch are all applied before any of its
// cases run; cases inside a batch evaluate concurrently with per-case result
// slots kept in dataset order. Oracle-backend failures abort the run and
// come back as an incomplete report rather than an exception.
MetricsReport run_eval(std::span<const CaseRecord> cases, const EvalContext& ctx,
                       const OracleFactory& factory);

// One JSONL row per case, dataset order.
void write_traces_jsonl(std::ostream& out, const MetricsReport& report);

// {"per_setting": {name: report-json}} for multi-setting comparisons.
nlohmann::ordered_json settings_breakdown(std::span<const MetricsReport> reports);

}  // namespace capekg
