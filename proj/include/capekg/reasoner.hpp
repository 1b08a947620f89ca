// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "capekg/retrieval.hpp"

namespace capekg {

// Placeholder a step template uses to reference the previous hop's answer.
inline constexpr std::string_view kPrevPlaceholder = "{prev}";

struct DemoExample {
    std::string question;
    std::vector<std::string> steps;
};

// Ordered single-hop templates for one question. The placeholder may appear
// only in steps >= 2.
struct Decomposition {
    std::string question;
    std::vector<std::string> steps;
};

// Extracts "1. ..." / "2) ..." lines from an LLM reply. Throws
// DecompositionParseError when no numbered line exists.
std::vector<std::string> parse_numbered_steps(const std::string& reply);

// Demo indices ranked by cosine similarity between embedded questions,
// best first, stable ties, truncated to k.
std::vector<std::size_t> rank_demos(std::span<const DemoExample> pool, const std::string& question,
                                    EmbedderOracle& embedder, std::size_t k);

std::string decomposition_prompt(const std::string& question, std::span<const DemoExample> demos);

// Question -> steps. Scripted entries win; otherwise the LLM decomposes with
// cosine-ranked few-shot demos (zero-shot on an empty pool). An LLM script
// miss degrades to the identity single-step decomposition; an unparseable
// reply or a placeholder in step 1 raises DecompositionParseError.
class Decomposer {
public:
    Decomposer() = default;

    void set_demo_pool(std::vector<DemoExample> pool) { pool_ = std::move(pool); }
    void set_demo_count(std::size_t k) { demo_count_ = k; }
    void set_oracles(EmbedderOracle* embedder, LLMOracle* llm) {
        embedder_ = embedder;
        llm_ = llm;
    }
    void script(std::string question, std::vector<std::string> steps);

    Decomposition decompose(const std::string& question) const;

private:
    std::vector<DemoExample> pool_;
    std::size_t demo_count_ = 4;
    EmbedderOracle* embedder_ = nullptr;
    LLMOracle* llm_ = nullptr;
    std::unordered_map<std::string, std::vector<std::string>> scripted_;
};

// Replaces every occurrence of the placeholder with the previous answer.
std::string instantiate_step(std::string_view step_template, std::optional<std::string_view> prev);

// One executed hop. carried_entity repeats the outcome answer and seeds the
// next hop's subject.
struct HopTrace {
    int hop = 0;  // 1-based
    std::string sub_question;
    RetrievalOutcome outcome;
    std::optional<Symbol> carried_entity;
};

struct CaseAnswer {
    std::optional<Symbol> final_answer;
    std::vector<HopTrace> hops;
};

// Pluggable per-hop answerer so evaluation ablations can swap retrieval out.
using HopAnswerer = std::function<RetrievalOutcome(const SubQuestion&)>;

// Runs the decomposition hop by hop, feeding each answer into the next
// step's placeholder. The first Unanswered hop aborts the chain (it is still
// recorded); the final answer is the last hop's entity.
CaseAnswer run_chain(const Decomposition& decomposition, const HopAnswerer& answer_hop);

// Convenience wrapper over answer_subquestion for a fixed view and surface.
CaseAnswer run_chain(const Decomposition& decomposition, const LayeredView& view,
                     const ImpactSurface& surface, const Oracles& oracles,
                     const RetrievalConfig& config, SymbolTable& symbols);

}  // namespace capekg
