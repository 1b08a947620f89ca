// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capekg/edit.hpp"
#include "capekg/oracle.hpp"
#include "capekg/view.hpp"

namespace capekg {

// One hop of a decomposed question. subject_hint carries the previous hop's
// answer and, when present, overrides the detector's subject guess for
// routing. position is the 1-based hop index.
struct SubQuestion {
    std::string text;
    std::optional<Symbol> subject_hint;
    int position = 1;
};

struct RetrievalConfig {
    double tau = 0.6;                // high-confidence threshold
    double lambda = 1.0;             // sigma multiplier in the mean cutoff
    double suppression_alpha = 0.5;  // down-weight for unreferenced edited entities
};

enum class Stage { HighConfidence, LowConfidence, Failure };

std::string_view stage_name(Stage stage);

// Result of answering one sub-question. layer is the routed layer of the
// edit-aware dispatch, independent of where the object was finally found.
// answer == nullopt is Unanswered.
struct RetrievalOutcome {
    std::optional<Symbol> answer;
    Layer layer = Layer::Base;
    Stage stage = Stage::Failure;
    std::optional<Triple> resolved_triple;
    std::vector<Candidate> candidates_considered;  // post-suppression pool
};

// Edit-aware routing: Overlay iff the subject guess is in S or the relation
// guess is in P; missing guesses count as non-membership.
Layer route_from_guesses(std::optional<Symbol> subject, std::optional<Symbol> relation,
                         const ImpactSurface& surface);

// Same decision with the detector supplying the guesses (the subject hint,
// when present, wins over detection).
Layer route(const SubQuestion& question, const ImpactSurface& surface, DetectorOracle& detector);

// Subject guess for routing: the hint if present, else the top-scoring
// candidate (ties keep input order).
std::optional<Symbol> subject_guess(const SubQuestion& question,
                                    std::span<const Candidate> candidates);

// Multiplies by alpha the score of every candidate that is an edited subject
// of this case yet does not occur (case-insensitively) in the sub-question
// text. Runs before the confidence filter and never raises a score.
std::vector<Candidate> suppress_irrelevant(std::vector<Candidate> candidates,
                                           const SubQuestion& question,
                                           const ImpactSurface& surface,
                                           const RetrievalConfig& config);

// Arithmetic trace of one filter evaluation, exposed for exactness tests.
struct FilterDebug {
    std::vector<Candidate> above_threshold;  // K'
    double mean = 0.0;
    double stddev = 0.0;  // population sigma over K'
    double cutoff = 0.0;  // mean - lambda * stddev
};

// Progressive high-confidence filter: K' = {score >= tau}; survivors are
// {score >= mean(K') - lambda * sigma(K')} sorted by descending score with
// stable ties. Empty K' yields an empty result.
std::vector<Candidate> filter_high_confidence(const std::vector<Candidate>& candidates,
                                              const RetrievalConfig& config,
                                              FilterDebug* debug = nullptr);

// Literal "(subject, relation, object)" form injected into failure prompts
// and asserted by the intent-consistency audit.
std::string format_edit_triple(const DeltaEntry& entry);

std::string low_confidence_prompt(const SubQuestion& question, std::span<const Candidate> pool);
std::string failure_prompt(const SubQuestion& question, std::span<const DeltaEntry> injected);

// Three-stage progressive retrieval for one sub-question:
//   1. HighConfidence — walk the filtered candidates, first resolution wins.
//   2. LowConfidence  — only when K' is empty: the LLM picks from the
//      original (pre-suppression) pool, then resolution proceeds.
//   3. Failure        — no resolution anywhere; the LLM answers directly,
//      with every overlay triple matching the subject/relation guess injected
//      into the prompt when the question falls inside the edit scope.
// The symbol table interns free-text LLM answers so they flow through the
// chain like any other entity.
RetrievalOutcome answer_subquestion(const SubQuestion& question, const LayeredView& view,
                                    const ImpactSurface& surface, const Oracles& oracles,
                                    const RetrievalConfig& config, SymbolTable& symbols);

}  // namespace capekg
