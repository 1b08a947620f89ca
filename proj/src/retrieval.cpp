// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "capekg/errors.hpp"

namespace capekg {

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::HighConfidence: return "high_confidence";
        case Stage::LowConfidence: return "low_confidence";
        default: return "failure";
    }
}

Layer route_from_guesses(std::optional<Symbol> subject, std::optional<Symbol> relation,
                         const ImpactSurface& surface) {
    bool in_scope = (subject && surface.covers_subject(*subject)) ||
                    (relation && surface.covers_relation(*relation));
    return in_scope ? Layer::Overlay : Layer::Base;
}

std::optional<Symbol> subject_guess(const SubQuestion& question,
                                    std::span<const Candidate> candidates) {
    if (question.subject_hint) return question.subject_hint;
    const Candidate* best = nullptr;
    for (const Candidate& c : candidates) {
        if (!best || c.score > best->score) best = &c;  // strict > keeps first on ties
    }
    if (!best) return std::nullopt;
    return best->entity;
}

Layer route(const SubQuestion& question, const ImpactSurface& surface, DetectorOracle& detector) {
    std::optional<Symbol> subject;
    if (question.subject_hint) {
        subject = question.subject_hint;
    } else {
        auto candidates = detector.detect_entities(question.text);
        subject = subject_guess(question, candidates);
    }
    auto relation = detector.detect_relation(question.text);
    return route_from_guesses(subject,
                              relation ? std::optional(relation->relation) : std::nullopt, surface);
}

std::vector<Candidate> suppress_irrelevant(std::vector<Candidate> candidates,
                                           const SubQuestion& question,
                                           const ImpactSurface& surface,
                                           const RetrievalConfig& config) {
    if (surface.subjects.empty()) return candidates;
    std::string question_fold = fold_key(question.text);
    double alpha = std::min(config.suppression_alpha, 1.0);  // demotion only, never a boost
    for (Candidate& c : candidates) {
        if (!surface.covers_subject(c.entity)) continue;
        if (question_fold.find(casefold(c.entity.text())) == std::string::npos) {
            c.score *= alpha;
        }
    }
    return candidates;
}

std::vector<Candidate> filter_high_confidence(const std::vector<Candidate>& candidates,
                                              const RetrievalConfig& config, FilterDebug* debug) {
    std::vector<Candidate> above;
    for (const Candidate& c : candidates) {
        if (c.score >= config.tau) above.push_back(c);
    }
    if (debug) {
        *debug = FilterDebug{};
        debug->above_threshold = above;
    }
    if (above.empty()) return {};

    double mean = 0.0;
    for (const Candidate& c : above) mean += c.score;
    mean /= static_cast<double>(above.size());
    double variance = 0.0;
    for (const Candidate& c : above) {
        double d = c.score - mean;
        variance += d * d;
    }
    variance /= static_cast<double>(above.size());  // population variance
    double stddev = std::sqrt(variance);
    double cutoff = mean - config.lambda * stddev;
    if (debug) {
        debug->mean = mean;
        debug->stddev = stddev;
        debug->cutoff = cutoff;
    }

    std::vector<Candidate> kept;
    for (const Candidate& c : above) {
        if (c.score >= cutoff) kept.push_back(c);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    return kept;
}

std::string format_edit_triple(const DeltaEntry& entry) {
    std::string out = "(";
    out += entry.subject.text();
    out += ", ";
    out += entry.relation.text();
    out += ", ";
    out += entry.object_new.text();
    out += ")";
    return out;
}

std::string low_confidence_prompt(const SubQuestion& question, std::span<const Candidate> pool) {
    std::string prompt = "Select the most plausible entity for the question from the candidates.\n";
    prompt += "Question: " + question.text + "\n";
    prompt += "Candidates: ";
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i) prompt += ", ";
        prompt += pool[i].entity.text();
    }
    prompt += "\nAnswer with the entity name only.";
    return prompt;
}

std::string failure_prompt(const SubQuestion& question, std::span<const DeltaEntry> injected) {
    std::string prompt;
    if (!injected.empty()) {
        prompt += "Updated facts:\n";
        for (const DeltaEntry& entry : injected) {
            prompt += format_edit_triple(entry);
            prompt += "\n";
        }
    }
    prompt += "Answer the question.\nQuestion: " + question.text +
              "\nAnswer with the entity name only.";
    return prompt;
}

namespace {

LLMOracle& require_llm(const Oracles& oracles, const char* stage) {
    if (!oracles.llm) {
        throw OracleUnavailableError(std::string(stage) + " stage requires an LLM oracle");
    }
    return *oracles.llm;
}

// Maps an LLM reply back onto the candidate pool: exact fold equality first,
// then fold containment of the candidate text in the reply.
std::optional<Symbol> match_candidate(std::span<const Candidate> pool, const std::string& reply) {
    std::string reply_fold = fold_key(reply);
    if (reply_fold.empty()) return std::nullopt;
    for (const Candidate& c : pool) {
        if (casefold(c.entity.text()) == reply_fold) return c.entity;
    }
    for (const Candidate& c : pool) {
        if (reply_fold.find(casefold(c.entity.text())) != std::string::npos) return c.entity;
    }
    return std::nullopt;
}

// Failure stage. Injects every overlay delta entry matching the subject or
// relation guess whenever the question falls inside the edit scope, so the
// model answers with the edit intent in context.
RetrievalOutcome failure_stage(RetrievalOutcome out, const SubQuestion& question,
                               const LayeredView& view, const ImpactSurface& surface,
                               const Oracles& oracles, std::optional<Symbol> subject,
                               std::optional<Symbol> relation, SymbolTable& symbols) {
    out.stage = Stage::Failure;
    std::vector<DeltaEntry> injected;
    bool subject_in_scope = subject && surface.covers_subject(*subject);
    bool relation_in_scope = relation && surface.covers_relation(*relation);
    if (view.overlay && (subject_in_scope || relation_in_scope)) {
        for (const DeltaEntry& entry : view.overlay->entries()) {
            bool matches = (subject && entry.subject == *subject) ||
                           (relation && entry.relation == *relation);
            if (matches) injected.push_back(entry);
        }
    }

    auto reply = require_llm(oracles, "failure").complete(failure_prompt(question, injected));
    if (reply) {
        std::string normalized = normalize(*reply);
        if (!normalized.empty()) {
            Symbol answer = symbols.intern(normalized);
            out.answer = answer;
            for (const DeltaEntry& entry : injected) {
                if (casefold(entry.object_new.text()) == casefold(answer.text())) {
                    out.resolved_triple = Triple{entry.subject, entry.relation, entry.object_new};
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace

RetrievalOutcome answer_subquestion(const SubQuestion& question, const LayeredView& view,
                                    const ImpactSurface& surface, const Oracles& oracles,
                                    const RetrievalConfig& config, SymbolTable& symbols) {
    if (!oracles.detector) throw OracleUnavailableError("retrieval requires a detector oracle");
    DetectorOracle& detector = *oracles.detector;

    std::vector<Candidate> pool = detector.detect_entities(question.text);  // K
    auto relation = detector.detect_relation(question.text);
    std::optional<Symbol> relation_sym =
        relation ? std::optional(relation->relation) : std::nullopt;
    std::optional<Symbol> subject = subject_guess(question, pool);

    RetrievalOutcome out;
    out.layer = route_from_guesses(subject, relation_sym, surface);

    std::vector<Candidate> suppressed = suppress_irrelevant(pool, question, surface, config);
    out.candidates_considered = suppressed;
    std::vector<Candidate> surviving = filter_high_confidence(suppressed, config);

    // High confidence: first surviving candidate that resolves wins.
    if (!surviving.empty()) {
        if (relation) {
            for (const Candidate& candidate : surviving) {
                if (auto res =
                        resolve_routed(view, out.layer, candidate.entity, relation->relation)) {
                    out.stage = Stage::HighConfidence;
                    out.answer = res->object;
                    out.resolved_triple = Triple{candidate.entity, relation->relation, res->object};
                    return out;
                }
            }
        }
        // K' was non-empty, so the low-confidence stage is skipped by
        // definition; fall through to failure.
        return failure_stage(std::move(out), question, view, surface, oracles, subject,
                             relation_sym, symbols);
    }

    // Low confidence: K' is empty; the LLM picks from the original pool.
    if (!pool.empty()) {
        auto reply = require_llm(oracles, "low-confidence")
                         .complete(low_confidence_prompt(question, pool));
        if (reply) {
            if (auto picked = match_candidate(pool, *reply)) {
                if (relation) {
                    if (auto res = resolve_routed(view, out.layer, *picked, relation->relation)) {
                        out.stage = Stage::LowConfidence;
                        out.answer = res->object;
                        out.resolved_triple = Triple{*picked, relation->relation, res->object};
                        return out;
                    }
                }
            }
        }
    }

    return failure_stage(std::move(out), question, view, surface, oracles, subject, relation_sym,
                         symbols);
}

}  // namespace capekg
