// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/reasoner.hpp"

#include <algorithm>
#include <cctype>

#include "capekg/errors.hpp"

namespace capekg {

namespace {

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Validates the decomposition contract shared by every construction path.
void validate_steps(const std::vector<std::string>& steps) {
    if (steps.empty()) throw DecompositionParseError("decomposition has no steps");
    for (const std::string& step : steps) {
        if (trim_view(step).empty()) throw DecompositionParseError("decomposition has a blank step");
    }
    if (steps.front().find(kPrevPlaceholder) != std::string::npos) {
        throw DecompositionParseError("placeholder {prev} is not allowed in step 1");
    }
}

}  // namespace

std::vector<std::string> parse_numbered_steps(const std::string& reply) {
    std::vector<std::string> steps;
    std::size_t start = 0;
    while (start <= reply.size()) {
        std::size_t end = reply.find('\n', start);
        std::string_view line(reply.data() + start,
                              (end == std::string::npos ? reply.size() : end) - start);
        line = trim_view(line);
        std::size_t digits = 0;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) {
            ++digits;
        }
        if (digits > 0 && digits < line.size() &&
            (line[digits] == '.' || line[digits] == ')' || line[digits] == ':')) {
            std::string_view body = trim_view(line.substr(digits + 1));
            if (!body.empty()) steps.emplace_back(body);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (steps.empty()) {
        throw DecompositionParseError("no numbered sub-questions in reply: " + reply.substr(0, 120));
    }
    return steps;
}

std::vector<std::size_t> rank_demos(std::span<const DemoExample> pool, const std::string& question,
                                    EmbedderOracle& embedder, std::size_t k) {
    std::vector<double> target = embedder.embed(question);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::vector<double> vec = embedder.embed(pool[i].question);
        scored.emplace_back(cosine(target, vec), i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) indices.push_back(scored[i].second);
    return indices;
}

std::string decomposition_prompt(const std::string& question, std::span<const DemoExample> demos) {
    std::string prompt =
        "Decompose the question into numbered single-hop sub-questions. "
        "Use {prev} to refer to the previous answer.\n\n";
    for (const DemoExample& demo : demos) {
        prompt += "Question: " + demo.question + "\nSub-questions:\n";
        for (std::size_t i = 0; i < demo.steps.size(); ++i) {
            prompt += std::to_string(i + 1) + ". " + demo.steps[i] + "\n";
        }
        prompt += "\n";
    }
    prompt += "Question: " + question + "\nSub-questions:\n";
    return prompt;
}

void Decomposer::script(std::string question, std::vector<std::string> steps) {
    validate_steps(steps);
    scripted_[std::move(question)] = std::move(steps);
}

Decomposition Decomposer::decompose(const std::string& question) const {
    auto scripted = scripted_.find(question);
    if (scripted != scripted_.end()) {
        return Decomposition{question, scripted->second};
    }
    if (llm_) {
        std::vector<DemoExample> demos;
        if (!pool_.empty()) {
            if (!embedder_) {
                throw OracleUnavailableError("demo ranking requires an embedder oracle");
            }
            for (std::size_t index : rank_demos(pool_, question, *embedder_, demo_count_)) {
                demos.push_back(pool_[index]);
            }
        }
        auto reply = llm_->complete(decomposition_prompt(question, demos));
        if (reply) {
            std::vector<std::string> steps = parse_numbered_steps(*reply);
            validate_steps(steps);
            return Decomposition{question, std::move(steps)};
        }
        // Script miss: degrade to the identity decomposition below.
    }
    return Decomposition{question, {question}};
}

std::string instantiate_step(std::string_view step_template, std::optional<std::string_view> prev) {
    std::string out;
    out.reserve(step_template.size());
    std::size_t i = 0;
    while (i < step_template.size()) {
        std::size_t hit = step_template.find(kPrevPlaceholder, i);
        if (hit == std::string_view::npos || !prev) {
            out.append(step_template.substr(i));
            break;
        }
        out.append(step_template.substr(i, hit - i));
        out.append(*prev);
        i = hit + kPrevPlaceholder.size();
    }
    return out;
}

CaseAnswer run_chain(const Decomposition& decomposition, const HopAnswerer& answer_hop) {
    CaseAnswer result;
    std::optional<Symbol> prev;
    for (std::size_t i = 0; i < decomposition.steps.size(); ++i) {
        SubQuestion question;
        question.position = static_cast<int>(i) + 1;
        question.text = instantiate_step(
            decomposition.steps[i],
            prev ? std::optional<std::string_view>(prev->text()) : std::nullopt);
        if (i > 0) question.subject_hint = prev;

        RetrievalOutcome outcome = answer_hop(question);
        HopTrace hop;
        hop.hop = question.position;
        hop.sub_question = question.text;
        hop.carried_entity = outcome.answer;
        hop.outcome = std::move(outcome);
        bool answered = hop.carried_entity.has_value();
        prev = hop.carried_entity;
        result.hops.push_back(std::move(hop));
        if (!answered) return result;  // first Unanswered aborts the chain
    }
    result.final_answer = prev;
    return result;
}

CaseAnswer run_chain(const Decomposition& decomposition, const LayeredView& view,
                     const ImpactSurface& surface, const Oracles& oracles,
                     const RetrievalConfig& config, SymbolTable& symbols) {
    return run_chain(decomposition, [&](const SubQuestion& question) {
        return answer_subquestion(question, view, surface, oracles, config, symbols);
    });
}

}  // namespace capekg
