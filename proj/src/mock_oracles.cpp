// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/mock_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "capekg/errors.hpp"

namespace capekg {

namespace {

std::vector<std::string> token_set(std::string_view text) {
    std::vector<std::string> tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

std::string candidates_brief(const std::vector<Candidate>& candidates) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Candidate& c : candidates) {
        arr.push_back({{"entity", std::string(c.entity.text())}, {"score", c.score}});
    }
    return arr.dump();
}

void log(Transcript* transcript, std::string role, const std::string& input,
         std::string response) {
    if (!transcript) return;
    transcript->append({std::move(role), input, std::move(response), {}});
}

}  // namespace

// ---------------------------------------------------------------------------
// LexiconDetector

double LexiconDetector::jaccard(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t intersection = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++intersection;
            ++ia;
            ++ib;
        }
    }
    std::size_t unions = a.size() + b.size() - intersection;
    return unions == 0 ? 0.0 : static_cast<double>(intersection) / static_cast<double>(unions);
}

void LexiconDetector::add(std::vector<LexiconEntry>& side, Symbol symbol) {
    for (const LexiconEntry& entry : side) {
        if (entry.symbol == symbol) return;  // lexicon entries are unique
    }
    side.push_back({symbol, token_set(symbol.text())});
}

void LexiconDetector::add_entity(Symbol entity) { add(entities_, entity); }
void LexiconDetector::add_entity(std::string_view text) { add(entities_, symbols_->intern(text)); }
void LexiconDetector::add_relation(Symbol relation) { add(relations_, relation); }
void LexiconDetector::add_relation(std::string_view text) {
    add(relations_, symbols_->intern(text));
}

std::vector<Candidate> LexiconDetector::score_entities(const std::string& query) const {
    std::vector<std::string> query_tokens = token_set(query);
    std::vector<Candidate> out;
    for (const LexiconEntry& entry : entities_) {
        double score = jaccard(query_tokens, entry.token_set);
        if (score > 0.0) out.push_back({entry.symbol, score});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    return out;
}

std::optional<ScoredRelation> LexiconDetector::score_relation(const std::string& query) const {
    std::vector<std::string> query_tokens = token_set(query);
    std::optional<ScoredRelation> best;
    for (const LexiconEntry& entry : relations_) {
        double score = jaccard(query_tokens, entry.token_set);
        if (score > 0.0 && (!best || score > best->score)) {
            best = ScoredRelation{entry.symbol, score};
        }
    }
    return best;
}

std::vector<Candidate> LexiconDetector::detect_entities(const std::string& query) {
    auto out = score_entities(query);
    log(transcript_, "detect_entities", query, candidates_brief(out));
    return out;
}

std::optional<ScoredRelation> LexiconDetector::detect_relation(const std::string& query) {
    auto best = score_relation(query);
    log(transcript_, "detect_relation", query,
        best ? std::string(best->relation.text()) : std::string());
    return best;
}

std::optional<ExtractedTriple> LexiconDetector::extract_triple(const std::string& text) {
    std::string folded = casefold(text);
    struct Located {
        Symbol symbol;
        double score;
        std::size_t position;
    };
    std::vector<Located> located;
    for (const Candidate& c : score_entities(text)) {
        std::size_t pos = folded.find(casefold(c.entity.text()));
        if (pos != std::string::npos) located.push_back({c.entity, c.score, pos});
    }
    std::optional<ExtractedTriple> result;
    auto relation = score_relation(text);
    if (located.size() >= 2 && relation) {
        // Earliest mention is the subject; the latest distinct mention after
        // it is the object. score_entities() order breaks position ties by
        // score.
        const Located* subject = &located.front();
        for (const Located& l : located) {
            if (l.position < subject->position) subject = &l;
        }
        const Located* object = nullptr;
        for (const Located& l : located) {
            if (l.symbol == subject->symbol || l.position <= subject->position) continue;
            if (!object || l.position > object->position) object = &l;
        }
        if (object) {
            result = ExtractedTriple{
                std::string(subject->symbol.text()),
                std::string(relation->relation.text()),
                std::string(object->symbol.text()),
                std::min({subject->score, object->score, relation->score}),
            };
        }
    }
    log(transcript_, "extract_triple", text,
        result ? "(" + result->subject + ", " + result->relation + ", " + result->object + ")"
               : std::string());
    return result;
}

// ---------------------------------------------------------------------------
// ScriptedDetector

void ScriptedDetector::script(std::string query, Entry entry) {
    entries_[std::move(query)] = std::move(entry);
}

const ScriptedDetector::Entry* ScriptedDetector::lookup(const std::string& query) const {
    auto it = entries_.find(query);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<Candidate> ScriptedDetector::detect_entities(const std::string& query) {
    std::vector<Candidate> out;
    if (const Entry* entry = lookup(query)) {
        for (const auto& [text, score] : entry->entities) {
            out.push_back({symbols_->intern(text), score});
        }
    } else if (fallback_) {
        out = fallback_->detect_entities(query);
    }
    log(transcript_, "detect_entities", query, candidates_brief(out));
    return out;
}

std::optional<ScoredRelation> ScriptedDetector::detect_relation(const std::string& query) {
    std::optional<ScoredRelation> out;
    if (const Entry* entry = lookup(query)) {
        if (entry->relation) {
            out = ScoredRelation{symbols_->intern(entry->relation->first), entry->relation->second};
        }
    } else if (fallback_) {
        out = fallback_->detect_relation(query);
    }
    log(transcript_, "detect_relation", query,
        out ? std::string(out->relation.text()) : std::string());
    return out;
}

std::optional<ExtractedTriple> ScriptedDetector::extract_triple(const std::string& text) {
    std::optional<ExtractedTriple> out;
    if (const Entry* entry = lookup(text)) {
        out = entry->triple;
    } else if (fallback_) {
        out = fallback_->extract_triple(text);
    }
    log(transcript_, "extract_triple", text,
        out ? "(" + out->subject + ", " + out->relation + ", " + out->object + ")" : std::string());
    return out;
}

// ---------------------------------------------------------------------------
// ScriptedLlm

void ScriptedLlm::script(std::string pattern, std::string response) {
    scripts_.emplace_back(std::move(pattern), std::move(response));
}

std::optional<std::string> ScriptedLlm::complete(const std::string& prompt) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& entry : scripts_) {
        if (prompt.find(entry.first) == std::string::npos) continue;
        if (!best || entry.first.size() > best->first.size()) best = &entry;
    }
    std::optional<std::string> out;
    if (best) out = best->second;
    log(transcript_, "complete", prompt, out ? *out : std::string());
    return out;
}

// ---------------------------------------------------------------------------
// HashedBowEmbedder

std::vector<double> HashedBowEmbedder::embed(const std::string& text) {
    std::vector<double> vec(dimensions_, 0.0);
    for (const std::string& token : tokenize(text)) {
        vec[fnv1a64(token) % dimensions_] += 1.0;
    }
    double norm_sq = 0.0;
    for (double v : vec) norm_sq += v * v;
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : vec) v *= inv;
    }
    log(transcript_, "embed", text, std::to_string(dimensions_) + "d");
    return vec;
}

// ---------------------------------------------------------------------------
// MockFixtures

MockFixtures MockFixtures::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fixtures file: " + path.string());

    MockFixtures fixtures;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("fixtures: ") + e.what(), line_number);
        }
        std::string kind = row.value("kind", "");
        if (kind.empty() && row.contains("match")) kind = "llm";
        if (kind == "llm") {
            if (!row.contains("match") || !row.contains("response")) {
                throw ParseError("llm fixture needs match and response", line_number);
            }
            fixtures.llm_entries.emplace_back(row["match"].get<std::string>(),
                                              row["response"].get<std::string>());
        } else if (kind == "detector") {
            if (!row.contains("query")) throw ParseError("detector fixture needs query", line_number);
            ScriptedDetector::Entry entry;
            for (const auto& ent : row.value("entities", nlohmann::json::array())) {
                entry.entities.emplace_back(ent.at("text").get<std::string>(),
                                            ent.at("score").get<double>());
            }
            if (row.contains("relation") && !row["relation"].is_null()) {
                entry.relation = {row["relation"].at("text").get<std::string>(),
                                  row["relation"].at("score").get<double>()};
            }
            if (row.contains("triple") && !row["triple"].is_null()) {
                const auto& t = row["triple"];
                entry.triple = ExtractedTriple{
                    t.at("s").get<std::string>(), t.at("r").get<std::string>(),
                    t.at("o").get<std::string>(), t.value("score", 1.0)};
            }
            fixtures.detector_entries.emplace_back(row["query"].get<std::string>(),
                                                   std::move(entry));
        } else if (kind == "decomposition") {
            if (!row.contains("question") || !row.contains("steps")) {
                throw ParseError("decomposition fixture needs question and steps", line_number);
            }
            std::vector<std::string> steps;
            for (const auto& s : row["steps"]) steps.push_back(s.get<std::string>());
            fixtures.decompositions.emplace_back(row["question"].get<std::string>(),
                                                 std::move(steps));
        } else {
            throw ParseError("unknown fixture kind: '" + kind + "'", line_number);
        }
    }
    return fixtures;
}

}  // namespace capekg
