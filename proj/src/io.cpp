// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/io.hpp"

#include <fstream>
#include <ostream>

#include "capekg/errors.hpp"

namespace capekg {

namespace {

using nlohmann::ordered_json;

bool is_blank(const std::string& line) {
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

std::string require_string(const ordered_json& row, const char* key, std::size_t line) {
    auto it = row.find(key);
    if (it == row.end() || !it->is_string()) {
        throw ParseError(std::string("missing or non-string field \"") + key + "\"", line);
    }
    return it->get<std::string>();
}

}  // namespace

std::vector<std::pair<std::size_t, ordered_json>> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);

    std::vector<std::pair<std::size_t, ordered_json>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        try {
            rows.emplace_back(lineno, ordered_json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return rows;
}

std::vector<RawTriple> load_facts_jsonl(const std::string& path) {
    std::vector<RawTriple> facts;
    for (const auto& [lineno, row] : read_jsonl(path)) {
        if (!row.is_object()) throw ParseError("fact row is not a JSON object", lineno);
        facts.push_back(RawTriple{require_string(row, "s", lineno), require_string(row, "r", lineno),
                                  require_string(row, "o", lineno)});
    }
    return facts;
}

std::vector<RawEdit> load_edits_jsonl(const std::string& path) {
    std::vector<RawEdit> edits;
    for (const auto& [lineno, row] : read_jsonl(path)) {
        if (!row.is_object()) throw ParseError("edit row is not a JSON object", lineno);
        RawEdit edit;
        edit.case_id = require_string(row, "case_id", lineno);
        if (row.contains("text")) {
            if (row.contains("s") || row.contains("r") || row.contains("o_new")) {
                throw ParseError("edit row mixes free-text and structured fields", lineno);
            }
            edit.text = require_string(row, "text", lineno);
            if (edit.text.empty()) throw ParseError("edit text is empty", lineno);
        } else {
            edit.subject = require_string(row, "s", lineno);
            edit.relation = require_string(row, "r", lineno);
            edit.object_new = require_string(row, "o_new", lineno);
            if (row.contains("o_true")) edit.object_true = require_string(row, "o_true", lineno);
        }
        edits.push_back(std::move(edit));
    }
    return edits;
}

std::vector<DemoExample> load_demo_pool(const std::string& path) {
    std::vector<DemoExample> pool;
    for (const auto& [lineno, row] : read_jsonl(path)) {
        if (!row.is_object()) throw ParseError("demo row is not a JSON object", lineno);
        DemoExample demo;
        demo.question = require_string(row, "question", lineno);
        auto steps = row.find("steps");
        if (steps == row.end() || !steps->is_array() || steps->empty()) {
            throw ParseError("missing or empty \"steps\" array", lineno);
        }
        for (const auto& step : *steps) {
            if (!step.is_string()) throw ParseError("non-string entry in \"steps\"", lineno);
            demo.steps.push_back(step.get<std::string>());
        }
        pool.push_back(std::move(demo));
    }
    return pool;
}

void save_facts_jsonl(std::ostream& out, const BaseGraph& graph) {
    for (const Triple& t : graph.triples()) {
        ordered_json row{{"s", t.subject.text()}, {"r", t.relation.text()}, {"o", t.object.text()}};
        out << row.dump() << '\n';
    }
}

void save_overlay_dump(std::ostream& out, const Overlay& overlay) {
    for (const DeltaEntry& entry : overlay.entries()) {
        ordered_json row{{"case_id", overlay.case_id()},
                         {"s", entry.subject.text()},
                         {"r", entry.relation.text()},
                         {"o_new", entry.object_new.text()}};
        out << row.dump() << '\n';
    }
}

void save_overlay_dump(std::ostream& out, const OverlayRegistry& registry) {
    for (const Overlay* overlay : registry.in_creation_order()) {
        save_overlay_dump(out, *overlay);
    }
}

ordered_json triple_json(const Triple& triple) {
    return ordered_json::array(
        {triple.subject.text(), triple.relation.text(), triple.object.text()});
}

ordered_json outcome_json(const RetrievalOutcome& outcome) {
    ordered_json row;
    row["answer"] = outcome.answer ? ordered_json(outcome.answer->text()) : ordered_json(nullptr);
    row["layer"] = layer_name(outcome.layer);
    row["stage"] = stage_name(outcome.stage);
    row["resolved_triple"] =
        outcome.resolved_triple ? triple_json(*outcome.resolved_triple) : ordered_json(nullptr);
    ordered_json pool = ordered_json::array();
    for (const Candidate& c : outcome.candidates_considered) {
        pool.push_back(ordered_json{{"entity", c.entity.text()}, {"score", c.score}});
    }
    row["candidates"] = std::move(pool);
    return row;
}

ordered_json hop_json(const HopTrace& hop) {
    ordered_json row;
    row["hop"] = hop.hop;
    row["sub_question"] = hop.sub_question;
    row["outcome"] = outcome_json(hop.outcome);
    return row;
}

ordered_json case_answer_json(const CaseAnswer& answer) {
    ordered_json row;
    row["final_answer"] =
        answer.final_answer ? ordered_json(answer.final_answer->text()) : ordered_json(nullptr);
    ordered_json hops = ordered_json::array();
    for (const HopTrace& hop : answer.hops) hops.push_back(hop_json(hop));
    row["hops"] = std::move(hops);
    return row;
}

}  // namespace capekg
