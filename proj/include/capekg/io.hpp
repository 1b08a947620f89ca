// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "capekg/graph.hpp"
#include "capekg/overlay.hpp"
#include "capekg/reasoner.hpp"
#include "capekg/retrieval.hpp"

namespace capekg {

// Untyped fact row as it appears on disk, before interning.
struct RawTriple {
    std::string s;
    std::string r;
    std::string o;
};

// One edit row. Either the structured fields are set or `text` is set; rows
// never mix the two forms.
struct RawEdit {
    std::string case_id;
    std::string subject;
    std::string relation;
    std::optional<std::string> object_true;
    std::string object_new;
    std::string text;

    bool is_text() const { return !text.empty(); }
};

// Parses every non-blank line of a JSONL file. Returned pairs carry the
// 1-based line number for error reporting. Throws ParseError on unreadable
// files or malformed JSON.
std::vector<std::pair<std::size_t, nlohmann::ordered_json>> read_jsonl(const std::string& path);

// {"s","r","o"} rows. Missing or non-string fields raise ParseError.
std::vector<RawTriple> load_facts_jsonl(const std::string& path);

// Structured rows {"case_id","s","r","o_true","o_new"} (o_true optional) or
// free-text rows {"case_id","text"}.
std::vector<RawEdit> load_edits_jsonl(const std::string& path);

// {"question","steps"} rows for few-shot decomposition demos.
std::vector<DemoExample> load_demo_pool(const std::string& path);

// Canonical {"s","r","o"} dump in graph insertion order, one row per line.
void save_facts_jsonl(std::ostream& out, const BaseGraph& graph);

// {"case_id","s","r","o_new"} rows in first-write key order.
void save_overlay_dump(std::ostream& out, const Overlay& overlay);

// Every overlay in creation order.
void save_overlay_dump(std::ostream& out, const OverlayRegistry& registry);

nlohmann::ordered_json triple_json(const Triple& triple);  // ["s","r","o"]
nlohmann::ordered_json outcome_json(const RetrievalOutcome& outcome);
nlohmann::ordered_json hop_json(const HopTrace& hop);
nlohmann::ordered_json case_answer_json(const CaseAnswer& answer);

}  // namespace capekg
