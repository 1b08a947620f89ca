// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>

#include "capekg/symbols.hpp"

namespace capekg {

// One counterfactual assertion scoped to a case. object_true is advisory
// provenance only — it never gates application. seq is assigned by the edit
// engine and is strictly increasing within a case; the highest seq wins
// arbitration for a (subject, relation) key.
struct Edit {
    std::string case_id;
    Symbol subject;
    Symbol relation;
    std::optional<Symbol> object_true;
    Symbol object_new;
    std::uint64_t seq = 0;

    friend bool operator==(const Edit&, const Edit&) = default;
};

// Natural-language edit awaiting detector extraction.
struct EditStatement {
    std::string case_id;
    std::string raw_text;
};

// Routing-relevant footprint of a case's edits: the subject set S and the
// relation set P. Always derivable by replaying the overlay's edit log.
struct ImpactSurface {
    std::string case_id;
    std::unordered_set<Symbol> subjects;
    std::unordered_set<Symbol> relations;

    bool covers_subject(Symbol s) const { return subjects.count(s) != 0; }
    bool covers_relation(Symbol r) const { return relations.count(r) != 0; }
    bool empty() const { return subjects.empty() && relations.empty(); }
};

}  // namespace capekg
