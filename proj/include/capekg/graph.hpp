// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "capekg/symbols.hpp"

namespace capekg {

struct Triple {
    Symbol subject;
    Symbol relation;
    Symbol object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = t.subject.id();
        h = h * 0x9E3779B97F4A7C15ull + t.relation.id();
        h = h * 0x9E3779B97F4A7C15ull + t.object.id();
        return static_cast<std::size_t>(h);
    }
};

// Packed (subject, relation) key shared by the base index and overlay deltas.
inline std::uint64_t sp_key(Symbol subject, Symbol relation) {
    return (static_cast<std::uint64_t>(subject.id()) << 32) | relation.id();
}

// Immutable factual layer. Only BaseGraphBuilder can construct one; after
// sealing there is no mutating interface at all, so "zero base writes" holds
// by construction. Triples keep first-insertion order and are deduplicated.
class BaseGraph {
public:
    // All objects for (subject, relation), in insertion order. Empty span if
    // the key is absent.
    std::span<const Symbol> objects(Symbol subject, Symbol relation) const {
        auto it = sp_index_.find(sp_key(subject, relation));
        if (it == sp_index_.end()) return {};
        return it->second;
    }

    // Outgoing (relation, object) pairs of a subject, in insertion order.
    std::span<const std::pair<Symbol, Symbol>> outgoing(Symbol subject) const {
        auto it = subject_index_.find(subject.id());
        if (it == subject_index_.end()) return {};
        return it->second;
    }

    bool contains(const Triple& t) const { return triple_set_.count(t) != 0; }

    const std::vector<Triple>& triples() const { return triples_; }
    std::size_t size() const { return triples_.size(); }
    std::size_t entity_count() const { return entity_count_; }
    std::size_t relation_count() const { return relation_count_; }

    // Content hash over the canonical triple stream; constant for a sealed
    // graph, used by tests as a write guard.
    std::uint64_t fingerprint() const { return fingerprint_; }

    // Rebuilds both indices from the triple list and compares. Diagnostic.
    bool check_indices() const;

    // Coarse allocation estimate, used to check that overlays never copy the
    // base.
    std::size_t approx_bytes() const;

private:
    friend class BaseGraphBuilder;
    BaseGraph() = default;

    std::vector<Triple> triples_;
    std::unordered_map<std::uint64_t, std::vector<Symbol>> sp_index_;
    std::unordered_map<std::uint32_t, std::vector<std::pair<Symbol, Symbol>>> subject_index_;
    std::unordered_set<Triple, TripleHash> triple_set_;
    std::size_t entity_count_ = 0;
    std::size_t relation_count_ = 0;
    std::uint64_t fingerprint_ = 0;
};

// Accumulates facts and seals them into a BaseGraph. A builder is single-use:
// seal() invalidates it.
class BaseGraphBuilder {
public:
    explicit BaseGraphBuilder(SymbolTable& symbols) : symbols_(&symbols) {}

    // Interns the three texts and adds the triple. Returns false (and counts
    // a duplicate) if the triple is already present. Throws EmptySymbolError
    // for blank components.
    bool add(std::string_view subject, std::string_view relation, std::string_view object);
    bool add(const Triple& t);

    std::size_t added() const { return graph_.triples_.size(); }
    std::size_t duplicates() const { return duplicates_; }

    BaseGraph seal() &&;

private:
    SymbolTable* symbols_;
    BaseGraph graph_;
    std::size_t duplicates_ = 0;
    bool sealed_ = false;
};

}  // namespace capekg
