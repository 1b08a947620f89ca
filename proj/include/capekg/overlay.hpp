// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "capekg/edit.hpp"
#include "capekg/errors.hpp"
#include "capekg/graph.hpp"

namespace capekg {

// Current value of one overlaid (subject, relation) key.
struct DeltaEntry {
    Symbol subject;
    Symbol relation;
    Symbol object_new;

    friend bool operator==(const DeltaEntry&, const DeltaEntry&) = default;
};

// Copy-on-write edit layer for a single case. Holds only the delta map and
// the append-only edit log — never base triples — so an empty overlay costs
// O(1) regardless of base size. Writes are single-threaded per case; reads
// may be concurrent once writes stop.
class Overlay {
public:
    explicit Overlay(std::string case_id) : case_id_(std::move(case_id)) {}

    const std::string& case_id() const { return case_id_; }

    // Records the edit: delta[(subject, relation)] = object_new, log append.
    // Throws CaseMismatchError when the edit belongs to another case; the
    // overlay is untouched in that event.
    void apply(const Edit& edit);

    std::optional<Symbol> lookup(Symbol subject, Symbol relation) const {
        auto it = delta_.find(sp_key(subject, relation));
        if (it == delta_.end()) return std::nullopt;
        return it->second;
    }

    bool empty() const { return delta_.empty(); }
    std::size_t delta_size() const { return delta_.size(); }

    // Delta snapshot in first-write key order with current values.
    std::vector<DeltaEntry> entries() const;

    const std::vector<Edit>& log() const { return log_; }

    std::size_t approx_bytes() const;

private:
    std::string case_id_;
    std::unordered_map<std::uint64_t, Symbol> delta_;
    std::vector<std::pair<Symbol, Symbol>> key_order_;  // first-write order
    std::vector<Edit> log_;
};

// Session-scoped overlay set keyed by case id. Writes require external
// synchronization; distinct overlays may then be edited concurrently.
class OverlayRegistry {
public:
    // Throws DuplicateCaseError if the case already has an overlay.
    Overlay& create(const std::string& case_id);

    // Existing overlay or DuplicateCase-free creation.
    Overlay& ensure(const std::string& case_id);

    // Throws UnknownCaseError when absent.
    Overlay& get(const std::string& case_id);
    const Overlay& get(const std::string& case_id) const;

    Overlay* find(const std::string& case_id);
    const Overlay* find(const std::string& case_id) const;

    bool contains(const std::string& case_id) const { return by_case_.count(case_id) != 0; }
    std::size_t size() const { return order_.size(); }

    // Creation order, for deterministic dumps.
    std::span<const Overlay* const> in_creation_order() const { return order_; }

private:
    std::unordered_map<std::string, std::unique_ptr<Overlay>> by_case_;
    std::vector<const Overlay*> order_;
};

}  // namespace capekg
