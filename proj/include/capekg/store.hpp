// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "capekg/edit_engine.hpp"
#include "capekg/graph.hpp"
#include "capekg/io.hpp"
#include "capekg/overlay.hpp"
#include "capekg/symbols.hpp"
#include "capekg/view.hpp"

namespace capekg {

// One knowledge world: a symbol table, a sealed base graph, the per-case
// overlays, and the edit engine wired across them. Non-copyable and
// non-movable so the engine's internal references stay valid.
class Store {
public:
    Store() : Store(std::span<const RawTriple>{}) {}
    explicit Store(std::span<const RawTriple> facts);

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    SymbolTable& symbols() { return symbols_; }
    const SymbolTable& symbols() const { return symbols_; }

    const BaseGraph& base() const { return base_; }

    OverlayRegistry& overlays() { return overlays_; }
    const OverlayRegistry& overlays() const { return overlays_; }

    EditEngine& engine() { return engine_; }
    const EditEngine& engine() const { return engine_; }

    // Base plus the case's overlay. Throws UnknownCaseError when the case
    // has no overlay.
    LayeredView view(const std::string& case_id) const;

    // Base with no overlay at all.
    LayeredView base_view() const { return LayeredView{&base_, nullptr}; }

    const ImpactSurface& surface(const std::string& case_id) const {
        return engine_.impact_surface(case_id);
    }

    // Facts dropped during construction because they repeated earlier rows.
    std::size_t duplicate_facts() const { return duplicates_; }

private:
    SymbolTable symbols_;
    std::size_t duplicates_ = 0;
    BaseGraph base_;
    OverlayRegistry overlays_;
    EditEngine engine_{symbols_, overlays_};
};

}  // namespace capekg
