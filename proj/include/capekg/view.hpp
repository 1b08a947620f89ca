// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "capekg/graph.hpp"
#include "capekg/overlay.hpp"

namespace capekg {

enum class Layer { Base, Overlay };

std::string_view layer_name(Layer layer);

struct Resolution {
    Symbol object;
    Layer provenance;

    friend bool operator==(const Resolution&, const Resolution&) = default;
};

// A case's read surface: the shared immutable base plus exactly one overlay.
// overlay == nullptr reads as an empty overlay.
struct LayeredView {
    const BaseGraph* base = nullptr;
    const Overlay* overlay = nullptr;
};

// Overlay delta first, then the first base object in insertion order.
// NotFound is a value (nullopt), not a fault.
std::optional<Resolution> resolve(const LayeredView& view, Symbol subject, Symbol relation);

// All answers for the key: the overlay singleton [o*] when the key is edited,
// otherwise every base object in insertion order.
std::vector<Resolution> resolve_multi(const LayeredView& view, Symbol subject, Symbol relation);

// Resolution honoring a routing decision: Base routing consults the base
// only; Overlay routing consults the delta first with base fallback.
std::optional<Resolution> resolve_routed(const LayeredView& view, Layer routed, Symbol subject,
                                         Symbol relation);

}  // namespace capekg
