// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/view.hpp"

namespace capekg {

std::string_view layer_name(Layer layer) {
    return layer == Layer::Base ? "base" : "overlay";
}

namespace {

std::optional<Resolution> resolve_base(const LayeredView& view, Symbol subject, Symbol relation) {
    if (!view.base) return std::nullopt;
    auto objects = view.base->objects(subject, relation);
    if (objects.empty()) return std::nullopt;
    return Resolution{objects.front(), Layer::Base};
}

}  // namespace

std::optional<Resolution> resolve(const LayeredView& view, Symbol subject, Symbol relation) {
    if (view.overlay) {
        if (auto hit = view.overlay->lookup(subject, relation)) {
            return Resolution{*hit, Layer::Overlay};
        }
    }
    return resolve_base(view, subject, relation);
}

std::vector<Resolution> resolve_multi(const LayeredView& view, Symbol subject, Symbol relation) {
    if (view.overlay) {
        if (auto hit = view.overlay->lookup(subject, relation)) {
            return {Resolution{*hit, Layer::Overlay}};
        }
    }
    std::vector<Resolution> out;
    if (view.base) {
        for (Symbol object : view.base->objects(subject, relation)) {
            out.push_back({object, Layer::Base});
        }
    }
    return out;
}

std::optional<Resolution> resolve_routed(const LayeredView& view, Layer routed, Symbol subject,
                                         Symbol relation) {
    if (routed == Layer::Base) return resolve_base(view, subject, relation);
    return resolve(view, subject, relation);
}

}  // namespace capekg
