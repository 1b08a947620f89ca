// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "capekg/edit.hpp"
#include "capekg/oracle.hpp"
#include "capekg/overlay.hpp"

namespace capekg {

// Deterministic conflict arbitration: per (subject, relation) key the edit
// with the highest seq wins. Pure function of the log; entries come back in
// first-appearance key order. Precondition: all edits share one case id.
std::vector<DeltaEntry> arbitrate(std::span<const Edit> case_log);

// Rebuilds the routing surface from an edit log; the overlay-held surface
// must always equal this.
ImpactSurface surface_from_log(std::string case_id, std::span<const Edit> case_log);

// Applies case-scoped edits and maintains per-case sequence counters and
// impact surfaces. Applications for different cases may run concurrently;
// a single case is single-writer.
class EditEngine {
public:
    EditEngine(SymbolTable& symbols, OverlayRegistry& overlays)
        : symbols_(&symbols), overlays_(&overlays) {}

    // Score floor below which detector extraction fails; mirrors retrieval tau.
    void set_extraction_floor(double tau) { extraction_floor_ = tau; }
    double extraction_floor() const { return extraction_floor_; }

    // Structured path: interns the components and assigns the next per-case
    // seq. Throws EmptySymbolError on blank components.
    Edit make_edit(const std::string& case_id, std::string_view subject, std::string_view relation,
                   std::optional<std::string_view> object_true, std::string_view object_new);

    // Detector path: the top-scoring extraction becomes the edit. Throws
    // ExtractionFailedError when there is no extraction at or above the floor.
    Edit extract_edit(const EditStatement& statement, DetectorOracle& detector);

    // Writes the edit into the overlay (atomic per edit: CaseMismatch leaves
    // both the overlay and the surface untouched) and grows the surface.
    void apply_edit(Overlay& overlay, const Edit& edit);

    // Surface for a registered case; empty sets when the case has no edits.
    // Throws UnknownCaseError for unregistered cases.
    const ImpactSurface& impact_surface(const std::string& case_id) const;

private:
    SymbolTable* symbols_;
    OverlayRegistry* overlays_;
    double extraction_floor_ = 0.6;

    mutable std::mutex mutex_;  // guards seq counters and the surface map
    std::unordered_map<std::string, std::uint64_t> next_seq_;
    mutable std::unordered_map<std::string, ImpactSurface> surfaces_;
};

}  // namespace capekg
