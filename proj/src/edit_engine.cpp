// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/edit_engine.hpp"

namespace capekg {

std::vector<DeltaEntry> arbitrate(std::span<const Edit> case_log) {
    struct Winner {
        Symbol object_new;
        std::uint64_t seq;
        std::size_t slot;
    };
    std::unordered_map<std::uint64_t, Winner> winners;
    std::vector<std::pair<Symbol, Symbol>> key_order;
    for (const Edit& e : case_log) {
        std::uint64_t key = sp_key(e.subject, e.relation);
        auto it = winners.find(key);
        if (it == winners.end()) {
            winners.emplace(key, Winner{e.object_new, e.seq, key_order.size()});
            key_order.emplace_back(e.subject, e.relation);
        } else if (e.seq >= it->second.seq) {
            it->second.object_new = e.object_new;
            it->second.seq = e.seq;
        }
    }
    std::vector<DeltaEntry> out;
    out.reserve(key_order.size());
    for (const auto& [subject, relation] : key_order) {
        out.push_back({subject, relation, winners.at(sp_key(subject, relation)).object_new});
    }
    return out;
}

ImpactSurface surface_from_log(std::string case_id, std::span<const Edit> case_log) {
    ImpactSurface surface;
    surface.case_id = std::move(case_id);
    for (const Edit& e : case_log) {
        surface.subjects.insert(e.subject);
        surface.relations.insert(e.relation);
    }
    return surface;
}

Edit EditEngine::make_edit(const std::string& case_id, std::string_view subject,
                           std::string_view relation, std::optional<std::string_view> object_true,
                           std::string_view object_new) {
    Edit edit;
    edit.case_id = case_id;
    edit.subject = symbols_->intern(subject);
    edit.relation = symbols_->intern(relation);
    if (object_true) edit.object_true = symbols_->intern(*object_true);
    edit.object_new = symbols_->intern(object_new);
    {
        std::scoped_lock lock(mutex_);
        edit.seq = ++next_seq_[case_id];
    }
    return edit;
}

Edit EditEngine::extract_edit(const EditStatement& statement, DetectorOracle& detector) {
    auto extracted = detector.extract_triple(statement.raw_text);
    if (!extracted) {
        throw ExtractionFailedError("no triple extracted from statement: " + statement.raw_text);
    }
    if (extracted->score < extraction_floor_) {
        throw ExtractionFailedError("extraction score " + std::to_string(extracted->score) +
                                    " below floor " + std::to_string(extraction_floor_));
    }
    return make_edit(statement.case_id, extracted->subject, extracted->relation, std::nullopt,
                     extracted->object);
}

void EditEngine::apply_edit(Overlay& overlay, const Edit& edit) {
    overlay.apply(edit);  // throws CaseMismatchError before any state change
    std::scoped_lock lock(mutex_);
    ImpactSurface& surface = surfaces_[edit.case_id];
    if (surface.case_id.empty()) surface.case_id = edit.case_id;
    surface.subjects.insert(edit.subject);
    surface.relations.insert(edit.relation);
}

const ImpactSurface& EditEngine::impact_surface(const std::string& case_id) const {
    if (!overlays_->find(case_id)) throw UnknownCaseError(case_id);
    std::scoped_lock lock(mutex_);
    ImpactSurface& surface = surfaces_[case_id];
    if (surface.case_id.empty()) surface.case_id = case_id;
    return surface;
}

}  // namespace capekg
