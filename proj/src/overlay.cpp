// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/overlay.hpp"

namespace capekg {

void Overlay::apply(const Edit& edit) {
    if (edit.case_id != case_id_) throw CaseMismatchError(edit.case_id, case_id_);
    std::uint64_t key = sp_key(edit.subject, edit.relation);
    if (delta_.find(key) == delta_.end()) {
        key_order_.emplace_back(edit.subject, edit.relation);
    }
    delta_[key] = edit.object_new;
    log_.push_back(edit);
}

std::vector<DeltaEntry> Overlay::entries() const {
    std::vector<DeltaEntry> out;
    out.reserve(key_order_.size());
    for (const auto& [subject, relation] : key_order_) {
        out.push_back({subject, relation, delta_.at(sp_key(subject, relation))});
    }
    return out;
}

std::size_t Overlay::approx_bytes() const {
    std::size_t bytes = sizeof(Overlay) + case_id_.capacity();
    bytes += delta_.size() * (sizeof(std::uint64_t) + sizeof(Symbol) + 16);
    bytes += key_order_.capacity() * sizeof(key_order_[0]);
    bytes += log_.capacity() * sizeof(Edit);
    for (const Edit& e : log_) bytes += e.case_id.capacity();
    return bytes;
}

Overlay& OverlayRegistry::create(const std::string& case_id) {
    if (by_case_.count(case_id)) throw DuplicateCaseError(case_id);
    auto overlay = std::make_unique<Overlay>(case_id);
    Overlay* raw = overlay.get();
    by_case_.emplace(case_id, std::move(overlay));
    order_.push_back(raw);
    return *raw;
}

Overlay& OverlayRegistry::ensure(const std::string& case_id) {
    if (Overlay* existing = find(case_id)) return *existing;
    return create(case_id);
}

Overlay& OverlayRegistry::get(const std::string& case_id) {
    if (Overlay* existing = find(case_id)) return *existing;
    throw UnknownCaseError(case_id);
}

const Overlay& OverlayRegistry::get(const std::string& case_id) const {
    if (const Overlay* existing = find(case_id)) return *existing;
    throw UnknownCaseError(case_id);
}

Overlay* OverlayRegistry::find(const std::string& case_id) {
    auto it = by_case_.find(case_id);
    return it == by_case_.end() ? nullptr : it->second.get();
}

const Overlay* OverlayRegistry::find(const std::string& case_id) const {
    auto it = by_case_.find(case_id);
    return it == by_case_.end() ? nullptr : it->second.get();
}

}  // namespace capekg
