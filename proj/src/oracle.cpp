// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/oracle.hpp"

#include <cmath>

#include <json.hpp>

namespace capekg {

void Transcript::append(TranscriptEntry entry) {
    std::scoped_lock lock(mutex_);
    entries_.push_back(std::move(entry));
}

std::size_t Transcript::size() const {
    std::scoped_lock lock(mutex_);
    return entries_.size();
}

std::vector<TranscriptEntry> Transcript::entries() const {
    std::scoped_lock lock(mutex_);
    return entries_;
}

void Transcript::clear() {
    std::scoped_lock lock(mutex_);
    entries_.clear();
}

void Transcript::write_jsonl(std::ostream& out) const {
    std::scoped_lock lock(mutex_);
    for (const TranscriptEntry& e : entries_) {
        nlohmann::ordered_json row{
            {"role", e.role},
            {"prompt_or_query", e.prompt_or_query},
            {"response", e.response},
        };
        if (!e.request.empty()) row["request"] = e.request;
        out << row.dump() << '\n';
    }
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace capekg
