// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/graph.hpp"

#include <stdexcept>

namespace capekg {

bool BaseGraph::check_indices() const {
    std::unordered_map<std::uint64_t, std::vector<Symbol>> sp;
    std::unordered_map<std::uint32_t, std::vector<std::pair<Symbol, Symbol>>> subj;
    for (const Triple& t : triples_) {
        sp[sp_key(t.subject, t.relation)].push_back(t.object);
        subj[t.subject.id()].emplace_back(t.relation, t.object);
    }
    return sp == sp_index_ && subj == subject_index_;
}

std::size_t BaseGraph::approx_bytes() const {
    std::size_t bytes = sizeof(BaseGraph);
    bytes += triples_.capacity() * sizeof(Triple);
    for (const auto& [key, objects] : sp_index_) {
        bytes += sizeof(key) + sizeof(objects) + objects.capacity() * sizeof(Symbol) + 16;
    }
    for (const auto& [key, pairs] : subject_index_) {
        bytes += sizeof(key) + sizeof(pairs) + pairs.capacity() * sizeof(pairs[0]) + 16;
    }
    bytes += triple_set_.size() * (sizeof(Triple) + 16);
    return bytes;
}

bool BaseGraphBuilder::add(std::string_view subject, std::string_view relation,
                           std::string_view object) {
    return add(Triple{symbols_->intern(subject), symbols_->intern(relation),
                      symbols_->intern(object)});
}

bool BaseGraphBuilder::add(const Triple& t) {
    if (sealed_) throw std::logic_error("BaseGraphBuilder reused after seal()");
    if (!graph_.triple_set_.insert(t).second) {
        ++duplicates_;
        return false;
    }
    graph_.triples_.push_back(t);
    graph_.sp_index_[sp_key(t.subject, t.relation)].push_back(t.object);
    graph_.subject_index_[t.subject.id()].emplace_back(t.relation, t.object);
    return true;
}

BaseGraph BaseGraphBuilder::seal() && {
    if (sealed_) throw std::logic_error("BaseGraphBuilder reused after seal()");
    sealed_ = true;

    std::unordered_set<std::uint32_t> entities;
    std::unordered_set<std::uint32_t> relations;
    std::uint64_t h = fnv1a64("");
    for (const Triple& t : graph_.triples_) {
        entities.insert(t.subject.id());
        entities.insert(t.object.id());
        relations.insert(t.relation.id());
        h = fnv1a64(t.subject.text(), h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(t.relation.text(), h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(t.object.text(), h);
        h = fnv1a64("\x1e", h);
    }
    graph_.entity_count_ = entities.size();
    graph_.relation_count_ = relations.size();
    graph_.fingerprint_ = h;
    return std::move(graph_);
}

}  // namespace capekg
