// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/store.hpp"

namespace capekg {

namespace {

BaseGraph build_base(SymbolTable& symbols, std::span<const RawTriple> facts,
                     std::size_t& duplicates) {
    BaseGraphBuilder builder(symbols);
    for (const RawTriple& fact : facts) builder.add(fact.s, fact.r, fact.o);
    duplicates = builder.duplicates();
    return std::move(builder).seal();
}

}  // namespace

Store::Store(std::span<const RawTriple> facts) : base_(build_base(symbols_, facts, duplicates_)) {}

LayeredView Store::view(const std::string& case_id) const {
    return LayeredView{&base_, &overlays_.get(case_id)};
}

}  // namespace capekg
