// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/symbols.hpp"

#include <mutex>

namespace capekg {

Symbol SymbolTable::intern(std::string_view raw) {
    std::string norm = normalize(raw);
    if (norm.empty()) throw EmptySymbolError();

    std::unique_lock lock(mutex_);
    auto it = by_text_.find(std::string_view(norm));
    if (it != by_text_.end()) return at(it->second);

    texts_.push_back(std::move(norm));
    const std::string& stored = texts_.back();
    auto id = static_cast<std::uint32_t>(texts_.size() - 1);
    by_text_.emplace(std::string_view(stored), id);
    by_fold_.emplace(casefold(stored), id);  // keeps the first id on collision
    return at(id);
}

std::optional<Symbol> SymbolTable::find(std::string_view raw) const {
    std::string norm = normalize(raw);
    if (norm.empty()) return std::nullopt;
    std::shared_lock lock(mutex_);
    auto it = by_text_.find(std::string_view(norm));
    if (it == by_text_.end()) return std::nullopt;
    return at(it->second);
}

std::optional<Symbol> SymbolTable::match(std::string_view raw) const {
    std::string norm = normalize(raw);
    if (norm.empty()) return std::nullopt;
    std::shared_lock lock(mutex_);
    auto it = by_text_.find(std::string_view(norm));
    if (it != by_text_.end()) return at(it->second);
    auto fold = by_fold_.find(casefold(norm));
    if (fold != by_fold_.end()) return at(fold->second);
    return std::nullopt;
}

std::size_t SymbolTable::size() const {
    std::shared_lock lock(mutex_);
    return texts_.size();
}

}  // namespace capekg
