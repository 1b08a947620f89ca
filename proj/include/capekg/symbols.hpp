// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "capekg/errors.hpp"
#include "capekg/text.hpp"

namespace capekg {

class SymbolTable;

// Interned entity/relation handle. Equal normalized text <=> equal id within
// the owning table; symbols from different tables never compare equal. Copies
// are cheap; the text lives in the table for the table's lifetime.
class Symbol {
public:
    Symbol() = default;  // invalid sentinel; text() must not be called on it

    std::uint32_t id() const noexcept { return id_; }
    std::string_view text() const noexcept { return *text_; }
    bool valid() const noexcept { return text_ != nullptr; }

    friend bool operator==(Symbol a, Symbol b) noexcept {
        return a.id_ == b.id_ && a.text_ == b.text_;
    }
    friend bool operator!=(Symbol a, Symbol b) noexcept { return !(a == b); }

private:
    friend class SymbolTable;
    Symbol(std::uint32_t id, const std::string* text) : id_(id), text_(text) {}

    std::uint32_t id_ = 0;
    const std::string* text_ = nullptr;
};

// Append-only interning table. intern() is idempotent on normalized text;
// find() never inserts. Thread-safe: interning takes a writer lock, lookups a
// reader lock, and existing Symbols stay valid across growth.
class SymbolTable {
public:
    SymbolTable() = default;
    SymbolTable(const SymbolTable&) = delete;
    SymbolTable& operator=(const SymbolTable&) = delete;

    // Interns the normalized form of raw. Throws EmptySymbolError if nothing
    // remains after normalization.
    Symbol intern(std::string_view raw);

    // Exact lookup of the normalized form; no insertion.
    std::optional<Symbol> find(std::string_view raw) const;

    // Exact lookup, then a case-insensitive fallback pass. Ambiguous folds
    // resolve to the first-interned symbol.
    std::optional<Symbol> match(std::string_view raw) const;

    std::size_t size() const;

private:
    Symbol at(std::uint32_t id) const { return Symbol(id, &texts_[id]); }

    mutable std::shared_mutex mutex_;
    std::deque<std::string> texts_;  // stable addresses; Symbols point here
    std::unordered_map<std::string_view, std::uint32_t> by_text_;
    std::unordered_map<std::string, std::uint32_t> by_fold_;  // first id wins
};

}  // namespace capekg

template <>
struct std::hash<capekg::Symbol> {
    std::size_t operator()(capekg::Symbol s) const noexcept {
        return std::hash<std::uint32_t>()(s.id());
    }
};
