// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace capekg {

// Canonical text form used for symbol interning: UTF-8 preserved, leading and
// trailing whitespace removed, internal whitespace runs collapsed to a single
// space. Idempotent: normalize(normalize(x)) == normalize(x).
std::string normalize(std::string_view raw);

// ASCII case folding; bytes >= 0x80 pass through untouched.
std::string casefold(std::string_view text);

// Lowercased token list. Tokens are runs of alphanumerics, '-' and non-ASCII
// bytes; '_' and other punctuation separate tokens (so relation names like
// "origin_country" match the words "origin country").
std::vector<std::string> tokenize(std::string_view text);

// Case-insensitive substring containment over already-normalized text.
bool contains_fold(std::string_view haystack, std::string_view needle);

// Normalize + casefold in one step; the comparison key for answer matching.
std::string fold_key(std::string_view raw);

// FNV-1a over a byte range, usable as a streaming accumulator via seed.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 1469598103934665603ull);

}  // namespace capekg
