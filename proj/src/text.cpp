// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/text.hpp"

#include <cctype>

namespace capekg {

namespace {

// Code points treated as whitespace: ASCII controls plus the common Unicode
// space separators and the BOM.
bool is_space_codepoint(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\f':
        case U'\v':
        case 0x0085:  // NEL
        case 0x00A0:  // NBSP
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
        case 0xFEFF:  // BOM / zero-width no-break space
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Minimal UTF-8 decode of the sequence starting at i. Malformed bytes are
// passed through as single-byte code points so normalization never rejects
// input. Returns the sequence length in bytes.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    std::size_t len = 1;
    char32_t value = b0;
    if (b0 >= 0xF0) {
        len = 4;
        value = b0 & 0x07u;
    } else if (b0 >= 0xE0) {
        len = 3;
        value = b0 & 0x0Fu;
    } else if (b0 >= 0xC0) {
        len = 2;
        value = b0 & 0x1Fu;
    } else {
        cp = b0;
        return 1;
    }
    if (i + len > s.size()) {
        cp = b0;
        return 1;
    }
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char bk = byte(i + k);
        if ((bk & 0xC0u) != 0x80u) {
            cp = b0;
            return 1;
        }
        value = (value << 6) | (bk & 0x3Fu);
    }
    cp = value;
    return len;
}

bool is_token_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c == '-' || c >= 0x80;
}

}  // namespace

std::string normalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = 0;
        std::size_t len = decode_utf8(raw, i, cp);
        if (is_space_codepoint(cp)) {
            pending_space = !out.empty();  // drop leading whitespace outright
            i += len;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(raw.substr(i, len));
        i += len;
    }
    return out;
}

std::string casefold(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u < 0x80) c = static_cast<char>(std::tolower(u));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        unsigned char u = static_cast<unsigned char>(ch);
        if (is_token_byte(u)) {
            current.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : ch);
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

bool contains_fold(std::string_view haystack, std::string_view needle) {
    return casefold(haystack).find(casefold(needle)) != std::string::npos;
}

std::string fold_key(std::string_view raw) {
    return casefold(normalize(raw));
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace capekg
