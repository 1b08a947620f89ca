// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/config.hpp"

#include <cctype>
#include <cstddef>
#include <fstream>
#include <string_view>

#include "capekg/errors.hpp"

namespace capekg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view value, std::size_t line) {
    try {
        std::size_t consumed = 0;
        double parsed = std::stod(std::string(value), &consumed);
        if (consumed != value.size()) throw ParseError("trailing characters in number", line);
        return parsed;
    } catch (const std::logic_error&) {
        throw ParseError("expected a number, got \"" + std::string(value) + "\"", line);
    }
}

std::size_t parse_count(std::string_view value, std::size_t line) {
    for (char c : value) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw ParseError("expected a non-negative integer, got \"" + std::string(value) + "\"",
                             line);
        }
    }
    if (value.empty()) throw ParseError("expected a non-negative integer", line);
    return static_cast<std::size_t>(std::stoull(std::string(value)));
}

}  // namespace

EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);

    EngineConfig config;
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (std::size_t hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", lineno);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "retrieval" && section != "reasoner") {
                throw ParseError("unknown section [" + section + "]", lineno);
            }
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (section == "retrieval") {
            if (key == "tau") {
                config.retrieval.tau = parse_double(value, lineno);
            } else if (key == "lambda") {
                config.retrieval.lambda = parse_double(value, lineno);
            } else if (key == "suppression_alpha") {
                config.retrieval.suppression_alpha = parse_double(value, lineno);
            } else {
                throw ParseError("unknown key \"" + key + "\" in [retrieval]", lineno);
            }
        } else if (section == "reasoner") {
            if (key == "demo_count") {
                config.demo_count = parse_count(value, lineno);
            } else {
                throw ParseError("unknown key \"" + key + "\" in [reasoner]", lineno);
            }
        } else {
            throw ParseError("key outside of a section", lineno);
        }
    }
    return config;
}

}  // namespace capekg
