// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstddef>
#include <string>

#include "capekg/retrieval.hpp"

namespace capekg {

// Tunables the CLI exposes. Flag > config file > default.
struct EngineConfig {
    RetrievalConfig retrieval;
    std::size_t demo_count = 4;  // few-shot demos per decomposition
};

// INI-style loader. Recognized sections/keys:
//   [retrieval]  tau, lambda, suppression_alpha
//   [reasoner]   demo_count
// '#' and ';' start comments. Unknown sections or keys raise ParseError,
// as do unparseable numeric values.
EngineConfig load_config(const std::string& path);

}  // namespace capekg
