// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace capekg {

// Base class for engine errors. kind() is the stable machine-readable name
// surfaced by the CLI's structured error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// A symbol text that is empty after normalization.
class EmptySymbolError : public Error {
public:
    explicit EmptySymbolError(const std::string& message = "symbol text is empty after normalization")
        : Error("EmptySymbol", message) {}
};

// Malformed input data (JSON, JSONL, config). line is 1-based, 0 if unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, std::size_t line = 0)
        : Error("ParseError", line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Overlay creation for a case id that already has one.
class DuplicateCaseError : public Error {
public:
    explicit DuplicateCaseError(const std::string& case_id)
        : Error("DuplicateCase", "overlay already exists for case '" + case_id + "'") {}
};

// Lookup of a case id with no registered overlay.
class UnknownCaseError : public Error {
public:
    explicit UnknownCaseError(const std::string& case_id)
        : Error("UnknownCase", "no overlay registered for case '" + case_id + "'") {}
};

// An edit offered to an overlay belonging to a different case.
class CaseMismatchError : public Error {
public:
    CaseMismatchError(const std::string& edit_case, const std::string& overlay_case)
        : Error("CaseMismatch",
                "edit for case '" + edit_case + "' applied to overlay of case '" + overlay_case + "'") {}
};

// The detector produced no usable triple for a natural-language edit statement.
class ExtractionFailedError : public Error {
public:
    explicit ExtractionFailedError(const std::string& message)
        : Error("ExtractionFailed", message) {}
};

// Dataset record violating the evaluation schema. Carries the case index.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& message, std::size_t case_index = npos)
        : Error("SchemaError",
                case_index == npos ? message : "case " + std::to_string(case_index) + ": " + message),
          case_index_(case_index) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t case_index() const noexcept { return case_index_; }

private:
    std::size_t case_index_;
};

// A language-model reply that cannot be parsed into decomposition steps.
class DecompositionParseError : public Error {
public:
    explicit DecompositionParseError(const std::string& message)
        : Error("DecompositionParseError", message) {}
};

// Transport or protocol failure talking to an oracle backend.
class OracleUnavailableError : public Error {
public:
    explicit OracleUnavailableError(const std::string& message)
        : Error("OracleUnavailable", message) {}
};

}  // namespace capekg
