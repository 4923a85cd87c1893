#pragma once

#include <stdexcept>
#include <string>

namespace soccersum {

// Input shapes disagree with declared parameter shapes.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An event type token is not part of the active vocabulary.
struct VocabularyError : std::runtime_error {
    explicit VocabularyError(const std::string& token)
        : std::runtime_error("unknown event type '" + token + "'"), token_(token) {}
    const std::string& token() const noexcept { return token_; }

  private:
    std::string token_;
};

// Malformed input file. `line` is 1-based when known, 0 otherwise.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line = 0) : std::runtime_error(format(what, line)), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    static std::string format(const std::string& what, std::size_t line) {
        return line == 0 ? what : "line " + std::to_string(line) + ": " + what;
    }
    std::size_t line_;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Optimisation diverged (non-finite loss or gradient).
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data-level precondition failure (not enough material, single class, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace soccersum
