#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshless {

// Base of every error raised by the library. Subclasses name the failure
// category so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed input text (CSV row, config line). Carries the 1-based line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class InsufficientNodes : public Error {
public:
    using Error::Error;
};

// Star whose moment matrix is not numerically positive definite.
class DegenerateStar : public Error {
public:
    DegenerateStar(std::size_t node, const std::string& why)
        : Error("degenerate star at node " + std::to_string(node) + ": " + why), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class DegenerateBoundary : public Error {
public:
    DegenerateBoundary(std::size_t node, const std::string& why)
        : Error("degenerate boundary star at node " + std::to_string(node) + ": " + why),
          node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    DivergenceError(std::size_t node, double time, const std::string& why)
        : Error("divergence at node " + std::to_string(node) + ", t=" + std::to_string(time) +
                ": " + why),
          node_(node), time_(time) {}
    std::size_t node() const noexcept { return node_; }
    double time() const noexcept { return time_; }

private:
    std::size_t node_;
    double time_;
};

class NoAdmissibleDt : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace meshless
