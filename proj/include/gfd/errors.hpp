#pragma once

#include <stdexcept>
#include <string>

namespace gfd {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A cloud file could not be parsed; carries the offending 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// The normal matrix of a star is not usable (Cholesky breakdown or
/// condition estimate above the limit); carries the center node index.
class DegenerateStarError : public Error {
public:
    DegenerateStarError(const std::string& what, int node)
        : Error(what + " (center node " + std::to_string(node) + ")"), node_(node) {}
    int node() const { return node_; }

private:
    int node_;
};

/// Linear solve failed or did not meet the residual contract.
class SolveError : public Error {
public:
    using Error::Error;
};

/// A non-finite field value appeared during time stepping.
class DivergenceError : public Error {
public:
    DivergenceError(long step, int node)
        : Error("non-finite field value at step " + std::to_string(step) +
                ", node " + std::to_string(node)),
          step_(step),
          node_(node) {}
    long step() const { return step_; }
    int node() const { return node_; }

private:
    long step_;
    int node_;
};

/// The configured time step violates the enforced stability bound.
class StabilityViolationError : public Error {
public:
    using Error::Error;
};

/// Model hypotheses or initial-condition validation failed.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gfd
