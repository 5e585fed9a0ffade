#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace sqrtsg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// x outside dom A, or t outside the trusted horizon.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Iterative solver gave up; carries the last residual.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + format(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }
    double residual_;
};

/// Natural-number arithmetic left the representable range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A rate query exceeded its evaluation budget.
class CapError : public Error {
public:
    using Error::Error;
};

/// The integral lim-inf search found no witness although the lemma guarantees one.
class LemmaViolation : public Error {
public:
    using Error::Error;
};

/// Bad scenario configuration. line is 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace sqrtsg
