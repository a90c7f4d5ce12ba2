#pragma once

#include <stdexcept>
#include <string>

namespace tising {

// Exit-code families used by the CLI: validation (2), capacity (3), solver (4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

class ParseError : public ArgumentError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ArgumentError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual, bool diverging)
        : Error(what), residual_(residual), diverging_(diverging) {}
    double residual() const { return residual_; }
    bool diverging() const { return diverging_; }

private:
    double residual_;
    bool diverging_;
};

class DiagnosticError : public Error {
public:
    DiagnosticError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

} // namespace tising
