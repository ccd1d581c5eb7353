#ifndef WBAN_ERROR_HPP
#define WBAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wban {

enum class ErrorKind {
    StageRange,
    Domain,
    InfeasiblePhase,
    DegenerateDenominator,
    BlockedChannel,
    StaleState,
    Convergence,
    Configuration,
    Parse,
    Validation,
    Report,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual, long iterations)
        : Error(ErrorKind::Convergence, what),
          last_residual_(last_residual),
          iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    long iterations_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error(ErrorKind::Parse, what), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace wban

#endif  // WBAN_ERROR_HPP
