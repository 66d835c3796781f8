#pragma once

#include <stdexcept>
#include <string>

namespace fracflood {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent deck input. line() is 1-based, 0 when unknown.
class DeckError : public Error {
public:
    explicit DeckError(const std::string& msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const noexcept { return line_; }

    /// Same error with `prefix: ` prepended to the message (e.g. a file path).
    DeckError prefixed(const std::string& prefix) const { return DeckError(Raw{}, prefix + ": " + what(), line_); }

private:
    struct Raw {};
    DeckError(Raw, const std::string& full, int line) : Error(full), line_(line) {}
    int line_;
};

/// A parameter or table violates its documented domain. field() names the offender.
class ParameterError : public Error {
public:
    ParameterError(std::string field, const std::string& msg)
        : Error(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A computed physical state left its admissible range (e.g. porosity outside (0,1)).
class StateError : public Error {
public:
    using Error::Error;
};

/// Nonlinear solve gave up (timestep chopped below the minimum, non-finite residual).
class SolverError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// History matching could not proceed (e.g. a whole generation failed to simulate).
class MatchError : public Error {
public:
    using Error::Error;
};

} // namespace fracflood
