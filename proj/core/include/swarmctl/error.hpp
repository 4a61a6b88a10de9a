#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmctl {

/// Base class of every error thrown by the library. `kind()` is a short
/// machine-readable tag used by the command-line tool.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse"; }

private:
    std::size_t line_;
};

class TopologyError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "topology"; }
};

class GeometryError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "geometry"; }
};

class DimensionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension"; }
};

class SolveError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "solve"; }
};

class LineSearchError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "line_search"; }
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }
    const char* kind() const noexcept override { return "config"; }

private:
    std::vector<std::string> problems_;
};

}  // namespace swarmctl
