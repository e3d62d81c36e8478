#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitsec {

// Bad user input: malformed files, inconsistent options. CLI exit code 1.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string &what)
            : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {
    }

    // 1-based; 0 when the error is not tied to a single line (e.g. a cycle)
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

// A broken internal guarantee. CLI exit code 2.
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

} // namespace splitsec
