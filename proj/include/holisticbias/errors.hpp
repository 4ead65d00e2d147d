#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hb {

// Every failure surfaced by the toolkit derives from Error so the CLI can
// report it with one handler.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), source_(source), line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UniquenessError : public ValidationError {
 public:
  explicit UniquenessError(const std::string& key)
      : ValidationError("duplicate entry '" + key + "'"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

class JoinError : public Error {
 public:
  JoinError(const std::string& what, std::vector<std::string> offenders)
      : Error(what), offenders_(std::move(offenders)) {}
  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal diagnostics collected by analyses that degrade gracefully.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace hb
