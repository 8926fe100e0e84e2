#pragma once

#include <stdexcept>
#include <string>

namespace analogcast {

/// Failure classes; each maps onto one CLI exit code.
enum class ErrorKind { kConfig, kData, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::kNumeric, what) {}
};

/// 2 config, 3 data, 4 numeric.
int exit_code(ErrorKind kind) noexcept;

}  // namespace analogcast
