#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace nsbench {

// Bad input: arguments, configs, files that fail validation. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition of a numerical operation violated (e.g. strength outside (0,1]).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Malformed or corrupt NSEB file.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failure while computing (singular system, non-finite output). CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A missing input is a usage problem rather than an I/O failure.
inline void require_input_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ValidationError("no such file: " + path.string());
  }
}

}  // namespace nsbench
