#pragma once

#include <stdexcept>
#include <string>

namespace skg {

// Error taxonomy used across the library.  The CLI maps these onto distinct
// exit codes, so keep the hierarchy flat and the categories coarse:
//
//   ConfigError  -- a parameter or configuration value is out of range or
//                   inconsistent (detected before any data is touched)
//   DataError    -- input data violates a runtime precondition (wrong length,
//                   non-finite sample, mismatched frame counts, ...)
//   FormatError  -- a serialized file or byte stream cannot be parsed
//   IoError      -- the underlying file could not be opened/read/written

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Raised by the entropy estimators when the sample budget is too small for
// the requested alphabet, or when an estimate is inconsistent beyond noise.
class EstimationError : public DataError {
 public:
  explicit EstimationError(const std::string& what) : DataError(what) {}
};

// Raised by quantization when a frame row has zero dynamic range.
class DegenerateRowError : public DataError {
 public:
  explicit DegenerateRowError(const std::string& what) : DataError(what) {}
};

// Raised by privacy amplification when no secure key is extractable
// (conditional min-entropy is zero or the input is too short).
class CannotAmplifyError : public DataError {
 public:
  explicit CannotAmplifyError(const std::string& what) : DataError(what) {}
};

}  // namespace skg
