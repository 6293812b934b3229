#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or missing configuration. The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset required by the requested scenario was not supplied.
class MissingDataset : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Anything wrong with the data itself. The CLI maps these to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// A parse failure tied to a line of an input file (1-based, header is line 1).
class LineError : public DataError {
 public:
  LineError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public LineError {
 public:
  using LineError::LineError;
};

class ValueError : public LineError {
 public:
  using LineError::LineError;
};

#define TCAS_DATA_ERROR(Name)         \
  class Name : public DataError {     \
   public:                            \
    using DataError::DataError;       \
  }

TCAS_DATA_ERROR(DegenerateSwipe);
TCAS_DATA_ERROR(ImbalanceError);
TCAS_DATA_ERROR(EmptySource);
TCAS_DATA_ERROR(DegenerateLabels);
TCAS_DATA_ERROR(DimensionMismatch);
TCAS_DATA_ERROR(InsufficientData);
TCAS_DATA_ERROR(SchemaVersionError);
TCAS_DATA_ERROR(CorruptModel);
TCAS_DATA_ERROR(DivergenceError);
TCAS_DATA_ERROR(EmptyScores);
TCAS_DATA_ERROR(DegenerateData);

#undef TCAS_DATA_ERROR

}  // namespace tcas
