#pragma once

#include <stdexcept>
#include <string>

namespace vark {

enum class ErrorKind {
  // input data
  MissingQuestion,
  InvalidToken,
  EmptyAnswer,
  DuplicateId,
  MalformedCsv,
  EmptyDataset,
  TooFewRecords,
  // validation / usage
  InvalidConfig,
  UnknownHyperparameter,
  InvalidThreshold,
  ModeMismatch,
  // numerical
  DegenerateData,
  WidthMismatch,
  EmptySample,
  LengthMismatch,
  SingleClassSample,
  AllZeroDifferences,
  TooFewValues,
  Io,
  Numerical,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace vark
