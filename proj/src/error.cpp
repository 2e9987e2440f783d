#include "vark/error.hpp"

namespace vark {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingQuestion: return "MissingQuestion";
    case ErrorKind::InvalidToken: return "InvalidToken";
    case ErrorKind::EmptyAnswer: return "EmptyAnswer";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MalformedCsv: return "MalformedCsv";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::TooFewRecords: return "TooFewRecords";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::UnknownHyperparameter: return "UnknownHyperparameter";
    case ErrorKind::InvalidThreshold: return "InvalidThreshold";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::WidthMismatch: return "WidthMismatch";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SingleClassSample: return "SingleClassSample";
    case ErrorKind::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorKind::TooFewValues: return "TooFewValues";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Numerical: return "Numerical";
  }
  return "Unknown";
}

}  // namespace vark
