#include "ismm/errors.hpp"

namespace ismm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DisorderedTicks: return "DisorderedTicks";
    case ErrorCode::MissingOpen: return "MissingOpen";
    case ErrorCode::DegenerateReturns: return "DegenerateReturns";
    case ErrorCode::DegenerateIndex: return "DegenerateIndex";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::UnreachableState: return "UnreachableState";
    case ErrorCode::EnvelopeExceeded: return "EnvelopeExceeded";
    case ErrorCode::MismatchedGrids: return "MismatchedGrids";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace ismm
