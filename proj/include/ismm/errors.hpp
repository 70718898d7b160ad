#ifndef ISMM_ERRORS_HPP
#define ISMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ismm {

// Machine-readable failure categories. CLI maps these to exit codes and
// error JSON; tests match on the code rather than the message text.
enum class ErrorCode {
  MalformedRow,
  NonPositivePrice,
  EmptyInput,
  DisorderedTicks,
  MissingOpen,
  DegenerateReturns,
  DegenerateIndex,
  DegenerateVariance,
  InsufficientHistory,
  InsufficientData,
  MissingCell,
  UnreachableState,
  EnvelopeExceeded,
  MismatchedGrids,
  InvalidArgument,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ismm

#endif  // ISMM_ERRORS_HPP
