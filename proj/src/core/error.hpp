#pragma once

#include <stdexcept>
#include <string>

namespace dfgt {

// Error taxonomy shared by the core library, the C API (mapped to dfgt_status)
// and the CLI (mapped to exit codes).
enum class ErrorCode {
  invalid_argument,      // bad parameters: delta/eps/r out of range, size mismatch
  invalid_data,          // non-finite values, malformed input files
  not_found,             // delete of a point that is not registered
  accuracy_unreachable,  // requested eps not attainable within the p,k caps
  state,                 // operation requires state that is absent (e.g. stale matvec session)
  io,                    // file read/write failure
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dfgt
