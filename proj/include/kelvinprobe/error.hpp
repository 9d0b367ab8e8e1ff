#pragma once

#include <stdexcept>
#include <string>

namespace kp {

enum class ErrorCode {
  InvalidArgument = 1,
  Config = 2,
  Io = 3,
  Numerical = 4,
  Domain = 5,
  Internal = 6,
};

// Single exception type for the library; the C API maps `code()` onto its
// status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kp
