#pragma once

#include <stdexcept>
#include <string>

namespace branchtail {

// Error taxonomy shared by the C++ core, the C API (as integer codes) and the
// CLI (as exit codes).
enum class ErrorCode {
  invalid_argument,  // bad parameters or malformed configuration
  not_ergodic,       // model rejected by the stationarity gate
  runtime,           // statistical guard tripped or numeric failure
  io,                // file system problem
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace branchtail
