#pragma once

#include <stdexcept>
#include <string>

namespace hetmed::cli {

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,  // verification failure or violated coverage verdict
  kIoError = 2,
  kInputError = 3,   // malformed input, schema violation, invalid flag value
  kMissingData = 4,
};

// Carries the process exit code alongside the message.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] int code() const noexcept { return code_; }

 private:
  int code_;
};

}  // namespace hetmed::cli
