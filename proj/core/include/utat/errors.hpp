#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace utat {

/// Exception carrying a stable machine-readable code plus the process exit
/// code the CLI maps it to.  Exit-code groups:
///   2 = input / validation problems
///   3 = I/O problems
///   4 = internal or solver failures
struct Error : std::runtime_error {
  std::string code;  ///< stable identifier, e.g. "input-not-found"
  int exit_code;
  long line = -1;    ///< 1-based line for parse errors, -1 when not applicable
  long column = -1;  ///< 1-based column for parse errors, -1 when not applicable

  Error(std::string code_, const std::string& message, int exit_code_ = 2)
      : std::runtime_error(message), code(std::move(code_)), exit_code(exit_code_) {}

  /// Attaches a source position (for parse errors).
  Error&& at(long line_, long column_) && {
    line = line_;
    column = column_;
    return std::move(*this);
  }
};

}  // namespace utat
