#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace bevcharge {

enum class ErrorKind {
  usage,        // caller violated a precondition (mismatched keys, bad flag)
  computation,  // arithmetic produced a non-finite or negative quantity
  validation,   // data violates a dataset or analytic invariant
  io,           // filesystem failure
};

// Exception carrying a stable machine-readable code such as "SHARE_SUM" or
// "NO_RATIO". `file`/`row` locate the offending input when one exists; row 0
// means the whole file.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message,
        std::string file = {}, std::size_t row = 0)
      : std::runtime_error(message),
        kind_(kind),
        code_(std::move(code)),
        file_(std::move(file)),
        row_(row) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }
  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }

 private:
  ErrorKind kind_;
  std::string code_;
  std::string file_;
  std::size_t row_;
};

}  // namespace bevcharge
