#pragma once

#include <stdexcept>
#include <string>

namespace ash {

enum class Errc {
  empty_input,
  bad_percentile,
  bad_magic,
  bad_version,
  bad_dtype,
  bad_dims,
  truncated,
  length_mismatch,
  non_finite,
  dim_mismatch,
  io_error,
  invalid_argument,
  bad_config,
};

const char* to_string(Errc code) noexcept;

// Config-class errors map to CLI exit code 2, everything else to 3.
bool is_config_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Same code, with `context` (typically a file path) prefixed to the detail.
  Error with_context(const std::string& context) const;

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace ash
