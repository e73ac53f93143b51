#include "ash/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ash/error.hpp"

namespace ash {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::empty_input: return "empty input";
    case Errc::bad_percentile: return "bad percentile";
    case Errc::bad_magic: return "bad magic";
    case Errc::bad_version: return "version mismatch";
    case Errc::bad_dtype: return "unsupported dtype";
    case Errc::bad_dims: return "bad dims";
    case Errc::truncated: return "truncated payload";
    case Errc::length_mismatch: return "length mismatch";
    case Errc::non_finite: return "non-finite value";
    case Errc::dim_mismatch: return "dim mismatch";
    case Errc::io_error: return "io error";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::bad_config: return "bad config";
  }
  return "unknown error";
}

bool is_config_error(Errc code) noexcept {
  return code == Errc::bad_config || code == Errc::bad_percentile ||
         code == Errc::invalid_argument;
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                        : std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

Error Error::with_context(const std::string& context) const {
  return Error(code_, detail_.empty() ? context : context + ": " + detail_);
}

std::size_t element_count(std::span<const std::uint32_t> dims) {
  if (dims.empty()) return 0;
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

namespace {

void check_finite(std::span<const float> values) {
  auto it = std::find_if(values.begin(), values.end(),
                         [](float v) { return !std::isfinite(v); });
  if (it != values.end()) {
    throw Error(Errc::non_finite,
                "element " + std::to_string(it - values.begin()));
  }
}

}  // namespace

FeatureTensor::FeatureTensor(std::vector<float> values) : values_(std::move(values)) {
  if (!values_.empty()) dims_ = {static_cast<std::uint32_t>(values_.size())};
  check_finite(values_);
}

FeatureTensor::FeatureTensor(std::vector<std::uint32_t> dims, std::vector<float> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
  if (std::any_of(dims_.begin(), dims_.end(), [](auto d) { return d == 0; })) {
    throw Error(Errc::bad_dims, "extents must be positive");
  }
  if (element_count(dims_) != values_.size()) {
    throw Error(Errc::length_mismatch,
                "dims hold " + std::to_string(element_count(dims_)) + " elements, got " +
                    std::to_string(values_.size()));
  }
  check_finite(values_);
}

FeatureTensor FeatureTensor::with_values(std::vector<float> values) const {
  return FeatureTensor(dims_, std::move(values));
}

bool FeatureTensor::bit_equal(const FeatureTensor& other) const noexcept {
  if (dims_ != other.dims_ || values_.size() != other.values_.size()) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(values_[i]) !=
        std::bit_cast<std::uint32_t>(other.values_[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace ash
