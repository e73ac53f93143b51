#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ash {

/// Dense row-major float32 tensor holding one sample's activation map or
/// feature vector. Values are checked finite at construction, so everything
/// downstream can assume a total order on elements.
///
/// A default-constructed tensor is empty (no dims, no values); every
/// constructed non-empty tensor has positive extents whose product equals
/// the value count.
class FeatureTensor {
 public:
  FeatureTensor() = default;

  /// 1-D tensor; an empty vector yields the empty tensor.
  explicit FeatureTensor(std::vector<float> values);

  FeatureTensor(std::vector<std::uint32_t> dims, std::vector<float> values);

  std::span<const std::uint32_t> dims() const noexcept { return dims_; }
  std::span<const float> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  float operator[](std::size_t i) const { return values_[i]; }

  /// Same dims, new values. Validates like the constructor.
  FeatureTensor with_values(std::vector<float> values) const;

  /// Element-wise bit equality (distinguishes -0.0 from 0.0).
  bool bit_equal(const FeatureTensor& other) const noexcept;

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::vector<std::uint32_t> dims_;
  std::vector<float> values_;
};

std::size_t element_count(std::span<const std::uint32_t> dims);

}  // namespace ash
