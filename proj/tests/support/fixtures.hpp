#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ash/tensor.hpp"

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::vector<float> normal_values(std::mt19937_64& rng, std::size_t n, double mean = 0.0,
                                 double stddev = 1.0);

/// Values drawn without replacement from a shuffled integer grid, so all
/// entries are distinct.
std::vector<float> distinct_values(std::mt19937_64& rng, std::size_t n);

std::string slurp(const std::filesystem::path& path);

}  // namespace fixture
