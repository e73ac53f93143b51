#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ash/tensor.hpp"

namespace ash {

// ASHT container, little-endian throughout:
//   "ASHT" | u16 version | u8 dtype | u8 ndim | ndim x u32 dims | f32 payload
inline constexpr std::uint8_t kAshtMagic[4] = {0x41, 0x53, 0x48, 0x54};
inline constexpr std::uint16_t kAshtVersion = 1;
inline constexpr std::uint8_t kAshtDtypeF32 = 0;

std::vector<std::byte> encode_tensor(const FeatureTensor& x);

/// Throws Error with bad_magic / bad_version / bad_dtype / bad_dims for a bad
/// header, truncated when the header or a payload float is cut short, and
/// length_mismatch when the whole-float count disagrees with the dims.
FeatureTensor decode_tensor(std::span<const std::byte> bytes);

void write_tensor(const FeatureTensor& x, const std::filesystem::path& path);
FeatureTensor read_tensor(const std::filesystem::path& path);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace ash
