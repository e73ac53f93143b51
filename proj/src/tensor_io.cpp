#include "ash/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ash/error.hpp"

namespace ash {
namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::byte>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(std::byte{v}); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  std::vector<std::byte>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }

  std::uint8_t u8() {
    need(1);
    return std::to_integer<std::uint8_t>(in_[pos_++]);
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8() << (8 * i));
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(Errc::truncated, "unexpected end of data");
  }

  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_tensor(const FeatureTensor& x) {
  std::vector<std::byte> out;
  out.reserve(8 + 4 * x.dims().size() + 4 * x.size());
  ByteWriter w(out);
  for (auto b : kAshtMagic) w.u8(b);
  w.u16(kAshtVersion);
  w.u8(kAshtDtypeF32);
  w.u8(static_cast<std::uint8_t>(x.dims().size()));
  for (auto d : x.dims()) w.u32(d);
  for (auto v : x.values()) w.f32(v);
  return out;
}

FeatureTensor decode_tensor(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 ||
      std::memcmp(bytes.data(), kAshtMagic, sizeof(kAshtMagic)) != 0) {
    throw Error(Errc::bad_magic, "expected \"ASHT\"");
  }
  for (int i = 0; i < 4; ++i) r.u8();
  const auto version = r.u16();
  if (version != kAshtVersion) {
    throw Error(Errc::bad_version, "file version " + std::to_string(version));
  }
  const auto dtype = r.u8();
  if (dtype != kAshtDtypeF32) throw Error(Errc::bad_dtype, "dtype " + std::to_string(dtype));
  const auto ndim = r.u8();
  std::vector<std::uint32_t> dims(ndim);
  for (auto& d : dims) {
    d = r.u32();
    if (d == 0) throw Error(Errc::bad_dims, "zero extent");
  }

  if (r.remaining() % 4 != 0) throw Error(Errc::truncated, "partial float in payload");
  const std::size_t payload = r.remaining() / 4;
  const std::size_t expected = element_count(dims);
  if (payload != expected) {
    throw Error(Errc::length_mismatch, "dims hold " + std::to_string(expected) +
                                           " elements, payload has " + std::to_string(payload));
  }
  std::vector<float> values(payload);
  for (auto& v : values) v = r.f32();
  return FeatureTensor(std::move(dims), std::move(values));
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_error, "short write to " + path.string());
}

void write_tensor(const FeatureTensor& x, const std::filesystem::path& path) {
  write_file_bytes(path, encode_tensor(x));
}

FeatureTensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_tensor(bytes);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace ash
