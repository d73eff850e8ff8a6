#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace arom::detail {

/// Little-endian byte sink shared by the on-disk container formats.
class ByteWriter {
public:
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void bytes(std::string_view raw);
  /// Writes `text` zero-padded to exactly `width` bytes.
  void fixed_string(std::string_view text, std::size_t width);

  const std::string& buffer() const noexcept { return buf_; }
  std::string take() noexcept { return std::move(buf_); }

private:
  std::string buf_;
};

/// Little-endian cursor over an in-memory file image. Every read past the end
/// throws Error{truncated}.
class ByteReader {
public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::string_view bytes(std::size_t n);
  /// Reads a zero-padded field and strips the padding.
  std::string fixed_string(std::size_t width);

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
  void need(std::size_t n) const;

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

}  // namespace arom::detail
