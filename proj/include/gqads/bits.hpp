#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gqads {

using Bytes = std::vector<std::uint8_t>;

/// Fixed-length bit string. Bit i lives in byte i/8 at position 7 - i%8
/// (MSB-first); padding bits in the last byte are always zero.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t nbits);
  Bits(Bytes bytes, std::size_t nbits);

  static Bits from_bytes(std::span<const std::uint8_t> bytes);

  std::size_t size() const noexcept { return nbits_; }
  bool empty() const noexcept { return nbits_ == 0; }
  const Bytes& bytes() const noexcept { return bytes_; }

  bool get(std::size_t i) const;
  void set(std::size_t i, bool v);
  void flip(std::size_t i);

  /// Copy of bits [offset, offset + len).
  Bits slice(std::size_t offset, std::size_t len) const;
  void append(const Bits& other);

  std::size_t popcount() const noexcept;

  friend bool operator==(const Bits&, const Bits&) = default;

 private:
  void clear_padding() noexcept;

  Bytes bytes_;
  std::size_t nbits_ = 0;
};

Bits operator^(const Bits& a, const Bits& b);

std::size_t hamming_distance(const Bits& a, const Bits& b);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

}  // namespace gqads
