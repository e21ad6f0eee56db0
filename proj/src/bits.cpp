#include "gqads/bits.hpp"

#include <bit>
#include <cctype>

#include "gqads/errors.hpp"

namespace gqads {

Bits::Bits(std::size_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}

Bits::Bits(Bytes bytes, std::size_t nbits) : bytes_(std::move(bytes)), nbits_(nbits) {
  if (bytes_.size() != (nbits + 7) / 8) {
    throw Error(ErrorCode::LengthMismatch, "byte buffer does not match bit length");
  }
  clear_padding();
}

Bits Bits::from_bytes(std::span<const std::uint8_t> bytes) {
  return Bits(Bytes(bytes.begin(), bytes.end()), bytes.size() * 8);
}

bool Bits::get(std::size_t i) const {
  if (i >= nbits_) throw Error(ErrorCode::LengthMismatch, "bit index out of range");
  return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
}

void Bits::set(std::size_t i, bool v) {
  if (i >= nbits_) throw Error(ErrorCode::LengthMismatch, "bit index out of range");
  const auto mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
  if (v) {
    bytes_[i / 8] |= mask;
  } else {
    bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

void Bits::flip(std::size_t i) { set(i, !get(i)); }

Bits Bits::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > nbits_) throw Error(ErrorCode::LengthMismatch, "slice out of range");
  Bits out(len);
  if (offset % 8 == 0) {
    std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(offset / 8), out.bytes_.size(),
                out.bytes_.begin());
    out.clear_padding();
    return out;
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (get(offset + i)) out.set(i, true);
  }
  return out;
}

void Bits::append(const Bits& other) {
  if (nbits_ % 8 == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    nbits_ += other.nbits_;
    return;
  }
  const std::size_t base = nbits_;
  nbits_ += other.nbits_;
  bytes_.resize((nbits_ + 7) / 8, 0);
  for (std::size_t i = 0; i < other.nbits_; ++i) {
    if (other.get(i)) set(base + i, true);
  }
}

std::size_t Bits::popcount() const noexcept {
  std::size_t c = 0;
  for (auto b : bytes_) c += static_cast<std::size_t>(std::popcount(b));
  return c;
}

void Bits::clear_padding() noexcept {
  if (nbits_ % 8 != 0 && !bytes_.empty()) {
    bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - nbits_ % 8));
  }
}

Bits operator^(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "xor of unequal lengths");
  Bytes out(a.bytes().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.bytes()[i] ^ b.bytes()[i];
  return Bits(std::move(out), a.size());
}

std::size_t hamming_distance(const Bits& a, const Bits& b) { return (a ^ b).popcount(); }

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  Bytes out;
  out.reserve(hex.size() / 2);
  int hi = -1;
  for (char c : hex) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    const int v = hex_value(c);
    if (v < 0) throw Error(ErrorCode::ParseError, "invalid hex digit");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>((hi << 4) | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw Error(ErrorCode::ParseError, "odd number of hex digits");
  return out;
}

}  // namespace gqads
