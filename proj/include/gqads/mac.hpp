#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "gqads/bits.hpp"

namespace gqads {

enum class PadRule { AppendOneBit, None };

/// Polynomial universal hash over Z_p. Messages are cut into chunk_bits-wide
/// little-endian chunks; with AppendOneBit each chunk (including a short final
/// one) gets a 1 bit just above its last byte, as in Poly1305.
struct UhfParams {
  mpz_class prime;
  std::uint32_t chunk_bits = 128;
  PadRule pad_rule = PadRule::AppendOneBit;

  static UhfParams poly1305();
  bool is_poly1305() const;
  /// Width of a field element in bytes.
  std::size_t element_bytes() const;
  /// Throws InvalidParams unless chunk_bits is a positive multiple of 8
  /// below the bit length of prime, and prime is (probably) prime.
  void check() const;
};

enum class MacSuite { CarterWegman, Toy };

enum class KeySplit {
  Auto,           // Poly1305 split for r = 256, PRF expansion otherwise
  Poly1305Split,  // s = clamp(first 16 bytes), PRF key = next 16 bytes; needs r >= 256
  PrfExpand,      // HMAC-SHA256(block, counter || label) expanded into (s, PRF key)
};

struct MacConfig {
  MacSuite suite = MacSuite::CarterWegman;
  UhfParams uhf = UhfParams::poly1305();
  std::string prf_id = "hmacsha256";
  std::uint32_t tag_len = 128;
  KeySplit key_split = KeySplit::Auto;

  static MacConfig carter_wegman(std::uint32_t tag_len = 128);
  /// Small-key MAC used by exhaustive forgery experiments.
  static MacConfig toy(std::uint32_t tag_len);
};

/// Short ASCII identifier carried in signature metadata, e.g.
/// "poly1305-hmacsha256/t128" or "toy-hmacsha256/t32".
std::string suite_string(const MacConfig& cfg);
MacConfig parse_suite(std::string_view suite);

constexpr std::uint32_t kPrfOutputBits = 256;
constexpr std::uint32_t kToyMaxR = 20;

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> data);

/// Horner evaluation h <- (h + m_i) * s mod p over the padded chunks.
mpz_class uhf_eval(std::span<const std::uint8_t> message, const mpz_class& secret_point,
                   const UhfParams& params);

struct SplitKey {
  mpz_class secret_point;
  std::array<std::uint8_t, 16> prf_key{};
};

/// Derives the hash point and PRF key from one key block. Throws KeyTooShort.
SplitKey split_key(const Bits& key_block, const MacConfig& cfg);

/// Standard Poly1305 clamp of a 16-byte little-endian value.
mpz_class poly1305_clamp(std::span<const std::uint8_t, 16> le_bytes);

/// tag = truncate_{tag_len}(HMAC-SHA256(prf_key, LE(uhf_eval(message, s)))).
/// With the Toy suite this forwards to toy_mac using the block length as r.
Bits mac(std::span<const std::uint8_t> message, const Bits& key_block, const MacConfig& cfg);

/// Keyed function of a key block of r <= 20 bits. The tag is tag_bits wide
/// (defaults to r). Throws RTooLarge.
Bits toy_mac(std::span<const std::uint8_t> message, const Bits& key_block, std::uint32_t r,
             std::uint32_t tag_bits = 0);

/// SHAKE256 digest of exactly out_bits bits (out_bits % 8 == 0).
Bits legacy_digest(std::span<const std::uint8_t> message, std::size_t out_bits);

/// Bitwise XOR of equal-length strings. Throws LengthMismatch.
Bits otp(const Bits& data, const Bits& key);

}  // namespace gqads
