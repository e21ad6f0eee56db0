#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gqads/bits.hpp"

namespace gqads {

using Seed = std::array<std::uint8_t, 32>;

/// The 256-bit big-endian number `value`; agrees with parse_seed on its hex.
Seed seed_from_u64(std::uint64_t value);
/// Parses up to 64 hex digits; shorter strings are left-padded with zeros.
Seed parse_seed(std::string_view hex);
std::string seed_to_hex(const Seed& seed);

/// Per-trial seed: AES-256 keyed by the master seed applied to (index, 0) and
/// (index, 1). The first half is a block-cipher permutation of the index, so
/// distinct indices never collide.
Seed derive_trial_seed(const Seed& master, std::uint64_t trial_index);

/// Deterministic ChaCha20 keystream generator. Distinct stream ids give
/// independent streams under the same seed.
class Csprng {
 public:
  using result_type = std::uint64_t;

  explicit Csprng(const Seed& seed, std::uint64_t stream_id = 0);
  ~Csprng();
  Csprng(Csprng&&) noexcept;
  Csprng& operator=(Csprng&&) noexcept;
  Csprng(const Csprng&) = delete;
  Csprng& operator=(const Csprng&) = delete;

  void fill(std::span<std::uint8_t> out);
  Bits bits(std::size_t nbits);
  std::uint64_t next_u64();
  /// Uniform in [0, bound) by rejection sampling; bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  struct Cipher;
  std::unique_ptr<Cipher> cipher_;
  std::array<std::uint8_t, 256> buf_{};
  std::size_t pos_ = 256;
};

/// `count` distinct values from [0, n), chosen uniformly, returned sorted.
std::vector<std::size_t> sample_without_replacement(Csprng& rng, std::size_t n, std::size_t count);

/// Uniform random permutation of [0, n) (Fisher-Yates).
std::vector<std::uint32_t> random_permutation(Csprng& rng, std::size_t n);

}  // namespace gqads
