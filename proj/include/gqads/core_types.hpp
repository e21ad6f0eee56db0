#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gqads/bits.hpp"
#include "gqads/errors.hpp"

namespace gqads {

enum class Mode { LegacyQaDS, GQaDS, DeterministicGQaDS };
enum class Role { Alice, Bob, Charlie };
enum class Outcome { Accept, Reject, Pending, NotReached };

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(Role role) noexcept;
std::string_view to_string(Outcome outcome) noexcept;
/// Accepts "legacy", "gqads", "deterministic".
Mode parse_mode(std::string_view text);

/// Reduced non-negative fraction with small integer terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t num, std::int64_t den);
  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) noexcept {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }
};

struct ProtocolParams {
  std::uint32_t n = 0;        // blocks per QKD key
  std::uint32_t r = 0;        // block length in bits
  std::uint32_t S = 0;        // blocks each verifier shares with the other
  std::int64_t V_B = 0;       // Bob's threshold over his n+S checkable blocks
  std::int64_t V_C = 0;       // Charlie's threshold over his n+S checkable blocks
  Mode mode = Mode::GQaDS;
  std::uint32_t tag_len = 128;  // MAC tag bits; ignored by LegacyQaDS

  friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

/// Parameters that passed validation, with the derived quantities.
class ValidatedParams {
 public:
  const ProtocolParams& params() const noexcept { return p_; }
  std::uint32_t n() const noexcept { return p_.n; }
  std::uint32_t r() const noexcept { return p_.r; }
  std::uint32_t S() const noexcept { return p_.S; }
  std::int64_t V_B() const noexcept { return p_.V_B; }
  std::int64_t V_C() const noexcept { return p_.V_C; }
  Mode mode() const noexcept { return p_.mode; }
  std::uint32_t tag_len() const noexcept { return p_.tag_len; }

  std::uint64_t L() const noexcept { return std::uint64_t{p_.n} * p_.r; }
  Fraction beta() const noexcept { return beta_; }
  /// (V_C - 2S) / (n - S); always defined because validation requires S < n.
  Fraction gamma() const noexcept { return gamma_; }
  /// Number of Charlie-private blocks that must match: V_C - 2S.
  std::int64_t private_needed() const noexcept { return p_.V_C - 2 * std::int64_t{p_.S}; }
  std::int64_t checkable() const noexcept { return std::int64_t{p_.n} + p_.S; }

  friend bool operator==(const ValidatedParams&, const ValidatedParams&) = default;

 private:
  friend ValidatedParams validate_params(const ProtocolParams& p);
  ProtocolParams p_;
  Fraction beta_;
  Fraction gamma_;
};

ValidatedParams validate_params(const ProtocolParams& p);

/// A QKD key of n blocks of r bits each.
class Key {
 public:
  Key() = default;
  Key(std::uint32_t n, std::uint32_t r, Bits bits);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t r() const noexcept { return r_; }
  const Bits& bits() const noexcept { return bits_; }
  Bits block(std::size_t i) const;

  friend bool operator==(const Key&, const Key&) = default;

 private:
  std::uint32_t n_ = 0;
  std::uint32_t r_ = 0;
  Bits bits_;
};

/// A party's view of key material. Alice owns {k1, k2}; Bob owns {k1} and
/// has received S blocks of k2; Charlie owns {k2} and received S blocks of k1.
struct KeyMaterial {
  Role role = Role::Alice;
  std::vector<Key> own_keys;
  std::map<std::size_t, Bits> received_blocks;

  friend bool operator==(const KeyMaterial&, const KeyMaterial&) = default;
};

/// The 2n-block key k_A = k1 || k2 as seen by one party; unknown blocks are empty.
struct ConcatenatedKey {
  std::vector<std::optional<Bits>> blocks;

  std::size_t known_count() const noexcept;
  friend bool operator==(const ConcatenatedKey&, const ConcatenatedKey&) = default;
};

struct Signature {
  std::vector<Bits> tags;  // 2n tags, one per block of k_A
  std::uint32_t tag_len = 0;
  Mode mode = Mode::GQaDS;

  std::uint64_t bit_length() const noexcept;
  friend bool operator==(const Signature&, const Signature&) = default;
};

struct VerificationReport {
  std::vector<std::size_t> checkable;  // sorted block indices into k_A
  std::vector<bool> matches;           // aligned with `checkable`
  std::int64_t match_count = 0;
  std::int64_t threshold = 0;
  Outcome outcome = Outcome::Reject;
};

}  // namespace gqads
