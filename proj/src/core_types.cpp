#include "gqads/core_types.hpp"

#include <numeric>
#include <sstream>

namespace gqads {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::LegacyQaDS: return "legacy";
    case Mode::GQaDS: return "gqads";
    case Mode::DeterministicGQaDS: return "deterministic";
  }
  return "unknown";
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Alice: return "alice";
    case Role::Bob: return "bob";
    case Role::Charlie: return "charlie";
  }
  return "unknown";
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Accept: return "ACC";
    case Outcome::Reject: return "REJ";
    case Outcome::Pending: return "PENDING";
    case Outcome::NotReached: return "NOT_REACHED";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "legacy") return Mode::LegacyQaDS;
  if (text == "gqads") return Mode::GQaDS;
  if (text == "deterministic") return Mode::DeterministicGQaDS;
  throw Error(ErrorCode::InvalidMode, "unknown mode '" + std::string(text) + "'");
}

Fraction Fraction::make(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) throw Error(ErrorCode::DomainError, "fraction must be non-negative");
  const std::int64_t g = std::gcd(num, den);
  return Fraction{num / g, den / g};
}

std::string Fraction::str() const {
  std::ostringstream os;
  os << num << '/' << den;
  return os.str();
}

ValidatedParams validate_params(const ProtocolParams& p) {
  if (p.n == 0 || p.r == 0) throw Error(ErrorCode::InvalidParams, "n and r must be positive");
  if (p.S > p.n) throw Error(ErrorCode::InvalidShare, "S exceeds n");
  if (p.mode == Mode::DeterministicGQaDS && p.n != 2) {
    throw Error(ErrorCode::InvalidMode, "deterministic mode requires n = 2");
  }
  const std::int64_t n = p.n;
  const std::int64_t S = p.S;
  if (p.V_C <= 2 * S) {
    throw Error(ErrorCode::InvalidThreshold, "V_C must exceed 2S, otherwise forgery is free");
  }
  if (p.V_C > n + S) throw Error(ErrorCode::InvalidThreshold, "V_C exceeds the n+S checkable blocks");
  if (p.V_B < 0 || p.V_B > n + S) throw Error(ErrorCode::InvalidThreshold, "V_B outside [0, n+S]");
  if (p.mode == Mode::LegacyQaDS) {
    if ((2 * std::uint64_t{p.n} * p.r) % 8 != 0) {
      throw Error(ErrorCode::InvalidParams, "legacy digest length 2L must be a multiple of 8");
    }
  } else if (p.tag_len == 0 || p.tag_len > 256) {
    throw Error(ErrorCode::InvalidParams, "tag_len must be in [1, 256]");
  }

  ValidatedParams v;
  v.p_ = p;
  v.beta_ = Fraction::make(S, n);
  // V_C > 2S together with V_C <= n+S forces S < n.
  v.gamma_ = Fraction::make(p.V_C - 2 * S, n - S);
  return v;
}

Key::Key(std::uint32_t n, std::uint32_t r, Bits bits) : n_(n), r_(r), bits_(std::move(bits)) {
  if (bits_.size() != std::size_t{n} * r) {
    throw Error(ErrorCode::LengthMismatch, "key bit length differs from n*r");
  }
}

Bits Key::block(std::size_t i) const {
  if (i >= n_) throw Error(ErrorCode::DomainError, "block index out of range");
  return bits_.slice(i * r_, r_);
}

std::size_t ConcatenatedKey::known_count() const noexcept {
  std::size_t c = 0;
  for (const auto& b : blocks) c += b.has_value() ? 1 : 0;
  return c;
}

std::uint64_t Signature::bit_length() const noexcept {
  std::uint64_t total = 0;
  for (const auto& t : tags) total += t.size();
  return total;
}

}  // namespace gqads
