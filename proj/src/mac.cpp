#include "gqads/mac.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <memory>

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include "gqads/errors.hpp"

namespace gqads {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr u64 kLimbMask = 0x3ffffff;

class HmacSha256 {
 public:
  HmacSha256() {
    mac_ = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
    ctx_ = mac_ ? EVP_MAC_CTX_new(mac_) : nullptr;
    if (ctx_ == nullptr) throw Error(ErrorCode::InvalidParams, "HMAC unavailable");
    char digest[] = "SHA256";
    OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest, 0),
                           OSSL_PARAM_construct_end()};
    if (EVP_MAC_CTX_set_params(ctx_, params) != 1) {
      throw Error(ErrorCode::InvalidParams, "HMAC-SHA256 unavailable");
    }
  }
  ~HmacSha256() {
    EVP_MAC_CTX_free(ctx_);
    EVP_MAC_free(mac_);
  }
  HmacSha256(const HmacSha256&) = delete;
  HmacSha256& operator=(const HmacSha256&) = delete;

  std::array<std::uint8_t, 32> compute(std::span<const std::uint8_t> key,
                                       std::span<const std::uint8_t> data) {
    // HMAC zero-pads short keys, so the empty key equals the one-byte zero
    // key; EVP_MAC_init would otherwise read an empty key as "keep the old one".
    static constexpr std::uint8_t kZero = 0;
    if (key.empty()) key = std::span(&kZero, 1);
    std::array<std::uint8_t, 32> out{};
    std::size_t len = 0;
    if (EVP_MAC_init(ctx_, key.data(), key.size(), nullptr) != 1 ||
        EVP_MAC_update(ctx_, data.data(), data.size()) != 1 ||
        EVP_MAC_final(ctx_, out.data(), &len, out.size()) != 1 || len != out.size()) {
      throw Error(ErrorCode::InvalidParams, "HMAC computation failed");
    }
    return out;
  }

 private:
  EVP_MAC* mac_ = nullptr;
  EVP_MAC_CTX* ctx_ = nullptr;
};

HmacSha256& thread_hmac() {
  thread_local HmacSha256 h;
  return h;
}

mpz_class mpz_from_le(std::span<const std::uint8_t> bytes) {
  mpz_class v;
  if (!bytes.empty()) mpz_import(v.get_mpz_t(), bytes.size(), -1, 1, 0, 0, bytes.data());
  return v;
}

Bytes mpz_to_le(const mpz_class& v, std::size_t width) {
  Bytes out(width, 0);
  std::size_t count = 0;
  mpz_export(out.data(), &count, -1, 1, 0, 0, v.get_mpz_t());
  if (count > width) throw Error(ErrorCode::DomainError, "field element wider than encoding");
  return out;
}

Bits truncate_bits(std::span<const std::uint8_t> digest, std::uint32_t nbits) {
  const std::size_t nbytes = (nbits + 7) / 8;
  return Bits(Bytes(digest.begin(), digest.begin() + static_cast<std::ptrdiff_t>(nbytes)), nbits);
}

const mpz_class& poly1305_prime() {
  static const mpz_class p = (mpz_class(1) << 130) - 5;
  return p;
}

// Radix-2^26 arithmetic modulo 2^130 - 5. Works for any point below 2^130,
// clamped or not: limb products stay below 2^58.
class Poly1305Field {
 public:
  explicit Poly1305Field(const mpz_class& point) {
    const Bytes le = mpz_to_le(point, 17);
    u128 lo = 0;
    for (int i = 15; i >= 0; --i) lo = (lo << 8) | le[static_cast<std::size_t>(i)];
    const u64 top = le[16];
    r_[0] = static_cast<u64>(lo) & kLimbMask;
    r_[1] = static_cast<u64>(lo >> 26) & kLimbMask;
    r_[2] = static_cast<u64>(lo >> 52) & kLimbMask;
    r_[3] = static_cast<u64>(lo >> 78) & kLimbMask;
    r_[4] = (static_cast<u64>(lo >> 104) & 0xffffff) | ((top & 0x3) << 24);
    for (int i = 1; i < 5; ++i) s_[i] = r_[i] * 5;
  }

  mpz_class eval(std::span<const std::uint8_t> message, bool append_one) const {
    u64 h0 = 0, h1 = 0, h2 = 0, h3 = 0, h4 = 0;
    const auto [r0, r1, r2, r3, r4] = r_;
    const u64 s1 = s_[1], s2 = s_[2], s3 = s_[3], s4 = s_[4];

    for (std::size_t off = 0; off < message.size(); off += 16) {
      const std::size_t len = std::min<std::size_t>(16, message.size() - off);
      std::uint8_t chunk[17] = {};
      std::memcpy(chunk, message.data() + off, len);
      if (append_one) chunk[len] = 1;
      u128 lo = 0;
      for (int i = 15; i >= 0; --i) lo = (lo << 8) | chunk[i];
      h0 += static_cast<u64>(lo) & kLimbMask;
      h1 += static_cast<u64>(lo >> 26) & kLimbMask;
      h2 += static_cast<u64>(lo >> 52) & kLimbMask;
      h3 += static_cast<u64>(lo >> 78) & kLimbMask;
      h4 += static_cast<u64>(lo >> 104) | (static_cast<u64>(chunk[16]) << 24);

      u64 d0 = h0 * r0 + h1 * s4 + h2 * s3 + h3 * s2 + h4 * s1;
      u64 d1 = h0 * r1 + h1 * r0 + h2 * s4 + h3 * s3 + h4 * s2;
      u64 d2 = h0 * r2 + h1 * r1 + h2 * r0 + h3 * s4 + h4 * s3;
      u64 d3 = h0 * r3 + h1 * r2 + h2 * r1 + h3 * r0 + h4 * s4;
      u64 d4 = h0 * r4 + h1 * r3 + h2 * r2 + h3 * r1 + h4 * r0;

      u64 c = d0 >> 26; h0 = d0 & kLimbMask;
      d1 += c; c = d1 >> 26; h1 = d1 & kLimbMask;
      d2 += c; c = d2 >> 26; h2 = d2 & kLimbMask;
      d3 += c; c = d3 >> 26; h3 = d3 & kLimbMask;
      d4 += c; c = d4 >> 26; h4 = d4 & kLimbMask;
      h0 += c * 5; c = h0 >> 26; h0 &= kLimbMask;
      h1 += c;
    }

    // Full carry, then subtract p once if h >= p.
    u64 c = h1 >> 26; h1 &= kLimbMask;
    h2 += c; c = h2 >> 26; h2 &= kLimbMask;
    h3 += c; c = h3 >> 26; h3 &= kLimbMask;
    h4 += c; c = h4 >> 26; h4 &= kLimbMask;
    h0 += c * 5; c = h0 >> 26; h0 &= kLimbMask;
    h1 += c;

    u64 g0 = h0 + 5; c = g0 >> 26; g0 &= kLimbMask;
    u64 g1 = h1 + c; c = g1 >> 26; g1 &= kLimbMask;
    u64 g2 = h2 + c; c = g2 >> 26; g2 &= kLimbMask;
    u64 g3 = h3 + c; c = g3 >> 26; g3 &= kLimbMask;
    u64 g4 = h4 + c;
    if (g4 >= (u64{1} << 26)) {
      h0 = g0; h1 = g1; h2 = g2; h3 = g3; h4 = g4 - (u64{1} << 26);
    }

    const u128 lo = static_cast<u128>(h0) + (static_cast<u128>(h1) << 26) +
                    (static_cast<u128>(h2) << 52) + (static_cast<u128>(h3) << 78) +
                    (static_cast<u128>(h4) << 104);
    const u64 hi = h4 >> 24;
    std::uint8_t out[17];
    for (int i = 0; i < 16; ++i) out[i] = static_cast<std::uint8_t>(lo >> (8 * i));
    out[16] = static_cast<std::uint8_t>(hi);
    return mpz_from_le(out);
  }

 private:
  u64 r_[5] = {};
  u64 s_[5] = {};
};

mpz_class uhf_eval_generic(std::span<const std::uint8_t> message, const mpz_class& s,
                           const UhfParams& params) {
  const std::size_t chunk_bytes = params.chunk_bits / 8;
  mpz_class h = 0;
  for (std::size_t off = 0; off < message.size(); off += chunk_bytes) {
    const std::size_t len = std::min(chunk_bytes, message.size() - off);
    mpz_class m = mpz_from_le(message.subspan(off, len));
    if (params.pad_rule == PadRule::AppendOneBit) m += mpz_class(1) << (8 * len);
    h = ((h + m) * s) % params.prime;
  }
  return h;
}

std::array<std::uint8_t, 32> split_material(const Bits& key_block, std::uint32_t counter) {
  static constexpr char kLabel[] = "gqads-key-split";
  Bytes data(kLabel, kLabel + sizeof kLabel - 1);
  for (int i = 0; i < 4; ++i) data.push_back(static_cast<std::uint8_t>(key_block.size() >> (8 * i)));
  for (int i = 0; i < 4; ++i) data.push_back(static_cast<std::uint8_t>(counter >> (8 * i)));
  return thread_hmac().compute(key_block.bytes(), data);
}

}  // namespace

UhfParams UhfParams::poly1305() { return UhfParams{poly1305_prime(), 128, PadRule::AppendOneBit}; }

bool UhfParams::is_poly1305() const { return chunk_bits == 128 && prime == poly1305_prime(); }

std::size_t UhfParams::element_bytes() const { return (mpz_sizeinbase(prime.get_mpz_t(), 2) + 7) / 8; }

void UhfParams::check() const {
  if (prime < 3 || mpz_probab_prime_p(prime.get_mpz_t(), 30) == 0) {
    throw Error(ErrorCode::InvalidParams, "UHF modulus is not prime");
  }
  if (chunk_bits == 0 || chunk_bits % 8 != 0 || chunk_bits >= mpz_sizeinbase(prime.get_mpz_t(), 2)) {
    throw Error(ErrorCode::InvalidParams, "chunk_bits must be a multiple of 8 below the prime width");
  }
}

MacConfig MacConfig::carter_wegman(std::uint32_t tag_len) {
  MacConfig cfg;
  cfg.tag_len = tag_len;
  return cfg;
}

MacConfig MacConfig::toy(std::uint32_t tag_len) {
  MacConfig cfg;
  cfg.suite = MacSuite::Toy;
  cfg.tag_len = tag_len;
  return cfg;
}

std::string suite_string(const MacConfig& cfg) {
  std::string out;
  if (cfg.suite == MacSuite::Toy) {
    out = "toy";
  } else if (cfg.uhf.is_poly1305() && cfg.uhf.pad_rule == PadRule::AppendOneBit) {
    out = "poly1305";
  } else {
    out = "poly:p" + cfg.uhf.prime.get_str(16) + ":c" + std::to_string(cfg.uhf.chunk_bits) +
          (cfg.uhf.pad_rule == PadRule::AppendOneBit ? ":pad1" : ":pad0");
  }
  out += "-" + cfg.prf_id + "/t" + std::to_string(cfg.tag_len);
  if (cfg.key_split == KeySplit::Poly1305Split) out += "/kpoly1305";
  if (cfg.key_split == KeySplit::PrfExpand) out += "/kexpand";
  return out;
}

MacConfig parse_suite(std::string_view suite) {
  const auto fail = [&] { return Error(ErrorCode::ParseError, "bad MAC suite '" + std::string(suite) + "'"); };
  MacConfig cfg;
  const auto dash = suite.find('-');
  const auto slash = suite.find("/t");
  if (dash == std::string_view::npos || slash == std::string_view::npos || slash < dash) throw fail();
  const std::string_view uhf = suite.substr(0, dash);
  cfg.prf_id = std::string(suite.substr(dash + 1, slash - dash - 1));
  if (cfg.prf_id != "hmacsha256") throw fail();

  std::string_view rest = suite.substr(slash + 2);
  const auto ksep = rest.find("/k");
  std::string_view tag = rest.substr(0, ksep);
  if (ksep != std::string_view::npos) {
    const std::string_view split = rest.substr(ksep + 2);
    if (split == "poly1305") {
      cfg.key_split = KeySplit::Poly1305Split;
    } else if (split == "expand") {
      cfg.key_split = KeySplit::PrfExpand;
    } else {
      throw fail();
    }
  }
  auto [ptr, ec] = std::from_chars(tag.data(), tag.data() + tag.size(), cfg.tag_len);
  if (ec != std::errc{} || ptr != tag.data() + tag.size() || cfg.tag_len == 0 ||
      cfg.tag_len > kPrfOutputBits) {
    throw fail();
  }

  if (uhf == "toy") {
    cfg.suite = MacSuite::Toy;
  } else if (uhf == "poly1305") {
    cfg.suite = MacSuite::CarterWegman;
  } else if (uhf.starts_with("poly:p")) {
    const auto c = uhf.find(":c");
    const auto pad = uhf.find(":pad");
    if (c == std::string_view::npos || pad == std::string_view::npos) throw fail();
    if (cfg.uhf.prime.set_str(std::string(uhf.substr(6, c - 6)), 16) != 0) throw fail();
    const std::string_view chunk = uhf.substr(c + 2, pad - c - 2);
    auto [p2, ec2] = std::from_chars(chunk.data(), chunk.data() + chunk.size(), cfg.uhf.chunk_bits);
    if (ec2 != std::errc{}) throw fail();
    const std::string_view padv = uhf.substr(pad + 4);
    if (padv == "1") {
      cfg.uhf.pad_rule = PadRule::AppendOneBit;
    } else if (padv == "0") {
      cfg.uhf.pad_rule = PadRule::None;
    } else {
      throw fail();
    }
    cfg.uhf.check();
  } else {
    throw fail();
  }
  return cfg;
}

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> data) {
  return thread_hmac().compute(key, data);
}

mpz_class uhf_eval(std::span<const std::uint8_t> message, const mpz_class& secret_point,
                   const UhfParams& params) {
  if (secret_point < 0 || secret_point >= params.prime) {
    throw Error(ErrorCode::DomainError, "secret point outside [0, prime)");
  }
  if (params.is_poly1305()) {
    return Poly1305Field(secret_point).eval(message, params.pad_rule == PadRule::AppendOneBit);
  }
  return uhf_eval_generic(message, secret_point, params);
}

mpz_class poly1305_clamp(std::span<const std::uint8_t, 16> le_bytes) {
  std::array<std::uint8_t, 16> b{};
  std::copy(le_bytes.begin(), le_bytes.end(), b.begin());
  for (int i : {3, 7, 11, 15}) b[static_cast<std::size_t>(i)] &= 0x0f;
  for (int i : {4, 8, 12}) b[static_cast<std::size_t>(i)] &= 0xfc;
  return mpz_from_le(b);
}

SplitKey split_key(const Bits& key_block, const MacConfig& cfg) {
  KeySplit rule = cfg.key_split;
  if (rule == KeySplit::Auto) rule = key_block.size() == 256 ? KeySplit::Poly1305Split : KeySplit::PrfExpand;

  std::array<std::uint8_t, 32> material{};
  if (rule == KeySplit::Poly1305Split) {
    if (key_block.size() < 256) {
      throw Error(ErrorCode::KeyTooShort, "Poly1305 split needs a 256-bit key block");
    }
    std::copy_n(key_block.bytes().begin(), 32, material.begin());
  } else {
    if (key_block.empty()) throw Error(ErrorCode::KeyTooShort, "empty key block");
    material = split_material(key_block, 0);
  }

  SplitKey out;
  const auto point_bytes = std::span<const std::uint8_t, 16>(material.data(), 16);
  if (cfg.uhf.is_poly1305()) {
    out.secret_point = poly1305_clamp(point_bytes);
  } else {
    out.secret_point = mpz_from_le(point_bytes) % cfg.uhf.prime;
  }
  std::copy_n(material.begin() + 16, 16, out.prf_key.begin());
  return out;
}

Bits mac(std::span<const std::uint8_t> message, const Bits& key_block, const MacConfig& cfg) {
  if (cfg.tag_len == 0 || cfg.tag_len > kPrfOutputBits) {
    throw Error(ErrorCode::InvalidParams, "tag_len exceeds PRF output width");
  }
  if (cfg.suite == MacSuite::Toy) {
    return toy_mac(message, key_block, static_cast<std::uint32_t>(key_block.size()), cfg.tag_len);
  }
  const SplitKey key = split_key(key_block, cfg);
  const mpz_class h = uhf_eval(message, key.secret_point, cfg.uhf);
  const Bytes encoded = mpz_to_le(h, cfg.uhf.element_bytes());
  const auto digest = thread_hmac().compute(key.prf_key, encoded);
  return truncate_bits(digest, cfg.tag_len);
}

Bits toy_mac(std::span<const std::uint8_t> message, const Bits& key_block, std::uint32_t r,
             std::uint32_t tag_bits) {
  if (r > kToyMaxR) throw Error(ErrorCode::RTooLarge, "toy MAC limited to r <= 20");
  if (r == 0 || key_block.size() != r) throw Error(ErrorCode::LengthMismatch, "toy key block must be r bits");
  if (tag_bits == 0) tag_bits = r;
  if (tag_bits > kPrfOutputBits) throw Error(ErrorCode::InvalidParams, "toy tag wider than PRF output");
  Bytes key = {'g', 'q', 'a', 'd', 's', '-', 't', 'o', 'y', static_cast<std::uint8_t>(r)};
  key.insert(key.end(), key_block.bytes().begin(), key_block.bytes().end());
  const auto digest = thread_hmac().compute(key, message);
  return truncate_bits(digest, tag_bits);
}

Bits legacy_digest(std::span<const std::uint8_t> message, std::size_t out_bits) {
  if (out_bits % 8 != 0) throw Error(ErrorCode::InvalidParams, "digest length must be a multiple of 8");
  struct MdCtx {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~MdCtx() { EVP_MD_CTX_free(ctx); }
  };
  thread_local MdCtx md;
  Bytes out(out_bits / 8);
  if (md.ctx == nullptr || EVP_DigestInit_ex(md.ctx, EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(md.ctx, message.data(), message.size()) != 1 ||
      (!out.empty() && EVP_DigestFinalXOF(md.ctx, out.data(), out.size()) != 1)) {
    throw Error(ErrorCode::InvalidParams, "SHAKE256 failure");
  }
  return Bits(std::move(out), out_bits);
}

Bits otp(const Bits& data, const Bits& key) {
  if (data.size() != key.size()) throw Error(ErrorCode::LengthMismatch, "OTP key length differs from data");
  return data ^ key;
}

}  // namespace gqads
