#include "gqads/random.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include <openssl/evp.h>

#include "gqads/errors.hpp"

namespace gqads {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

void store_le64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

Seed seed_from_u64(std::uint64_t value) {
  Seed s{};
  for (int i = 0; i < 8; ++i) s[31 - i] = static_cast<std::uint8_t>(value >> (8 * i));
  return s;
}

Seed parse_seed(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 64) {
    throw Error(ErrorCode::ParseError, "seed must be 1 to 64 hex digits");
  }
  std::string padded(64 - hex.size(), '0');
  padded.append(hex);
  const Bytes bytes = from_hex(padded);
  Seed s{};
  std::copy(bytes.begin(), bytes.end(), s.begin());
  return s;
}

std::string seed_to_hex(const Seed& seed) { return to_hex(seed); }

Seed derive_trial_seed(const Seed& master, std::uint64_t trial_index) {
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ecb(), nullptr, master.data(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidParams, "AES-256 initialisation failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  std::uint8_t in[32] = {};
  store_le64(in, trial_index);
  store_le64(in + 16, trial_index);
  in[24] = 1;
  Seed out{};
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, in, sizeof in) != 1 || len != 32) {
    throw Error(ErrorCode::InvalidParams, "AES-256 encryption failed");
  }
  return out;
}

struct Csprng::Cipher {
  CipherCtxPtr ctx;
};

Csprng::Csprng(const Seed& seed, std::uint64_t stream_id) : cipher_(std::make_unique<Cipher>()) {
  cipher_->ctx.reset(EVP_CIPHER_CTX_new());
  // IV layout for EVP_chacha20: 4-byte block counter then 12-byte nonce.
  std::uint8_t iv[16] = {};
  store_le64(iv + 4, stream_id);
  if (!cipher_->ctx ||
      EVP_EncryptInit_ex(cipher_->ctx.get(), EVP_chacha20(), nullptr, seed.data(), iv) != 1) {
    throw Error(ErrorCode::InvalidParams, "ChaCha20 initialisation failed");
  }
}

Csprng::~Csprng() = default;
Csprng::Csprng(Csprng&&) noexcept = default;
Csprng& Csprng::operator=(Csprng&&) noexcept = default;

void Csprng::refill() {
  static constexpr std::uint8_t kZeros[256] = {};
  int len = 0;
  if (EVP_EncryptUpdate(cipher_->ctx.get(), buf_.data(), &len, kZeros, sizeof kZeros) != 1 ||
      len != static_cast<int>(buf_.size())) {
    throw Error(ErrorCode::InvalidParams, "ChaCha20 keystream failure");
  }
  pos_ = 0;
}

void Csprng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buf_.size()) refill();
    const std::size_t take = std::min(out.size() - done, buf_.size() - pos_);
    std::memcpy(out.data() + done, buf_.data() + pos_, take);
    pos_ += take;
    done += take;
  }
}

Bits Csprng::bits(std::size_t nbits) {
  Bytes bytes((nbits + 7) / 8);
  fill(bytes);
  return Bits(std::move(bytes), nbits);
}

std::uint64_t Csprng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t Csprng::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::DomainError, "uniform bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % bound;
  }
}

std::vector<std::size_t> sample_without_replacement(Csprng& rng, std::size_t n, std::size_t count) {
  if (count > n) throw Error(ErrorCode::DomainError, "sample larger than population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::uint32_t> random_permutation(Csprng& rng, std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace gqads
