#include "gqads/protocol.hpp"

#include <algorithm>
#include <sstream>

#include <openssl/evp.h>

#include "gqads/errors.hpp"

namespace gqads {

namespace {

enum Stream : std::uint64_t { kStreamK1 = 1, kStreamK2 = 2, kStreamBobSelect = 3, kStreamCharlieSelect = 4 };

MacConfig synced_mac(const ValidatedParams& params, MacConfig cfg) {
  if (params.mode() != Mode::LegacyQaDS) cfg.tag_len = params.tag_len();
  return cfg;
}

PartyState make_party(Role role, const ValidatedParams& params, const MacConfig& cfg, const Seed& seed) {
  PartyState p;
  p.role = role;
  p.params = params;
  p.mac = cfg;
  p.keys.role = role;
  p.rng_seed = seed;
  return p;
}

}  // namespace

std::string signed_header(const ValidatedParams& params, const MacConfig& cfg) {
  std::ostringstream os;
  os << "GQADS1 " << to_string(params.mode()) << ' ' << params.n() << ' ' << params.r() << ' '
     << params.S() << ' ' << params.V_B() << ' ' << params.V_C() << ' ' << suite_string(cfg);
  return os.str();
}

Fingerprint params_fingerprint(const ValidatedParams& params, const MacConfig& cfg) {
  const std::string header = signed_header(params, synced_mac(params, cfg));
  Fingerprint fp{};
  unsigned int len = 0;
  if (EVP_Digest(header.data(), header.size(), fp.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidParams, "SHA-256 failure");
  }
  return fp;
}

ConcatenatedKey PartyState::concatenated_key() const {
  const std::size_t n = params.n();
  ConcatenatedKey k;
  k.blocks.resize(2 * n);
  switch (role) {
    case Role::Alice:
      for (std::size_t i = 0; i < n; ++i) {
        k.blocks[i] = keys.own_keys.at(0).block(i);
        k.blocks[n + i] = keys.own_keys.at(1).block(i);
      }
      break;
    case Role::Bob:
      for (std::size_t i = 0; i < n; ++i) k.blocks[i] = keys.own_keys.at(0).block(i);
      for (const auto& [j, block] : keys.received_blocks) k.blocks[n + j] = block;
      break;
    case Role::Charlie:
      for (std::size_t i = 0; i < n; ++i) k.blocks[n + i] = keys.own_keys.at(0).block(i);
      for (const auto& [j, block] : keys.received_blocks) k.blocks[j] = block;
      break;
  }
  return k;
}

std::vector<std::size_t> PartyState::checkable() const {
  const std::size_t n = params.n();
  std::vector<std::size_t> out;
  switch (role) {
    case Role::Alice:
      for (std::size_t i = 0; i < 2 * n; ++i) out.push_back(i);
      break;
    case Role::Bob:
      for (std::size_t i = 0; i < n; ++i) out.push_back(i);
      for (const auto& entry : keys.received_blocks) out.push_back(n + entry.first);
      break;
    case Role::Charlie:
      for (const auto& entry : keys.received_blocks) out.push_back(entry.first);
      for (std::size_t i = 0; i < n; ++i) out.push_back(n + i);
      break;
  }
  return out;
}

Parties distribute_with_keys(const Key& k1, const Key& k2, const Seed& seed, const ValidatedParams& params,
                             const MacConfig& cfg_in) {
  const std::uint32_t n = params.n();
  const std::uint32_t r = params.r();
  for (const Key* k : {&k1, &k2}) {
    if (k->n() != n || k->r() != r) throw Error(ErrorCode::InvalidParams, "key shape differs from (n, r)");
  }
  const MacConfig cfg = synced_mac(params, cfg_in);

  Parties parties{make_party(Role::Alice, params, cfg, seed), make_party(Role::Bob, params, cfg, seed),
                  make_party(Role::Charlie, params, cfg, seed)};
  parties.alice.keys.own_keys = {k1, k2};
  parties.bob.keys.own_keys = {k1};
  parties.charlie.keys.own_keys = {k2};

  // Selection streams are separate from the key streams, so nothing Alice
  // holds determines which blocks the verifiers exchange.
  Csprng bob_rng(seed, kStreamBobSelect);
  Csprng charlie_rng(seed, kStreamCharlieSelect);
  parties.bob.shared_out_indices = sample_without_replacement(bob_rng, n, params.S());
  parties.charlie.shared_out_indices = sample_without_replacement(charlie_rng, n, params.S());

  for (std::size_t j : parties.bob.shared_out_indices) parties.charlie.keys.received_blocks.emplace(j, k1.block(j));
  for (std::size_t j : parties.charlie.shared_out_indices) parties.bob.keys.received_blocks.emplace(j, k2.block(j));
  return parties;
}

Parties distribute(const Seed& seed, const ValidatedParams& params, const MacConfig& cfg) {
  const std::size_t nbits = std::size_t{params.n()} * params.r();
  Csprng k1_rng(seed, kStreamK1);
  Csprng k2_rng(seed, kStreamK2);
  Key k1(params.n(), params.r(), k1_rng.bits(nbits));
  Key k2(params.n(), params.r(), k2_rng.bits(nbits));
  return distribute_with_keys(k1, k2, seed, params, cfg);
}

BlockTagger::BlockTagger(const ValidatedParams& params, const MacConfig& cfg, std::span<const std::uint8_t> message)
    : params_(params), cfg_(cfg), message_(message) {
  if (params.mode() == Mode::LegacyQaDS) digest_ = legacy_digest(message, 2 * params.L());
}

std::uint32_t BlockTagger::tag_len() const noexcept {
  return params_.mode() == Mode::LegacyQaDS ? static_cast<std::uint32_t>(2 * params_.L()) : params_.tag_len();
}

Bits BlockTagger::tag(std::size_t index, const Bits& key_block) const {
  if (key_block.size() != params_.r()) throw Error(ErrorCode::LengthMismatch, "key block is not r bits");
  if (params_.mode() == Mode::LegacyQaDS) {
    const Bits cipher_block = otp(digest_.slice(index * params_.r(), params_.r()), key_block);
    return legacy_digest(cipher_block.bytes(), 2 * params_.L());
  }
  return mac(message_, key_block, cfg_);
}

Signature sign_blocks(const ValidatedParams& params, const MacConfig& cfg_in, std::span<const std::uint8_t> message,
                      const ConcatenatedKey& key) {
  const std::size_t blocks = 2 * std::size_t{params.n()};
  if (key.blocks.size() != blocks || key.known_count() != blocks) {
    throw Error(ErrorCode::KeyTooShort, "signing needs all 2n key blocks");
  }
  const MacConfig cfg = synced_mac(params, cfg_in);
  const BlockTagger tagger(params, cfg, message);
  Signature sig;
  sig.mode = params.mode();
  sig.tag_len = tagger.tag_len();
  sig.tags.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) sig.tags.push_back(tagger.tag(i, *key.blocks[i]));
  return sig;
}

SignedMessage sign(const PartyState& alice, std::span<const std::uint8_t> message) {
  if (alice.role != Role::Alice || alice.keys.own_keys.size() != 2) {
    throw Error(ErrorCode::InvalidParams, "only Alice, holding k1 and k2, can sign");
  }
  SignedMessage sm;
  sm.message.assign(message.begin(), message.end());
  sm.signature = sign_blocks(alice.params, alice.mac, message, alice.concatenated_key());
  sm.params_fingerprint = params_fingerprint(alice.params, alice.mac);
  return sm;
}

std::uint64_t expected_signature_bits(const ValidatedParams& params, const MacConfig& cfg) {
  const std::uint64_t blocks = 2 * std::uint64_t{params.n()};
  if (params.mode() == Mode::LegacyQaDS) return blocks * 2 * params.L();
  return blocks * synced_mac(params, cfg).tag_len;
}

VerificationReport verify(const PartyState& verifier, const SignedMessage& sm) {
  if (verifier.role == Role::Alice) throw Error(ErrorCode::InvalidParams, "verifier must be Bob or Charlie");
  if (sm.params_fingerprint != params_fingerprint(verifier.params, verifier.mac)) {
    throw Error(ErrorCode::FingerprintMismatch, "signed message was produced under different parameters");
  }
  const auto& params = verifier.params;
  if (sm.signature.tags.size() != 2 * std::size_t{params.n()}) {
    throw Error(ErrorCode::LengthMismatch, "signature does not hold 2n tags");
  }
  const ConcatenatedKey key = verifier.concatenated_key();
  const BlockTagger tagger(params, verifier.mac, sm.message);

  VerificationReport report;
  report.checkable = verifier.checkable();
  report.matches.reserve(report.checkable.size());
  for (std::size_t idx : report.checkable) {
    const bool ok = tagger.tag(idx, *key.blocks[idx]) == sm.signature.tags[idx];
    report.matches.push_back(ok);
    report.match_count += ok ? 1 : 0;
  }
  report.threshold = verifier.role == Role::Bob ? params.V_B() : params.V_C();
  report.outcome = report.match_count >= report.threshold ? Outcome::Accept : Outcome::Reject;
  return report;
}

TranscriptRecord deliver(const PartyState& bob, const PartyState& charlie, const SignedMessage& sm,
                         const MessagingOptions& options) {
  TranscriptRecord t;
  t.mode = bob.params.mode();
  t.signature_bits = sm.signature.bit_length();

  if (t.mode == Mode::DeterministicGQaDS) {
    // Bob forwards before verifying; his acceptance waits on Charlie's.
    t.forwarded = true;
    t.bob_contingent_on_charlie = true;
    t.bob_report = verify(bob, sm);
    const bool bob_local = t.bob_report->outcome == Outcome::Accept;
    if (!options.charlie_online) {
      t.charlie_outcome = Outcome::Pending;
      t.bob_outcome = bob_local ? Outcome::Pending : Outcome::Reject;
      return t;
    }
    t.charlie_report = verify(charlie, sm);
    t.charlie_outcome = t.charlie_report->outcome;
    t.bob_outcome = bob_local && t.charlie_outcome == Outcome::Accept ? Outcome::Accept : Outcome::Reject;
    return t;
  }

  t.bob_report = verify(bob, sm);
  t.bob_outcome = t.bob_report->outcome;
  if (t.bob_outcome != Outcome::Accept) return t;
  t.forwarded = true;
  if (!options.charlie_online) {
    t.charlie_outcome = Outcome::Pending;
    return t;
  }
  t.charlie_report = verify(charlie, sm);
  t.charlie_outcome = t.charlie_report->outcome;
  return t;
}

TranscriptRecord run_messaging(const PartyState& alice, const PartyState& bob, const PartyState& charlie,
                               std::span<const std::uint8_t> message, const MessagingOptions& options) {
  return deliver(bob, charlie, sign(alice, message), options);
}

Bytes encode_signed_message(const SignedMessage& sm, const ValidatedParams& params, const MacConfig& cfg) {
  const MacConfig synced = synced_mac(params, cfg);
  if (sm.params_fingerprint != params_fingerprint(params, synced)) {
    throw Error(ErrorCode::FingerprintMismatch, "signed message does not belong to these parameters");
  }
  Bits all;
  for (const auto& t : sm.signature.tags) all.append(t);
  std::string head = signed_header(params, synced) + "\n" + to_hex(all.bytes()) + "\n";
  Bytes out(head.begin(), head.end());
  out.insert(out.end(), sm.message.begin(), sm.message.end());
  return out;
}

DecodedSignedMessage decode_signed_message(std::span<const std::uint8_t> data) {
  const auto line_end = [&](std::size_t from) {
    const auto it = std::find(data.begin() + static_cast<std::ptrdiff_t>(from), data.end(), '\n');
    if (it == data.end()) throw Error(ErrorCode::ParseError, "truncated signed message");
    return static_cast<std::size_t>(it - data.begin());
  };
  const std::size_t h_end = line_end(0);
  const std::size_t s_end = line_end(h_end + 1);
  std::istringstream header(std::string(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(h_end)));

  std::string magic, mode, suite;
  ProtocolParams p;
  if (!(header >> magic >> mode >> p.n >> p.r >> p.S >> p.V_B >> p.V_C >> suite) || magic != "GQADS1") {
    throw Error(ErrorCode::ParseError, "malformed GQADS1 header");
  }
  p.mode = parse_mode(mode);
  MacConfig cfg = parse_suite(suite);
  p.tag_len = cfg.tag_len;
  const ValidatedParams params = validate_params(p);

  const std::string hex(data.begin() + static_cast<std::ptrdiff_t>(h_end + 1),
                        data.begin() + static_cast<std::ptrdiff_t>(s_end));
  const std::uint64_t tag_len = params.mode() == Mode::LegacyQaDS ? 2 * params.L() : cfg.tag_len;
  const std::uint64_t total = 2 * std::uint64_t{params.n()} * tag_len;
  Bytes raw = from_hex(hex);
  if (raw.size() != (total + 7) / 8) throw Error(ErrorCode::ParseError, "signature length does not match header");
  const Bits all(std::move(raw), total);

  DecodedSignedMessage out{params, cfg, {}};
  auto& sm = out.signed_message;
  sm.signature.mode = params.mode();
  sm.signature.tag_len = static_cast<std::uint32_t>(tag_len);
  for (std::uint64_t i = 0; i < 2 * std::uint64_t{params.n()}; ++i) {
    sm.signature.tags.push_back(all.slice(i * tag_len, tag_len));
  }
  sm.message.assign(data.begin() + static_cast<std::ptrdiff_t>(s_end + 1), data.end());
  sm.params_fingerprint = params_fingerprint(params, cfg);
  return out;
}

}  // namespace gqads
