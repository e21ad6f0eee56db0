#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gqads/core_types.hpp"
#include "gqads/mac.hpp"
#include "gqads/random.hpp"

namespace gqads {

using Fingerprint = std::array<std::uint8_t, 32>;

/// SHA-256 over the canonical "GQADS1 ..." header of (params, cfg).
Fingerprint params_fingerprint(const ValidatedParams& params, const MacConfig& cfg);
std::string signed_header(const ValidatedParams& params, const MacConfig& cfg);

struct PartyState {
  Role role = Role::Alice;
  ValidatedParams params;
  MacConfig mac;
  KeyMaterial keys;
  std::vector<std::size_t> shared_out_indices;  // own-key blocks sent to the other verifier
  Seed rng_seed{};

  /// This party's view of k_A = k1 || k2.
  ConcatenatedKey concatenated_key() const;
  /// Indices into k_A this party can recompute (n + S for verifiers, 2n for Alice).
  std::vector<std::size_t> checkable() const;
};

struct Parties {
  PartyState alice;
  PartyState bob;
  PartyState charlie;
};

/// Generates k1 and k2 from the seed and runs the verifier block exchange.
Parties distribute(const Seed& seed, const ValidatedParams& params, const MacConfig& cfg);
/// Block exchange over externally supplied keys (e.g. loaded from key files).
Parties distribute_with_keys(const Key& k1, const Key& k2, const Seed& seed,
                             const ValidatedParams& params, const MacConfig& cfg);

/// Computes per-block tags for one message. In legacy mode the message digest
/// is computed once and each tag is the 2L-bit hash of (digest XOR key) block i.
class BlockTagger {
 public:
  BlockTagger(const ValidatedParams& params, const MacConfig& cfg, std::span<const std::uint8_t> message);
  Bits tag(std::size_t index, const Bits& key_block) const;
  std::uint32_t tag_len() const noexcept;

 private:
  const ValidatedParams& params_;
  const MacConfig& cfg_;
  std::span<const std::uint8_t> message_;
  Bits digest_;
};

struct SignedMessage {
  Bytes message;
  Signature signature;
  Fingerprint params_fingerprint{};
};

/// Signs with a full 2n-block key; every block must be present.
Signature sign_blocks(const ValidatedParams& params, const MacConfig& cfg,
                      std::span<const std::uint8_t> message, const ConcatenatedKey& key);
SignedMessage sign(const PartyState& alice, std::span<const std::uint8_t> message);

/// Expected signature size in bits for the parameter set.
std::uint64_t expected_signature_bits(const ValidatedParams& params, const MacConfig& cfg);

/// Recomputes the tags of every checkable block and compares against the
/// threshold (V_B for Bob, V_C for Charlie). Throws FingerprintMismatch.
VerificationReport verify(const PartyState& verifier, const SignedMessage& sm);

struct MessagingOptions {
  bool charlie_online = true;
};

struct TranscriptRecord {
  Mode mode = Mode::GQaDS;
  std::optional<VerificationReport> bob_report;
  std::optional<VerificationReport> charlie_report;
  Outcome bob_outcome = Outcome::NotReached;
  Outcome charlie_outcome = Outcome::NotReached;
  bool forwarded = false;
  bool bob_contingent_on_charlie = false;
  std::uint64_t signature_bits = 0;
};

/// Delivers an already signed message to Bob (and on to Charlie).
TranscriptRecord deliver(const PartyState& bob, const PartyState& charlie, const SignedMessage& sm,
                         const MessagingOptions& options = {});
TranscriptRecord run_messaging(const PartyState& alice, const PartyState& bob, const PartyState& charlie,
                               std::span<const std::uint8_t> message, const MessagingOptions& options = {});

struct DecodedSignedMessage {
  ValidatedParams params;
  MacConfig mac;
  SignedMessage signed_message;
};

/// "GQADS1 <mode> <n> <r> <S> <V_B> <V_C> <suite>\n<hex signature>\n<message bytes>"
Bytes encode_signed_message(const SignedMessage& sm, const ValidatedParams& params, const MacConfig& cfg);
DecodedSignedMessage decode_signed_message(std::span<const std::uint8_t> data);

}  // namespace gqads
