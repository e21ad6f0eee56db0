#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "gqads/analysis.hpp"
#include "gqads/core_types.hpp"
#include "gqads/mac.hpp"
#include "gqads/protocol.hpp"
#include "gqads/random.hpp"

namespace gqads {

struct AttackOutcome {
  bool success = false;
  Outcome bob_outcome = Outcome::NotReached;
  Outcome charlie_outcome = Outcome::NotReached;
  std::uint64_t cost = 0;       // forgery: candidate block values tested
  std::uint64_t resamples = 0;  // discarded draws (accidental tag matches, repeated private blocks)
};

/// Alice flips one bit in each of e uniformly chosen blocks of k2 before
/// tagging, then runs the messaging phase. Success iff Bob accepts and
/// Charlie rejects. Throws EEqualsZero; e must not exceed n.
AttackOutcome repudiation_attack(const Seed& seed, const ValidatedParams& params, const MacConfig& cfg,
                                 std::int64_t e);

/// Bob recovers V_C - 2S of Charlie's private k2 blocks by testing candidate
/// values in a uniformly random order against Alice's authentic tags, then
/// tags a different message with every block he knows. Uses the toy MAC with
/// toy_r-bit key blocks (params.r is replaced by toy_r) and params.tag_len-bit
/// tags. Success iff Charlie accepts the forgery. Throws RTooLarge, InvalidMode.
AttackOutcome forgery_attack(const Seed& seed, const ValidatedParams& params, std::uint32_t toy_r);

/// Success probability of repudiation_attack with e corrupted blocks: the
/// number X of corrupted blocks Charlie shared with Bob is hypergeometric, Bob
/// accepts iff n + S - X >= V_B and Charlie rejects iff n + S - e < V_C.
analysis::BigRational repudiation_exact(const ValidatedParams& params, std::int64_t e);

struct AnalyticalForgery {
  analysis::BigRational expected_cost;
  analysis::BigRational p_forge;
};

/// Closed-form cost k (2^r + 1) / (n - S + 1) for block sizes out of
/// simulation reach.
AnalyticalForgery forgery_analytical(const ValidatedParams& params);

enum class AttackKind { Repudiation, ForgeryToy };

std::string_view to_string(AttackKind kind) noexcept;
/// Accepts "repudiation" and "forgery-toy".
AttackKind parse_attack(std::string_view text);

struct AttackSpec {
  AttackKind kind = AttackKind::Repudiation;
  ProtocolParams params;
  MacConfig mac = MacConfig::carter_wegman();
  std::optional<std::int64_t> errors;  // repudiation only; unset selects e* = n + S - V_C + 1
  std::uint32_t toy_r = 8;  // forgery only
};

struct CampaignResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t resamples = 0;
  analysis::BigInt cost_sum;
  analysis::BigInt cost_sq_sum;
  Fingerprint fingerprint{};

  double rate() const;
  /// Normal-approximation standard error of rate().
  double rate_stderr() const;
  analysis::BigRational mean_cost() const;
  /// Standard error of mean_cost() from the unbiased sample variance.
  double cost_stderr() const;

  friend bool operator==(const CampaignResult&, const CampaignResult&) = default;
};

struct CampaignOptions {
  unsigned threads = 1;  // 0 selects the hardware concurrency
  /// Called from the coordinating thread with the number of finished trials.
  std::function<void(std::uint64_t)> progress;
};

/// Trial i runs on derive_trial_seed(master_seed, i). Aggregates are integer
/// sums, so the result does not depend on scheduling. Throws InvalidParams
/// when trials is zero.
CampaignResult run_campaign(const AttackSpec& spec, std::uint64_t trials, const Seed& master_seed,
                            const CampaignOptions& options = {});

/// "trial_count,successes,rate,stderr,mean_cost,fingerprint"
std::string campaign_csv_header();
std::string campaign_csv_row(const CampaignResult& result);

}  // namespace gqads
