#include "gqads/adversary.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

#include "gqads/errors.hpp"
#include "gqads/figures.hpp"

namespace gqads {

namespace {

enum Stream : std::uint64_t { kStreamAliceErrors = 5, kStreamForgerOrder = 6 };

constexpr std::string_view kAuthentic = "authentic message signed by Alice";
constexpr std::string_view kForged = "message Alice never signed";

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

Bits integer_block(std::uint64_t value, std::uint32_t r) {
  Bits b(r);
  for (std::uint32_t i = 0; i < r; ++i) {
    if ((value >> (r - 1 - i)) & 1U) b.set(i, true);
  }
  return b;
}

}  // namespace

AttackOutcome repudiation_attack(const Seed& seed, const ValidatedParams& params, const MacConfig& cfg,
                                 std::int64_t e) {
  if (e == 0) throw Error(ErrorCode::EEqualsZero, "repudiation needs at least one corrupted block");
  const std::uint32_t n = params.n();
  if (e < 0 || e > n) throw Error(ErrorCode::DomainError, "error count must lie in [1, n]");

  const Parties parties = distribute(seed, params, cfg);
  const auto message = as_bytes(kAuthentic);
  SignedMessage sm = sign(parties.alice, message);

  // Alice sees neither selection, so she picks positions in k2 uniformly.
  Csprng rng(seed, kStreamAliceErrors);
  const auto positions = sample_without_replacement(rng, n, static_cast<std::size_t>(e));
  const BlockTagger tagger(parties.alice.params, parties.alice.mac, message);
  const Key& k2 = parties.alice.keys.own_keys.at(1);

  AttackOutcome out;
  for (std::size_t j : positions) {
    const std::size_t index = n + j;
    for (;;) {
      Bits block = k2.block(j);
      block.flip(static_cast<std::size_t>(rng.uniform(params.r())));
      Bits corrupted = tagger.tag(index, block);
      if (corrupted != sm.signature.tags[index]) {
        sm.signature.tags[index] = std::move(corrupted);
        break;
      }
      ++out.resamples;
    }
  }

  const TranscriptRecord t = deliver(parties.bob, parties.charlie, sm);
  out.bob_outcome = t.bob_outcome;
  out.charlie_outcome = t.charlie_outcome;
  out.success = t.bob_outcome == Outcome::Accept && t.charlie_outcome == Outcome::Reject;
  return out;
}

AttackOutcome forgery_attack(const Seed& seed, const ValidatedParams& params_in, std::uint32_t toy_r) {
  if (toy_r > kToyMaxR) throw Error(ErrorCode::RTooLarge, "forgery simulation limited to r <= 20");
  if (toy_r == 0) throw Error(ErrorCode::InvalidParams, "toy_r must be positive");
  if (params_in.mode() == Mode::LegacyQaDS) throw Error(ErrorCode::InvalidMode, "forgery simulation needs MAC tags");

  ProtocolParams p = params_in.params();
  p.r = toy_r;
  const ValidatedParams params = validate_params(p);
  const MacConfig cfg = MacConfig::toy(params.tag_len());
  const std::uint32_t n = params.n();
  const std::uint64_t space = std::uint64_t{1} << toy_r;
  const auto k = static_cast<std::size_t>(params.private_needed());
  const auto message = as_bytes(kAuthentic);

  AttackOutcome out;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const Seed trial_seed = attempt == 0 ? seed : derive_trial_seed(seed, attempt);
    const Parties parties = distribute(trial_seed, params, cfg);
    const Key& k2 = parties.alice.keys.own_keys.at(1);

    std::vector<std::size_t> targets;  // indices into k2 private to Charlie
    const auto& shared = parties.charlie.shared_out_indices;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::binary_search(shared.begin(), shared.end(), j)) targets.push_back(j);
    }
    // The urn model needs K distinct green values.
    std::vector<Bits> private_values;
    for (std::size_t j : targets) private_values.push_back(k2.block(j));
    std::vector<Bits> sorted = private_values;
    std::sort(sorted.begin(), sorted.end(), [](const Bits& a, const Bits& b) { return a.bytes() < b.bytes(); });
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      ++out.resamples;
      continue;
    }

    const SignedMessage authentic = sign(parties.alice, message);
    const BlockTagger tagger(params, cfg, message);
    Csprng order_rng(trial_seed, kStreamForgerOrder);
    const std::vector<std::uint32_t> order = random_permutation(order_rng, space);

    ConcatenatedKey known = parties.bob.concatenated_key();
    std::vector<bool> recovered(targets.size(), false);
    std::size_t hits = 0;
    std::uint64_t cost = 0;
    bool false_positive = false;
    for (std::uint32_t v : order) {
      if (hits == k) break;
      ++cost;
      const Bits candidate = integer_block(v, toy_r);
      const Bits tag = tagger.tag(0, candidate);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        if (recovered[t] || tag != authentic.signature.tags[n + targets[t]]) continue;
        if (candidate != private_values[t]) {
          false_positive = true;
          break;
        }
        recovered[t] = true;
        known.blocks[n + targets[t]] = candidate;
        ++hits;
        break;
      }
      if (false_positive) break;
    }
    if (false_positive) {
      ++out.resamples;
      continue;
    }

    const auto forged_message = as_bytes(kForged);
    SignedMessage forged;
    forged.message.assign(forged_message.begin(), forged_message.end());
    forged.params_fingerprint = authentic.params_fingerprint;
    forged.signature = authentic.signature;
    const BlockTagger forger(params, cfg, forged_message);
    for (std::size_t i = 0; i < known.blocks.size(); ++i) {
      if (known.blocks[i]) forged.signature.tags[i] = forger.tag(i, *known.blocks[i]);
    }
    const VerificationReport charlie = verify(parties.charlie, forged);
    out.cost = cost;
    out.charlie_outcome = charlie.outcome;
    out.bob_outcome = Outcome::NotReached;
    out.success = charlie.outcome == Outcome::Accept;
    return out;
  }
}

analysis::BigRational repudiation_exact(const ValidatedParams& params, std::int64_t e) {
  const std::int64_t n = params.n();
  const std::int64_t S = params.S();
  if (e < 1 || e > n) throw Error(ErrorCode::DomainError, "error count must lie in [1, n]");
  if (n + S - e >= params.V_C()) return 0;
  analysis::BigRational total = 0;
  for (std::int64_t x = 0; x <= std::min(e, S); ++x) {
    if (n + S - x >= params.V_B()) total += analysis::hypergeometric_pmf(n, S, e, x);
  }
  return total;
}

AnalyticalForgery forgery_analytical(const ValidatedParams& params) {
  return {analysis::c_forge(params.n(), params.S(), params.V_C(), params.r()),
          analysis::p_forge(params.n(), params.S(), params.V_C(), params.r())};
}

std::string_view to_string(AttackKind kind) noexcept {
  return kind == AttackKind::Repudiation ? "repudiation" : "forgery-toy";
}

AttackKind parse_attack(std::string_view text) {
  if (text == "repudiation") return AttackKind::Repudiation;
  if (text == "forgery-toy") return AttackKind::ForgeryToy;
  throw Error(ErrorCode::InvalidParams, "unknown attack '" + std::string(text) + "'");
}

double CampaignResult::rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double CampaignResult::rate_stderr() const {
  if (trials == 0) return 0.0;
  const double p = rate();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

analysis::BigRational CampaignResult::mean_cost() const {
  if (trials == 0) return 0;
  analysis::BigRational q(cost_sum, analysis::BigInt(static_cast<unsigned long>(trials)));
  q.canonicalize();
  return q;
}

double CampaignResult::cost_stderr() const {
  if (trials < 2) return 0.0;
  const analysis::BigInt t(static_cast<unsigned long>(trials));
  // sample variance = (t * sum_sq - sum^2) / (t (t - 1))
  analysis::BigRational var(t * cost_sq_sum - cost_sum * cost_sum, t * (t - 1));
  var.canonicalize();
  return std::sqrt(var.get_d() / static_cast<double>(trials));
}

CampaignResult run_campaign(const AttackSpec& spec, std::uint64_t trials, const Seed& master_seed,
                            const CampaignOptions& options) {
  if (trials == 0) throw Error(ErrorCode::InvalidParams, "a campaign needs at least one trial");
  const ValidatedParams params = validate_params(spec.params);
  const std::int64_t e = spec.errors.value_or(params.checkable() - params.V_C() + 1);

  CampaignResult result;
  result.trials = trials;
  if (spec.kind == AttackKind::Repudiation) {
    result.fingerprint = params_fingerprint(params, spec.mac);
  } else {
    ProtocolParams p = spec.params;
    p.r = spec.toy_r;
    result.fingerprint = params_fingerprint(validate_params(p), MacConfig::toy(p.tag_len));
  }

  const auto run_one = [&](std::uint64_t i) {
    const Seed s = derive_trial_seed(master_seed, i);
    return spec.kind == AttackKind::Repudiation ? repudiation_attack(s, params, spec.mac, e)
                                                : forgery_attack(s, params, spec.toy_r);
  };

  unsigned threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  std::mutex merge;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> done{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  constexpr std::uint64_t kChunk = 1024;

  const auto worker = [&] {
    std::uint64_t successes = 0, resamples = 0;
    analysis::BigInt cost_sum = 0, cost_sq_sum = 0;
    try {
      for (;;) {
        const std::uint64_t begin = next.fetch_add(kChunk);
        if (begin >= trials) break;
        const std::uint64_t end = std::min(trials, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) {
          const AttackOutcome o = run_one(i);
          successes += o.success ? 1 : 0;
          resamples += o.resamples;
          const analysis::BigInt c(static_cast<unsigned long>(o.cost));
          cost_sum += c;
          cost_sq_sum += c * c;
        }
        done.fetch_add(end - begin);
      }
    } catch (...) {
      const std::lock_guard lock(merge);
      if (!failure) failure = std::current_exception();
      failed.store(true);
      next.store(trials);
    }
    const std::lock_guard lock(merge);
    result.successes += successes;
    result.resamples += resamples;
    result.cost_sum += cost_sum;
    result.cost_sq_sum += cost_sq_sum;
  };

  if (threads <= 1 && !options.progress) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    if (options.progress) {
      while (done.load() < trials && !failed.load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        options.progress(done.load());
      }
    }
    for (auto& th : pool) th.join();
    if (options.progress) options.progress(done.load());
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::string campaign_csv_header() { return "trial_count,successes,rate,stderr,mean_cost,fingerprint"; }

std::string campaign_csv_row(const CampaignResult& r) {
  return std::to_string(r.trials) + "," + std::to_string(r.successes) + "," + analysis::format_double(r.rate()) +
         "," + analysis::format_double(r.rate_stderr()) + "," + analysis::format_double(r.mean_cost().get_d()) + "," +
         to_hex(Bytes(r.fingerprint.begin(), r.fingerprint.end()));
}

}  // namespace gqads
