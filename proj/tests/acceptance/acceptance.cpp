// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gqads/adversary.hpp"
#include "gqads/analysis.hpp"
#include "gqads/figures.hpp"
#include "gqads/protocol.hpp"

#include "oracles.hpp"

using namespace gqads;
using namespace gqads::analysis;

namespace {

// Collects failed checks for one criterion.
struct Verdict {
  std::vector<std::string> failures;
  std::string summary;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;  // 0: no stated limit
  std::function<void(Verdict&)> body;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double log10_of(const BigRational& q) { return log2_of(q) * std::numbers::ln2 / std::numbers::ln10; }

// 1. Brute-force enumeration equals p_rep_exact for every n <= 10.
void exact_formula_oracle(Verdict& v) {
  int cases = 0;
  for (int n = 1; n <= 10; ++n) {
    for (int S = 0; S <= n; ++S) {
      for (int vc = 2 * S + 1; vc <= n + S; ++vc) {
        ++cases;
        const oracle::Rational want = oracle::brute_force_p_rep(n, S, vc);
        const BigRational got = p_rep_exact(n, S, vc);
        v.expect(oracle::same(want, got), "n=" + std::to_string(n) + " S=" + std::to_string(S) +
                                              " V_C=" + std::to_string(vc) + ": " + oracle::str(want) +
                                              " vs " + oracle::str(got));
      }
    }
  }
  v.summary = std::to_string(cases) + " (n, S, V_C) triples equal as exact rationals";
}

// 2. Urn model: exact expectation for M <= 64, simulation at M = 256, K = 4, k = 1.
void urn_model(Verdict& v) {
  int exact = 0;
  for (int M = 1; M <= 64; ++M) {
    for (int K = 1; K <= M; ++K) {
      for (int k = 1; k <= K; ++k) {
        ++exact;
        v.expect(oracle::same(oracle::urn_counting(M, K, k), urn_expected_picks(BigInt(M), K, k)),
                 "counting M=" + std::to_string(M) + " K=" + std::to_string(K) + " k=" + std::to_string(k));
      }
    }
  }
  for (int M = 1; M <= 16; ++M) {
    for (int K = 1; K <= M; ++K) {
      for (int k = 1; k <= K; ++k) {
        v.expect(oracle::same(oracle::urn_enumerate(M, K, k), urn_expected_picks(BigInt(M), K, k)),
                 "enumeration M=" + std::to_string(M) + " K=" + std::to_string(K) + " k=" + std::to_string(k));
      }
    }
  }
  v.expect(c_forge(8, 4, 9, 8) == BigRational(257, 5), "c_forge(8, 4, 9, 8) != 257/5");

  // Direct urn: 256 balls, 4 green; draw without replacement until the first green.
  std::mt19937_64 gen(20240601);
  constexpr int kTrials = 100000;
  double sum = 0, sum_sq = 0;
  std::vector<int> urn(256);
  for (int t = 0; t < kTrials; ++t) {
    for (int i = 0; i < 256; ++i) urn[static_cast<std::size_t>(i)] = i < 4 ? 1 : 0;
    int picks = 0;
    for (int remaining = 256;; --remaining) {
      std::uniform_int_distribution<int> pick(0, remaining - 1);
      const int j = pick(gen);
      ++picks;
      if (urn[static_cast<std::size_t>(j)] == 1) break;
      urn[static_cast<std::size_t>(j)] = urn[static_cast<std::size_t>(remaining - 1)];
    }
    sum += picks;
    sum_sq += static_cast<double>(picks) * picks;
  }
  const double mean = sum / kTrials;
  const double sd = std::sqrt((sum_sq - sum * sum / kTrials) / (kTrials - 1));
  const double expected = urn_expected_picks(BigInt(256), 4, 1).get_d();
  const double z = (mean - expected) / (sd / std::sqrt(kTrials));
  v.expect(std::abs(z) < 4.0, fmt("simulated mean %.4f vs %.4f, z = %.2f", mean, expected, z));
  v.summary = std::to_string(exact) + " exact urn expectations; simulated mean " + fmt("%.3f vs 257/5 (z = %.2f)", mean, z);
}

// 3. Protocol-level Monte Carlo attacks.
void monte_carlo_attacks(Verdict& v) {
  AttackSpec rep;
  rep.kind = AttackKind::Repudiation;
  rep.params = {4, 32, 2, 6, 5, Mode::GQaDS, 32};
  rep.mac = MacConfig::carter_wegman(32);
  constexpr std::uint64_t kRepTrials = 1000000;
  const CampaignResult r = run_campaign(rep, kRepTrials, seed_from_u64(0xacce97), {.threads = 0});
  const double p = 1.0 / 6.0;
  const double z_rep = (r.rate() - p) / std::sqrt(p * (1 - p) / kRepTrials);
  v.expect(std::abs(z_rep) < 4.0, fmt("repudiation rate %.6f vs 1/6, z = %.2f", r.rate(), z_rep));

  AttackSpec forge;
  forge.kind = AttackKind::ForgeryToy;
  forge.params = {8, 8, 4, 12, 9, Mode::GQaDS, 32};
  forge.toy_r = 8;
  constexpr std::uint64_t kForgeTrials = 100000;
  const CampaignResult f = run_campaign(forge, kForgeTrials, seed_from_u64(0xf0f9e), {.threads = 0});
  const double expected = c_forge(8, 4, 9, 8).get_d();
  const double mean = f.mean_cost().get_d();
  const double z_forge = (mean - expected) / f.cost_stderr();
  v.expect(std::abs(z_forge) < 4.0, fmt("forgery mean cost %.4f vs %.4f, z = %.2f", mean, expected, z_forge));
  v.expect(f.successes == f.trials, "a completed forgery was rejected by Charlie");
  v.summary = fmt("repudiation %.5f (z = %.2f); ", r.rate(), z_rep) +
              fmt("forgery mean cost %.3f vs 257/5 (z = %.2f)", mean, z_forge);
}

// 4. Anchors (a) to (e).
void paper_anchors(Verdict& v) {
  const double a = -log10_of(p_rep_exact(64, 48, 97));
  v.expect(a >= 14.5 && a <= 15.5, fmt("(a) -log10 P_R = %.3f", a));

  const double b = log2_of(c_forge(64, 32, 68, 128));
  v.expect(std::abs(b - 125.0) <= 3.0, fmt("(b) forging strength %.3f bits", b));

  // Over the Poly1305 figure grid: every listed beta, n in [poly_n_min, poly_n_max].
  const FigureGrid grid;
  double worst_c = -1e9;
  for (const Fraction& beta : grid.poly_betas) {
    for (std::int64_t n = grid.poly_n_min; n <= grid.poly_n_max; ++n) {
      const std::int64_t S = n * beta.num / beta.den;
      worst_c = std::max(worst_c, log10_of(p_forge(n, S, 2 * S + 1, grid.poly_r)));
    }
  }
  v.expect(worst_c < -75.0, fmt("(c) largest log10 P_F = %.3f", worst_c));

  std::int64_t first = -1;
  for (std::int64_t n = 2; n <= 200 && first < 0; ++n) {
    const std::int64_t S = n / 2;
    if (log10_of(p_rep_exact(n, S, 2 * S + 1)) < -24.0) first = n;
  }
  v.expect(std::abs(first - 84) <= 1, "(d) first n with P_R < 1e-24 is " + std::to_string(first));

  const Optimum e = n_opt(4096);
  v.expect(e.n_opt == 64 && e.r_opt == 64,
           "(e) n_opt = " + std::to_string(e.n_opt) + ", r_opt = " + std::to_string(e.r_opt));

  v.summary = fmt("(a) %.2f digits, (b) %.2f bits, (c) ", a, b) + fmt("log10 P_F <= %.1f, ", worst_c) +
              "(d) n = " + std::to_string(first) + ", (e) n_opt = r_opt = " + std::to_string(e.n_opt);
}

// 5. Closed forms for beta* and z*.
void closed_forms(Verdict& v) {
  v.expect(std::abs(beta_star(0.0) - 0.5) < 1e-9, "beta*(0)");
  v.expect(std::abs(z_star(0.0) - 0.5) < 1e-9, "z*(0)");
  v.expect(std::abs(beta_star(1.0) - (1.0 - 1.0 / std::numbers::e)) < 1e-9, "beta*(1)");
  v.expect(std::abs(z_star(1.0) - 1.0) < 1e-9, "z*(1)");
  // Limits from inside the interval agree with the endpoint values.
  v.expect(std::abs(beta_star(1e-13) - 0.5) < 1e-9, "beta*(0+)");
  v.expect(std::abs(beta_star(1.0 - 1e-12) - (1.0 - 1.0 / std::numbers::e)) < 1e-9, "beta*(1-)");

  double worst = 0;
  for (int i = 1; i <= 100; ++i) {
    const oracle::Float50 g = oracle::Float50(i) / 101;
    const oracle::Minimum m = oracle::golden_min_z(g);
    const double gd = static_cast<double>(g);
    const double db = std::abs(beta_star(gd) - static_cast<double>(m.beta));
    const double dz = std::abs(z_star(gd) - static_cast<double>(m.z));
    worst = std::max({worst, db, dz});
    v.expect(db < 1e-9 && dz < 1e-9, fmt("gamma = %.4f: |dbeta| = %.2e, |dz| = %.2e", gd, db, dz));
  }
  v.summary = fmt("endpoints exact; 100-point grid max deviation %.2e", worst);
}

// 6. Signature lengths in bits.
void signature_lengths(Verdict& v) {
  struct Case {
    ProtocolParams params;
    std::uint64_t bits;
  };
  const std::vector<Case> cases = {
      {{64, 64, 32, 96, 65, Mode::LegacyQaDS, 128}, std::uint64_t{1} << 20},
      {{64, 64, 32, 96, 65, Mode::GQaDS, 128}, std::uint64_t{1} << 14},
      {{2, 256, 1, 3, 3, Mode::DeterministicGQaDS, 128}, 512},
  };
  const std::string message = "signature length";
  std::string summary;
  for (const Case& c : cases) {
    const ValidatedParams params = validate_params(c.params);
    const Parties p = distribute(seed_from_u64(6), params, MacConfig::carter_wegman());
    const SignedMessage sm = sign(p.alice, Bytes(message.begin(), message.end()));
    const std::uint64_t got = sm.signature.bit_length();
    v.expect(got == c.bits, std::string(to_string(c.params.mode)) + ": " + std::to_string(got) + " bits");
    v.expect(expected_signature_bits(params, MacConfig::carter_wegman()) == c.bits, "expected_signature_bits");
    summary += std::string(summary.empty() ? "" : ", ") + std::string(to_string(c.params.mode)) + " " +
               std::to_string(got);
  }
  v.summary = summary;
}

// 7. Completeness and deterministic-mode fault handling.
void completeness(Verdict& v) {
  std::mt19937_64 gen(7);
  int honest_failures = 0;
  for (int t = 0; t < 10000; ++t) {
    const Mode mode = static_cast<Mode>(t % 3);
    ProtocolParams p;
    p.mode = mode;
    if (mode == Mode::DeterministicGQaDS) {
      p = {2, 8 * static_cast<std::uint32_t>(1 + gen() % 32), 1, 3, 3, mode, static_cast<std::uint32_t>(1 + gen() % 256)};
    } else {
      p.n = 1 + static_cast<std::uint32_t>(gen() % 16);
      p.r = mode == Mode::LegacyQaDS ? 4 * static_cast<std::uint32_t>(1 + gen() % 8)
                                     : 1 + static_cast<std::uint32_t>(gen() % 256);
      p.S = static_cast<std::uint32_t>(gen() % p.n);
      p.V_B = std::int64_t{p.n} + p.S;
      p.V_C = 2 * std::int64_t{p.S} + 1 + static_cast<std::int64_t>(gen() % (p.n - p.S));
      p.tag_len = 1 + static_cast<std::uint32_t>(gen() % 256);
    }
    const ValidatedParams params = validate_params(p);
    const Parties parties = distribute(seed_from_u64(gen()), params, MacConfig::carter_wegman(p.tag_len));
    Bytes m(gen() % 64);
    for (auto& c : m) c = static_cast<std::uint8_t>(gen());
    const TranscriptRecord tr = run_messaging(parties.alice, parties.bob, parties.charlie, m);
    const bool ok = tr.bob_outcome == Outcome::Accept && tr.charlie_outcome == Outcome::Accept && tr.bob_report &&
                    tr.charlie_report && tr.bob_report->match_count == params.checkable() &&
                    tr.charlie_report->match_count == params.checkable();
    if (!ok) ++honest_failures;
  }
  v.expect(honest_failures == 0, std::to_string(honest_failures) + " honest runs did not fully accept");

  // Adversarial faults in deterministic mode: random tag corruption, message
  // tampering and Charlie going offline.
  const ValidatedParams det = validate_params({2, 256, 1, 3, 3, Mode::DeterministicGQaDS, 128});
  int split = 0, bob_accepts = 0;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    const Parties parties = distribute(derive_trial_seed(seed_from_u64(77), t), det, MacConfig::carter_wegman());
    const std::string text = "trial " + std::to_string(t);
    SignedMessage sm = sign(parties.alice, Bytes(text.begin(), text.end()));
    const auto fault = gen() % 4;
    if (fault == 0) {
      sm.message[gen() % sm.message.size()] ^= static_cast<std::uint8_t>(1U << (gen() % 8));
    } else if (fault == 1) {
      for (auto& tag : sm.signature.tags) {
        if (gen() % 2 == 0) tag.flip(gen() % tag.size());
      }
    } else if (fault == 2) {
      sm.signature.tags[2 + gen() % 2].flip(gen() % 128);  // one k2 tag
    }
    const TranscriptRecord tr = deliver(parties.bob, parties.charlie, sm, {.charlie_online = gen() % 8 != 0});
    if (tr.bob_outcome == Outcome::Accept) ++bob_accepts;
    if (tr.bob_outcome == Outcome::Accept && tr.charlie_outcome != Outcome::Accept) ++split;
  }
  v.expect(split == 0, std::to_string(split) + " trials with Bob accepting and Charlie not");
  v.summary = "10000 honest runs fully accepted; 100000 fault trials, " + std::to_string(bob_accepts) +
              " Bob accepts, " + std::to_string(split) + " split verdicts";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact-formula oracle equivalence", 60, exact_formula_oracle},
      {2, "urn model expectation", 60, urn_model},
      {3, "Monte Carlo protocol attacks", 300, monte_carlo_attacks},
      {4, "analysis anchors", 0, paper_anchors},
      {5, "closed-form endpoints and grid", 0, closed_forms},
      {6, "signature-length bit-exactness", 0, signature_lengths},
      {7, "protocol completeness", 0, completeness},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && seconds >= c.limit_seconds) v.failures.push_back(fmt("runtime %.1f s exceeds %.0f s", seconds, c.limit_seconds));
    const bool ok = v.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("%s %d %s [%.1f s] %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds, v.summary.c_str());
    for (std::size_t i = 0; i < v.failures.size() && i < 10; ++i) std::printf("    %s\n", v.failures[i].c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
