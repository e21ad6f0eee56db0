#include <algorithm>
#include <cmath>
#include <limits>

#include "gqads/analysis.hpp"
#include "gqads/errors.hpp"

namespace gqads::analysis {

namespace {

BigInt pow2(std::int64_t e) { return BigInt(1) << static_cast<mp_bitcnt_t>(e); }

struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  bool empty() const { return lo > hi; }
};

std::int64_t rounded_beta_star_share(std::int64_t n, std::int64_t S, std::int64_t V_C) {
  const double gamma = static_cast<double>(V_C - 2 * S) / static_cast<double>(n - S);
  return std::llround(beta_star(gamma) * static_cast<double>(n));
}

// V_C values admitted by the rule for this S. Under BetaStar the rounded
// share is non-decreasing in V_C, so the admitted set is an interval.
Interval admitted_thresholds(BetaRule rule, std::int64_t n, std::int64_t S) {
  Interval full{2 * S + 1, n + S};
  if (S < 0 || S >= n) return {};
  if (rule == BetaRule::Half) return S == n / 2 ? full : Interval{};

  const auto share = [&](std::int64_t v) { return rounded_beta_star_share(n, S, v); };
  if (share(full.lo) > S || share(full.hi) < S) return {};
  // first V with share >= S
  std::int64_t a = full.lo, b = full.hi;
  while (a < b) {
    const std::int64_t mid = a + (b - a) / 2;
    if (share(mid) >= S) b = mid; else a = mid + 1;
  }
  const std::int64_t lo = a;
  if (share(lo) != S) return {};
  // last V with share <= S
  a = lo;
  b = full.hi;
  while (a < b) {
    const std::int64_t mid = a + (b - a + 1) / 2;
    if (share(mid) <= S) a = mid; else b = mid - 1;
  }
  return {lo, a};
}

std::vector<std::int64_t> candidate_shares(BetaRule rule, std::int64_t n) {
  if (rule == BetaRule::Half) return {n / 2};
  std::vector<std::int64_t> out;
  for (std::int64_t S = 0; S < n; ++S) out.push_back(S);
  return out;
}

// Exact P_R and P_F as unreduced fractions for fast comparisons.
struct ExactPoint {
  BigInt pr_num, pr_den;
  BigInt pf_num, pf_den;  // already clamped to <= 1 and scaled by alpha
};

ExactPoint exact_point(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r, std::int64_t log2_alpha) {
  ExactPoint p;
  const std::int64_t e = n + S - V_C + 1;
  // (n-S)_e / (n)_e = C(n-S, e) / C(n, e)
  mpz_bin_uiui(p.pr_num.get_mpz_t(), static_cast<unsigned long>(n - S), static_cast<unsigned long>(e));
  mpz_bin_uiui(p.pr_den.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(e));
  const std::int64_t k = V_C - 2 * S;
  const std::int64_t K = n - S;
  // P_F = min(1, (K+1) / (k (2^r + 1)))
  BigInt num = K + 1;
  BigInt den = BigInt(k) * (pow2(r) + 1);
  if (num >= den) {
    num = 1;
    den = 1;
  }
  p.pf_num = num * pow2(log2_alpha);
  p.pf_den = den;
  return p;
}

// max{P_R, alpha P_F} as (num, den)
std::pair<BigInt, BigInt> objective_of(const ExactPoint& p) {
  if (p.pr_num * p.pf_den >= p.pf_num * p.pr_den) return {p.pr_num, p.pr_den};
  return {p.pf_num, p.pf_den};
}

bool less(const std::pair<BigInt, BigInt>& a, const std::pair<BigInt, BigInt>& b) {
  return a.first * b.second < b.first * a.second;
}

GridPoint make_exact_grid_point(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r,
                                std::int64_t log2_alpha) {
  GridPoint g;
  g.S = S;
  g.V_C = V_C;
  g.gamma = Fraction::make(V_C - 2 * S, n - S);
  g.beta = static_cast<double>(S) / static_cast<double>(n);
  g.p_rep = p_rep_exact(n, S, V_C);
  g.p_forge = p_forge(n, S, V_C, r);
  g.log2_p_rep = log2_of(*g.p_rep);
  g.log2_p_forge = log2_of(*g.p_forge);
  g.log2_objective = std::max(g.log2_p_rep, g.log2_p_forge + static_cast<double>(log2_alpha));
  return g;
}

struct ExactBest {
  std::int64_t S = -1;
  std::int64_t V_C = -1;
  std::pair<BigInt, BigInt> value;
};

// Valley search for one share: P_R is non-decreasing and P_F non-increasing
// in V_C, so the minimum of the max sits at the first V_C with P_R >= alpha P_F
// or just before it.
ExactBest best_for_share(std::int64_t n, std::int64_t S, Interval iv, std::int64_t r, std::int64_t log2_alpha) {
  const auto crossed = [&](std::int64_t v) {
    const ExactPoint p = exact_point(n, S, v, r, log2_alpha);
    return p.pr_num * p.pf_den >= p.pf_num * p.pr_den;
  };
  std::int64_t a = iv.lo, b = iv.hi + 1;
  while (a < b) {
    const std::int64_t mid = a + (b - a) / 2;
    if (crossed(mid)) b = mid; else a = mid + 1;
  }
  // iv.lo covers a clamped P_F = 1 plateau left of the crossing.
  std::vector<std::int64_t> cands{iv.lo};
  if (a - 1 > iv.lo) cands.push_back(a - 1);
  if (a <= iv.hi && a > iv.lo) cands.push_back(a);

  ExactBest best;
  for (std::int64_t v : cands) {
    auto val = objective_of(exact_point(n, S, v, r, log2_alpha));
    if (best.V_C < 0 || less(val, best.value)) best = {S, v, std::move(val)};
  }
  return best;
}

bool better(const ExactBest& cand, const ExactBest& best) {
  if (best.V_C < 0) return true;
  if (less(cand.value, best.value)) return true;
  if (less(best.value, cand.value)) return false;
  if (cand.V_C != best.V_C) return cand.V_C < best.V_C;
  return cand.S < best.S;
}

ExactBest exact_optimum(std::int64_t n, std::int64_t r, BetaRule rule, std::int64_t log2_alpha) {
  ExactBest best;
  for (std::int64_t S : candidate_shares(rule, n)) {
    const Interval iv = admitted_thresholds(rule, n, S);
    if (iv.empty()) continue;
    const ExactBest cand = best_for_share(n, S, iv, r, log2_alpha);
    if (better(cand, best)) best = cand;
  }
  return best;
}

}  // namespace

std::string_view to_string(BetaRule rule) noexcept {
  return rule == BetaRule::Half ? "half" : "beta_star";
}

bool rule_admits(BetaRule rule, std::int64_t n, std::int64_t S, std::int64_t V_C) {
  if (n < 1 || S < 0 || S >= n || V_C <= 2 * S || V_C > n + S) return false;
  if (rule == BetaRule::Half) return S == n / 2;
  return rounded_beta_star_share(n, S, V_C) == S;
}

BigRational objective_exact(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r,
                            std::int64_t log2_alpha) {
  const BigRational pr = p_rep_exact(n, S, V_C);
  const BigRational pf = p_forge(n, S, V_C, r) * BigRational(pow2(log2_alpha));
  return pr >= pf ? pr : pf;
}

OptimumSlice gamma_star(std::int64_t n, std::int64_t r, BetaRule rule, std::int64_t log2_alpha) {
  if (n < 1 || r < 1 || log2_alpha < 0) throw Error(ErrorCode::DomainError, "need n, r >= 1 and alpha >= 1");
  OptimumSlice out;
  out.n = n;
  out.r = r;
  out.rule = rule;

  const ExactBest best = exact_optimum(n, r, rule, log2_alpha);
  if (best.V_C < 0) throw Error(ErrorCode::EmptyFeasibleSet, "no admissible (S, V_C) for this n");
  out.exact = make_exact_grid_point(n, best.S, best.V_C, r, log2_alpha);

  // Approximate curve: same integer grid, asymptotic formulas, full scan.
  bool have = false;
  for (std::int64_t S : candidate_shares(rule, n)) {
    const Interval iv = admitted_thresholds(rule, n, S);
    for (std::int64_t v = iv.lo; v <= iv.hi; ++v) {
      const double beta = static_cast<double>(S) / static_cast<double>(n);
      const double gamma = static_cast<double>(v - 2 * S) / static_cast<double>(n - S);
      const double lr = log2_p_rep_approx(static_cast<double>(n), beta, gamma, Regime::Linear);
      const double lf = log2_p_forge_approx(static_cast<double>(n), beta, gamma, static_cast<double>(r), Regime::Linear);
      const double obj = std::max(lr, lf + static_cast<double>(log2_alpha));
      const bool take = !have || obj < out.approx.log2_objective ||
                        (obj == out.approx.log2_objective && v < out.approx.V_C);
      if (take) {
        have = true;
        out.approx.S = S;
        out.approx.V_C = v;
        out.approx.gamma = Fraction::make(v - 2 * S, n - S);
        out.approx.beta = beta;
        out.approx.log2_p_rep = lr;
        out.approx.log2_p_forge = lf;
        out.approx.log2_objective = obj;
      }
    }
  }
  return out;
}

namespace {

Optimum optimise_key_length(std::int64_t L, BetaRule rule, std::int64_t log2_alpha) {
  if (L < 1) throw Error(ErrorCode::DomainError, "need L >= 1");
  std::vector<std::int64_t> divisors;
  for (std::int64_t n = 1; n <= L; ++n) {
    if (L % n == 0) divisors.push_back(n);
  }
  // Balanced splits first so the lower-bound pruning below bites early.
  std::stable_sort(divisors.begin(), divisors.end(), [&](std::int64_t a, std::int64_t b) {
    const auto skew = [&](std::int64_t n) { return std::abs(std::log2(static_cast<double>(n) * n / static_cast<double>(L))); };
    return skew(a) < skew(b);
  });

  ExactBest best;
  std::int64_t best_n = -1;
  for (std::int64_t n : divisors) {
    const std::int64_t r = L / n;
    if (best_n > 0) {
      // Any grid point has P_F >= 1/(2^r + 1) and P_R >= 1/C(n, floor(n/2)).
      BigInt central;
      mpz_bin_uiui(central.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(n / 2));
      const std::pair<BigInt, BigInt> lb_rep{BigInt(1), central};
      const std::pair<BigInt, BigInt> lb_forge{pow2(log2_alpha), pow2(r) + 1};
      if (less(best.value, lb_rep) || less(best.value, lb_forge)) continue;
    }
    const ExactBest cand = exact_optimum(n, r, rule, log2_alpha);
    if (cand.V_C < 0) continue;
    const bool take = best_n < 0 || less(cand.value, best.value) ||
                      (!less(best.value, cand.value) && n < best_n);
    if (take) {
      best = cand;
      best_n = n;
    }
  }
  if (best_n < 0) throw Error(ErrorCode::NoDivisors, "no divisor of L admits a feasible threshold");

  Optimum o;
  o.L = L;
  o.n_opt = best_n;
  o.r_opt = L / best_n;
  o.S = best.S;
  o.V_C = best.V_C;
  o.gamma_star = Fraction::make(best.V_C - 2 * best.S, best_n - best.S);
  o.beta_star = static_cast<double>(best.S) / static_cast<double>(best_n);
  o.objective = BigRational(best.value.first, best.value.second);
  o.objective.canonicalize();
  o.achieved = security_figures(best_n, best.S, best.V_C, o.r_opt);
  o.balanced_square = o.n_opt == o.r_opt;
  return o;
}

}  // namespace

Optimum n_opt(std::int64_t L, BetaRule rule) {
  if (L < 4) throw Error(ErrorCode::DomainError, "need L >= 4");
  return optimise_key_length(L, rule, 0);
}

AsymOptimum n_opt_asym(std::int64_t L, std::int64_t b_R, std::int64_t b_F, BetaRule rule) {
  if (L < 4) throw Error(ErrorCode::DomainError, "need L >= 4");
  if (b_R < 0 || b_F < b_R) throw Error(ErrorCode::DomainError, "need b_F >= b_R >= 0");
  AsymOptimum a;
  a.optimum = optimise_key_length(L, rule, b_F - b_R);
  a.b_R = b_R;
  a.b_F = b_F;
  a.r_aux = a.optimum.r_opt - (b_F - b_R);
  a.L_aux = a.optimum.n_opt * a.r_aux;
  if (a.L_aux + a.optimum.n_opt * (b_F - b_R) != L) {
    throw Error(ErrorCode::DomainError, "auxiliary key length bookkeeping failed");
  }
  const auto& f = a.optimum.achieved;
  a.meets_targets = f.p_rep_exact * BigRational(pow2(b_R)) < 1 && f.p_forge * BigRational(pow2(b_F)) < 1;
  return a;
}

KeyLengthReport min_key_length(std::int64_t b_R, std::int64_t b_F, std::int64_t n_max) {
  if (b_R < 0 || b_F < 0 || n_max < 1) throw Error(ErrorCode::DomainError, "need b_R, b_F >= 0 and n_max >= 1");
  const BigInt target_rep = pow2(b_R);
  const BigInt target_forge = pow2(b_F);
  KeyLengthReport best;
  best.L = -1;

  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (best.L > 0 && n * std::max<std::int64_t>(1, b_F) > best.L) break;
    for (std::int64_t S = 0; S < n; ++S) {
      // P_R is smallest at V_C = 2S + 1, where it equals 1 / C(n, S).
      BigInt central;
      mpz_bin_uiui(central.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(S));
      if (central <= target_rep) continue;
      // largest V_C keeping P_R < 2^-b_R
      const auto ok = [&](std::int64_t v) {
        const ExactPoint p = exact_point(n, S, v, 1, 0);
        return p.pr_num * target_rep < p.pr_den;
      };
      std::int64_t a = 2 * S + 1, b = n + S;
      while (a < b) {
        const std::int64_t mid = a + (b - a + 1) / 2;
        if (ok(mid)) a = mid; else b = mid - 1;
      }
      const std::int64_t V_C = a;
      const std::int64_t k = V_C - 2 * S;
      const std::int64_t K = n - S;
      // smallest r with (K+1) 2^b_F < k (2^r + 1)
      const BigInt need = BigInt(K + 1) * target_forge;
      std::int64_t r = std::max<std::int64_t>(1, b_F - 1);
      while (r > 1 && BigInt(k) * (pow2(r - 1) + 1) > need) --r;
      while (!(need < BigInt(k) * (pow2(r) + 1))) ++r;
      const std::int64_t L = n * r;
      if (best.L < 0 || L < best.L) {
        best.L = L;
        best.n = n;
        best.r = r;
        best.S = S;
        best.V_C = V_C;
      }
    }
  }
  if (best.L < 0) throw Error(ErrorCode::InfeasibleTargets, "no n <= n_max meets the repudiation target");
  best.p_rep = p_rep_exact(best.n, best.S, best.V_C);
  best.p_forge = p_forge(best.n, best.S, best.V_C, best.r);
  return best;
}

}  // namespace gqads::analysis
