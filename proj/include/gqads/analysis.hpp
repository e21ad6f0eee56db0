#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "gqads/core_types.hpp"

namespace gqads::analysis {

using BigRational = mpq_class;
using BigInt = mpz_class;

// ---- exact evaluators --------------------------------------------------

/// P{Rep | e}: probability that none of e errors placed among the n blocks of
/// k2 hits one of the S blocks Charlie disclosed. Requires e <= n - S.
BigRational p_rep_given_errors(std::int64_t n, std::int64_t S, std::int64_t e);

/// Repudiation success with the optimal e* = n + S - V_C + 1 errors.
/// Requires 2S < V_C <= n + S.
BigRational p_rep_exact(std::int64_t n, std::int64_t S, std::int64_t V_C);

/// Original scheme (S = n/2): prod_{i<e} (n/2 - i)/(n - i). n even, e <= n/2.
BigRational p_rep_legacy(std::int64_t n, std::int64_t e);

/// Hypergeometric pmf: x marked items when drawing `draws` from a population
/// of `population` items of which `marked` are marked.
BigRational hypergeometric_pmf(std::int64_t population, std::int64_t marked, std::int64_t draws, std::int64_t x);

/// Expected picks without replacement from an urn of M balls (K green) until
/// the k-th green ball: k (M + 1) / (K + 1).
BigRational urn_expected_picks(const BigInt& M, std::int64_t K, std::int64_t k);

/// Forging complexity: k (2^r + 1) / (n - S + 1) with k = V_C - 2S.
BigRational c_forge(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r);
/// min(1, 1 / c_forge).
BigRational p_forge(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r);
/// Coarse single-guess estimate of the original scheme: 2^(-L/2).
BigRational p_forge_legacy(std::int64_t L);

/// log2 of a positive rational, accurate for values far outside double range.
double log2_of(const BigRational& q);
double log2_of(const BigInt& z);
/// Decimal scientific rendering with `digits` significant digits, computed
/// exactly (no double underflow).
std::string to_scientific(const BigRational& q, int digits = 12);

// ---- asymptotic forms --------------------------------------------------

enum class Regime {
  ConstantC,  // gamma (1 - beta) n tends to a constant C
  Linear,     // gamma (1 - beta) n grows linearly with n
};

double binary_entropy(double beta);
double z_r(double beta, double gamma);
double log2_p_rep_approx(double n, double beta, double gamma, Regime regime);
double p_rep_approx(double n, double beta, double gamma, Regime regime);
double beta_star(double gamma);
double z_star(double gamma);
double log2_p_forge_approx(double n, double beta, double gamma, double r, Regime regime);
double p_forge_approx(double n, double beta, double gamma, double r, Regime regime);

struct SecurityFigures {
  BigRational p_rep_exact;
  double p_rep_approx = 0;  // may underflow to 0; see log2 fields
  double log2_p_rep_approx = 0;
  BigRational c_forge;
  BigRational p_forge;
  double security_bits_rep = 0;
  double security_bits_forge = 0;
};

SecurityFigures security_figures(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r,
                                 Regime regime = Regime::Linear);

// ---- optimisation ------------------------------------------------------

enum class BetaRule {
  Half,      // S = floor(n / 2)
  BetaStar,  // S = round(beta*(gamma) n), gamma induced by (S, V_C)
};

std::string_view to_string(BetaRule rule) noexcept;

/// True iff (S, V_C) lies on the grid allowed by the rule for n.
bool rule_admits(BetaRule rule, std::int64_t n, std::int64_t S, std::int64_t V_C);

struct GridPoint {
  std::int64_t S = 0;
  std::int64_t V_C = 0;
  Fraction gamma;
  double beta = 0;
  double log2_p_rep = 0;
  double log2_p_forge = 0;
  double log2_objective = 0;  // log2 max{P_R, alpha P_F}
  std::optional<BigRational> p_rep;    // exact evaluator only
  std::optional<BigRational> p_forge;  // exact evaluator only
};

struct OptimumSlice {
  std::int64_t n = 0;
  std::int64_t r = 0;
  BetaRule rule = BetaRule::BetaStar;
  GridPoint exact;
  GridPoint approx;
};

/// argmin over integer thresholds of max{P_R, 2^log2_alpha P_F}, for both the
/// exact formulas and the large-n approximations. Ties go to the smaller V_C.
/// Throws EmptyFeasibleSet.
OptimumSlice gamma_star(std::int64_t n, std::int64_t r, BetaRule rule, std::int64_t log2_alpha = 0);

/// Exact objective max{P_R, 2^log2_alpha P_F} at one grid point.
BigRational objective_exact(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r,
                            std::int64_t log2_alpha = 0);

struct Optimum {
  std::int64_t L = 0;
  std::int64_t n_opt = 0;
  std::int64_t r_opt = 0;
  std::int64_t S = 0;
  std::int64_t V_C = 0;
  Fraction gamma_star;
  double beta_star = 0;  // S / n actually used
  BigRational objective;
  SecurityFigures achieved;
  /// Perfect-square key length with n_opt = r_opt = sqrt(L).
  bool balanced_square = false;
};

/// argmin over divisors n of L of the exact gamma_star objective. Throws NoDivisors.
Optimum n_opt(std::int64_t L, BetaRule rule = BetaRule::BetaStar);

struct AsymOptimum {
  Optimum optimum;
  std::int64_t b_R = 0;
  std::int64_t b_F = 0;
  std::int64_t r_aux = 0;  // r' = r - b_F + b_R
  std::int64_t L_aux = 0;  // L' = n r'
  bool meets_targets = false;
};

/// argmin over n | L of max{P_R, 2^(b_F - b_R) P_F}.
AsymOptimum n_opt_asym(std::int64_t L, std::int64_t b_R, std::int64_t b_F, BetaRule rule = BetaRule::BetaStar);

struct KeyLengthReport {
  std::int64_t L = 0;
  std::int64_t n = 0;
  std::int64_t r = 0;
  std::int64_t S = 0;
  std::int64_t V_C = 0;
  BigRational p_rep;
  BigRational p_forge;
};

/// Smallest L = n r (n <= n_max) admitting some (S, V_C) with P_R < 2^-b_R and
/// P_F < 2^-b_F. Throws InfeasibleTargets.
KeyLengthReport min_key_length(std::int64_t b_R, std::int64_t b_F, std::int64_t n_max = 1024);

}  // namespace gqads::analysis
