#include "gqads/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gqads/errors.hpp"

namespace gqads::analysis {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::DomainError, what);
}

// prod_{i=0}^{count-1} (top - i), exact.
BigInt falling(std::int64_t top, std::int64_t count) {
  BigInt out = 1;
  for (std::int64_t i = 0; i < count; ++i) out *= static_cast<unsigned long>(top - i);
  return out;
}

BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n || n < 0) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

BigInt pow2(std::int64_t e) { return BigInt(1) << static_cast<mp_bitcnt_t>(e); }

double xlog2x(double x) { return x <= 0 ? 0.0 : x * std::log2(x); }

}  // namespace

BigRational p_rep_given_errors(std::int64_t n, std::int64_t S, std::int64_t e) {
  require(n >= 1 && S >= 0 && S <= n, "need 0 <= S <= n");
  require(e >= 0 && e <= n, "need 0 <= e <= n");
  if (e > n - S) return 0;
  BigRational q(falling(n - S, e), falling(n, e));
  q.canonicalize();
  return q;
}

BigRational p_rep_exact(std::int64_t n, std::int64_t S, std::int64_t V_C) {
  require(n >= 1 && S >= 0 && S <= n, "need 0 <= S <= n");
  require(V_C > 2 * S && V_C <= n + S, "need 2S < V_C <= n + S");
  return p_rep_given_errors(n, S, n + S - V_C + 1);
}

BigRational p_rep_legacy(std::int64_t n, std::int64_t e) {
  require(n >= 2 && n % 2 == 0, "legacy scheme needs even n");
  require(e >= 0 && e <= n / 2, "need 0 <= e <= n/2");
  return p_rep_given_errors(n, n / 2, e);
}

BigRational hypergeometric_pmf(std::int64_t population, std::int64_t marked, std::int64_t draws, std::int64_t x) {
  require(population >= 0 && marked >= 0 && marked <= population && draws >= 0 && draws <= population,
          "invalid hypergeometric parameters");
  BigRational q(binomial(marked, x) * binomial(population - marked, draws - x), binomial(population, draws));
  q.canonicalize();
  return q;
}

BigRational urn_expected_picks(const BigInt& M, std::int64_t K, std::int64_t k) {
  require(k >= 1 && K >= k && M >= K, "need 1 <= k <= K <= M");
  BigRational q(BigInt(k) * (M + 1), BigInt(K + 1));
  q.canonicalize();
  return q;
}

BigRational c_forge(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r) {
  require(n >= 1 && S >= 0 && S < n, "need 0 <= S < n");
  require(V_C > 2 * S && V_C <= n + S, "need 2S < V_C <= n + S");
  require(r >= 0, "need r >= 0");
  // Defined for 2^r < n - S as well, where the clamp in p_forge binds.
  BigRational q(BigInt(V_C - 2 * S) * (pow2(r) + 1), BigInt(n - S + 1));
  q.canonicalize();
  return q;
}

BigRational p_forge(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r) {
  const BigRational c = c_forge(n, S, V_C, r);
  if (c <= 1) return 1;
  return 1 / c;
}

BigRational p_forge_legacy(std::int64_t L) {
  require(L >= 0 && L % 2 == 0, "need even L >= 0");
  return BigRational(BigInt(1), pow2(L / 2));
}

double log2_of(const BigInt& z) {
  require(z > 0, "log2 of non-positive value");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

double log2_of(const BigRational& q) {
  require(q > 0, "log2 of non-positive value");
  return log2_of(BigInt(q.get_num())) - log2_of(BigInt(q.get_den()));
}

std::string to_scientific(const BigRational& q, int digits) {
  require(digits >= 1, "need at least one digit");
  if (q == 0) return "0";
  require(q > 0, "negative value");
  BigInt lower;
  mpz_ui_pow_ui(lower.get_mpz_t(), 10, static_cast<unsigned long>(digits - 1));
  const BigInt upper = lower * 10;
  auto e10 = static_cast<long>(std::floor(log2_of(q) * std::numbers::ln2 / std::numbers::ln10));
  BigInt mant;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const long shift = digits - 1 - e10;
    BigRational scaled = q;
    BigInt ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    if (shift >= 0) {
      scaled *= BigRational(ten_pow);
    } else {
      scaled /= BigRational(ten_pow);
    }
    // round half up
    BigInt num = scaled.get_num() * 2 + scaled.get_den();
    BigInt den = scaled.get_den() * 2;
    mpz_fdiv_q(mant.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (mant >= upper) {
      ++e10;
    } else if (mant < lower) {
      --e10;
    } else {
      break;
    }
  }
  std::string m = mant.get_str();
  std::ostringstream os;
  os << m[0];
  if (m.size() > 1) os << '.' << m.substr(1);
  os << 'e' << (e10 < 0 ? '-' : '+');
  const long a = std::labs(e10);
  if (a < 10) os << '0';
  os << a;
  return os.str();
}

double binary_entropy(double beta) {
  require(beta >= 0.0 && beta <= 1.0, "entropy argument outside [0, 1]");
  return -xlog2x(beta) - xlog2x(1.0 - beta);
}

double z_r(double beta, double gamma) {
  require(beta >= 0.0 && beta <= 1.0 && gamma >= 0.0 && gamma <= 1.0, "beta, gamma must lie in [0, 1]");
  const double g = gamma * (1.0 - beta);
  return std::exp2(xlog2x(1.0 - beta) + xlog2x(beta + g) - xlog2x(g));
}

double log2_p_rep_approx(double n, double beta, double gamma, Regime regime) {
  require(beta >= 0.0 && beta < 1.0 && gamma >= 0.0 && gamma <= 1.0, "beta in [0,1), gamma in [0,1]");
  const double g = gamma * (1.0 - beta);
  if (regime == Regime::ConstantC) {
    const double C = g * n;
    require(C > 0.0, "regime A needs C > 0");
    return -n * binary_entropy(beta) - std::lgamma(C) / std::numbers::ln2;
  }
  require(gamma > 0.0, "regime B needs gamma > 0");
  return n * std::log2(z_r(beta, gamma)) + std::log2(g / (beta + g));
}

double p_rep_approx(double n, double beta, double gamma, Regime regime) {
  return std::exp2(log2_p_rep_approx(n, beta, gamma, regime));
}

namespace {
// (1/gamma)^(gamma / (1 - gamma)), continuous at both ends (1 and e).
double gamma_power(double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, "gamma outside [0, 1]");
  if (gamma == 0.0) return 1.0;
  if (gamma == 1.0) return std::numbers::e;
  const double ratio = -std::log1p(gamma - 1.0) / (1.0 - gamma);
  return std::exp(gamma * ratio);
}
}  // namespace

double beta_star(double gamma) {
  const double t = gamma_power(gamma);
  return (t - gamma) / (t - gamma + 1.0);
}

double z_star(double gamma) {
  const double t = gamma_power(gamma);
  return t / (t - gamma + 1.0);
}

double log2_p_forge_approx(double n, double beta, double gamma, double r, Regime regime) {
  require(gamma > 0.0 && gamma <= 1.0 && beta >= 0.0 && beta < 1.0, "beta in [0,1), gamma in (0,1]");
  double v = 0;
  if (regime == Regime::ConstantC) {
    const double C = gamma * (1.0 - beta) * n;
    v = std::log2((1.0 - beta) * n) - r - std::log2(C);
  } else {
    v = -r - std::log2(gamma);
  }
  return std::min(0.0, v);
}

double p_forge_approx(double n, double beta, double gamma, double r, Regime regime) {
  return std::exp2(log2_p_forge_approx(n, beta, gamma, r, regime));
}

SecurityFigures security_figures(std::int64_t n, std::int64_t S, std::int64_t V_C, std::int64_t r, Regime regime) {
  SecurityFigures f;
  f.p_rep_exact = p_rep_exact(n, S, V_C);
  f.c_forge = c_forge(n, S, V_C, r);
  f.p_forge = p_forge(n, S, V_C, r);
  const double beta = static_cast<double>(S) / static_cast<double>(n);
  const double gamma = static_cast<double>(V_C - 2 * S) / static_cast<double>(n - S);
  f.log2_p_rep_approx = log2_p_rep_approx(static_cast<double>(n), beta, gamma, regime);
  f.p_rep_approx = std::exp2(f.log2_p_rep_approx);
  f.security_bits_rep = f.p_rep_exact == 0 ? INFINITY : -log2_of(f.p_rep_exact);
  f.security_bits_forge = -log2_of(f.p_forge);
  return f;
}

}  // namespace gqads::analysis
