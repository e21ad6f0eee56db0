#include "gqads/figures.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gqads/errors.hpp"

namespace gqads::analysis {

namespace {

constexpr std::array<std::pair<FigureId, std::string_view>, 7> kNames{{
    {FigureId::BetaZVsGamma, "beta_z_vs_gamma"},
    {FigureId::GammaVsN, "gamma_vs_n"},
    {FigureId::MaxPVsN, "maxp_vs_n"},
    {FigureId::GammaVsNopt, "gamma_vs_nopt"},
    {FigureId::PVsNopt, "p_vs_nopt"},
    {FigureId::PVsThreshold, "p_vs_threshold"},
    {FigureId::Poly1305VsN, "poly1305_vs_n"},
}};

std::string str(std::int64_t v) { return std::to_string(v); }

// Probability columns are "<name>" then "log2<name>".
void probability_columns(std::vector<std::string>& header, const std::string& name, bool exact) {
  header.push_back(name);
  header.push_back("log2" + name);
  if (exact) header.push_back(name + "_exact");
}

void probability_values(std::vector<std::string>& row, const BigRational& q, bool exact) {
  row.push_back(to_scientific(q, 12));
  row.push_back(format_double(log2_of(q)));
  if (exact) row.push_back(format_rational(q));
}

std::vector<std::int64_t> n_range(std::int64_t lo, std::int64_t hi, std::int64_t step) {
  if (lo < 1 || hi < lo || step < 1) throw Error(ErrorCode::DomainError, "bad n range");
  std::vector<std::int64_t> out;
  for (std::int64_t n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

Table beta_z_vs_gamma(const FigureGrid& g) {
  if (g.gamma_points < 2) throw Error(ErrorCode::DomainError, "need at least two gamma points");
  Table t;
  t.header = {"gamma", "beta_star", "z_star"};
  for (std::int64_t i = 0; i < g.gamma_points; ++i) {
    const double gamma = static_cast<double>(i) / static_cast<double>(g.gamma_points - 1);
    t.rows.push_back({format_double(gamma), format_double(beta_star(gamma)), format_double(z_star(gamma))});
  }
  return t;
}

Table gamma_vs_n(const FigureGrid& g, bool with_probabilities) {
  Table t;
  t.header = {"n", "r", "rule"};
  for (const char* curve : {"exact", "approx"}) {
    for (const char* col : {"S", "V_C", "gamma", "beta"}) t.header.push_back(std::string(col) + "_" + curve);
  }
  if (with_probabilities) {
    probability_columns(t.header, "maxP_exact", g.exact_rationals);
    t.header.push_back("maxP_approx");
    t.header.push_back("log2maxP_approx");
  }
  for (std::int64_t n : n_range(g.n_min, g.n_max, g.n_step)) {
    OptimumSlice s;
    try {
      s = gamma_star(n, g.r, g.rule);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmptyFeasibleSet) continue;
      throw;
    }
    std::vector<std::string> row{str(n), str(g.r), std::string(to_string(g.rule))};
    for (const GridPoint* p : {&s.exact, &s.approx}) {
      row.push_back(str(p->S));
      row.push_back(str(p->V_C));
      row.push_back(format_double(p->gamma.to_double()));
      row.push_back(format_double(p->beta));
    }
    if (with_probabilities) {
      probability_values(row, objective_exact(n, s.exact.S, s.exact.V_C, g.r), g.exact_rationals);
      row.push_back(format_pow2(s.approx.log2_objective));
      row.push_back(format_double(s.approx.log2_objective));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table over_key_lengths(const FigureGrid& g, bool with_probabilities) {
  if (g.L_first < 0 || g.L_last < g.L_first || g.L_last > 20) throw Error(ErrorCode::DomainError, "bad L index range");
  Table t;
  t.header = {"i", "L", "n_opt", "r_opt", "S", "V_C", "gamma_star", "beta"};
  if (with_probabilities) {
    probability_columns(t.header, "P_R", g.exact_rationals);
    probability_columns(t.header, "P_F", g.exact_rationals);
    probability_columns(t.header, "maxP", g.exact_rationals);
  }
  for (std::int64_t i = g.L_first; i <= g.L_last; ++i) {
    const std::int64_t L = std::int64_t{256} << i;
    const Optimum o = n_opt(L, g.rule);
    std::vector<std::string> row{str(i), str(L), str(o.n_opt), str(o.r_opt), str(o.S), str(o.V_C),
                                 format_double(o.gamma_star.to_double()), format_double(o.beta_star)};
    if (with_probabilities) {
      probability_values(row, o.achieved.p_rep_exact, g.exact_rationals);
      probability_values(row, o.achieved.p_forge, g.exact_rationals);
      probability_values(row, o.objective, g.exact_rationals);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table p_vs_threshold(const FigureGrid& g) {
  Table t;
  t.header = {"n", "S", "r", "x", "V_C"};
  probability_columns(t.header, "P_R", g.exact_rationals);
  probability_columns(t.header, "P_F", g.exact_rationals);
  for (const ThresholdCurve& c : g.threshold_curves) {
    if (c.n < 1 || c.S < 0 || c.S >= c.n || c.r < 1) throw Error(ErrorCode::DomainError, "bad threshold curve");
    // x = n + S - V_C ranges over [0, n - S) so that V_C > 2S
    for (std::int64_t x = 0; x < c.n - c.S; ++x) {
      const std::int64_t V_C = c.n + c.S - x;
      std::vector<std::string> row{str(c.n), str(c.S), str(c.r), str(x), str(V_C)};
      probability_values(row, p_rep_exact(c.n, c.S, V_C), g.exact_rationals);
      probability_values(row, p_forge(c.n, c.S, V_C, c.r), g.exact_rationals);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table poly1305_vs_n(const FigureGrid& g) {
  Table t;
  t.header = {"n", "beta", "S", "V_C", "r"};
  probability_columns(t.header, "P_R", g.exact_rationals);
  probability_columns(t.header, "P_F", g.exact_rationals);
  for (const Fraction& beta : g.poly_betas) {
    if (beta.den <= 0 || beta.num < 0 || beta.num >= beta.den) throw Error(ErrorCode::DomainError, "beta must lie in [0, 1)");
    for (std::int64_t n : n_range(g.poly_n_min, g.poly_n_max, 1)) {
      const std::int64_t S = n * beta.num / beta.den;
      const std::int64_t V_C = 2 * S + 1;
      std::vector<std::string> row{str(n), beta.str(), str(S), str(V_C), str(g.poly_r)};
      probability_values(row, p_rep_exact(n, S, V_C), g.exact_rationals);
      probability_values(row, p_forge(n, S, V_C, g.poly_r), g.exact_rationals);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

}  // namespace

std::string_view to_string(FigureId id) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == id) return name;
  }
  return "unknown";
}

FigureId parse_figure(std::string_view text) {
  for (const auto& [k, name] : kNames) {
    if (name == text) return k;
  }
  throw Error(ErrorCode::UnknownFigure, "unknown figure '" + std::string(text) + "'");
}

const std::vector<FigureId>& all_figures() {
  static const std::vector<FigureId> ids = [] {
    std::vector<FigureId> v;
    for (const auto& [k, name] : kNames) v.push_back(k);
    return v;
  }();
  return ids;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::DomainError, "no column '" + std::string(name) + "'");
}

Table figure_data(FigureId id, const FigureGrid& grid) {
  switch (id) {
    case FigureId::BetaZVsGamma: return beta_z_vs_gamma(grid);
    case FigureId::GammaVsN: return gamma_vs_n(grid, false);
    case FigureId::MaxPVsN: return gamma_vs_n(grid, true);
    case FigureId::GammaVsNopt: return over_key_lengths(grid, false);
    case FigureId::PVsNopt: return over_key_lengths(grid, true);
    case FigureId::PVsThreshold: return p_vs_threshold(grid);
    case FigureId::Poly1305VsN: return poly1305_vs_n(grid);
  }
  throw Error(ErrorCode::UnknownFigure, "unknown figure");
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out.str();
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_pow2(double log2_value) {
  if (std::isinf(log2_value)) return log2_value < 0 ? "0" : "inf";
  const double log10_value = log2_value * std::log10(2.0);
  double exponent = std::floor(log10_value);
  double mantissa = std::pow(10.0, log10_value - exponent);
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11fe%+03.0f", mantissa, exponent);
  return buf;
}

std::string format_rational(const BigRational& q) {
  BigRational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace gqads::analysis
