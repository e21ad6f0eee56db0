#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gqads/analysis.hpp"

namespace gqads::analysis {

enum class FigureId {
  BetaZVsGamma,
  GammaVsN,
  MaxPVsN,
  GammaVsNopt,
  PVsNopt,
  PVsThreshold,
  Poly1305VsN,
};

std::string_view to_string(FigureId id) noexcept;
/// Throws UnknownFigure.
FigureId parse_figure(std::string_view text);
const std::vector<FigureId>& all_figures();

struct ThresholdCurve {
  std::int64_t n = 0;
  std::int64_t S = 0;
  std::int64_t r = 0;
};

struct FigureGrid {
  std::int64_t gamma_points = 101;
  std::int64_t r = 82;
  std::int64_t n_min = 4;
  std::int64_t n_max = 256;
  std::int64_t n_step = 4;
  std::int64_t L_first = 0;  // L_i = 256 * 2^i
  std::int64_t L_last = 11;
  BetaRule rule = BetaRule::BetaStar;
  std::vector<ThresholdCurve> threshold_curves = {
      {64, 32, 64}, {64, 48, 64}, {64, 32, 128}, {128, 64, 128}, {84, 42, 85}};
  std::int64_t poly_r = 256;
  std::int64_t poly_n_min = 2;
  std::int64_t poly_n_max = 128;
  std::vector<Fraction> poly_betas = {{1, 4}, {3, 8}, {1, 2}, {5, 8}, {3, 4}};
  /// Adds "num/den" columns next to every exact probability.
  bool exact_rationals = false;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws DomainError
};

Table figure_data(FigureId id, const FigureGrid& grid = {});
std::string to_csv(const Table& table);

/// 12 significant digits.
std::string format_double(double value);
/// Scientific rendering of 2^x, valid far outside the double range.
std::string format_pow2(double log2_value);
std::string format_rational(const BigRational& q);

}  // namespace gqads::analysis
