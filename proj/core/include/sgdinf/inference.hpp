#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sgdinf/core.hpp"
#include "sgdinf/rng.hpp"

namespace sgdinf {

/// One-sided critical values c with P(t <= c) = p for the random-scaling
/// t-statistic's mixed-normal limit.
struct CriticalValueTable {
  struct Entry {
    double probability;
    double value;
  };
  static constexpr std::array<Entry, 4> entries{{
      {0.90, 3.875},
      {0.95, 5.323},
      {0.975, 6.747},
      {0.99, 8.613},
  }};

  static std::optional<double> one_sided(double probability) noexcept;
  /// Critical value for a two-sided (1 - alpha) interval, i.e. cv(1 - alpha/2).
  static std::optional<double> two_sided(double level) noexcept;
};

/// 1 - (1 - level) / 2.
double one_sided_probability(double two_sided_level);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  bool degenerate = false;  // zero scale: lower == upper

  double length() const noexcept { return upper - lower; }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

/// sqrt(n) (beta_bar_j - beta0_j) / sqrt(v_jj). Throws DegenerateScale if
/// v_jj <= 0.
double t_statistic(double beta_bar_j, double beta0_j, double v_jj,
                   std::uint64_t n);

/// beta_bar_j +- cv * sqrt(v_jj / n). The critical value comes from the
/// table unless `critical_value` is supplied; an untabulated level without
/// one is an error.
ConfidenceInterval confidence_interval(
    double beta_bar_j, double v_jj, std::uint64_t n, double level,
    std::optional<double> critical_value = std::nullopt);

/// H0: R beta = c with R an (ell x d) matrix of full row rank.
class LinearRestriction {
 public:
  /// `r` is row-major with `rows * cols` entries.
  LinearRestriction(std::vector<double> r, std::size_t rows, std::size_t cols,
                    std::vector<double> c);

  /// The single restriction beta_j = value.
  static LinearRestriction coordinate(std::size_t d, std::size_t j,
                                      double value);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double r(std::size_t i, std::size_t k) const noexcept {
    return r_[i * cols_ + k];
  }
  std::span<const double> c() const noexcept { return c_; }

 private:
  std::vector<double> r_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> c_;
};

/// n (R beta_bar - c)' (R V R')^-1 (R beta_bar - c), via an SPD solve.
double wald_statistic(const LinearRestriction& restriction,
                      const ParamVector& beta_bar, const SymMatrix& v,
                      std::uint64_t n);

enum class Statistic { t, wald };

std::string_view to_string(Statistic s) noexcept;
Statistic parse_statistic(std::string_view text);

struct CriticalValueSimulation {
  std::size_t ell = 1;
  Statistic statistic = Statistic::t;
  std::vector<double> quantiles;
  std::size_t paths = 200000;
  std::size_t grid = 2000;
  SeedSpec seed{};
  unsigned threads = 0;  // 0: hardware concurrency
};

struct CriticalValueEstimate {
  Statistic statistic;
  std::size_t ell;
  double quantile;
  double value;
  std::size_t paths;
  std::size_t grid;
  std::uint64_t seed;
};

/// One draw of the limiting functional per simulated Wiener path, in path
/// order. Independent of the thread count.
std::vector<double> simulate_functional(const CriticalValueSimulation& sim);

/// Empirical quantiles (linear interpolation between order statistics) of
/// the limiting t or Wald functional.
std::vector<CriticalValueEstimate> simulate_critical_values(
    const CriticalValueSimulation& sim);

/// Linear-interpolation quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double p);

void write_critical_values_csv(std::ostream& out,
                               std::span<const CriticalValueEstimate> rows);

}  // namespace sgdinf
