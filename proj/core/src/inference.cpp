#include "sgdinf/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <ostream>
#include <string>

#include "eigen_bridge.hpp"
#include "sgdinf/linalg.hpp"
#include "sgdinf/parallel.hpp"

namespace sgdinf {

namespace {

constexpr double kLevelTolerance = 1e-9;

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in (0, 1), got " +
                          std::to_string(p));
  }
}

}  // namespace

std::optional<double> CriticalValueTable::one_sided(double probability) noexcept {
  for (const auto& e : entries) {
    if (std::fabs(e.probability - probability) < kLevelTolerance) return e.value;
  }
  return std::nullopt;
}

std::optional<double> CriticalValueTable::two_sided(double level) noexcept {
  return one_sided(1.0 - (1.0 - level) / 2.0);
}

double one_sided_probability(double two_sided_level) {
  require_probability(two_sided_level, "confidence level");
  return 1.0 - (1.0 - two_sided_level) / 2.0;
}

double t_statistic(double beta_bar_j, double beta0_j, double v_jj,
                   std::uint64_t n) {
  if (n == 0) throw InvalidArgument("t-statistic needs n >= 1");
  if (!(v_jj > 0.0)) {
    throw DegenerateScale("random-scaling variance entry is " +
                          std::to_string(v_jj) +
                          " (constant path or no retained iterates)");
  }
  return std::sqrt(static_cast<double>(n)) * (beta_bar_j - beta0_j) /
         std::sqrt(v_jj);
}

ConfidenceInterval confidence_interval(double beta_bar_j, double v_jj,
                                       std::uint64_t n, double level,
                                       std::optional<double> critical_value) {
  require_probability(level, "confidence level");
  if (n == 0) throw InvalidArgument("confidence interval needs n >= 1");
  if (!(v_jj >= 0.0)) {
    throw DegenerateScale("negative variance entry " + std::to_string(v_jj));
  }
  if (!critical_value) critical_value = CriticalValueTable::two_sided(level);
  if (!critical_value) {
    throw InvalidArgument(
        "no tabulated critical value for level " + std::to_string(level) +
        "; simulate one with simulate_critical_values");
  }
  const double half = *critical_value * std::sqrt(v_jj / static_cast<double>(n));
  return {beta_bar_j - half, beta_bar_j + half, level, v_jj == 0.0};
}

LinearRestriction::LinearRestriction(std::vector<double> r, std::size_t rows,
                                     std::size_t cols, std::vector<double> c)
    : r_(std::move(r)), rows_(rows), cols_(cols), c_(std::move(c)) {
  if (rows == 0 || cols == 0) throw InvalidArgument("empty restriction");
  if (r_.size() != rows * cols) throw DimensionMismatch(rows * cols, r_.size());
  if (c_.size() != rows) throw DimensionMismatch(rows, c_.size());
  if (rows > cols) {
    throw InvalidArgument("restriction has more rows than parameters");
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      m(r_.data(), static_cast<Eigen::Index>(rows),
        static_cast<Eigen::Index>(cols));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    throw InvalidArgument("restriction matrix R is rank deficient");
  }
}

LinearRestriction LinearRestriction::coordinate(std::size_t d, std::size_t j,
                                                double value) {
  if (j >= d) throw InvalidArgument("coordinate out of range");
  std::vector<double> r(d, 0.0);
  r[j] = 1.0;
  return LinearRestriction(std::move(r), 1, d, {value});
}

double wald_statistic(const LinearRestriction& restriction,
                      const ParamVector& beta_bar, const SymMatrix& v,
                      std::uint64_t n) {
  const std::size_t ell = restriction.rows();
  const std::size_t d = restriction.cols();
  if (beta_bar.size() != d) throw DimensionMismatch(d, beta_bar.size());
  if (v.dim() != d) throw DimensionMismatch(d, v.dim());

  std::vector<double> diff(ell);
  for (std::size_t i = 0; i < ell; ++i) {
    double acc = -restriction.c()[i];
    for (std::size_t k = 0; k < d; ++k) acc += restriction.r(i, k) * beta_bar[k];
    diff[i] = acc;
  }
  // R V R'
  std::vector<double> rv(ell * d, 0.0);
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t m = 0; m < d; ++m) acc += restriction.r(i, m) * v(m, k);
      rv[i * d + k] = acc;
    }
  }
  SymMatrix rvr(ell);
  for (std::size_t i = 0; i < ell; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += rv[i * d + k] * restriction.r(j, k);
      rvr.set(i, j, acc);
    }
  }
  const auto solved = spd_solve(rvr, diff);
  return static_cast<double>(n) * dot(diff, solved);
}

std::string_view to_string(Statistic s) noexcept {
  return s == Statistic::t ? "t" : "wald";
}

Statistic parse_statistic(std::string_view text) {
  if (text == "t") return Statistic::t;
  if (text == "wald") return Statistic::wald;
  throw InvalidArgument("unknown statistic '" + std::string(text) + "'");
}

namespace {

void validate(const CriticalValueSimulation& sim) {
  if (sim.ell < 1) throw InvalidArgument("ell must be >= 1");
  if (sim.statistic == Statistic::t && sim.ell != 1) {
    throw InvalidArgument("the t form is only defined for ell = 1");
  }
  if (sim.grid < 100) throw InvalidArgument("grid must be >= 100");
  if (sim.paths < 1000) throw InvalidArgument("paths must be >= 1000");
  for (double q : sim.quantiles) require_probability(q, "quantile");
}

// The functional on one discretised path. With S_k the partial sums of the
// grid increments and m the grid size, this is the random-scaling statistic
// on m i.i.d. normal "iterates":
//   t    = sqrt(m) S_m / sqrt(D),     D = sum_k (S_k - (k/m) S_m)^2
//   Wald = m S_m' D^-1 S_m            (D the ell x ell analogue)
// The 1/sqrt(m) Wiener scaling cancels.
double scalar_path(Rng& rng, std::size_t m, std::vector<double>& partial,
                   Statistic statistic) {
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    s += rng.normal();
    partial[k] = s;
  }
  const double slope = s / static_cast<double>(m);
  double dsum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dev = partial[k] - static_cast<double>(k + 1) * slope;
    dsum += dev * dev;
  }
  const double md = static_cast<double>(m);
  if (statistic == Statistic::t) return std::sqrt(md) * s / std::sqrt(dsum);
  return md * s * s / dsum;
}

double vector_path(Rng& rng, std::size_t m, std::size_t ell,
                   std::vector<double>& partial) {
  std::vector<double> s(ell, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < ell; ++i) {
      s[i] += rng.normal();
      partial[k * ell + i] = s[i];
    }
  }
  Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ell),
                                               static_cast<Eigen::Index>(ell));
  Eigen::VectorXd dev(static_cast<Eigen::Index>(ell));
  for (std::size_t k = 0; k < m; ++k) {
    const double frac = static_cast<double>(k + 1) / static_cast<double>(m);
    for (std::size_t i = 0; i < ell; ++i) {
      dev(static_cast<Eigen::Index>(i)) = partial[k * ell + i] - frac * s[i];
    }
    dmat.selfadjointView<Eigen::Lower>().rankUpdate(dev);
  }
  const Eigen::Map<const Eigen::VectorXd> end(s.data(),
                                              static_cast<Eigen::Index>(ell));
  const Eigen::LLT<Eigen::MatrixXd> llt(
      dmat.selfadjointView<Eigen::Lower>().toDenseMatrix());
  return static_cast<double>(m) * end.dot(llt.solve(end));
}

}  // namespace

std::vector<double> simulate_functional(const CriticalValueSimulation& sim) {
  validate(sim);
  std::vector<double> draws(sim.paths);
  parallel_for(sim.paths, sim.threads, [&](std::size_t p) {
    thread_local std::vector<double> partial;
    partial.resize(sim.grid * sim.ell);
    Rng rng(sim.seed.child(p));
    draws[p] = sim.ell == 1
                   ? scalar_path(rng, sim.grid, partial, sim.statistic)
                   : vector_path(rng, sim.grid, sim.ell, partial);
  });
  return draws;
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of empty sample");
  require_probability(p, "quantile");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<CriticalValueEstimate> simulate_critical_values(
    const CriticalValueSimulation& sim) {
  std::vector<double> draws = simulate_functional(sim);
  std::sort(draws.begin(), draws.end());
  std::vector<double> quantiles = sim.quantiles;
  std::sort(quantiles.begin(), quantiles.end());
  std::vector<CriticalValueEstimate> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    out.push_back({sim.statistic, sim.ell, q, sorted_quantile(draws, q),
                   sim.paths, sim.grid, sim.seed.master_seed});
  }
  return out;
}

void write_critical_values_csv(std::ostream& out,
                               std::span<const CriticalValueEstimate> rows) {
  out << "statistic,ell,quantile,value,paths,grid,seed\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{:.6f},{},{},{}\n", to_string(r.statistic), r.ell,
               r.quantile, r.value, r.paths, r.grid, r.seed);
  }
}

}  // namespace sgdinf
