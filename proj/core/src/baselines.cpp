#include "sgdinf/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sgdinf/linalg.hpp"
#include "sgdinf/normal.hpp"

namespace sgdinf {

// --- plug-in ----------------------------------------------------------------

void PlugInState::update(const GradientModel& model,
                         std::span<const double> beta_prev,
                         const Observation& obs) {
  if (model.dim() != h_sum_.dim()) throw DimensionMismatch(h_sum_.dim(), model.dim());
  model.add_hessian_contrib(beta_prev, obs, h_sum_);
  model.add_score_outer(beta_prev, obs, s_sum_);
  ++n_;
}

PlugInState PlugInState::from_sums(SymMatrix h_sum, SymMatrix s_sum,
                                   std::uint64_t n) {
  if (h_sum.dim() != s_sum.dim()) throw DimensionMismatch(h_sum.dim(), s_sum.dim());
  PlugInState state(h_sum.dim());
  state.h_sum_ = std::move(h_sum);
  state.s_sum_ = std::move(s_sum);
  state.n_ = n;
  return state;
}

SymMatrix PlugInState::finalize() const {
  if (n_ == 0) throw NoEstimate("plug-in: no observations");
  const double inv_n = 1.0 / static_cast<double>(n_);
  SymMatrix h = h_sum_;
  h *= inv_n;
  SymMatrix s = s_sum_;
  s *= inv_n;
  return sandwich(h, s);
}

// --- batch anchors ----------------------------------------------------------

BatchAnchorRule BatchAnchorRule::power(double exponent) {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw InvalidArgument("batch anchor exponent must exceed 1");
  }
  return {Kind::power, exponent, 0};
}

BatchAnchorRule BatchAnchorRule::arithmetic(std::uint64_t step) {
  if (step == 0) throw InvalidArgument("batch anchor step must be >= 1");
  return {Kind::arithmetic, 0.0, step};
}

BatchAnchorRule BatchAnchorRule::for_learning_rate(double a) {
  if (!(a > 0.5 && a < 1.0)) {
    throw InvalidArgument("learning-rate exponent must lie in (1/2, 1)");
  }
  return power(1.0 / (1.0 - a));
}

std::uint64_t BatchAnchorRule::next_after(std::uint64_t anchor) const {
  if (kind_ == Kind::arithmetic) {
    if (anchor < 1) return 1;
    return anchor + step_ - (anchor - 1) % step_;
  }
  // Smallest m with floor(m^e) > anchor; start from the inverse and fix up
  // floating-point slop in both directions.
  // Saturates: past 2^64 there is simply no further anchor.
  auto value = [this](double m) {
    const double p = std::floor(std::pow(m, exponent_));
    if (p >= 0x1p64) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(p);
  };
  double m = std::floor(std::pow(static_cast<double>(anchor), 1.0 / exponent_));
  if (m < 1.0) m = 1.0;
  while (m > 1.0 && value(m - 1.0) > anchor) m -= 1.0;
  while (value(m) <= anchor) m += 1.0;
  return value(m);
}

std::string_view BatchAnchorRule::kind() const noexcept {
  return kind_ == Kind::power ? "power" : "arithmetic";
}

// --- recursive batch means --------------------------------------------------

BatchMeansState::BatchMeansState(std::size_t d, BatchAnchorRule rule)
    : rule_(rule),
      shift_(d, 0.0),
      open_sum_(d, 0.0),
      ss_(d),
      ls_(d, 0.0) {
  if (d == 0) throw InvalidArgument("batch means needs d >= 1");
}

BatchMeansState::BatchMeansState(ParamVector shift, BatchAnchorRule rule)
    : BatchMeansState(shift.size(), rule) {
  shift_ = shift.values();
}

void BatchMeansState::update(std::span<const double> beta) {
  const std::size_t d = dim();
  if (beta.size() != d) throw DimensionMismatch(d, beta.size());
  ++t_;
  if (t_ == next_anchor_) {
    std::fill(open_sum_.begin(), open_sum_.end(), 0.0);
    open_size_ = 0;
    next_anchor_ = rule_.next_after(t_);
  }
  ++open_size_;
  const double len = static_cast<double>(open_size_);
  for (std::size_t i = 0; i < d; ++i) {
    open_sum_[i] += beta[i] - shift_[i];
    ls_[i] += len * open_sum_[i];
  }
  ss_.rank1_update(1.0, open_sum_);
  l2_ += len * len;
  l1_ += len;
}

SymMatrix BatchMeansState::finalize(std::span<const double> beta_bar) const {
  const std::size_t d = dim();
  if (beta_bar.size() != d) throw DimensionMismatch(d, beta_bar.size());
  if (!(l1_ > 0.0)) throw NoEstimate("batch means: no batches");
  std::vector<double> centre(d);
  for (std::size_t i = 0; i < d; ++i) centre[i] = beta_bar[i] - shift_[i];
  SymMatrix u = ss_;
  u.rank2_update(-1.0, centre, ls_);
  u.rank1_update(l2_, centre);
  u *= 1.0 / l1_;
  return u;
}

double BatchMeansState::finalize_entry(std::span<const double> beta_bar,
                                       std::size_t j) const {
  const std::size_t d = dim();
  if (beta_bar.size() != d) throw DimensionMismatch(d, beta_bar.size());
  if (j >= d) throw InvalidArgument("coordinate out of range");
  if (!(l1_ > 0.0)) throw NoEstimate("batch means: no batches");
  const double c = beta_bar[j] - shift_[j];
  return (ss_(j, j) - 2.0 * c * ls_[j] + l2_ * c * c) / l1_;
}

// --- fixed batch means ------------------------------------------------------

SymMatrix batch_means_fixed(std::span<const ParamVector> iterates,
                            std::size_t batches, BatchMeanCentre centre) {
  if (batches == 0) throw InvalidArgument("need at least one batch");
  const std::size_t n = iterates.size();
  if (n < batches + 1) {
    throw InvalidArgument("need at least " + std::to_string(batches + 1) +
                          " iterates for " + std::to_string(batches) +
                          " batches plus burn-in");
  }
  const std::size_t d = iterates.front().size();
  const std::size_t groups = batches + 1;
  auto boundary = [&](std::size_t k) { return k * n / groups; };

  std::vector<std::vector<double>> means(batches, std::vector<double>(d, 0.0));
  std::vector<double> sizes(batches);
  std::vector<double> bar(d, 0.0);
  for (std::size_t k = 1; k < groups; ++k) {
    const std::size_t lo = boundary(k);
    const std::size_t hi = boundary(k + 1);
    auto& mean = means[k - 1];
    for (std::size_t t = lo; t < hi; ++t) {
      if (iterates[t].size() != d) throw DimensionMismatch(d, iterates[t].size());
      for (std::size_t i = 0; i < d; ++i) mean[i] += iterates[t][i];
    }
    for (std::size_t i = 0; i < d; ++i) bar[i] += mean[i];
    sizes[k - 1] = static_cast<double>(hi - lo);
    for (double& m : mean) m /= sizes[k - 1];
  }
  if (centre == BatchMeanCentre::retained) {
    const double kept = static_cast<double>(n - boundary(1));
    for (double& b : bar) b /= kept;
  } else {
    std::fill(bar.begin(), bar.end(), 0.0);
    for (const auto& beta : iterates) {
      for (std::size_t i = 0; i < d; ++i) bar[i] += beta[i];
    }
    for (double& b : bar) b /= static_cast<double>(n);
  }

  SymMatrix u(d);
  std::vector<double> dev(d);
  for (std::size_t k = 0; k < batches; ++k) {
    for (std::size_t i = 0; i < d; ++i) dev[i] = means[k][i] - bar[i];
    u.rank1_update(sizes[k], dev);
  }
  u *= 1.0 / static_cast<double>(batches);
  return u;
}

ConfidenceInterval normal_ci(double beta_bar_j, double upsilon_jj,
                             std::uint64_t n, double level) {
  if (n == 0) throw InvalidArgument("confidence interval needs n >= 1");
  if (!(upsilon_jj >= 0.0)) {
    throw DegenerateScale("negative variance entry " + std::to_string(upsilon_jj));
  }
  const double z = normal_quantile(one_sided_probability(level));
  const double half = z * std::sqrt(upsilon_jj / static_cast<double>(n));
  return {beta_bar_j - half, beta_bar_j + half, level, upsilon_jj == 0.0};
}

}  // namespace sgdinf
