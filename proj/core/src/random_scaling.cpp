#include "sgdinf/random_scaling.hpp"

#include <cassert>
#include <cmath>

namespace sgdinf {

RandomScalingState::RandomScalingState(std::size_t d)
    : a_(d), b_(d, 0.0), bar_(d, 0.0), shift_(d, 0.0) {
  if (d == 0) throw InvalidArgument("random scaling needs d >= 1");
}

RandomScalingState::RandomScalingState(ParamVector shift)
    : RandomScalingState(shift.size()) {
  shift_ = shift.values();
}

void RandomScalingState::update(std::span<const double> beta_bar) {
  const std::size_t d = dim();
  if (beta_bar.size() != d) throw DimensionMismatch(d, beta_bar.size());
  ++t_;
  const double w = static_cast<double>(t_) * static_cast<double>(t_);
  for (std::size_t i = 0; i < d; ++i) {
    bar_[i] = beta_bar[i] - shift_[i];
    b_[i] += w * bar_[i];
  }
  a_.rank1_update(w, bar_);
  s2sum_ += w;
#ifndef NDEBUG
  const double tt = static_cast<double>(t_);
  const double closed = tt * (tt + 1.0) * (2.0 * tt + 1.0) / 6.0;
  assert(std::fabs(s2sum_ - closed) <= 1e-12 * closed);
#endif
}

SymMatrix RandomScalingState::finalize() const {
  if (t_ == 0) throw NoEstimate("random scaling: no iterates");
  SymMatrix v = a_;
  v.rank2_update(-1.0, bar_, b_);
  v.rank1_update(s2sum_, bar_);
  const double t = static_cast<double>(t_);
  v *= 1.0 / (t * t);
  return v;
}

double ScalarScalingState::finalize() const {
  if (t_ == 0) throw NoEstimate("random scaling: no iterates");
  const double t = static_cast<double>(t_);
  return (a_ - 2.0 * bar_ * b_ + bar_ * bar_ * s2sum_) / (t * t);
}

SymMatrix random_scaling_batch(std::span<const ParamVector> iterates) {
  if (iterates.empty()) throw NoEstimate("random scaling: no iterates");
  const std::size_t d = iterates.front().size();
  const std::size_t n = iterates.size();

  std::vector<double> mean(d, 0.0);
  for (const auto& beta : iterates) {
    if (beta.size() != d) throw DimensionMismatch(d, beta.size());
    for (std::size_t i = 0; i < d; ++i) mean[i] += beta[i];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  SymMatrix v(d);
  std::vector<double> partial(d, 0.0);
  std::vector<double> dev(d);
  for (std::size_t s = 1; s <= n; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      partial[i] += iterates[s - 1][i];
      dev[i] = partial[i] - static_cast<double>(s) * mean[i];
    }
    v.rank1_update(1.0, dev);
  }
  v *= 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  return v;
}

}  // namespace sgdinf
