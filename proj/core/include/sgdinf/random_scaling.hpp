#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgdinf/core.hpp"

namespace sgdinf {

/// Online random-scaling matrix
///
///   V_t = t^-2 sum_{s<=t} (sum_{i<=s} beta_i - s * betabar_t)(...)'
///
/// kept in constant memory through
///
///   A_t = A_{t-1} + t^2 betabar_t betabar_t'
///   b_t = b_{t-1} + t^2 betabar_t
///   V_t = t^-2 (A_t - betabar_t b_t' - b_t betabar_t' + betabar_t betabar_t' sum s^2)
///
/// `update` consumes the running average betabar_t, not the raw iterate.
///
/// The statistic only depends on deviations beta_i - betabar, so every input
/// may be centred by a fixed `shift` without changing V in exact arithmetic.
/// Choosing the shift near the limit keeps A_t = O(t^2) instead of O(t^3)
/// and recovers the digits lost to cancellation in `finalize`.
class RandomScalingState {
 public:
  explicit RandomScalingState(std::size_t d);
  explicit RandomScalingState(ParamVector shift);

  std::size_t dim() const noexcept { return b_.size(); }
  std::uint64_t count() const noexcept { return t_; }
  double s2sum() const noexcept { return s2sum_; }
  const SymMatrix& a_sum() const noexcept { return a_; }
  std::span<const double> b_sum() const noexcept { return b_; }
  std::span<const double> shift() const noexcept { return shift_; }

  void update(std::span<const double> beta_bar);

  /// V_t. Throws NoEstimate when no iterate has been seen.
  SymMatrix finalize() const;

 private:
  std::uint64_t t_ = 0;
  double s2sum_ = 0.0;
  SymMatrix a_;
  std::vector<double> b_;
  std::vector<double> bar_;
  std::vector<double> shift_;
};

/// Single diagonal entry V_t(j,j): three scalars instead of a d x d matrix.
class ScalarScalingState {
 public:
  explicit ScalarScalingState(std::size_t coordinate, double shift = 0.0)
      : coordinate_(coordinate), shift_(shift) {}

  std::size_t coordinate() const noexcept { return coordinate_; }
  std::uint64_t count() const noexcept { return t_; }

  void update(double beta_bar_j) noexcept {
    ++t_;
    const double c = beta_bar_j - shift_;
    const double w = static_cast<double>(t_) * static_cast<double>(t_);
    a_ += w * c * c;
    b_ += w * c;
    s2sum_ += w;
    bar_ = c;
  }

  /// Picks coordinate() out of a full average vector.
  void update(std::span<const double> beta_bar) {
    update(beta_bar[coordinate_]);
  }

  double finalize() const;

 private:
  std::size_t coordinate_;
  double shift_;
  std::uint64_t t_ = 0;
  double a_ = 0.0;
  double b_ = 0.0;
  double s2sum_ = 0.0;
  double bar_ = 0.0;
};

/// Direct two-pass evaluation of V_n on a stored sequence of iterates.
SymMatrix random_scaling_batch(std::span<const ParamVector> iterates);

}  // namespace sgdinf
