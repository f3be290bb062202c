#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sgdinf/core.hpp"
#include "sgdinf/inference.hpp"
#include "sgdinf/models.hpp"

namespace sgdinf {

/// Online sandwich estimator H^-1 S H^-1, with H and S the averaged
/// per-observation Hessians and score outer products. Scores are evaluated
/// at the iterate *before* the observation is consumed.
class PlugInState {
 public:
  explicit PlugInState(std::size_t d) : h_sum_(d), s_sum_(d) {}

  std::uint64_t count() const noexcept { return n_; }
  const SymMatrix& h_sum() const noexcept { return h_sum_; }
  const SymMatrix& s_sum() const noexcept { return s_sum_; }

  void update(const GradientModel& model, std::span<const double> beta_prev,
              const Observation& obs);

  /// Injects pre-summed totals; mainly for checking the sandwich algebra.
  static PlugInState from_sums(SymMatrix h_sum, SymMatrix s_sum,
                               std::uint64_t n);

  /// (H_sum/n)^-1 (S_sum/n) (H_sum/n)^-1. Throws NoEstimate for n = 0 and
  /// DegenerateScale when H_sum/n is singular (condition >= 1e12).
  SymMatrix finalize() const;

 private:
  std::uint64_t n_ = 0;
  SymMatrix h_sum_;
  SymMatrix s_sum_;
};

/// Increasing batch anchors 1 = a_1 < a_2 < ...; batch k runs from the
/// largest anchor <= k through k.
class BatchAnchorRule {
 public:
  /// a_m = floor(m^exponent), duplicates dropped.
  static BatchAnchorRule power(double exponent);
  /// a_m = 1 + (m - 1) * step, e.g. {1, 3, 5, ...} for step 2.
  static BatchAnchorRule arithmetic(std::uint64_t step);
  /// Power rule tied to the learning-rate exponent: a_m = floor(m^(1/(1-a))).
  static BatchAnchorRule for_learning_rate(double a);

  /// The first anchor strictly greater than `anchor`.
  std::uint64_t next_after(std::uint64_t anchor) const;

  std::string_view kind() const noexcept;

 private:
  enum class Kind { power, arithmetic };
  BatchAnchorRule(Kind kind, double exponent, std::uint64_t step)
      : kind_(kind), exponent_(exponent), step_(step) {}

  Kind kind_;
  double exponent_;
  std::uint64_t step_;
};

/// Overlapping batch-means estimator
///
///   U = (sum_k |B_k|)^-1 sum_k (S_k - |B_k| betabar)(S_k - |B_k| betabar)'
///
/// kept in O(d^2) memory: sum S_k S_k', sum |B_k| S_k, sum |B_k|^2 and
/// sum |B_k| suffice to expand the quadratic form for any betabar.
/// Inputs may be centred by a fixed `shift`, as for random scaling.
class BatchMeansState {
 public:
  BatchMeansState(std::size_t d, BatchAnchorRule rule);
  BatchMeansState(ParamVector shift, BatchAnchorRule rule);

  std::size_t dim() const noexcept { return open_sum_.size(); }
  std::uint64_t count() const noexcept { return t_; }
  std::uint64_t open_batch_size() const noexcept { return open_size_; }
  std::span<const double> open_batch_sum() const noexcept { return open_sum_; }
  double total_weight() const noexcept { return l1_; }

  /// Consumes iterate beta_t (raw iterate, not the average).
  void update(std::span<const double> beta);

  SymMatrix finalize(std::span<const double> beta_bar) const;
  /// Diagonal entry (j, j) only, O(1).
  double finalize_entry(std::span<const double> beta_bar, std::size_t j) const;

 private:
  BatchAnchorRule rule_;
  std::uint64_t t_ = 0;
  std::uint64_t next_anchor_ = 1;
  std::uint64_t open_size_ = 0;
  std::vector<double> shift_;
  std::vector<double> open_sum_;
  SymMatrix ss_;               // sum S_k S_k'
  std::vector<double> ls_;     // sum |B_k| S_k
  double l2_ = 0.0;            // sum |B_k|^2
  double l1_ = 0.0;            // sum |B_k|
};

enum class BatchMeanCentre {
  retained,  // betabar over the batches kept after dropping the first
  all,       // betabar over every iterate
};

/// Fixed batch means: split into M + 1 contiguous, equal-as-possible
/// batches, drop the first, and return
///   M^-1 sum_k n_k (mean_k - betabar)(mean_k - betabar)'.
SymMatrix batch_means_fixed(std::span<const ParamVector> iterates,
                            std::size_t batches,
                            BatchMeanCentre centre = BatchMeanCentre::retained);

/// beta_bar_j +- z_{1 - alpha/2} sqrt(upsilon_jj / n).
ConfidenceInterval normal_ci(double beta_bar_j, double upsilon_jj,
                             std::uint64_t n, double level);

}  // namespace sgdinf
