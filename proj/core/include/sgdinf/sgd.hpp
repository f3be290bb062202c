#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sgdinf/core.hpp"
#include "sgdinf/models.hpp"

namespace sgdinf {

/// Pull-style stream of observations. `next` fills `obs` and returns false
/// once the stream is exhausted.
class ObservationSource {
 public:
  virtual ~ObservationSource() = default;
  virtual bool next(Observation& obs) = 0;
};

/// Adapts an in-memory sequence. The sequence must outlive the source.
class SpanSource final : public ObservationSource {
 public:
  explicit SpanSource(std::span<const Observation> data) : data_(data) {}
  bool next(Observation& obs) override;

 private:
  std::span<const Observation> data_;
  std::size_t pos_ = 0;
};

/// SGD iterate beta_t plus the recursive Polyak-Ruppert average of the
/// iterates retained after burn-in.
///
/// The step clock t is global; iterates with t <= burn_in are excluded from
/// the average, and the retained ones are counted from 1 by avg_count().
class SgdState {
 public:
  SgdState(ParamVector beta0, std::uint64_t burn_in = 0);

  std::uint64_t t() const noexcept { return t_; }
  std::uint64_t burn_in() const noexcept { return burn_in_; }
  std::uint64_t avg_count() const noexcept { return avg_count_; }
  std::size_t dim() const noexcept { return beta_.size(); }

  const ParamVector& beta() const noexcept { return beta_; }
  /// The iterate before the most recent step (beta_0 before any step).
  const ParamVector& previous_beta() const noexcept { return prev_; }

  bool has_average() const noexcept { return avg_count_ > 0; }
  /// Throws NoEstimate while avg_count() == 0.
  const ParamVector& average() const;

  /// beta_t = beta_{t-1} - gamma_t * grad q(beta_{t-1}, obs), then the
  /// average is updated when t > burn_in. Returns true when the new iterate
  /// was retained. On a non-finite iterate the state is left unchanged and
  /// Divergence is thrown.
  bool step(const GradientModel& model, const Observation& obs,
            const StepSchedule& schedule);

 private:
  std::uint64_t t_ = 0;
  std::uint64_t burn_in_ = 0;
  std::uint64_t avg_count_ = 0;
  ParamVector beta_;
  ParamVector prev_;
  ParamVector bar_;
  std::vector<double> grad_;
};

SgdState sgd_init(ParamVector beta0, std::uint64_t burn_in = 0);

/// Value-returning single step.
SgdState sgd_step(SgdState state, const GradientModel& model,
                  const Observation& obs, const StepSchedule& schedule);

/// What a hook sees after each retained step.
struct StepEvent {
  std::uint64_t t;          // global iteration
  std::uint64_t retained;   // 1-based index among retained iterates
  std::span<const double> beta_prev;
  std::span<const double> beta;
  std::span<const double> beta_bar;
  const Observation& obs;
};

using StepHook = std::function<void(const StepEvent&)>;

/// Folds `step` over the source; every retained iterate is delivered to each
/// hook exactly once, in order.
SgdState sgd_run(ObservationSource& source, const GradientModel& model,
                 const StepSchedule& schedule, ParamVector beta0,
                 std::uint64_t burn_in, std::span<const StepHook> hooks = {});

}  // namespace sgdinf
