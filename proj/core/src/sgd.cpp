#include "sgdinf/sgd.hpp"

#include <cmath>
#include <utility>

namespace sgdinf {

bool SpanSource::next(Observation& obs) {
  if (pos_ >= data_.size()) return false;
  obs = data_[pos_++];
  return true;
}

SgdState::SgdState(ParamVector beta0, std::uint64_t burn_in)
    : burn_in_(burn_in),
      beta_(std::move(beta0)),
      prev_(beta_),
      bar_(beta_.size()),
      grad_(beta_.size()) {
  if (beta_.empty()) throw InvalidArgument("initial iterate must have d >= 1");
}

const ParamVector& SgdState::average() const {
  if (avg_count_ == 0) {
    throw NoEstimate("no averaged estimate yet (t=" + std::to_string(t_) +
                     ", burn_in=" + std::to_string(burn_in_) + ")");
  }
  return bar_;
}

bool SgdState::step(const GradientModel& model, const Observation& obs,
                    const StepSchedule& schedule) {
  const std::size_t d = beta_.size();
  if (model.dim() != d) throw DimensionMismatch(d, model.dim());
  const std::uint64_t t = t_ + 1;

  model.gradient(beta_.view(), obs, grad_);
  const double gamma = schedule(t);
  bool finite = true;
  for (std::size_t i = 0; i < d; ++i) {
    const double next = beta_[i] - gamma * grad_[i];
    finite = finite && std::isfinite(next);
    grad_[i] = next;
  }
  if (!finite) throw Divergence(t, "non-finite iterate");

  std::swap(prev_, beta_);
  for (std::size_t i = 0; i < d; ++i) beta_[i] = grad_[i];
  t_ = t;
  if (t_ <= burn_in_) return false;

  ++avg_count_;
  const double k = static_cast<double>(avg_count_);
  const double keep = (k - 1.0) / k;
  for (std::size_t i = 0; i < d; ++i) bar_[i] = bar_[i] * keep + beta_[i] / k;
  return true;
}

SgdState sgd_init(ParamVector beta0, std::uint64_t burn_in) {
  return SgdState(std::move(beta0), burn_in);
}

SgdState sgd_step(SgdState state, const GradientModel& model,
                  const Observation& obs, const StepSchedule& schedule) {
  state.step(model, obs, schedule);
  return state;
}

SgdState sgd_run(ObservationSource& source, const GradientModel& model,
                 const StepSchedule& schedule, ParamVector beta0,
                 std::uint64_t burn_in, std::span<const StepHook> hooks) {
  SgdState state(std::move(beta0), burn_in);
  Observation obs;
  while (source.next(obs)) {
    if (!state.step(model, obs, schedule)) continue;
    const StepEvent event{state.t(),
                          state.avg_count(),
                          state.previous_beta().view(),
                          state.beta().view(),
                          state.average().view(),
                          obs};
    for (const auto& hook : hooks) hook(event);
  }
  return state;
}

}  // namespace sgdinf
