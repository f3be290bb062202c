#include "sgdinf/models.hpp"

#include <cmath>
#include <string>

namespace sgdinf {

double sigmoid(double u) noexcept {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

namespace {

double softplus(double u) noexcept {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

}  // namespace

void GradientModel::check(std::span<const double> beta,
                          const Observation& obs) const {
  if (beta.size() != dim()) throw DimensionMismatch(dim(), beta.size());
  if (obs.x.size() != dim()) throw DimensionMismatch(dim(), obs.x.size());
}

void GradientModel::add_hessian_contrib(std::span<const double>,
                                        const Observation&, SymMatrix&,
                                        double) const {
  throw InvalidArgument(std::string(name()) +
                        " model has no Hessian hook for the plug-in estimator");
}

void GradientModel::add_score_outer(std::span<const double>,
                                    const Observation&, SymMatrix&,
                                    double) const {
  throw InvalidArgument(std::string(name()) +
                        " model has no score hook for the plug-in estimator");
}

ParamVector GradientModel::gradient(const ParamVector& beta,
                                    const Observation& obs) const {
  ParamVector out(dim());
  gradient(beta.view(), obs, out.view());
  return out;
}

SymMatrix GradientModel::hessian_contrib(const ParamVector& beta,
                                         const Observation& obs) const {
  SymMatrix out(dim());
  add_hessian_contrib(beta.view(), obs, out);
  return out;
}

SymMatrix GradientModel::score_outer(const ParamVector& beta,
                                     const Observation& obs) const {
  SymMatrix out(dim());
  add_score_outer(beta.view(), obs, out);
  return out;
}

// --- linear -----------------------------------------------------------------

LinearModel::LinearModel(std::size_t d) : d_(d) {
  if (d == 0) throw InvalidArgument("model dimension must be >= 1");
}

double LinearModel::loss(std::span<const double> beta,
                         const Observation& obs) const {
  check(beta, obs);
  const double r = obs.y - dot(obs.x.view(), beta);
  return 0.5 * r * r;
}

void LinearModel::gradient(std::span<const double> beta, const Observation& obs,
                           std::span<double> out) const {
  check(beta, obs);
  const double resid = dot(obs.x.view(), beta) - obs.y;
  for (std::size_t i = 0; i < d_; ++i) out[i] = obs.x[i] * resid;
}

void LinearModel::add_hessian_contrib(std::span<const double> beta,
                                      const Observation& obs, SymMatrix& acc,
                                      double weight) const {
  check(beta, obs);
  acc.rank1_update(weight, obs.x.view());
}

void LinearModel::add_score_outer(std::span<const double> beta,
                                  const Observation& obs, SymMatrix& acc,
                                  double weight) const {
  check(beta, obs);
  const double r = obs.y - dot(obs.x.view(), beta);
  acc.rank1_update(weight * r * r, obs.x.view());
}

// --- logistic ---------------------------------------------------------------

LogisticModel::LogisticModel(std::size_t d) : d_(d) {
  if (d == 0) throw InvalidArgument("model dimension must be >= 1");
}

void LogisticModel::check_label(double y) {
  if (y != 0.0 && y != 1.0) {
    throw InvalidArgument("logistic label must be 0 or 1, got " +
                          std::to_string(y));
  }
}

double LogisticModel::loss(std::span<const double> beta,
                           const Observation& obs) const {
  check(beta, obs);
  check_label(obs.y);
  const double u = dot(obs.x.view(), beta);
  return softplus(u) - obs.y * u;
}

void LogisticModel::gradient(std::span<const double> beta,
                             const Observation& obs,
                             std::span<double> out) const {
  check(beta, obs);
  check_label(obs.y);
  const double g = sigmoid(dot(obs.x.view(), beta)) - obs.y;
  for (std::size_t i = 0; i < d_; ++i) out[i] = g * obs.x[i];
}

void LogisticModel::add_hessian_contrib(std::span<const double> beta,
                                        const Observation& obs, SymMatrix& acc,
                                        double weight) const {
  check(beta, obs);
  const double s = sigmoid(dot(obs.x.view(), beta));
  acc.rank1_update(weight * s * (1.0 - s), obs.x.view());
}

void LogisticModel::add_score_outer(std::span<const double> beta,
                                    const Observation& obs, SymMatrix& acc,
                                    double weight) const {
  check(beta, obs);
  check_label(obs.y);
  const double g = sigmoid(dot(obs.x.view(), beta)) - obs.y;
  acc.rank1_update(weight * g * g, obs.x.view());
}

// --- factory and free functions ---------------------------------------------

std::unique_ptr<GradientModel> make_model(std::string_view name,
                                          std::size_t d) {
  if (name == "linear") return std::make_unique<LinearModel>(d);
  if (name == "logistic") return std::make_unique<LogisticModel>(d);
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

ParamVector linear_gradient(const ParamVector& beta, const Observation& obs) {
  return LinearModel(beta.size()).gradient(beta, obs);
}

ParamVector logistic_gradient(const ParamVector& beta, const Observation& obs) {
  return LogisticModel(beta.size()).gradient(beta, obs);
}

SymMatrix linear_hessian_contrib(const Observation& obs) {
  return SymMatrix::outer(obs.x.view());
}

SymMatrix linear_score_outer(const ParamVector& beta, const Observation& obs) {
  return LinearModel(beta.size()).score_outer(beta, obs);
}

SymMatrix logistic_hessian_contrib(const ParamVector& beta,
                                   const Observation& obs) {
  return LogisticModel(beta.size()).hessian_contrib(beta, obs);
}

SymMatrix logistic_score_outer(const ParamVector& beta,
                               const Observation& obs) {
  return LogisticModel(beta.size()).score_outer(beta, obs);
}

}  // namespace sgdinf
