#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>

#include "sgdinf/core.hpp"

namespace sgdinf {

/// A per-observation loss q(beta, Y) with its gradient. Random scaling only
/// needs `gradient`; the plug-in sandwich estimator additionally needs the
/// Hessian and score-outer-product hooks.
///
/// Implementations are pure: none of the methods mutate the model.
class GradientModel {
 public:
  virtual ~GradientModel() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t dim() const noexcept = 0;

  virtual double loss(std::span<const double> beta,
                      const Observation& obs) const = 0;

  /// Writes grad q(beta, obs) into `out`.
  virtual void gradient(std::span<const double> beta, const Observation& obs,
                        std::span<double> out) const = 0;

  virtual bool has_plugin_hooks() const noexcept { return false; }

  /// acc += weight * (per-observation Hessian at beta).
  virtual void add_hessian_contrib(std::span<const double> beta,
                                   const Observation& obs, SymMatrix& acc,
                                   double weight = 1.0) const;
  /// acc += weight * grad grad'.
  virtual void add_score_outer(std::span<const double> beta,
                               const Observation& obs, SymMatrix& acc,
                               double weight = 1.0) const;

  ParamVector gradient(const ParamVector& beta, const Observation& obs) const;
  SymMatrix hessian_contrib(const ParamVector& beta,
                            const Observation& obs) const;
  SymMatrix score_outer(const ParamVector& beta, const Observation& obs) const;

 protected:
  void check(std::span<const double> beta, const Observation& obs) const;
};

/// Least squares, q = (y - x'beta)^2 / 2.
class LinearModel final : public GradientModel {
 public:
  explicit LinearModel(std::size_t d);

  std::string_view name() const noexcept override { return "linear"; }
  std::size_t dim() const noexcept override { return d_; }
  double loss(std::span<const double> beta,
              const Observation& obs) const override;
  void gradient(std::span<const double> beta, const Observation& obs,
                std::span<double> out) const override;
  bool has_plugin_hooks() const noexcept override { return true; }
  void add_hessian_contrib(std::span<const double> beta, const Observation& obs,
                           SymMatrix& acc, double weight = 1.0) const override;
  void add_score_outer(std::span<const double> beta, const Observation& obs,
                       SymMatrix& acc, double weight = 1.0) const override;

  using GradientModel::gradient;

 private:
  std::size_t d_;
};

/// Logistic log-loss with y in {0, 1}.
class LogisticModel final : public GradientModel {
 public:
  explicit LogisticModel(std::size_t d);

  std::string_view name() const noexcept override { return "logistic"; }
  std::size_t dim() const noexcept override { return d_; }
  double loss(std::span<const double> beta,
              const Observation& obs) const override;
  void gradient(std::span<const double> beta, const Observation& obs,
                std::span<double> out) const override;
  bool has_plugin_hooks() const noexcept override { return true; }
  void add_hessian_contrib(std::span<const double> beta, const Observation& obs,
                           SymMatrix& acc, double weight = 1.0) const override;
  void add_score_outer(std::span<const double> beta, const Observation& obs,
                       SymMatrix& acc, double weight = 1.0) const override;

  using GradientModel::gradient;

 private:
  static void check_label(double y);

  std::size_t d_;
};

/// 1 / (1 + exp(-u)) without overflow for large |u|.
double sigmoid(double u) noexcept;

std::unique_ptr<GradientModel> make_model(std::string_view name, std::size_t d);

// Free-function forms of the two models.
ParamVector linear_gradient(const ParamVector& beta, const Observation& obs);
ParamVector logistic_gradient(const ParamVector& beta, const Observation& obs);
SymMatrix linear_hessian_contrib(const Observation& obs);
SymMatrix linear_score_outer(const ParamVector& beta, const Observation& obs);
SymMatrix logistic_hessian_contrib(const ParamVector& beta,
                                   const Observation& obs);
SymMatrix logistic_score_outer(const ParamVector& beta, const Observation& obs);

}  // namespace sgdinf
