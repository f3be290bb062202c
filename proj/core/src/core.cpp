#include "sgdinf/core.hpp"

#include <algorithm>
#include <string>

namespace sgdinf {

namespace {

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("non-finite vector entry");
  }
}

}  // namespace

ParamVector::ParamVector(std::size_t d, double fill) : v_(d, fill) {
  if (d == 0) throw InvalidArgument("ParamVector needs d >= 1");
  require_finite(v_);
}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(std::vector<double>(values)) {}

ParamVector::ParamVector(std::vector<double> values) : v_(std::move(values)) {
  if (v_.empty()) throw InvalidArgument("ParamVector needs d >= 1");
  require_finite(v_);
}

bool ParamVector::all_finite() const noexcept {
  return std::all_of(v_.begin(), v_.end(),
                     [](double x) { return std::isfinite(x); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

SymMatrix::SymMatrix(std::size_t d) : d_(d), data_(d * (d + 1) / 2, 0.0) {}

void SymMatrix::rank1_update(double alpha, std::span<const double> v) {
  if (v.size() != d_) throw DimensionMismatch(d_, v.size());
  double* cell = data_.data();
  for (std::size_t i = 0; i < d_; ++i) {
    const double avi = alpha * v[i];
    for (std::size_t j = 0; j <= i; ++j) *cell++ += avi * v[j];
  }
}

void SymMatrix::rank2_update(double alpha, std::span<const double> u,
                             std::span<const double> v) {
  if (u.size() != d_) throw DimensionMismatch(d_, u.size());
  if (v.size() != d_) throw DimensionMismatch(d_, v.size());
  double* cell = data_.data();
  for (std::size_t i = 0; i < d_; ++i) {
    const double aui = alpha * u[i];
    const double avi = alpha * v[i];
    for (std::size_t j = 0; j <= i; ++j) *cell++ += aui * v[j] + avi * u[j];
  }
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  if (other.d_ != d_) throw DimensionMismatch(d_, other.d_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) noexcept {
  for (double& x : data_) x *= s;
  return *this;
}

double SymMatrix::trace() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < d_; ++i) acc += (*this)(i, i);
  return acc;
}

double SymMatrix::frobenius_norm() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double x = (*this)(i, j);
      acc += (i == j ? 1.0 : 2.0) * x * x;
    }
  }
  return std::sqrt(acc);
}

bool SymMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

std::vector<double> SymMatrix::dense() const {
  std::vector<double> out(d_ * d_);
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t j = 0; j < d_; ++j) out[i * d_ + j] = (*this)(i, j);
  }
  return out;
}

SymMatrix SymMatrix::from_dense(std::span<const double> rowmajor,
                                std::size_t d) {
  if (rowmajor.size() != d * d) throw DimensionMismatch(d * d, rowmajor.size());
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      m.set(i, j, 0.5 * (rowmajor[i * d + j] + rowmajor[j * d + i]));
    }
  }
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v, double scale) {
  SymMatrix m(v.size());
  m.rank1_update(scale, v);
  return m;
}

StepSchedule::StepSchedule(double gamma0, double a) : gamma0_(gamma0), a_(a) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw InvalidArgument("step schedule needs gamma0 > 0, got " +
                          std::to_string(gamma0));
  }
  if (!(a > 0.5 && a < 1.0)) {
    throw InvalidArgument("step schedule needs 1/2 < a < 1, got " +
                          std::to_string(a));
  }
}

void validate(const Observation& obs, std::size_t d) {
  if (obs.x.size() != d) throw DimensionMismatch(d, obs.x.size());
  if (!std::isfinite(obs.y)) throw InvalidArgument("non-finite response");
  if (!obs.x.all_finite()) throw InvalidArgument("non-finite covariate");
}

}  // namespace sgdinf
