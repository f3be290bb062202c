#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "sgdinf/errors.hpp"

namespace sgdinf {

/// Dense d-dimensional coefficient vector. Non-empty.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t d, double fill = 0.0);
  ParamVector(std::initializer_list<double> values);
  explicit ParamVector(std::vector<double> values);

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }

  double operator[](std::size_t i) const noexcept { return v_[i]; }
  double& operator[](std::size_t i) noexcept { return v_[i]; }

  std::span<const double> view() const noexcept { return v_; }
  std::span<double> view() noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

  bool all_finite() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> v_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Symmetric d x d matrix stored as its packed lower triangle, so (i,j) and
/// (j,i) are the same storage cell.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t d);

  std::size_t dim() const noexcept { return d_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[index(i, j)];
  }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    data_[index(i, j)] = value;
  }
  void add(std::size_t i, std::size_t j, double value) noexcept {
    data_[index(i, j)] += value;
  }

  /// this += alpha * v v'
  void rank1_update(double alpha, std::span<const double> v);
  /// this += alpha * (u v' + v u')
  void rank2_update(double alpha, std::span<const double> u,
                    std::span<const double> v);
  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator*=(double s) noexcept;

  double trace() const noexcept;
  double frobenius_norm() const noexcept;
  bool all_finite() const noexcept;

  /// Row-major dense copy (d*d entries).
  std::vector<double> dense() const;
  static SymMatrix from_dense(std::span<const double> rowmajor, std::size_t d);

  static SymMatrix outer(std::span<const double> v, double scale = 1.0);

  std::span<const double> packed() const noexcept { return data_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Learning-rate law gamma_t = gamma0 * t^(-a), with gamma0 > 0 and 1/2 < a < 1.
class StepSchedule {
 public:
  StepSchedule(double gamma0, double a);

  double gamma0() const noexcept { return gamma0_; }
  double exponent() const noexcept { return a_; }

  /// Step size at iteration t >= 1.
  double operator()(std::uint64_t t) const noexcept {
    return gamma0_ * std::pow(static_cast<double>(t), -a_);
  }

 private:
  double gamma0_;
  double a_;
};

inline double step_size(const StepSchedule& schedule, std::uint64_t t) {
  return schedule(t);
}

struct Observation {
  ParamVector x;
  double y = 0.0;
};

/// Throws unless obs.x has dimension d and every value is finite.
void validate(const Observation& obs, std::size_t d);

}  // namespace sgdinf
