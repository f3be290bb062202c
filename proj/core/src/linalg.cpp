#include "sgdinf/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "eigen_bridge.hpp"

namespace sgdinf {

namespace detail {

Eigen::MatrixXd to_eigen(const SymMatrix& m) {
  const auto d = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      out(i, j) = out(j, i) = m(static_cast<std::size_t>(i),
                                static_cast<std::size_t>(j));
    }
  }
  return out;
}

SymMatrix from_eigen(const Eigen::MatrixXd& m) {
  const auto d = static_cast<std::size_t>(m.rows());
  SymMatrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const auto ei = static_cast<Eigen::Index>(i);
      const auto ej = static_cast<Eigen::Index>(j);
      out.set(i, j, 0.5 * (m(ei, ej) + m(ej, ei)));
    }
  }
  return out;
}

void require_well_conditioned(const Eigen::MatrixXd& m, double max_condition,
                              const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi / lo < max_condition)) {
    throw DegenerateScale(std::string(what) +
                          " is singular or ill-conditioned (eigenvalues " +
                          std::to_string(lo) + " .. " + std::to_string(hi) +
                          ")");
  }
}

}  // namespace detail

std::vector<double> eigenvalues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::to_eigen(m),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double min_eigenvalue(const SymMatrix& m) {
  if (m.dim() == 0) throw InvalidArgument("empty matrix");
  return eigenvalues(m).front();
}

double condition_number(const SymMatrix& m) {
  const auto ev = eigenvalues(m);
  if (ev.empty() || !(ev.front() > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return ev.back() / ev.front();
}

std::vector<double> spd_solve(const SymMatrix& m, std::span<const double> rhs,
                              double max_condition) {
  if (rhs.size() != m.dim()) throw DimensionMismatch(m.dim(), rhs.size());
  const Eigen::MatrixXd dense = detail::to_eigen(m);
  detail::require_well_conditioned(dense, max_condition, "matrix");
  const Eigen::LLT<Eigen::MatrixXd> llt(dense);
  const Eigen::Map<const Eigen::VectorXd> b(
      rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd x = llt.solve(b);
  return {x.data(), x.data() + x.size()};
}

SymMatrix sandwich(const SymMatrix& m, const SymMatrix& s,
                   double max_condition) {
  if (s.dim() != m.dim()) throw DimensionMismatch(m.dim(), s.dim());
  const Eigen::MatrixXd dense = detail::to_eigen(m);
  detail::require_well_conditioned(dense, max_condition, "matrix");
  const Eigen::LLT<Eigen::MatrixXd> llt(dense);
  const Eigen::MatrixXd left = llt.solve(detail::to_eigen(s));
  const Eigen::MatrixXd both = llt.solve(left.transpose());
  return detail::from_eigen(both);
}

}  // namespace sgdinf
