#pragma once

#include <Eigen/Dense>

#include "sgdinf/core.hpp"

namespace sgdinf::detail {

Eigen::MatrixXd to_eigen(const SymMatrix& m);
SymMatrix from_eigen(const Eigen::MatrixXd& m);

/// Throws DegenerateScale unless m is positive definite with condition
/// number below max_condition.
void require_well_conditioned(const Eigen::MatrixXd& m, double max_condition,
                              const char* what);

}  // namespace sgdinf::detail
