#pragma once

#include <span>
#include <vector>

#include "sgdinf/core.hpp"

namespace sgdinf {

/// Ascending eigenvalues of a symmetric matrix.
std::vector<double> eigenvalues(const SymMatrix& m);

double min_eigenvalue(const SymMatrix& m);

/// Spectral condition number lambda_max / lambda_min; +inf when the matrix
/// is not positive definite.
double condition_number(const SymMatrix& m);

/// Solves m x = rhs for symmetric positive definite m. Throws DegenerateScale
/// if m is not positive definite or its condition number is >= max_condition.
std::vector<double> spd_solve(const SymMatrix& m, std::span<const double> rhs,
                              double max_condition = 1e12);

/// m^-1 s m^-1 for symmetric positive definite m, symmetrized. Same failure
/// rule as spd_solve.
SymMatrix sandwich(const SymMatrix& m, const SymMatrix& s,
                   double max_condition = 1e12);

}  // namespace sgdinf
