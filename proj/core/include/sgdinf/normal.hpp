#pragma once

namespace sgdinf {

/// Inverse of the standard normal CDF (Wichura's AS 241, about 1e-16
/// relative accuracy). p must lie in (0, 1); the endpoints map to +-inf.
double normal_quantile(double p) noexcept;

double normal_cdf(double x) noexcept;

}  // namespace sgdinf
