#pragma once

namespace gpsim {

/// Standard normal quantile.
double normal_quantile(double p);

/// Quantile of the chi-square distribution with (possibly fractional) `dof` degrees of freedom.
double chi_square_quantile(double dof, double p);

}  // namespace gpsim
