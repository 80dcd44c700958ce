#pragma once

// The m-Kelvin transform v(y) = |x|^(n-2m) u(x), x = y / |y|^2.

#include <vector>

#include "polyharm/fundsol.hpp"
#include "polyharm/report.hpp"

namespace polyharm {

/// y / |y|^2; throws DomainError at y = 0.
Point kelvin_point(std::span<const double> y);

ScalarField kelvin_transform(ScalarField u, const ProblemParams& p);
ScalarFieldLd kelvin_transform(ScalarFieldLd u, const ProblemParams& p);
/// |x|^(n - 2 sigma) u(x); sigma = m gives kelvin_transform.
ScalarField sigma_kelvin_transform(ScalarField u, int n, int sigma);
ScalarFieldLd sigma_kelvin_transform(ScalarFieldLd u, int n, int sigma);

/// Compares FD Delta^m v(y) with |x|^(n+2m) FD Delta^m u(x) at each sample
/// (|y| in [0.5, 3]). Relative deviation is measured against
/// max(|rhs|, M |y|^(-2m)), M the largest |v| over y and y +- |y|/4 e_i;
/// pass when the max is <= tol.
VerificationReport verify_kelvin_identity(const ScalarFieldLd& u, const ProblemParams& p,
                                          const std::vector<Point>& samples, double tol = 1e-4);

}  // namespace polyharm
