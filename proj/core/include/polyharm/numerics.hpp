#pragma once

// Quadrature on balls with point singularities, 1-D radial quadrature, and
// Richardson-extrapolated finite differences.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyharm/multi_index.hpp"

namespace polyharm {

using Point = std::vector<double>;
using ScalarField = std::function<double(std::span<const double>)>;
using ScalarFieldLd = std::function<long double(std::span<const long double>)>;
using RadialFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  long long evaluations = 0;
  bool converged = false;
  int level = 0;
};

/// Surface area of the unit sphere in R^dim, 2 pi^(dim/2) / Gamma(dim/2).
double unit_sphere_area(int dim);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

enum class AngularSymmetry {
  None,    // full product rule over the sphere
  Axial,   // integrand invariant under rotations fixing origin + R*axis
  Radial,  // integrand depends only on the distance to the polar origin
};

struct BallQuadratureOptions {
  double tol = 1e-8;
  /// Absolute floor of the stopping test; defaults to tol when unset.
  std::optional<double> abs_tol;
  /// Center of the polar coordinates (defaults to the ball center). Rays
  /// are graded geometrically toward it.
  std::optional<Point> polar_origin;
  /// Other integrable point singularities, handled by a partition of unity.
  std::vector<Point> singular_points;
  AngularSymmetry symmetry = AngularSymmetry::None;
  /// Symmetry axis for AngularSymmetry::Axial (defaults to e_1).
  std::optional<Point> axis;
  /// Only valid when the polar origin is the center: integrate the shell
  /// inner_radius < |x - c| < radius.
  double inner_radius = 0;
  int min_level = 2;
  int max_level = 6;
  /// Evaluate a single level and report it as converged (used when the
  /// integral itself is differentiated numerically).
  std::optional<int> fixed_level;
};

/// Integral of f over the ball |x - center| < radius. On non-convergence the
/// result carries converged = false; the value is never silently accepted.
QuadratureResult integrate_ball(const ScalarField& f, std::span<const double> center,
                                double radius, const BallQuadratureOptions& opts = {});

/// Integral of g(rho) rho^(n-1) over (0, R], dyadic shells toward 0.
QuadratureResult integrate_radial(const RadialFunction& g, int n, double R, double tol = 1e-10);
/// Plain adaptive integral of g over [a, b].
QuadratureResult integrate_interval(const RadialFunction& g, double a, double b,
                                    double tol = 1e-12);

struct FdResult {
  double value = 0;
  double error_estimate = 0;
  bool consistent = false;
};

struct FdOptions {
  /// Claimed relative accuracy; the consistency gate is 10x this.
  double tol = 1e-6;
};

/// D^beta f(x) by central differences with steps h0 2^-k, k = 0..3, and two
/// Richardson levels. Offsets are half-integral for odd orders.
FdResult fd_derivative(const ScalarFieldLd& f, const MultiIndex& beta, std::span<const double> x,
                       double h0, const FdOptions& opts = {});
FdResult fd_derivative(const ScalarField& f, const MultiIndex& beta, std::span<const double> x,
                       double h0, const FdOptions& opts = {});
/// Delta^sigma f(x) with the sigma-fold discrete Laplacian stencil.
FdResult fd_laplacian_iter(const ScalarFieldLd& f, int sigma, std::span<const double> x,
                           double h0, const FdOptions& opts = {});
FdResult fd_laplacian_iter(const ScalarField& f, int sigma, std::span<const double> x, double h0,
                           const FdOptions& opts = {});

/// Radial grids: log-spaced radii crossed with quasi-uniform directions.
struct GridSpec {
  std::vector<double> radii;
  std::vector<Point> directions;
  std::vector<Point> points() const;
  std::string describe() const;
};

/// `count` radii geometric between r_max and r_min (inclusive).
std::vector<double> log_spaced(double r_max, double r_min, int count);
/// Deterministic unit vectors from a Halton sequence, mapped through the
/// inverse normal CDF; the first one is e_1.
std::vector<Point> quasi_uniform_directions(int dim, int count);
GridSpec make_grid(int dim, double r_max, double r_min, int radii, int directions);

}  // namespace polyharm
