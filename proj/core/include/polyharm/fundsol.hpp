#pragma once

// The fundamental solution of Delta^m in R^n, its normalization, and the
// optimal interior / exterior gauges.

#include <span>
#include <string>

#include "polyharm/numerics.hpp"
#include "polyharm/radial_expr.hpp"
#include "polyharm/symexpr.hpp"

namespace polyharm {

struct ProblemParams {
  int m = 1;
  int n = 2;
  /// Throws DomainError unless m >= 1 and n >= 2.
  void validate() const;
  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

/// R1: 2m < n, Phi = a (-1)^m |x|^(2m-n).
/// R2: n odd, 3 <= n < 2m, Phi = a (-1)^((n-1)/2) |x|^(2m-n).
/// R3: n even, n <= 2m, Phi = a (-1)^(n/2) |x|^(2m-n) log(5/|x|).
enum class Regime { R1, R2, R3 };

std::string regime_name(Regime r);
Regime regime_of(const ProblemParams& p);

/// scale = rational * pi^(-pi_power)
struct ScaleProvenance {
  Rational rational;
  int pi_power = 0;
  std::string to_string() const;
};

struct FundamentalSolution {
  ProblemParams params;
  Regime regime = Regime::R1;
  SymExpr unit_expr;  // Phi with a = 1
  double scale = 0;   // a(m, n) > 0
  ScaleProvenance provenance;

  /// a * unit_expr(x)
  double value(std::span<const double> x) const;
  /// a * D^beta unit_expr, as a compiled evaluator.
  CompiledExpr derivative(const MultiIndex& beta) const;
};

struct BoundClassification {
  ProblemParams params;
  bool bound_exists = false;
  SymExpr gamma0;
  RadialExpr gamma0_radial;
  RadialExpr gamma_inf;  // in |y|; log(5|y|) when n = 2
};

BoundClassification classify(const ProblemParams& p);
FundamentalSolution phi(const ProblemParams& p);
/// Derived by reducing Delta^(m-1) of the unit kernel to the Laplacian
/// kernel; throws ShapeError if the reduction has an unexpected shape.
ScaleProvenance normalization_constant(const ProblemParams& p);

/// Unit fundamental-solution expression alone (no normalization).
SymExpr phi_unit(const ProblemParams& p);

SymExpr gamma0(int n);
RadialExpr gamma0_radial(int n);
RadialExpr gamma_inf(const ProblemParams& p);
/// d^k/dr^k of Gamma_0(r).
RadialExpr gamma0_radial_derivative(int n, int k);

}  // namespace polyharm
