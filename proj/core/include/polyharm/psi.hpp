#pragma once

// The Taylor-remainder kernel
//
//   Psi(x, y) = Phi(x - y) - sum_{|alpha| <= 2m-3} (-y)^alpha / alpha! D^alpha Phi(x)
//
// and its x-derivatives.

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "polyharm/fundsol.hpp"

namespace polyharm {

/// Psi(., y) and one x-derivative of it, as a function of x, for a fixed y.
class PsiAtY {
 public:
  PsiAtY(CompiledExpr shifted, CompiledExpr taylor, Point y);
  long double operator()(std::span<const long double> x) const;
  double operator()(std::span<const double> x) const;
  const Point& y() const { return y_; }

 private:
  CompiledExpr shifted_;  // D^beta Phi, evaluated at x - y
  CompiledExpr taylor_;   // sum_alpha (-y)^alpha / alpha! D^(alpha+beta) Phi
  Point y_;
};

/// D^beta_x Psi(x, .) as a function of y, for a fixed x.
class PsiAtX {
 public:
  PsiAtX(CompiledExpr shifted, std::vector<MultiIndex> alphas, std::vector<long double> coeffs,
         Point x);
  long double operator()(std::span<const long double> y) const;
  double operator()(std::span<const double> y) const;
  const Point& x() const { return x_; }

 private:
  CompiledExpr shifted_;
  std::vector<MultiIndex> alphas_;
  std::vector<long double> coeffs_;  // D^(alpha+beta) Phi(x) / alpha!
  Point x_;
};

class PsiKernel {
 public:
  explicit PsiKernel(const ProblemParams& p);

  const ProblemParams& params() const { return phi_.params; }
  const FundamentalSolution& phi() const { return phi_; }
  /// 2m - 3; the Taylor sum is empty when this is negative.
  int taylor_degree() const { return 2 * phi_.params.m - 3; }
  /// Multi-indices of the Taylor sum, sorted by (order, lexicographic).
  const std::vector<MultiIndex>& taylor_indices() const { return taylor_; }

  /// D^alpha of the unit kernel. Precomputed for |alpha| <= 2m-2 and
  /// extended on demand; entries are never replaced.
  const SymExpr& unit_derivative(const MultiIndex& alpha) const;
  /// a * D^alpha Phi_unit, compiled; memoized like unit_derivative.
  const CompiledExpr& compiled_derivative(const MultiIndex& alpha) const;
  std::size_t table_size() const;

  /// No range guard: these are the evaluators used inside quadrature.
  PsiAtY at_y(std::span<const double> y, const MultiIndex& beta) const;
  PsiAtY at_y(std::span<const double> y) const;
  PsiAtX at_x(std::span<const double> x, const MultiIndex& beta) const;
  PsiAtX at_x(std::span<const double> x) const;
  /// Delta^j_x Psi(., y), built from the exact Laplacian iterates of the table.
  PsiAtY laplacian_at_y(std::span<const double> y, int j) const;

 private:
  struct Table {
    std::mutex mu;
    std::map<MultiIndex, SymExpr> unit;
    std::map<MultiIndex, CompiledExpr> compiled;
  };
  const SymExpr& unit_locked_(const MultiIndex& alpha) const;

  FundamentalSolution phi_;
  std::vector<MultiIndex> taylor_;
  std::shared_ptr<Table> table_;
};

/// Smallest accepted nonzero |x|, |y| and |x - y| in the pointwise API.
inline constexpr double kPsiMinRadius = 1e-6;

/// Psi(x, y); rejects |x| < 1e-6, 0 < |y| < 1e-6 and |x - y| < 1e-6.
double psi_value(const PsiKernel& k, std::span<const double> x, std::span<const double> y);
double psi_x_derivative(const PsiKernel& k, const MultiIndex& beta, std::span<const double> x,
                        std::span<const double> y);

/// |D^beta_x Psi(x,y)| / (|y|^(2m-2) |x|^(2-n-|beta|) log(5/|x|)), defined for
/// |y| < |x|/2 < 1. At y = 0 with m >= 2 the ratio is 0.
double remainder_ratio(const PsiKernel& k, std::span<const double> x, std::span<const double> y,
                       const MultiIndex& beta);

struct PolyharmonicCheck {
  bool taylor_terms_zero = false;  // Delta^m D^alpha Phi == 0 for every Taylor index
  bool kernel_zero = false;        // Delta^m Phi == 0 off the origin
  std::vector<Point> sample_points;
  std::vector<double> fd_values;   // Delta^m_x Psi(x, y) by finite differences
  double fd_max_abs = 0;
  bool pass = false;
};

/// Exact term-wise check plus an FD spot check at 5 points (|value| <= 1e-4).
/// The stencil applies s = min(m, 2) Laplacians to the exact Delta^(m - s) image.
PolyharmonicCheck psi_polyharmonic_report(const PsiKernel& k, std::span<const double> y);
bool psi_polyharmonic_check(const PsiKernel& k, std::span<const double> y);

/// Integral of |Psi(x, y)| over |x| < r.
QuadratureResult psi_abs_integral(const PsiKernel& k, double r, std::span<const double> y,
                                  double tol = 1e-6);

}  // namespace polyharm
