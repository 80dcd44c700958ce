#pragma once

// Radial particular solutions of -Delta u = f and integral-average
// estimators on small balls.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "polyharm/numerics.hpp"

namespace polyharm {

/// A function of r on (0, R], memoized by radius.
class RadialProfile {
 public:
  RadialProfile(double R, RadialFunction f);

  double R() const { return R_; }
  /// Throws DomainError outside (0, R].
  double operator()(double r) const;
  std::size_t cache_size() const;
  /// The profile as a function on points of R^n, |x| -> value.
  ScalarField on_points() const;

 private:
  struct Cache {
    std::mutex mu;
    std::map<double, double> values;
  };
  double R_;
  RadialFunction f_;
  std::shared_ptr<Cache> cache_;
};

/// u0(r) = (1/(n-2)) [ r^(2-n) int_0^r rho^(n-1) f + int_r^R rho f ]        (n >= 3)
/// u0(r) = log(2R/r) int_0^r rho f + int_r^R rho log(2R/rho) f            (n = 2)
/// Throws DomainError when int_0^R rho^(n-1) |f| does not converge.
RadialProfile radial_particular_solution(const RadialProfile& f, int n, double R);

/// -(u'' + (n-1) u'/r) by finite differences in r.
FdResult radial_laplacian_fd(const RadialFunction& u, int n, double r, double h0);

/// int_{|x|<r} |u| dx divided by r^2 (n >= 3) or r^2 log(1/r) (n = 2), r < 1.
double integral_average_ratio(const ScalarField& u, double r, int n,
                              AngularSymmetry symmetry = AngularSymmetry::None);
/// Same quantity for a radial u, through the 1-D radial integral.
double integral_average_ratio(const RadialFunction& u, double r, int n);

struct RatioLadder {
  std::vector<double> radii;  // 2^-k, k = 1..k_max
  std::vector<double> ratios;
  double sup = 0;
  /// The sup over the finer half of the ladder stays within 1.2x of the
  /// sup over the coarser half.
  bool bounded = false;
};

RatioLadder average_ratio_ladder(const RadialFunction& u, int n, int k_max = 14);

struct IntegrabilityVerdict {
  std::vector<double> epsilons;  // 2^-k
  std::vector<double> partials;  // int_{eps < |x| < R}
  bool converges = false;
  QuadratureResult result;       // the last partial; converged iff the ladder stabilized
};

/// int_{|x|<R} |x|^(2m-2) f dx on the ladder eps = 2^-k (k <= 60, eps < R).
/// Converges once three consecutive steps change the partial integral by
/// less than 1%; the ladder running out (or a shell failing to converge) is
/// a divergence verdict.
IntegrabilityVerdict weighted_f_integrability(const ScalarField& f, int m, int n, double R,
                                              AngularSymmetry symmetry = AngularSymmetry::None);

}  // namespace polyharm
