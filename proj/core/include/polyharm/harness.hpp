#pragma once

// Verification checks: bound checks on test-solution families, kernel
// identities, exact sign tables and the counterexample certificate. Every
// check returns a VerificationReport; none of them prints.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polyharm/fundsol.hpp"
#include "polyharm/numerics.hpp"
#include "polyharm/psi.hpp"
#include "polyharm/report.hpp"

namespace polyharm {

/// Radii base 2^(-k/subdivisions) (interior) or base 2^(k/subdivisions)
/// (exterior), k = 0..octaves*subdivisions, crossed with quasi-uniform
/// directions.
struct DyadicGrid {
  int dim = 2;
  double base = 0.9;
  int octaves = 12;
  int subdivisions = 1;
  int directions = 8;
  bool exterior = false;

  std::vector<double> radii() const;
  std::vector<Point> points() const;
  /// Half the radius step over `octaves` octaves; same directions.
  DyadicGrid refined(int octaves) const;
  std::string describe() const;
};

DyadicGrid default_interior_grid(int dim);
DyadicGrid default_exterior_grid(int dim);

/// Refinement-stability gate on a supremum:
///   fine <= coarse + slack |coarse| + floor, both finite.
struct StabilityGate {
  double slack = 0.2;
  double floor = 1e-9;
  bool passes(double coarse, double fine) const;
  std::string describe() const;
};

struct NamedExpr {
  std::string name;
  SymExpr expr;
};

struct NamedField {
  std::string name;
  ScalarFieldLd field;
};

/// one, gamma0, abs_phi, affine (2 + x_1), cap (4^m - |x|^(2m)): nonnegative
/// in the punctured unit ball with -Delta^m u >= 0.
std::vector<NamedExpr> interior_family(const ProblemParams& p);
/// gamma_inf, one, and kelvin_<name> for every interior member.
std::vector<NamedField> exterior_family(const ProblemParams& p);

/// Delta^m Phi_unit == 0 for every 1 <= m <= max_m, 2 <= n <= max_n.
VerificationReport check_symbolic(int max_m, int max_n);

/// Random (expression, beta, point) triples: exact derivative against the
/// Richardson FD oracle, relative to max(|exact|, 1e-2 sum of |term|).
VerificationReport check_derivative_oracle(int samples, std::uint64_t seed, double tol = 1e-6);

/// int Phi Delta^m phi against phi(0) = 1 for phi = (1 - |x|^2)^(2m+2).
VerificationReport check_delta_normalization(const ProblemParams& p, double tol = 1e-3);

/// Monomials of degree <= 4 plus |x|^2 and |x|^4, at `points` points with
/// |y| in [0.5, 3].
VerificationReport check_kelvin_family(const ProblemParams& p, int points, std::uint64_t seed,
                                       double tol = 1e-4);

/// -Delta u0 = f at 50 radii in [0.01, 0.9] for f in {1, r, r^(-1/2), log(5/r)}.
VerificationReport check_radial_particular(int n, double tol = 1e-5);

/// Throws DomainError when u fails the nonnegativity or -Delta^m u >= 0 spot
/// check (1000 points).
VerificationReport check_interior_bound(const NamedExpr& u, const ProblemParams& p,
                                   const DyadicGrid& grid, const StabilityGate& gate = {0.2, 1e-9});
VerificationReport check_interior_bound_family(const ProblemParams& p, const std::string& only = "");

VerificationReport check_exterior_bound(const NamedField& v, const ProblemParams& p,
                                   const DyadicGrid& grid, const StabilityGate& gate = {0.2, 1e-3});
VerificationReport check_exterior_bound_family(const ProblemParams& p, const std::string& only = "");

/// m = 2, n in {2, 3}.
VerificationReport check_exterior_biharmonic(const NamedField& v, int n, const DyadicGrid& grid,
                                     const StabilityGate& gate = {0.2, 1e-3});
VerificationReport check_exterior_biharmonic_family(int n, const std::string& only = "");

/// (1 - |y - center|^2 / radius^2)^power on the ball, 0 outside.
struct Bump {
  Point center;
  double radius = 0.5;
  int power = 6;
  double operator()(std::span<const double> y) const;
};

/// N(x) = int Psi(x, y) (-f(y)) dy over the support of f, with polar
/// coordinates about x when x lies in the support. `level` fixes the
/// quadrature rule; unset runs the adaptive rule.
double representation_N(const PsiKernel& k, const Bump& f, std::span<const double> x,
                        std::optional<int> level = std::nullopt, double tol = 1e-10);

VerificationReport check_representation_N(const ProblemParams& p, const Bump& f,
                                          const std::vector<Point>& xs, double tol = 1e-3);
/// Two bumps (centered and off-center) at five points each.
VerificationReport check_representation_family(const ProblemParams& p);

/// Exact sign table for the applicable cases of (m, n).
VerificationReport check_signs(const ProblemParams& p);

/// int_{|x|<r} |Psi(x, y)| / (|y|^(2m-2) r^2 log(5/r)) on r, |y| = 0.9 2^-k,
/// k = 0..points-1, y on the first axis, against the half-step refinement.
VerificationReport check_kernel_ball_ratio(const ProblemParams& p, int points = 10);

/// A radial gauge psi(r) parsed from the grammar
///   expr := term ('+' term)*, term := factor (('*' | '/') factor)*,
///   factor := primary ('^' ['-'] rational)?,
///   primary := rational | 'r' | 'log' '(' expr ')' | '(' expr ')'
/// where a rational is digits with an optional '/digits' (so r^1/2 is a
/// square root and 5/r a quotient).
struct Gauge {
  std::string text;
  std::function<double(double)> fn;
  double operator()(double r) const { return fn(r); }
};

/// Throws DomainError on malformed input.
Gauge parse_gauge(const std::string& text);

struct CounterexampleLevel {
  int j = 0;
  double x_norm = 0;   // 5^-j
  double log_R = 0;    // R_j may underflow; its log does not
  double R = 0;
  double alpha = 0;
  double mean_minus_phi = 0;  // R^-n int_{|z|<R} -Phi
  double u_lower = 0;
  double psi = 0;
  double ratio = 0;
  bool certified = false;
};

struct CounterexampleCertificate {
  ProblemParams params;
  std::string gauge;
  double margin = 1.1;
  std::vector<CounterexampleLevel> levels;
  bool certified = false;
  std::string failure;

  VerificationReport report() const;
};

struct CounterexampleOptions {
  double margin = 1.1;
  /// alpha_j from (j, psi(|x_j|)); defaults to j psi(|x_j|).
  std::function<double(int, double)> alpha;
};

/// Throws DomainError when (m, n) admits a bound, when levels is outside
/// [1, 8], or when psi is not positive at some |x_j|.
CounterexampleCertificate build_counterexample(const ProblemParams& p, const Gauge& psi,
                                               int levels, const CounterexampleOptions& opts = {});

/// u(x) = sum_j int -Phi(x - y) f_j(y) dy over the certificate's levels.
double counterexample_value(const CounterexampleCertificate& c, std::span<const double> x);

/// POLYHARM_WORKERS when set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Runs the jobs on `workers` threads; results keep the job order. The
/// first exception in job order is rethrown after all jobs finish.
std::vector<VerificationReport> run_jobs(const std::vector<std::function<VerificationReport()>>& jobs,
                                         int workers);

struct SuiteConfig {
  std::optional<int> m;
  std::optional<int> n;
  std::optional<int> max_m;
  std::optional<int> max_n;
  std::string solution;
  std::uint64_t seed = 1;
  int samples = 200;
  int points = 20;
};

/// Suite ids accepted by run_suite, "all" last.
const std::vector<std::string>& suite_names();
/// Throws DomainError for an unknown suite or invalid parameters.
VerificationReport run_suite(const std::string& suite, const SuiteConfig& cfg, int workers);

}  // namespace polyharm
