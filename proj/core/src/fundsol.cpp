#include "polyharm/fundsol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "polyharm/error.hpp"

namespace polyharm {

void ProblemParams::validate() const {
  if (m < 1) throw DomainError("invalid parameters: m must be >= 1 (got " + std::to_string(m) + ")");
  if (n < 2) throw DomainError("invalid parameters: n must be >= 2 (got " + std::to_string(n) + ")");
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::R1: return "R1";
    case Regime::R2: return "R2";
    case Regime::R3: return "R3";
  }
  return "?";
}

Regime regime_of(const ProblemParams& p) {
  p.validate();
  if (2 * p.m < p.n) return Regime::R1;
  if (p.n % 2 == 1) return Regime::R2;
  return Regime::R3;
}

std::string ScaleProvenance::to_string() const {
  std::ostringstream os;
  os << rational_to_string(rational);
  if (pi_power != 0) os << "*pi^" << -pi_power;
  return os.str();
}

SymExpr phi_unit(const ProblemParams& p) {
  const Regime regime = regime_of(p);
  const int n = p.n;
  const int q = 2 * p.m - n;
  switch (regime) {
    case Regime::R1:
      return SymExpr::term(n, Rational(p.m % 2 == 0 ? 1 : -1), MultiIndex(n), q, 0);
    case Regime::R2:
      return SymExpr::term(n, Rational(((n - 1) / 2) % 2 == 0 ? 1 : -1), MultiIndex(n), q, 0);
    case Regime::R3:
      return SymExpr::term(n, Rational((n / 2) % 2 == 0 ? 1 : -1), MultiIndex(n), q, 1);
  }
  throw DomainError("phi_unit: unreachable");
}

namespace {

Rational factorial(int k) {
  mpz_class f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

Rational double_factorial(int k) {
  mpz_class f = 1;
  for (int i = k; i > 1; i -= 2) f *= i;
  return Rational(f);
}

// omega_{n-1} = omega_rational * pi^omega_pi
void sphere_area_exact(int n, Rational& rational, int& pi_power) {
  if (n % 2 == 0) {
    // 2 pi^(n/2) / (n/2 - 1)!
    rational = Rational(2) / factorial(n / 2 - 1);
    pi_power = n / 2;
  } else {
    // 2^((n+1)/2) pi^((n-1)/2) / (n-2)!!
    rational = Rational(mpz_class(1) << static_cast<unsigned>((n + 1) / 2)) / double_factorial(n - 2);
    pi_power = (n - 1) / 2;
  }
  rational.canonicalize();
}

}  // namespace

ScaleProvenance normalization_constant(const ProblemParams& p) {
  p.validate();
  const int n = p.n;
  const SymExpr reduced = laplacian_iter(phi_unit(p), p.m - 1);
  Rational c = 0;
  for (const auto& t : reduced.terms()) {
    const bool radial = std::all_of(t.mono.begin(), t.mono.end(), [](int b) { return b == 0; });
    const bool kernel = radial && (n >= 3 ? (t.radial_power == 2 - n && t.log_power == 0)
                                          : (t.radial_power == 0 && t.log_power == 1));
    const bool constant = radial && t.radial_power == 0 && t.log_power == 0;
    if (kernel) {
      c = t.coeff;
    } else if (!(constant && n == 2)) {
      throw ShapeError("normalization_constant: Delta^(m-1) Phi_unit = " + reduced.to_string() +
                       " is not a multiple of the Laplacian kernel");
    }
  }
  if (sgn(c) == 0) {
    throw ShapeError("normalization_constant: no Laplacian-kernel term in " + reduced.to_string());
  }
  Rational omega;
  int pi_power = 0;
  sphere_area_exact(n, omega, pi_power);
  // a c |x|^(2-n) = -|x|^(2-n) / ((n-2) omega_{n-1});  a c log(5/|x|) = -log(5/|x|) / (2 pi)
  ScaleProvenance out;
  if (n >= 3) {
    out.rational = Rational(-1) / (Rational(n - 2) * omega * c);
    out.pi_power = pi_power;
  } else {
    out.rational = Rational(-1) / (Rational(2) * c);
    out.pi_power = 1;
  }
  out.rational.canonicalize();
  if (sgn(out.rational) <= 0) {
    throw ShapeError("normalization_constant: derived scale is not positive");
  }
  return out;
}

double FundamentalSolution::value(std::span<const double> x) const {
  return scale * evaluate(unit_expr, x);
}

CompiledExpr FundamentalSolution::derivative(const MultiIndex& beta) const {
  return CompiledExpr(multi_derivative(unit_expr, beta), scale);
}

FundamentalSolution phi(const ProblemParams& p) {
  FundamentalSolution out;
  out.params = p;
  out.regime = regime_of(p);
  out.unit_expr = phi_unit(p);
  out.provenance = normalization_constant(p);
  out.scale = static_cast<double>(to_long_double(out.provenance.rational) *
                                  std::pow(std::numbers::pi_v<long double>,
                                           static_cast<long double>(-out.provenance.pi_power)));
  return out;
}

SymExpr gamma0(int n) {
  if (n < 2) throw DomainError("gamma0: n must be >= 2");
  return n == 2 ? SymExpr::log_power(2, 1) : SymExpr::radial_power(n, 2 - n);
}

RadialExpr gamma0_radial(int n) {
  if (n < 2) throw DomainError("gamma0: n must be >= 2");
  return n == 2 ? RadialExpr::monomial(Rational(1), 0, 1)
                : RadialExpr::monomial(Rational(1), 2 - n, 0);
}

RadialExpr gamma_inf(const ProblemParams& p) {
  p.validate();
  return p.n == 2 ? RadialExpr::monomial(Rational(1), 2 * p.m - 2, 1, LogKind::FiveR)
                  : RadialExpr::monomial(Rational(1), 2 * p.m - 2, 0, LogKind::FiveR);
}

RadialExpr gamma0_radial_derivative(int n, int k) { return gamma0_radial(n).derivative(k); }

BoundClassification classify(const ProblemParams& p) {
  p.validate();
  BoundClassification out;
  out.params = p;
  out.bound_exists = p.m % 2 == 0 || p.n < 2 * p.m;
  out.gamma0 = gamma0(p.n);
  out.gamma0_radial = gamma0_radial(p.n);
  out.gamma_inf = gamma_inf(p);
  return out;
}

}  // namespace polyharm
