#include "polyharm/radial.hpp"

#include <algorithm>
#include <cmath>

#include "polyharm/error.hpp"

namespace polyharm {

RadialProfile::RadialProfile(double R, RadialFunction f)
    : R_(R), f_(std::move(f)), cache_(std::make_shared<Cache>()) {
  if (!(R > 0)) throw DomainError("RadialProfile: R must be positive");
}

double RadialProfile::operator()(double r) const {
  if (!(r > 0 && r <= R_)) throw DomainError("RadialProfile: r outside (0, R]");
  {
    std::lock_guard lock(cache_->mu);
    auto it = cache_->values.find(r);
    if (it != cache_->values.end()) return it->second;
  }
  const double v = f_(r);
  std::lock_guard lock(cache_->mu);
  return cache_->values.emplace(r, v).first->second;
}

std::size_t RadialProfile::cache_size() const {
  std::lock_guard lock(cache_->mu);
  return cache_->values.size();
}

ScalarField RadialProfile::on_points() const {
  return [self = *this](std::span<const double> x) {
    double s = 0;
    for (double c : x) s += c * c;
    return self(std::sqrt(s));
  };
}

namespace {

// int_r^R g, split at the fixed points R 2^-j so the partition does not
// depend on r.
double outer_integral(const RadialFunction& g, double r, double R, double tol) {
  double hi = R, sum = 0;
  while (0.5 * hi > r) {
    sum += integrate_interval(g, 0.5 * hi, hi, tol).value;
    hi *= 0.5;
  }
  return sum + integrate_interval(g, r, hi, tol).value;
}

}  // namespace

RadialProfile radial_particular_solution(const RadialProfile& f, int n, double R) {
  if (n < 2) throw DomainError("radial_particular_solution: n must be >= 2");
  if (!(R > 0) || R > f.R()) throw DomainError("radial_particular_solution: R outside f's domain");
  const auto check = integrate_radial([&](double rho) { return std::fabs(f(rho)); }, n, R, 1e-10);
  if (!check.converged || !std::isfinite(check.value)) {
    throw DomainError("radial_particular_solution: int_0^R rho^(n-1) |f| does not converge");
  }
  constexpr double tol = 1e-13;
  if (n >= 3) {
    return RadialProfile(R, [f, n, R](double r) {
      const double inner = integrate_radial(f, n, r, tol).value;
      const double outer = outer_integral([&](double rho) { return rho * f(rho); }, r, R, tol);
      return (inner * std::pow(r, 2 - n) + outer) / (n - 2);
    });
  }
  return RadialProfile(R, [f, R](double r) {
    const double inner = integrate_radial(f, 2, r, tol).value;
    const double outer = outer_integral(
        [&](double rho) { return rho * std::log(2 * R / rho) * f(rho); }, r, R, tol);
    return std::log(2 * R / r) * inner + outer;
  });
}

FdResult radial_laplacian_fd(const RadialFunction& u, int n, double r, double h0) {
  if (!(h0 > 0 && h0 < r)) throw DomainError("radial_laplacian_fd: need 0 < h0 < r");
  const ScalarField g = [&](std::span<const double> p) { return u(p[0]); };
  const Point x{r};
  const FdResult d2 = fd_derivative(g, MultiIndex{2}, x, h0);
  const FdResult d1 = fd_derivative(g, MultiIndex{1}, x, h0);
  FdResult out;
  out.value = -(d2.value + (n - 1) * d1.value / r);
  out.error_estimate = d2.error_estimate + (n - 1) * d1.error_estimate / r;
  out.consistent = d2.consistent && d1.consistent;
  return out;
}

namespace {
double gauge(double r, int n) {
  if (!(r > 0 && r < 1)) throw DomainError("integral_average_ratio: r must lie in (0, 1)");
  return n >= 3 ? r * r : r * r * std::log(1 / r);
}
}  // namespace

double integral_average_ratio(const ScalarField& u, double r, int n, AngularSymmetry symmetry) {
  const double g = gauge(r, n);
  BallQuadratureOptions opts;
  opts.tol = 1e-8;
  opts.abs_tol = 0.0;
  opts.symmetry = symmetry;
  const Point c(static_cast<std::size_t>(n), 0.0);
  const auto res = integrate_ball([&](std::span<const double> x) { return std::fabs(u(x)); }, c, r,
                                  opts);
  if (!res.converged) throw ConvergenceError("integral_average_ratio: quadrature did not converge");
  return res.value / g;
}

double integral_average_ratio(const RadialFunction& u, double r, int n) {
  const double g = gauge(r, n);
  const auto res = integrate_radial([&](double rho) { return std::fabs(u(rho)); }, n, r, 1e-10);
  if (!res.converged) throw ConvergenceError("integral_average_ratio: quadrature did not converge");
  return unit_sphere_area(n) * res.value / g;
}

RatioLadder average_ratio_ladder(const RadialFunction& u, int n, int k_max) {
  if (k_max < 2) throw DomainError("average_ratio_ladder: k_max must be >= 2");
  const RadialFunction au = [&](double rho) { return std::fabs(u(rho)); };
  const double area = unit_sphere_area(n);
  // int_0^(2^-k) accumulated outward: one deep tail, then dyadic shells.
  const auto tail = integrate_radial(au, n, std::ldexp(1.0, -k_max), 1e-10);
  if (!tail.converged) throw ConvergenceError("average_ratio_ladder: quadrature did not converge");
  std::vector<double> cumulative(static_cast<std::size_t>(k_max) + 1);
  cumulative[static_cast<std::size_t>(k_max)] = tail.value;
  for (int k = k_max - 1; k >= 1; --k) {
    const auto shell = integrate_interval(
        [&](double rho) { return au(rho) * std::pow(rho, n - 1); }, std::ldexp(1.0, -k - 1),
        std::ldexp(1.0, -k), 1e-12);
    if (!shell.converged) throw ConvergenceError("average_ratio_ladder: quadrature did not converge");
    cumulative[static_cast<std::size_t>(k)] = cumulative[static_cast<std::size_t>(k) + 1] + shell.value;
  }
  RatioLadder out;
  for (int k = 1; k <= k_max; ++k) {
    const double r = std::ldexp(1.0, -k);
    out.radii.push_back(r);
    out.ratios.push_back(area * cumulative[static_cast<std::size_t>(k)] / gauge(r, n));
  }
  const std::size_t half = out.ratios.size() / 2;
  const double coarse = *std::max_element(out.ratios.begin(), out.ratios.begin() + half);
  const double fine = *std::max_element(out.ratios.begin() + half, out.ratios.end());
  out.sup = std::max(coarse, fine);
  out.bounded = std::isfinite(out.sup) && fine <= 1.2 * coarse;
  return out;
}

IntegrabilityVerdict weighted_f_integrability(const ScalarField& f, int m, int n, double R,
                                              AngularSymmetry symmetry) {
  if (m < 1 || n < 2) throw DomainError("weighted_f_integrability: invalid (m, n)");
  if (!(R > 0)) throw DomainError("weighted_f_integrability: R must be positive");
  const ScalarField g = [&](std::span<const double> x) {
    double s = 0;
    for (double c : x) s += c * c;
    return std::pow(s, m - 1) * std::fabs(f(x));
  };
  const Point c(static_cast<std::size_t>(n), 0.0);
  BallQuadratureOptions opts;
  opts.tol = 1e-4;
  opts.abs_tol = 0.0;
  opts.symmetry = symmetry;

  IntegrabilityVerdict out;
  double sum = 0;
  double outer = R;
  int quiet = 0;
  for (int k = 0; k <= 60; ++k) {
    const double eps = std::ldexp(1.0, -k);
    if (!(eps < outer)) continue;
    opts.inner_radius = eps;
    const auto shell = integrate_ball(g, c, outer, opts);
    out.result.evaluations += shell.evaluations;
    out.result.error_estimate += shell.error_estimate;
    if (!shell.converged || !std::isfinite(shell.value)) break;
    const double prev = sum;
    sum += shell.value;
    outer = eps;
    out.epsilons.push_back(eps);
    out.partials.push_back(sum);
    if (out.partials.size() > 1) {
      quiet = (std::fabs(sum - prev) <= 0.01 * std::fabs(sum)) ? quiet + 1 : 0;
      if (quiet >= 3) {
        out.converges = true;
        break;
      }
    }
  }
  out.result.value = sum;
  out.result.converged = out.converges;
  out.result.level = static_cast<int>(out.partials.size());
  return out;
}

}  // namespace polyharm
