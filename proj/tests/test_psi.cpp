#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "polyharm/error.hpp"
#include "polyharm/psi.hpp"
#include "support.hpp"

using namespace polyharm;
using testsupport::Fn;
using testsupport::Gen;

namespace {

// Phi written straight from the regime table, no symbolic engine involved.
Fn closed_form_phi(int m, int n, long double scale) {
  return [=](const testsupport::Point& x) {
    long double r2 = 0;
    for (auto v : x) r2 += v * v;
    const long double r = std::sqrt(r2);
    long double v = std::pow(r, static_cast<long double>(2 * m - n));
    long double sign;
    if (2 * m < n) {
      sign = (m % 2 == 0) ? 1 : -1;
    } else if (n % 2 == 1) {
      sign = (((n - 1) / 2) % 2 == 0) ? 1 : -1;
    } else {
      sign = ((n / 2) % 2 == 0) ? 1 : -1;
      v *= std::log(5.0L / r);
    }
    return scale * sign * v;
  };
}

// Taylor remainder with every derivative taken by nested finite differences.
long double taylor_oracle(int m, int n, long double scale, const Point& x, const Point& y) {
  const Fn f = closed_form_phi(m, n, scale);
  testsupport::Point xl(x.begin(), x.end()), d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = static_cast<long double>(x[i]) - y[i];
  long double sum = 0;
  for (const auto& a : MultiIndex::all_up_to(n, 2 * m - 3)) {
    long double w = 1;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < a[i]; ++k) w *= -static_cast<long double>(y[static_cast<std::size_t>(i)]);
    }
    if (w == 0) continue;
    sum += w / a.factorial() * testsupport::nested_derivative(f, xl, a.exponents(), 1e-2L);
  }
  return f(d) - sum;
}

Point dyadic_point(Gen& g, int n) {
  Point p(static_cast<std::size_t>(n));
  for (auto& c : p) c = g.uniform_int(-512, 512) / 1024.0;
  return p;
}

}  // namespace

TEST_CASE("the derivative table covers orders up to 2m-2 and extends on demand") {
  const PsiKernel k({3, 3});
  CHECK(k.table_size() == MultiIndex::all_up_to(3, 4).size());
  CHECK(k.taylor_indices().size() == MultiIndex::all_up_to(3, 3).size());
  const MultiIndex high{3, 2, 1};
  const SymExpr& d = k.unit_derivative(high);
  CHECK(k.table_size() == MultiIndex::all_up_to(3, 4).size() + 2);  // (2,2,1) and (3,2,1)
  CHECK(d == multi_derivative(phi_unit({3, 3}), high));
  CHECK(&d == &k.unit_derivative(high));

  const PsiKernel k1({1, 4});
  CHECK(k1.taylor_indices().empty());
  CHECK(k1.taylor_degree() == -1);
}

TEST_CASE("m = 1: Psi is the shifted fundamental solution") {
  Gen g(11);
  for (int n = 2; n <= 5; ++n) {
    const PsiKernel k({1, n});
    const auto phi0 = k.phi().derivative(MultiIndex(n));
    for (int t = 0; t < 50; ++t) {
      const Point x = dyadic_point(g, n), y = dyadic_point(g, n);
      Point d(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
      double nx = 0, nd = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        nx += x[i] * x[i];
        nd += d[i] * d[i];
      }
      if (nx == 0 || nd == 0) continue;
      CHECK(psi_value(k, x, y) - phi0(d) == 0.0);
    }
  }
}

TEST_CASE("Psi(x, 0) vanishes exactly for m >= 2") {
  Gen g(12);
  for (auto p : {ProblemParams{2, 2}, ProblemParams{2, 5}, ProblemParams{3, 4}, ProblemParams{4, 3}}) {
    const PsiKernel k(p);
    const Point zero(static_cast<std::size_t>(p.n), 0.0);
    for (int t = 0; t < 100; ++t) {
      const Point x = g.point(p.n, 0.01, 2.0);
      CHECK(psi_value(k, x, zero) == 0.0);
    }
  }
}

TEST_CASE("Psi matches a Taylor oracle built from nested finite differences") {
  struct Case {
    ProblemParams p;
    Point x, y;
  };
  const std::vector<Case> cases = {
      {{2, 2}, {1.0, 0.0}, {0.1, 0.0}},
      {{2, 3}, {0.6, -0.3, 0.2}, {0.05, 0.1, -0.02}},
      {{3, 4}, {0.7, 0.1, -0.2, 0.3}, {0.1, 0.05, 0.0, -0.05}},
      {{3, 3}, {1.0, 0.0, 0.0}, {0.05, 0.08, 0.0}},
  };
  for (const auto& c : cases) {
    const PsiKernel k(c.p);
    const long double oracle = taylor_oracle(c.p.m, c.p.n, k.phi().scale, c.x, c.y);
    const double v = psi_value(k, c.x, c.y);
    CHECK(std::fabs(v - static_cast<double>(oracle)) <= 1e-6 * std::fabs(static_cast<double>(oracle)));
  }
}

TEST_CASE("x-derivatives of Psi agree with finite differences of Psi") {
  {
    const PsiKernel k({2, 5});
    const Point x{0.8, 0, 0, 0, 0}, y{0.1, 0, 0, 0, 0};
    const MultiIndex b{1, 0, 0, 0, 0};
    const double v = psi_x_derivative(k, b, x, y);
    const Fn f = [&](const testsupport::Point& p) {
      return static_cast<long double>(psi_value(k, Point(p.begin(), p.end()), y));
    };
    const long double fd = testsupport::richardson_partial(f, testsupport::to_ld(x), 0, 1e-2L);
    CHECK(std::fabs(v - static_cast<double>(fd)) <= 1e-6 * std::fabs(v));
  }
  Gen g(13);
  for (auto p : {ProblemParams{2, 2}, ProblemParams{3, 3}, ProblemParams{2, 4}}) {
    const PsiKernel k(p);
    for (int t = 0; t < 5; ++t) {
      const Point x = g.point(p.n, 0.5, 1.0), y = g.point(p.n, 0.05, 0.2);
      const MultiIndex b = g.multi_index(p.n, std::min(3, 2 * p.m - 1));
      const double v = psi_x_derivative(k, b, x, y);
      const Fn f = [&](const testsupport::Point& q) {
        return static_cast<long double>(psi_value(k, Point(q.begin(), q.end()), y));
      };
      const long double fd =
          testsupport::nested_derivative(f, testsupport::to_ld(x), b.exponents(), 1e-2L);
      CHECK(std::fabs(v - static_cast<double>(fd)) <= 1e-6 * (std::fabs(v) + 1e-6));
    }
    // beta = 0 reduces to the value.
    const Point x = g.point(p.n, 0.5, 1.0), y = g.point(p.n, 0.05, 0.2);
    CHECK(psi_x_derivative(k, MultiIndex(p.n), x, y) == psi_value(k, x, y));
  }
  const PsiKernel k1({1, 3});
  const Point x{0.5, 0.2, 0.1}, y{-0.1, 0.3, 0.0};
  const MultiIndex b{0, 1, 0};
  const Point d{0.6, -0.1, 0.1};
  CHECK(psi_x_derivative(k1, b, x, y) == doctest::Approx(k1.phi().derivative(b)(d)).epsilon(1e-14));
}

TEST_CASE("pointwise guards") {
  const PsiKernel k({2, 3});
  const Point x{0.5, 0, 0};
  CHECK_THROWS_AS(psi_value(k, Point{0, 0, 0}, Point{0.1, 0, 0}), DomainError);
  CHECK_THROWS_AS(psi_value(k, Point{1e-7, 0, 0}, Point{0.1, 0, 0}), DomainError);
  CHECK_THROWS_AS(psi_value(k, x, x), DomainError);
  CHECK_THROWS_AS(psi_value(k, x, Point{1e-8, 0, 0}), DomainError);
  CHECK_THROWS_AS(psi_value(k, x, Point{0.1, 0}), DomainError);
  CHECK_NOTHROW(psi_value(k, Point{1e-6, 0, 0}, Point{0, 0, 0}));
  CHECK_THROWS_AS(psi_x_derivative(k, MultiIndex{4, 0, 0}, x, Point{0.1, 0, 0}), DomainError);
  CHECK_THROWS_AS(remainder_ratio(k, x, Point{0.3, 0, 0}, MultiIndex(3)), DomainError);
  CHECK_THROWS_AS(remainder_ratio(k, Point{2.5, 0, 0}, Point{0.1, 0, 0}, MultiIndex(3)), DomainError);
}

TEST_CASE("remainder ratios") {
  {
    const PsiKernel k({2, 2});
    CHECK(remainder_ratio(k, Point{0.5, 0}, Point{0, 0}, MultiIndex(2)) == 0.0);
    double sup = 0;
    for (const auto& dir : quasi_uniform_directions(2, 8)) {
      for (double r : {0.5, 0.25, 0.1}) {
        const Point x{r * dir[0], r * dir[1]};
        for (const auto& e : quasi_uniform_directions(2, 4)) {
          const Point y{r / 4 * e[0], r / 4 * e[1]};
          const double q = remainder_ratio(k, x, y, MultiIndex(2));
          CHECK(std::isfinite(q));
          sup = std::max(sup, q);
        }
      }
    }
    CHECK(sup > 0);
    CHECK(sup < 10);
  }
  {
    // m = 1: the gauge is |x|^(2-n) log(5/|x|).
    const PsiKernel k({1, 3});
    const Point x{0.4, 0.2, 0}, y{0.05, -0.05, 0.1};
    const double nx = std::sqrt(0.2), nd = std::sqrt(0.35 * 0.35 + 0.0625 + 0.01);
    const double expect = (1 / (4 * M_PI * nd)) * nx / std::log(5 / nx);
    CHECK(remainder_ratio(k, x, y, MultiIndex(3)) == doctest::Approx(expect).epsilon(1e-12));
  }
  {
    // A mixed derivative against its own gauge.
    const PsiKernel k({3, 4});
    double hi = 0;
    for (double r : {0.8, 0.4, 0.2, 0.1, 0.05}) {
      const Point x{r, 0, 0, 0}, y{0, r / 3, 0, 0};
      const double q = remainder_ratio(k, x, y, MultiIndex{1, 1, 0, 0});
      hi = std::max(hi, q);
    }
    CHECK(hi < 1e3);
  }
}

TEST_CASE("Psi is polyharmonic in x") {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 2; n <= 8; ++n) {
      const PsiKernel k({m, n});
      Point y(static_cast<std::size_t>(n), 0.0);
      y[0] = 0.3;
      const auto rep = psi_polyharmonic_report(k, y);
      CAPTURE(m);
      CAPTURE(n);
      CAPTURE(rep.fd_max_abs);
      CHECK(rep.taylor_terms_zero);
      CHECK(rep.kernel_zero);
      CHECK(rep.sample_points.size() == 5);
      CHECK(rep.pass);
    }
  }
  Gen g(14);
  const PsiKernel k({3, 4});
  for (int t = 0; t < 3; ++t) {
    const Point y = g.point(4, 0.1, 0.9);
    const auto rep = psi_polyharmonic_report(k, y);
    CHECK(rep.pass);
    CHECK(rep.fd_max_abs <= 1e-4);
  }
}

TEST_CASE("integral of |Psi| over small balls") {
  // y = 0 with m = 1 is the radial kernel itself.
  const PsiKernel k({1, 3});
  const auto res = psi_abs_integral(k, 0.5, Point{0, 0, 0});
  REQUIRE(res.converged);
  // integral of 1/(4 pi |x|) over B_0.5 = 0.5^2 / 2
  CHECK(res.value == doctest::Approx(0.125).epsilon(1e-8));

  const PsiKernel k2({2, 2});
  const auto zero = psi_abs_integral(k2, 0.5, Point{0, 0});
  CHECK(zero.value == 0.0);

  // Off-centre y, checked against the full product rule.
  const Point y{0, 0.2};
  const auto axial = psi_abs_integral(k2, 0.5, y, 1e-7);
  REQUIRE(axial.converged);
  const auto psi = k2.at_y(y);
  BallQuadratureOptions o;
  o.tol = 1e-7;
  o.singular_points = {y};
  const auto full = integrate_ball([&](std::span<const double> x) { return std::fabs(psi(x)); },
                                   Point{0, 0}, 0.5, o);
  REQUIRE(full.converged);
  CHECK(axial.value == doctest::Approx(full.value).epsilon(1e-6));
}
