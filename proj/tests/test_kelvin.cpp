#include <doctest.h>

#include <cmath>

#include "polyharm/error.hpp"
#include "polyharm/kelvin.hpp"
#include "support.hpp"

using namespace polyharm;
using testsupport::Gen;

namespace {

double radius(std::span<const double> x) {
  double s = 0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

ScalarField radial_power(double q) {
  return [q](std::span<const double> x) { return std::pow(radius(x), q); };
}

ScalarFieldLd compiled(const SymExpr& e) {
  return [c = CompiledExpr(e)](std::span<const long double> x) { return c(x); };
}

}  // namespace

TEST_CASE("transforms of radial powers") {
  Gen g(21);
  for (auto p : {ProblemParams{1, 3}, ProblemParams{2, 2}, ProblemParams{2, 5}, ProblemParams{3, 4}}) {
    const auto v1 = kelvin_transform(radial_power(2 * p.m - p.n), p);
    const auto v2 = kelvin_transform(radial_power(0), p);
    for (int t = 0; t < 20; ++t) {
      const Point y = g.point(p.n, 0.1, 5);
      CHECK(v1(y) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(v2(y) == doctest::Approx(std::pow(radius(y), 2 * p.m - p.n)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(kelvin_transform(radial_power(1), {1, 3})(Point{0, 0, 0}), DomainError);
  CHECK_THROWS_AS(kelvin_point(Point{0, 0}), DomainError);
}

TEST_CASE("the transform is an involution") {
  Gen g(22);
  for (auto p : {ProblemParams{1, 3}, ProblemParams{2, 2}, ProblemParams{3, 7}}) {
    const ScalarField u = [](std::span<const double> x) {
      return std::exp(x[0]) * (1 + x[1] * x[1]) + std::sin(3 * x[1]);
    };
    const auto twice = kelvin_transform(kelvin_transform(u, p), p);
    for (int t = 0; t < 100; ++t) {
      const Point x = g.point(p.n, 0.2, 3);
      CHECK(twice(x) == doctest::Approx(u(x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("sigma ladder: |y|^(2 sigma - 2m) v is the sigma-Kelvin transform") {
  Gen g(23);
  const ScalarField u = [](std::span<const double> x) { return 1 + x[0] * x[1] + std::cos(x[0]); };
  for (auto p : {ProblemParams{2, 2}, ProblemParams{3, 5}, ProblemParams{2, 7}}) {
    const auto v = kelvin_transform(u, p);
    for (int sigma = 0; sigma <= p.m; ++sigma) {
      const auto vs = sigma_kelvin_transform(u, p.n, sigma);
      for (int t = 0; t < 20; ++t) {
        const Point y = g.point(p.n, 0.3, 4);
        CHECK(std::pow(radius(y), 2 * sigma - 2 * p.m) * v(y) ==
              doctest::Approx(vs(y)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("intertwining identity on explicit cases") {
  {
    // m = 1, n = 3, u = |x|^4: v = |y|^-5 and Delta v = 20 |y|^-7.
    const ProblemParams p{1, 3};
    const auto rep = verify_kelvin_identity(compiled(SymExpr::radial_power(3, 4)), p,
                                            {Point{1.5, 0, 0}});
    CHECK(rep.pass);
    const auto& row = rep.artifacts.at(0).rows.at(0);
    CHECK(std::get<double>(row[1]) == doctest::Approx(20 * std::pow(1.5, -7)).epsilon(1e-7));
    CHECK(std::get<double>(row[2]) == doctest::Approx(20 * std::pow(1.5, -7)).epsilon(1e-7));
  }
  {
    // u = |x|^(2m-n) maps to v = 1: both sides vanish.
    const ProblemParams p{2, 5};
    const auto rep =
        verify_kelvin_identity(compiled(SymExpr::radial_power(5, -1)), p, {Point{0, 1.2, 0, 0, 0}});
    CHECK(rep.pass);
    CHECK(std::fabs(std::get<double>(rep.artifacts[0].rows[0][1])) < 1e-8);
  }
  {
    const ProblemParams p{2, 2};
    const SymExpr x1 = SymExpr::coordinate(2, 0);
    const auto rep = verify_kelvin_identity(compiled(x1 * x1), p, {Point{0.7, -0.4}, Point{2, 1}});
    CHECK(rep.pass);
    CHECK(rep.metric <= 1e-4);
  }
  CHECK_THROWS_AS(verify_kelvin_identity(compiled(SymExpr::constant(3, 1)), {1, 3}, {Point{4, 0, 0}}),
                  DomainError);
}

TEST_CASE("intertwining identity over monomials and radial powers") {
  Gen g(24);
  for (auto p : {ProblemParams{1, 3}, ProblemParams{2, 2}, ProblemParams{2, 5}}) {
    std::vector<SymExpr> family;
    for (const auto& b : MultiIndex::all_up_to(p.n, 4)) {
      family.push_back(SymExpr::term(p.n, 1, b, 0, 0));
    }
    family.push_back(SymExpr::radial_power(p.n, 2));
    family.push_back(SymExpr::radial_power(p.n, 4));
    std::vector<Point> samples;
    for (int t = 0; t < 20; ++t) samples.push_back(g.point(p.n, 0.5, 3));
    double worst = 0;
    for (const auto& e : family) {
      const auto rep = verify_kelvin_identity(compiled(e), p, samples);
      worst = std::max(worst, rep.metric);
    }
    CAPTURE(p.m);
    CAPTURE(p.n);
    CHECK(worst <= 1e-4);
  }
}
