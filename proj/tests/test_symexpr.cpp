#include <doctest.h>

#include <fstream>
#include <sstream>

#include "polyharm/error.hpp"
#include "polyharm/symexpr.hpp"
#include "support.hpp"

using namespace polyharm;
using testsupport::Gen;

namespace {

SymExpr r(int n, int q) { return SymExpr::radial_power(n, q); }
SymExpr L(int n) { return SymExpr::log_power(n, 1); }
SymExpr xi(int n, int i) { return SymExpr::coordinate(n, i); }
SymExpr c(int n, Rational v) { return SymExpr::constant(n, v); }

}  // namespace

TEST_CASE("monomial and radial derivative rules") {
  CHECK(differentiate(xi(3, 0), 0) == c(3, 1));
  CHECK(differentiate(r(2, 2), 0) == Rational(2) * xi(2, 0));
  CHECK(differentiate(r(3, -1), 1) == Rational(-1) * xi(3, 1) * r(3, -3));
  CHECK(differentiate(L(2), 0) == Rational(-1) * xi(2, 0) * r(2, -2));
  CHECK_THROWS_AS(differentiate(xi(2, 0), 2), DomainError);
  CHECK_THROWS_AS(differentiate(xi(2, 0), -1), DomainError);
}

TEST_CASE("log derivative against a finite-difference oracle") {
  const SymExpr d = differentiate(L(2), 0);
  const std::vector<double> x{0.3, 0.4};
  const long double oracle =
      testsupport::richardson_partial(testsupport::as_fn(L(2)), testsupport::to_ld(x), 0, 1e-2L);
  CHECK(evaluate(d, x) == doctest::Approx(-1.2).epsilon(1e-12));
  CHECK(static_cast<double>(oracle) == doctest::Approx(-1.2).epsilon(1e-9));
}

TEST_CASE("multi_derivative") {
  CHECK(multi_derivative(r(2, 2), MultiIndex{0, 0}) == r(2, 2));
  CHECK(multi_derivative(r(2, 2), MultiIndex{2, 0}) == c(2, 2));

  const SymExpr d = multi_derivative(r(3, -1), MultiIndex{1, 1, 0});
  // 3 x1 x2 |x|^-5
  CHECK(d == Rational(3) * xi(3, 0) * xi(3, 1) * r(3, -5));
  const std::vector<double> x{1, 1, 1};
  const long double oracle = testsupport::nested_derivative(
      testsupport::as_fn(r(3, -1)), testsupport::to_ld(x), {1, 1, 0}, 1e-2L);
  CHECK(evaluate(d, x) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-6));
}

TEST_CASE("laplacian closed form") {
  for (int n = 3; n <= 8; ++n) CHECK(is_zero(laplacian(r(n, 2 - n))));
  CHECK(is_zero(laplacian(L(2))));
  CHECK(laplacian(r(3, 4)) == Rational(20) * r(3, 2));
  CHECK(laplacian(r(2, 2) * L(2)) == Rational(4) * L(2) - c(2, 4));
  CHECK(laplacian(r(3, 1)) == Rational(2) * r(3, -1));
  CHECK(laplacian_iter(r(5, 3), 0) == r(5, 3));

  // Closed form agrees with the sum of second partials.
  Gen gen(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.uniform_int(2, 5);
    const SymExpr e = gen.expr(n, 3);
    SymExpr sum(n);
    for (int i = 0; i < n; ++i) sum += differentiate(differentiate(e, i), i);
    CHECK(laplacian(e) == sum);
  }
}

TEST_CASE("laplacian of |x|^4 against finite differences at random points") {
  Gen gen(5);
  const SymExpr e = laplacian(r(3, 4));
  for (int k = 0; k < 5; ++k) {
    const auto x = gen.point(3, 0.3, 1.5);
    long double fd = 0;
    for (int i = 0; i < 3; ++i) {
      std::vector<int> beta(3, 0);
      beta[static_cast<std::size_t>(i)] = 2;
      fd += testsupport::nested_derivative(testsupport::as_fn(r(3, 4)), testsupport::to_ld(x),
                                           beta, 1e-2L);
    }
    CHECK(evaluate(e, x) == doctest::Approx(static_cast<double>(fd)).epsilon(1e-8));
  }
}

TEST_CASE("canonical form") {
  CHECK((xi(2, 0) * xi(2, 0) + xi(2, 1) * xi(2, 1)) * r(2, -2) == c(2, 1));
  CHECK(is_zero(xi(3, 0) * xi(3, 0) + xi(3, 1) * xi(3, 1) + xi(3, 2) * xi(3, 2) - r(3, 2)));
  CHECK_FALSE(is_zero(xi(3, 0) * r(3, 1)));
  CHECK(is_zero(SymExpr(4)));

  const SymExpr raw = SymExpr::raw(
      2, {SymTerm{Rational(1), {2, 0}, -2, 0}, SymTerm{Rational(1), {0, 2}, -2, 0}});
  CHECK_FALSE(raw.canonical());
  const SymExpr once = canonicalize(raw);
  CHECK(once.to_string() == "1");
  CHECK(canonicalize(once).to_string() == once.to_string());

  Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SymExpr e = canonicalize(gen.expr(3, 3));
    CHECK(canonicalize(e).to_string() == e.to_string());
    for (const auto& t : e.terms()) CHECK(t.mono[0] <= 1);
  }
}

TEST_CASE("parity split of |x|^3") {
  const auto groups = parity_split(r(3, 3));
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].base_power == 0);
  CHECK(groups[0].even_part.terms().empty());
  CHECK(groups[0].odd_part.to_string() == "1*x1^2 + 1*x2^2 + 1*x3^2");
  CHECK(groups[0].odd_part.size() == 3);

  const auto neg = parity_split(r(2, -3) + xi(2, 1) * r(2, -2));
  REQUIRE(neg.size() == 1);
  CHECK(neg[0].base_power == -4);
  // x2 |x|^-2 = x2 (x1^2 + x2^2) |x|^-4, |x|^-3 = |x| |x|^-4
  CHECK(neg[0].odd_part.to_string() == "1");
  CHECK(neg[0].even_part.size() == 2);
}

TEST_CASE("polyharmonicity of the regime kernels is decided exactly") {
  // (m, n) = (2, 5): -|x|^{-1}... Phi_unit = (-1)^m |x|^{2m-n} = |x|^{-1}.
  CHECK(is_zero(laplacian_iter(r(5, -1), 2)));
  CHECK_FALSE(is_zero(laplacian_iter(r(5, -1), 1)));
  CHECK_FALSE(is_zero(r(5, -1)));
  // (3, 4): |x|^2 log(5/|x|), Delta^3 = 0.
  CHECK(is_zero(laplacian_iter(r(4, 2) * L(4), 3)));
}

TEST_CASE("evaluation") {
  CHECK(evaluate(r(3, -1), std::vector<double>{1, 0, 0}) == 1.0);
  CHECK(evaluate(L(2), std::vector<double>{3, 4}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(evaluate(Rational(-1) * r(3, 1), std::vector<double>{1, 0, 0}) == -1.0);
  CHECK_THROWS_AS(evaluate(r(3, 1), std::vector<double>{0, 0, 0}), DomainError);
  CHECK_THROWS_AS(evaluate(r(3, 1), std::vector<double>{1, 0}), DomainError);

  // Scaled evaluation agrees with the direct one where both are representable.
  Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const SymExpr e = gen.expr(3, 2);
    const auto w = gen.point(3, 0.5, 1.0);
    const long double lam = -3.0L;
    std::vector<double> x(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) x[i] = w[i] * std::exp(-3.0);
    const double direct = evaluate(e, x);
    CHECK(static_cast<double>(evaluate_scaled(e, w, lam)) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("exact evaluation at rational points") {
  const std::vector<Rational> x{Rational(3, 5), Rational(4, 5)};
  const ExactValue v = evaluate_exact(r(2, 3) + xi(2, 0), x);
  // |x| = 1 exactly, so the sqrt part folds away.
  REQUIRE(v.groups.size() == 1);
  CHECK(v.groups.at(0).first == Rational(8, 5));
  CHECK(sgn(v.groups.at(0).second) == 0);

  const std::vector<Rational> y{Rational(1), Rational(1)};
  const ExactValue w = evaluate_exact(r(2, 1) * L(2) + r(2, -2), y);
  CHECK(w.radius_squared == Rational(2));
  CHECK(w.groups.at(0).first == Rational(1, 2));
  CHECK(w.groups.at(1).second == Rational(1));
  CHECK(w.to_double() == doctest::Approx(0.5 + std::sqrt(2.0) * std::log(5 / std::sqrt(2.0))));

  // Canonical soundness in exact arithmetic.
  Gen gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.uniform_int(2, 4);
    std::vector<SymTerm> terms;
    for (int k = 0; k < 4; ++k) {
      std::vector<int> mono(static_cast<std::size_t>(n));
      for (auto& b : mono) b = gen.uniform_int(0, 3);
      terms.push_back(SymTerm{gen.coeff(), mono, gen.uniform_int(-3, 3), gen.uniform_int(0, 2)});
    }
    const SymExpr raw = SymExpr::raw(n, terms);
    std::vector<Rational> p(static_cast<std::size_t>(n));
    for (auto& v2 : p) v2 = Rational(gen.uniform_int(-7, 7), gen.uniform_int(1, 5));
    if (p[0] == 0) p[0] = 1;
    CHECK(evaluate_exact(raw, p) == evaluate_exact(canonicalize(raw), p));
  }
}

TEST_CASE("radial sign") {
  CHECK(radial_sign(Rational(-3) * r(3, -1)).sign == Sign::Negative);
  CHECK(radial_sign(Rational(-3) * r(3, -1)).everywhere);
  CHECK(radial_sign(xi(2, 0) * r(2, -2)).sign == Sign::Unknown);
  CHECK(radial_sign(SymExpr(3)).sign == Sign::Zero);

  const auto s = radial_sign(laplacian_iter(r(5, 1), 1));
  CHECK(s.sign == Sign::Positive);
  CHECK(s.radial_power == -1);
  CHECK(s.coeff == Rational(4));

  const auto lg = radial_sign(Rational(2) * r(2, 0) * L(2));
  CHECK(lg.sign == Sign::Positive);
  CHECK_FALSE(lg.everywhere);
}

TEST_CASE("algebraic laws hold exactly") {
  Gen gen(29);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const SymExpr a = gen.expr(n, 3), b = gen.expr(n, 2);
    const Rational p = gen.coeff(), q = gen.coeff();
    const int axis = gen.uniform_int(0, n - 1);
    CHECK(differentiate(p * a + q * b, axis) == p * differentiate(a, axis) + q * differentiate(b, axis));
    CHECK(differentiate(a * b, axis) == differentiate(a, axis) * b + a * differentiate(b, axis));

    const MultiIndex beta = gen.multi_index(n, 4);
    SymExpr reversed = a;
    for (int i = n - 1; i >= 0; --i) {
      for (int k = 0; k < beta[i]; ++k) reversed = differentiate(reversed, i);
    }
    CHECK(multi_derivative(a, beta) == reversed);
  }
}

TEST_CASE("symbolic derivatives agree with the finite-difference oracle") {
  Gen gen(31);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.uniform_int(2, 4);
    const SymExpr e = gen.expr(n, gen.uniform_int(1, 3));
    const MultiIndex beta = gen.multi_index(n, 4);
    const auto x = gen.point(n, 0.2, 2.0);
    const SymExpr d = multi_derivative(e, beta);
    const double sym = evaluate(d, x);
    const double h = 0.02 * std::sqrt(x[0] * x[0] + x[1] * x[1] + (n > 2 ? x[2] * x[2] : 0.0));
    const long double fd = testsupport::nested_derivative(testsupport::as_fn(e),
                                                          testsupport::to_ld(x),
                                                          beta.exponents(), h);
    // Scale for cancellation: the sum of absolute term values.
    double scale = 0;
    for (const auto& t : d.terms()) {
      scale += std::abs(evaluate(SymExpr::raw(n, {t}), x));
    }
    const double err = std::abs(sym - static_cast<double>(fd));
    CHECK_MESSAGE(err <= 1e-6 * std::max(std::abs(sym), 1e-2 * scale),
                  "e=" << e.to_string() << " beta=" << beta.to_string());
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("compiled evaluation matches the symbolic evaluator") {
  Gen gen(37);
  for (int trial = 0; trial < 20; ++trial) {
    const SymExpr a = gen.expr(3, 3), b = gen.expr(3, 2);
    CompiledExpr ce(a, 2.0L);
    ce.add(b, -0.5L);
    const auto x = gen.point(3, 0.2, 2.0);
    const double expect = 2.0 * evaluate(a, x) - 0.5 * evaluate(b, x);
    CHECK(ce(std::span<const double>(x)) ==
          doctest::Approx(expect).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("debug rendering matches the golden file") {
  const int n = 3;
  std::ostringstream os;
  os << laplacian(r(n, 4)).to_string() << "\n";
  os << multi_derivative(r(n, -1), MultiIndex{1, 1, 0}).to_string() << "\n";
  os << (Rational(1, 2) * r(2, 2) * L(2) - c(2, 3)).to_string() << "\n";
  os << laplacian(r(2, 2) * L(2)).to_string() << "\n";
  os << differentiate(r(4, -2) * L(4), 2).to_string() << "\n";
  os << (xi(3, 0) * xi(3, 0) * xi(3, 1)).to_string() << "\n";
  os << SymExpr(2).to_string() << "\n";

  std::ifstream in(std::string(POLYHARM_GOLDEN_DIR) + "/symexpr_render.txt");
  REQUIRE(in.good());
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(os.str() == golden.str());
}
