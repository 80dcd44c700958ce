#pragma once

// Independent oracles and generators shared by the unit tests. Nothing here
// calls into the library's numerics, so a bug there cannot hide a bug in
// the symbolic engine.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "polyharm/symexpr.hpp"

namespace testsupport {

using Point = std::vector<long double>;
using Fn = std::function<long double(const Point&)>;

// Central first difference along `axis`, three Richardson levels (h, h/2, h/4).
inline long double richardson_partial(const Fn& f, const Point& x, int axis, long double h) {
  auto central = [&](long double s) {
    Point a = x, b = x;
    a[static_cast<std::size_t>(axis)] += s;
    b[static_cast<std::size_t>(axis)] -= s;
    return (f(a) - f(b)) / (2 * s);
  };
  long double d0 = central(h), d1 = central(h / 2), d2 = central(h / 4);
  long double r01 = (4 * d1 - d0) / 3, r12 = (4 * d2 - d1) / 3;
  return (16 * r12 - r01) / 15;
}

// D^beta f by nesting first differences one axis at a time.
inline long double nested_derivative(const Fn& f, const Point& x, std::vector<int> beta,
                                     long double h) {
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0) continue;
    --beta[i];
    Fn inner = [f, beta, h](const Point& p) { return nested_derivative(f, p, beta, h); };
    return richardson_partial(inner, x, static_cast<int>(i), h);
  }
  return f(x);
}

inline Fn as_fn(const polyharm::SymExpr& e) {
  return [e](const Point& p) { return polyharm::evaluate_ld(e, p); };
}

struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  // Direction uniform on the sphere, radius uniform in [rlo, rhi].
  std::vector<double> point(int dim, double rlo, double rhi) {
    std::normal_distribution<double> g;
    std::vector<double> v(static_cast<std::size_t>(dim));
    double s = 0;
    for (auto& c : v) {
      c = g(rng);
      s += c * c;
    }
    const double r = uniform(rlo, rhi) / std::sqrt(s);
    for (auto& c : v) c *= r;
    return v;
  }

  polyharm::Rational coeff() {
    int num = uniform_int(-9, 9);
    if (num == 0) num = 1;
    return polyharm::Rational(num, uniform_int(1, 6));
  }

  polyharm::SymExpr term(int dim, int max_log = 1) {
    std::vector<int> mono(static_cast<std::size_t>(dim));
    for (auto& b : mono) b = uniform_int(0, 2);
    return polyharm::SymExpr::term(dim, coeff(), polyharm::MultiIndex(mono),
                                   uniform_int(-3, 3), uniform_int(0, max_log));
  }

  // Random expression tree of the given depth built from sums and products.
  polyharm::SymExpr expr(int dim, int depth) {
    if (depth <= 1) return term(dim) + term(dim);
    polyharm::SymExpr a = expr(dim, depth - 1);
    polyharm::SymExpr b = term(dim);
    switch (uniform_int(0, 2)) {
      case 0: return a + b;
      case 1: return a * b;
      default: return polyharm::differentiate(a, uniform_int(0, dim - 1)) + b;
    }
  }

  polyharm::MultiIndex multi_index(int dim, int max_order) {
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    int order = uniform_int(0, max_order);
    for (int k = 0; k < order; ++k) ++e[static_cast<std::size_t>(uniform_int(0, dim - 1))];
    return polyharm::MultiIndex(e);
  }
};

inline Point to_ld(const std::vector<double>& v) { return Point(v.begin(), v.end()); }

}  // namespace testsupport
