#include "polyharm/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "polyharm/error.hpp"

namespace polyharm {

double unit_sphere_area(int dim) {
  if (dim < 1) throw DomainError("unit_sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre

namespace {

GaussRule make_gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < (order + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (order + 0.5L));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1);
    }
    const long double w = 2 / ((1 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = static_cast<double>(-x);
    rule.nodes[hi] = static_cast<double>(x);
    rule.weights[lo] = rule.weights[hi] = static_cast<double>(w);
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_gauss_legendre(order)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Ball quadrature

namespace {

struct WeightedDirection {
  Point u;
  double w;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Point normalized(Point v) {
  const double nrm = std::sqrt(dot(v, v));
  if (!(nrm > 0)) throw DomainError("integrate_ball: zero axis vector");
  for (auto& c : v) c /= nrm;
  return v;
}

// Any unit vector orthogonal to `axis`.
Point orthogonal_to(const Point& axis) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (std::fabs(axis[i]) < std::fabs(axis[k])) k = i;
  }
  Point e(axis.size(), 0.0);
  e[k] = 1;
  const double d = dot(e, axis);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= d * axis[i];
  return normalized(e);
}

int theta_order(int level) { return 4 + 4 * level; }

// Composite Gauss-Legendre on [lo, hi] split at the given angles.
std::vector<std::pair<double, double>> composite_arcs(double lo, double hi,
                                                      std::vector<double> cuts, int order) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const GaussRule& g = gauss_legendre(order);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
    if (!(b - a > 1e-14)) continue;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      out.emplace_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[k], 0.5 * (b - a) * g.weights[k]);
    }
  }
  return out;
}

// Householder reflection taking e_1 to `pole` (unit), applied in place.
void reflect_to_pole(Point& v, const Point& pole) {
  Point w = pole;
  w[0] -= 1;
  const double ww = dot(w, w);
  if (ww < 1e-30) return;
  // H = I - 2 w w^T / (w^T w) with w = pole - e_1 maps e_1 to pole.
  const double c = 2 * dot(w, v) / ww;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
}

// Hyperspherical product rule: theta_1..theta_{n-2} by Gauss-Legendre (theta_1
// composite, split at `theta1_cuts`), phi by the trapezoid rule. The pole
// theta_1 = 0 points along `pole`.
std::vector<WeightedDirection> product_rule(int dim, int level, const Point* pole = nullptr,
                                            const std::vector<double>& theta1_cuts = {}) {
  const double pi = std::numbers::pi;
  std::vector<WeightedDirection> out;
  const int nphi = dim == 2 ? 16 * (level + 1) : 2 * theta_order(level);
  std::vector<double> phis(static_cast<std::size_t>(nphi));
  for (int k = 0; k < nphi; ++k) phis[static_cast<std::size_t>(k)] = 2 * pi * (k + 0.5) / nphi;
  const double wphi = 2 * pi / nphi;
  if (dim == 2) {
    for (double ph : phis) out.push_back({{std::cos(ph), std::sin(ph)}, wphi});
    return out;
  }
  const GaussRule& g = gauss_legendre(theta_order(level));
  std::vector<std::pair<double, double>> inner;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    inner.emplace_back(pi / 2 * (g.nodes[i] + 1), pi / 2 * g.weights[i]);
  }
  std::vector<std::pair<double, double>> first =
      theta1_cuts.empty() ? inner : composite_arcs(0, pi, theta1_cuts, 6 + 4 * level);
  const int nth = dim - 2;
  std::vector<std::size_t> idx(static_cast<std::size_t>(nth), 0);
  while (true) {
    double w = 1, s = 1;
    Point u(static_cast<std::size_t>(dim), 0.0);
    for (int k = 0; k < nth; ++k) {
      const auto& [th, wt] = (k == 0 ? first : inner)[idx[static_cast<std::size_t>(k)]];
      w *= wt * std::pow(std::sin(th), dim - 2 - k);
      u[static_cast<std::size_t>(k)] = s * std::cos(th);
      s *= std::sin(th);
    }
    for (double ph : phis) {
      Point v = u;
      v[static_cast<std::size_t>(dim - 2)] = s * std::cos(ph);
      v[static_cast<std::size_t>(dim - 1)] = s * std::sin(ph);
      if (pole) reflect_to_pole(v, *pole);
      out.push_back({std::move(v), w * wphi});
    }
    int k = nth - 1;
    while (k >= 0) {
      const std::size_t limit = (k == 0 ? first : inner).size();
      if (++idx[static_cast<std::size_t>(k)] < limit) break;
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

struct Partition {
  Point q;
  double delta;
};

// Angles at which a ray from `origin` becomes tangent to a partition sphere,
// measured from `ref` (plane: polar angle; axial: angle to the axis).
std::vector<double> cone_angles(const Point& origin, const std::vector<Partition>& parts,
                                bool axial, const Point& axis) {
  const double pi = std::numbers::pi;
  std::vector<double> out;
  for (const auto& pq : parts) {
    Point rel(origin.size());
    for (std::size_t i = 0; i < rel.size(); ++i) rel[i] = pq.q[i] - origin[i];
    const double d = std::sqrt(dot(rel, rel));
    const double center = axial ? (dot(rel, axis) > 0 ? 0.0 : pi) : std::atan2(rel[1], rel[0]);
    for (double rho : {0.5 * pq.delta, pq.delta}) {
      const double half = std::asin(std::min(1.0, rho / d));
      out.push_back(center - half);
      out.push_back(center + half);
    }
  }
  return out;
}

std::vector<WeightedDirection> plane_rule_split(const std::vector<double>& angles, int level) {
  const double two_pi = 2 * std::numbers::pi;
  std::vector<double> cuts;
  for (double a : angles) cuts.push_back(a - two_pi * std::floor(a / two_pi));
  std::vector<WeightedDirection> out;
  for (const auto& [ph, w] : composite_arcs(0, two_pi, cuts, 6 + 4 * level)) {
    out.push_back({{std::cos(ph), std::sin(ph)}, w});
  }
  return out;
}

std::vector<WeightedDirection> axial_rule(int dim, const Point& axis, int level,
                                          const std::vector<double>& angles) {
  const double pi = std::numbers::pi;
  const Point perp = orthogonal_to(axis);
  const double shell = unit_sphere_area(dim - 1);
  std::vector<std::pair<double, double>> nodes;
  if (angles.empty()) {
    const GaussRule& g = gauss_legendre(8 + 8 * level);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      nodes.emplace_back(pi / 2 * (g.nodes[i] + 1), pi / 2 * g.weights[i]);
    }
  } else {
    nodes = composite_arcs(0, pi, angles, 6 + 4 * level);
  }
  std::vector<WeightedDirection> out;
  for (const auto& [th, w] : nodes) {
    Point u(axis.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::cos(th) * axis[k] + std::sin(th) * perp[k];
    out.push_back({std::move(u), w * shell * std::pow(std::sin(th), dim - 2)});
  }
  return out;
}

std::vector<WeightedDirection> directions_for(int dim, const BallQuadratureOptions& opts,
                                              const Point& axis, int level, const Point& origin,
                                              const std::vector<Partition>& cones) {
  switch (opts.symmetry) {
    case AngularSymmetry::None:
      if (cones.empty()) return product_rule(dim, level);
      if (dim == 2) return plane_rule_split(cone_angles(origin, cones, false, axis), level);
      if (cones.size() == 1) {
        // Pole toward the singular point: its cones become theta_1 = const.
        Point pole(cones[0].q.size());
        for (std::size_t i = 0; i < pole.size(); ++i) pole[i] = cones[0].q[i] - origin[i];
        pole = normalized(pole);
        return product_rule(dim, level, &pole, cone_angles(origin, cones, true, pole));
      }
      return product_rule(dim, level);
    case AngularSymmetry::Axial:
      return axial_rule(dim, axis, level, cone_angles(origin, cones, true, axis));
    case AngularSymmetry::Radial: {
      Point e(static_cast<std::size_t>(dim), 0.0);
      e[0] = 1;
      return {{e, unit_sphere_area(dim)}};
    }
  }
  return {};
}

// Roots t of |p + t u - q|^2 = rho^2 (u unit), ascending; empty if none.
std::vector<double> sphere_crossings(std::span<const double> p, std::span<const double> u,
                                     std::span<const double> q, double rho) {
  double b = 0, cc = -rho * rho;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    b += u[i] * d;
    cc += d * d;
  }
  const double disc = b * b - cc;
  if (disc < 0) return {};
  const double s = std::sqrt(disc);
  return {-b - s, -b + s};
}

// 1 on [0, 1/2], 0 on [1, inf), C-infinity in between.
double cutoff(double s) {
  if (s <= 0.5) return 1;
  if (s >= 1) return 0;
  const double t = 2 * s - 1;
  const double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
  return b / (a + b);
}

struct LevelRule {
  int panels;
  int order;
};

LevelRule level_rule(int level) { return {12 + 6 * level, 6 + 2 * level}; }

class RayIntegrator {
 public:
  RayIntegrator(const ScalarField& f, int dim, const std::vector<Partition>& parts,
                long long& evals)
      : f_(f), dim_(dim), parts_(parts), evals_(evals), p_(static_cast<std::size_t>(dim)) {}

  // sum over panels of  int f(o + t u) * mask(o + t u) * t^(n-1) dt  on [t0, t1],
  // graded toward t0 = 0 when `graded`.
  double integrate(std::span<const double> o, std::span<const double> u, double t0, double t1,
                   std::vector<double> breaks, bool graded, int level, int self_part) {
    if (!(t1 > t0)) return 0;
    const LevelRule rule = level_rule(level);
    if (graded) {
      double t = t1;
      for (int k = 0; k < rule.panels; ++k) {
        t *= 0.5;
        if (t <= t0 || t < 1e-12 * t1) break;
        breaks.push_back(t);
      }
    } else if (t0 > 0) {
      for (double t = t1 * 0.5; t > t0; t *= 0.5) breaks.push_back(t);
    }
    breaks.push_back(t0);
    breaks.push_back(t1);
    std::sort(breaks.begin(), breaks.end());
    const GaussRule& g = gauss_legendre(rule.order);
    double total = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double a = std::max(t0, breaks[i]);
      const double b = std::min(t1, breaks[i + 1]);
      if (!(b > a)) continue;
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      double panel = 0;
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = mid + half * g.nodes[k];
        for (int d = 0; d < dim_; ++d) {
          p_[static_cast<std::size_t>(d)] = o[static_cast<std::size_t>(d)] + t * u[static_cast<std::size_t>(d)];
        }
        const double w = mask(t, self_part);
        if (w == 0) continue;
        ++evals_;
        panel += g.weights[k] * w * f_(p_) * std::pow(t, dim_ - 1);
      }
      total += half * panel;
    }
    return total;
  }

 private:
  // Base rays carry 1 - sum chi_q; rays of partition j carry chi_j (radial in t).
  double mask(double t, int self_part) const {
    if (self_part >= 0) return cutoff(t / parts_[static_cast<std::size_t>(self_part)].delta);
    double w = 1;
    for (const auto& pq : parts_) w -= cutoff(dist(p_, pq.q) / pq.delta);
    return w;
  }

  const ScalarField& f_;
  int dim_;
  const std::vector<Partition>& parts_;
  long long& evals_;
  Point p_;
};

double integrate_level(const ScalarField& f, std::span<const double> c, double R,
                       const Point& origin, const std::vector<Partition>& parts,
                       const BallQuadratureOptions& opts, const Point& axis, int level,
                       long long& evals) {
  const int dim = static_cast<int>(c.size());
  RayIntegrator ray(f, dim, parts, evals);
  const auto dirs = directions_for(dim, opts, axis, level, origin, parts);
  double total = 0;
  for (const auto& d : dirs) {
    const auto exit = sphere_crossings(origin, d.u, c, R);
    const double T = exit.at(1);
    std::vector<double> breaks;
    for (const auto& pq : parts) {
      for (double rho : {0.5 * pq.delta, pq.delta}) {
        for (double t : sphere_crossings(origin, d.u, pq.q, rho)) {
          if (t > opts.inner_radius && t < T) breaks.push_back(t);
        }
      }
    }
    total += d.w * ray.integrate(origin, d.u, opts.inner_radius, T, std::move(breaks),
                                 opts.inner_radius == 0, level, -1);
  }
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const Partition& pq = parts[j];
    const auto qdirs = directions_for(dim, opts, axis, level, pq.q, {});
    for (const auto& d : qdirs) {
      const auto cross = sphere_crossings(pq.q, d.u, c, R);
      if (cross.empty()) continue;
      const double lo = std::max(0.0, cross[0]);
      const double hi = std::min(pq.delta, cross[1]);
      if (!(hi > lo)) continue;
      std::vector<double> breaks{0.5 * pq.delta};
      total += d.w * ray.integrate(pq.q, d.u, lo, hi, std::move(breaks), lo == 0, level,
                                   static_cast<int>(j));
    }
  }
  return total;
}

}  // namespace

QuadratureResult integrate_ball(const ScalarField& f, std::span<const double> center,
                                double radius, const BallQuadratureOptions& opts) {
  const int dim = static_cast<int>(center.size());
  if (dim < 2) throw DomainError("integrate_ball: dimension must be >= 2");
  if (!(radius > 0)) throw DomainError("integrate_ball: radius must be positive");
  if (!(opts.tol > 0)) throw DomainError("integrate_ball: tol must be positive");
  const Point c(center.begin(), center.end());
  const Point origin = opts.polar_origin.value_or(c);
  if (static_cast<int>(origin.size()) != dim) throw DomainError("integrate_ball: origin dimension");
  if (dist(origin, c) >= radius) throw DomainError("integrate_ball: polar origin outside the ball");
  if (opts.inner_radius < 0 || opts.inner_radius >= radius) {
    throw DomainError("integrate_ball: inner radius must lie in [0, radius)");
  }
  if (opts.inner_radius > 0 && (dist(origin, c) > 0 || !opts.singular_points.empty())) {
    throw DomainError("integrate_ball: shells require a centered origin and no partitions");
  }
  Point axis(static_cast<std::size_t>(dim), 0.0);
  axis[0] = 1;
  if (opts.axis) axis = normalized(*opts.axis);

  std::vector<Partition> parts;
  for (const auto& q : opts.singular_points) {
    if (static_cast<int>(q.size()) != dim) throw DomainError("integrate_ball: singular point dimension");
    if (opts.symmetry == AngularSymmetry::Radial) {
      throw DomainError("integrate_ball: radial symmetry admits no off-origin singularities");
    }
    if (opts.symmetry == AngularSymmetry::Axial) {
      Point rel(q.size());
      for (std::size_t i = 0; i < q.size(); ++i) rel[i] = q[i] - origin[i];
      const double along = dot(rel, axis);
      double off = 0;
      for (std::size_t i = 0; i < rel.size(); ++i) off += std::pow(rel[i] - along * axis[i], 2);
      off = std::sqrt(off);
      if (off > 1e-12 * (1 + std::sqrt(dot(rel, rel)))) {
        throw DomainError("integrate_ball: singular point off the symmetry axis");
      }
    }
    double gap = dist(q, origin);
    for (const auto& other : opts.singular_points) {
      if (&other != &q) gap = std::min(gap, dist(q, other));
    }
    if (!(gap > 0)) throw DomainError("integrate_ball: coincident singular points");
    if (dist(q, c) >= radius + 0.5 * gap) continue;  // support misses the ball
    parts.push_back({q, 0.5 * gap});
  }

  const double abs_tol = opts.abs_tol.value_or(opts.tol);
  QuadratureResult res;
  if (opts.fixed_level) {
    res.value = integrate_level(f, c, radius, origin, parts, opts, axis, *opts.fixed_level,
                                res.evaluations);
    res.level = *opts.fixed_level;
    res.converged = true;
    return res;
  }
  double prev = 0;
  for (int level = 0; level <= opts.max_level; ++level) {
    const double v = integrate_level(f, c, radius, origin, parts, opts, axis, level, res.evaluations);
    res.value = v;
    res.level = level;
    if (level > 0) {
      res.error_estimate = std::fabs(v - prev);
      if (level >= opts.min_level &&
          res.error_estimate <= std::max(opts.tol * std::fabs(v), abs_tol)) {
        res.converged = true;
        return res;
      }
    }
    prev = v;
  }
  return res;
}

// ---------------------------------------------------------------------------
// 1-D quadrature

QuadratureResult integrate_interval(const RadialFunction& g, double a, double b, double tol) {
  QuadratureResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  double err = 0, l1 = 0;
  // Work on [0, 1]: the library's error estimate has an absolute floor that
  // never clears on very short intervals.
  const double width = b - a;
  auto counted = [&](double s) {
    ++res.evaluations;
    return g(a + width * s) * width;
  };
  res.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(counted, 0.0, 1.0, 15,
                                                                            tol, &err, &l1);
  res.error_estimate = err;
  res.converged = err <= std::max(10 * tol * l1, 1e-300);
  return res;
}

QuadratureResult integrate_radial(const RadialFunction& g, int n, double R, double tol) {
  if (n < 1) throw DomainError("integrate_radial: n must be >= 1");
  if (!(R > 0)) throw DomainError("integrate_radial: R must be positive");
  auto weighted = [&](double rho) { return g(rho) * std::pow(rho, n - 1); };
  QuadratureResult res;
  double hi = R;
  int quiet = 0;
  for (int k = 0; k < 200; ++k) {
    const double lo = 0.5 * hi;
    const QuadratureResult shell = integrate_interval(weighted, lo, hi, 0.1 * tol);
    if (!std::isfinite(shell.value)) break;
    res.value += shell.value;
    res.error_estimate += shell.error_estimate;
    res.evaluations += shell.evaluations;
    hi = lo;
    const bool small = std::fabs(shell.value) <= 0.01 * tol * std::fabs(res.value) ||
                       std::fabs(shell.value) < 1e-300;
    quiet = small ? quiet + 1 : 0;
    if (quiet >= 3) {
      res.error_estimate += 3 * std::fabs(shell.value);
      res.converged = true;
      res.level = k;
      return res;
    }
  }
  res.converged = false;
  return res;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

using Stencil = std::map<std::vector<int>, long double>;  // offsets in half-steps

long double binomial(int k, int j) {
  long double c = 1;
  for (int i = 1; i <= j; ++i) c = c * (k - j + i) / i;
  return c;
}

Stencil derivative_stencil(const MultiIndex& beta) {
  Stencil st;
  st[std::vector<int>(static_cast<std::size_t>(beta.dim()), 0)] = 1;
  for (int axis = 0; axis < beta.dim(); ++axis) {
    const int k = beta[axis];
    if (k == 0) continue;
    Stencil next;
    for (const auto& [off, c] : st) {
      for (int j = 0; j <= k; ++j) {
        auto o = off;
        o[static_cast<std::size_t>(axis)] += k - 2 * j;  // (k/2 - j) h in half-steps
        next[o] += c * ((j % 2 == 0) ? 1 : -1) * binomial(k, j);
      }
    }
    st = std::move(next);
  }
  return st;
}

Stencil laplacian_stencil(int dim, int sigma) {
  Stencil st;
  st[std::vector<int>(static_cast<std::size_t>(dim), 0)] = 1;
  for (int s = 0; s < sigma; ++s) {
    Stencil next;
    for (const auto& [off, c] : st) {
      for (int axis = 0; axis < dim; ++axis) {
        for (int d : {-2, 0, 2}) {
          auto o = off;
          o[static_cast<std::size_t>(axis)] += d;
          next[o] += c * (d == 0 ? -2 : 1);
        }
      }
    }
    std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
    st = std::move(next);
  }
  return st;
}

FdResult richardson(const ScalarFieldLd& f, const Stencil& st, int order,
                    std::span<const double> x, double h0, const FdOptions& opts) {
  if (!(h0 > 0)) throw DomainError("finite differences: h0 must be positive");
  std::vector<long double> p(x.size());
  long double D[4];
  long double fmax = 0;
  for (int k = 0; k < 4; ++k) {
    const long double h = static_cast<long double>(h0) / (1 << k);
    long double sum = 0;
    for (const auto& [off, c] : st) {
      for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] + 0.5L * h * off[i];
      const long double v = f(p);
      fmax = std::max(fmax, std::fabs(v));
      sum += c * v;
    }
    D[k] = sum / std::pow(h, static_cast<long double>(order));
  }
  long double R1[3], R2[2];
  for (int k = 0; k < 3; ++k) R1[k] = (4 * D[k + 1] - D[k]) / 3;
  for (int k = 0; k < 2; ++k) R2[k] = (16 * R1[k + 1] - R1[k]) / 15;
  FdResult out;
  out.value = static_cast<double>(R2[1]);
  out.error_estimate = static_cast<double>(std::fabs(R2[1] - R2[0]));
  const double scale = std::max(std::fabs(out.value), static_cast<double>(fmax));
  out.consistent = std::isfinite(out.value) && out.error_estimate <= 10 * opts.tol * scale;
  return out;
}

ScalarFieldLd widen(const ScalarField& f) {
  return [&f](std::span<const long double> p) {
    thread_local std::vector<double> q;
    q.assign(p.begin(), p.end());
    return static_cast<long double>(f(q));
  };
}

}  // namespace

FdResult fd_derivative(const ScalarFieldLd& f, const MultiIndex& beta, std::span<const double> x,
                       double h0, const FdOptions& opts) {
  if (beta.dim() != static_cast<int>(x.size())) throw DomainError("fd_derivative: dimension mismatch");
  if (beta.order() == 0) {
    std::vector<long double> p(x.begin(), x.end());
    return {static_cast<double>(f(p)), 0.0, true};
  }
  return richardson(f, derivative_stencil(beta), beta.order(), x, h0, opts);
}

FdResult fd_derivative(const ScalarField& f, const MultiIndex& beta, std::span<const double> x,
                       double h0, const FdOptions& opts) {
  return fd_derivative(widen(f), beta, x, h0, opts);
}

FdResult fd_laplacian_iter(const ScalarFieldLd& f, int sigma, std::span<const double> x,
                           double h0, const FdOptions& opts) {
  if (sigma < 0) throw DomainError("fd_laplacian_iter: sigma must be >= 0");
  if (sigma == 0) {
    std::vector<long double> p(x.begin(), x.end());
    return {static_cast<double>(f(p)), 0.0, true};
  }
  return richardson(f, laplacian_stencil(static_cast<int>(x.size()), sigma), 2 * sigma, x, h0, opts);
}

FdResult fd_laplacian_iter(const ScalarField& f, int sigma, std::span<const double> x, double h0,
                           const FdOptions& opts) {
  return fd_laplacian_iter(widen(f), sigma, x, h0, opts);
}

// ---------------------------------------------------------------------------
// Grids

std::vector<double> log_spaced(double r_max, double r_min, int count) {
  if (!(r_max > 0 && r_min > 0) || count < 1) throw DomainError("log_spaced: bad range");
  std::vector<double> out;
  if (count == 1) return {r_max};
  const double step = std::log(r_min / r_max) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(r_max * std::exp(step * i));
  out.back() = r_min;
  return out;
}

namespace {
double halton(int index, int base) {
  double f = 1, r = 0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}
}  // namespace

std::vector<Point> quasi_uniform_directions(int dim, int count) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim < 1 || dim > 16) throw DomainError("quasi_uniform_directions: unsupported dimension");
  std::vector<Point> out;
  if (count < 1) return out;
  Point e(static_cast<std::size_t>(dim), 0.0);
  e[0] = 1;
  out.push_back(e);
  for (int k = 1; static_cast<int>(out.size()) < count; ++k) {
    Point v(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const double u = halton(k, primes[d]);
      v[static_cast<std::size_t>(d)] = std::numbers::sqrt2 * boost::math::erf_inv(2 * u - 1);
    }
    const double nrm = std::sqrt(dot(v, v));
    if (!(nrm > 1e-6)) continue;
    for (auto& c : v) c /= nrm;
    out.push_back(std::move(v));
  }
  return out;
}

GridSpec make_grid(int dim, double r_max, double r_min, int radii, int directions) {
  return {log_spaced(r_max, r_min, radii), quasi_uniform_directions(dim, directions)};
}

std::vector<Point> GridSpec::points() const {
  std::vector<Point> out;
  for (double r : radii) {
    for (const auto& u : directions) {
      Point p = u;
      for (auto& c : p) c *= r;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << radii.size() << " radii in [" << (radii.empty() ? 0 : radii.back()) << ", "
     << (radii.empty() ? 0 : radii.front()) << "] x " << directions.size() << " directions";
  return os.str();
}

}  // namespace polyharm
