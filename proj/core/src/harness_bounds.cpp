#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polyharm/error.hpp"
#include "polyharm/harness.hpp"
#include "polyharm/kelvin.hpp"

namespace polyharm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double norm(std::span<const double> x) {
  double s = 0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

ScalarFieldLd as_field(const SymExpr& e) {
  return [c = CompiledExpr(e)](std::span<const long double> x) { return c(x); };
}

long double norm_ld(std::span<const long double> y) {
  long double s = 0;
  for (long double c : y) s += c * c;
  return std::sqrt(s);
}

// One row of a sup-ratio sweep. `eval` returns the ratio at a point, or
// nullopt when the FD behind it failed its consistency gate.
struct Quantity {
  std::string name;
  bool hypothesis = false;
  std::function<std::optional<double>(const Point&, double)> eval;
};

struct SweepPoint {
  Point x;
  double r;
  bool coarse;
};

std::vector<SweepPoint> sweep_points(const DyadicGrid& coarse, const DyadicGrid& fine) {
  const auto cr = coarse.radii();
  const auto fr = fine.radii();
  const auto dirs = quasi_uniform_directions(fine.dim, fine.directions);
  std::vector<SweepPoint> out;
  for (double r : fr) {
    const bool on_coarse = std::find(cr.begin(), cr.end(), r) != cr.end();
    for (int d = 0; d < fine.directions; ++d) {
      Point x = dirs[static_cast<std::size_t>(d)];
      for (auto& c : x) c *= r;
      out.push_back({std::move(x), r, on_coarse && d < coarse.directions});
    }
  }
  return out;
}

// Fills `rep` from the sweep: per-quantity coarse / fine sups, the coarse
// radial profile, the gate verdicts. Hypothesis rows pass when their max is
// <= hyp_tol.
void run_sweep(VerificationReport& rep, const DyadicGrid& coarse, const DyadicGrid& fine,
               const std::vector<Quantity>& qs, const StabilityGate& gate, double hyp_tol) {
  const auto pts = sweep_points(coarse, fine);
  auto& sups = rep.table("sups", {"quantity", "kind", "coarse_sup", "fine_sup", "fd_failures", "pass"});
  auto& prof = rep.table("profile", {"quantity", "r", "sup_ratio"});
  const auto cr = coarse.radii();
  bool all = true;
  double metric = kNegInf;
  for (const auto& q : qs) {
    double cs = kNegInf, fs = kNegInf;
    std::vector<double> per_r(cr.size(), kNegInf);
    bool finite = true;
    std::int64_t failures = 0;
    for (const auto& sp : pts) {
      const auto v = q.eval(sp.x, sp.r);
      if (!v) {
        rep.non_converged = true;
        ++failures;
        continue;
      }
      if (!std::isfinite(*v)) finite = false;
      fs = std::max(fs, *v);
      if (sp.coarse) {
        cs = std::max(cs, *v);
        const auto k = static_cast<std::size_t>(std::find(cr.begin(), cr.end(), sp.r) - cr.begin());
        per_r[k] = std::max(per_r[k], *v);
      }
    }
    bool ok;
    if (q.hypothesis) {
      ok = finite && fs <= hyp_tol;
    } else {
      // One-sided bounds with C > 0: a nonpositive sup is already bounded.
      ok = finite && gate.passes(std::max(cs, 0.0), std::max(fs, 0.0));
      metric = std::max(metric, fs);
    }
    all = all && ok;
    sups.add_row({q.name, std::string(q.hypothesis ? "hypothesis" : "bound"), cs, fs, failures, ok});
    for (std::size_t k = 0; k < cr.size(); ++k) prof.add_row({q.name, cr[k], per_r[k]});
  }
  rep.metric_name = "max_fine_sup_ratio";
  rep.metric = metric;
  rep.threshold = Threshold::named("stability-gated: " + gate.describe());
  rep.pass = all && !rep.non_converged;
}

// Admissible derivative orders for the |D^beta u| estimates (n < 2m).
int max_beta_order(const ProblemParams& p) {
  if (p.n >= 2 * p.m) return -1;
  return p.n % 2 == 1 ? 2 * p.m - p.n : 2 * p.m - p.n - 1;
}

void spot_check_interior(const SymExpr& u, const ProblemParams& p, const char* who) {
  const CompiledExpr cu(u);
  const CompiledExpr lap(laplacian_iter(u, p.m));
  const auto radii = log_spaced(0.99, 1e-6, 50);
  const auto dirs = quasi_uniform_directions(p.n, 20);
  for (double r : radii) {
    for (const auto& d : dirs) {
      Point x = d;
      for (auto& c : x) c *= r;
      if (cu(std::span<const double>(x)) < 0) {
        throw DomainError(std::string(who) + ": u is negative at |x| = " + std::to_string(r));
      }
      if (lap(std::span<const double>(x)) > 1e-9) {
        throw DomainError(std::string(who) + ": -Delta^m u < 0 at |x| = " + std::to_string(r));
      }
    }
  }
}

std::string sigma_name(int s) { return "sigma=" + std::to_string(s); }

}  // namespace

std::vector<double> DyadicGrid::radii() const {
  std::vector<double> out;
  const int steps = octaves * subdivisions;
  for (int k = 0; k <= steps; ++k) {
    const double e = static_cast<double>(k) / subdivisions;
    out.push_back(base * std::exp2(exterior ? e : -e));
  }
  return out;
}

std::vector<Point> DyadicGrid::points() const {
  return GridSpec{radii(), quasi_uniform_directions(dim, directions)}.points();
}

DyadicGrid DyadicGrid::refined(int new_octaves) const {
  DyadicGrid g = *this;
  g.octaves = new_octaves;
  g.subdivisions *= 2;
  return g;
}

std::string DyadicGrid::describe() const {
  std::ostringstream os;
  os << (exterior ? "|y| = " : "|x| = ") << base << " * 2^(" << (exterior ? "" : "-") << "k/"
     << subdivisions << "), k = 0.." << octaves * subdivisions << ", " << directions
     << " directions";
  return os.str();
}

DyadicGrid default_interior_grid(int dim) { return {dim, 0.9, 12, 1, 32, false}; }
DyadicGrid default_exterior_grid(int dim) { return {dim, 2.0, 9, 1, 8, true}; }

bool StabilityGate::passes(double coarse, double fine) const {
  if (!std::isfinite(coarse) || !std::isfinite(fine)) return false;
  return fine <= coarse + slack * std::fabs(coarse) + floor;
}

std::string StabilityGate::describe() const {
  std::ostringstream os;
  os << "fine <= coarse + " << slack << " |coarse| + " << floor;
  return os.str();
}

std::vector<NamedExpr> interior_family(const ProblemParams& p) {
  p.validate();
  const int n = p.n;
  SymExpr phi = phi_unit(p);
  if (radial_sign(phi).sign == Sign::Negative) phi = -phi;
  Rational cap = 1;
  for (int k = 0; k < p.m; ++k) cap *= 4;
  return {
      {"one", SymExpr::constant(n, 1)},
      {"gamma0", gamma0(n)},
      {"abs_phi", phi},
      {"affine", SymExpr::constant(n, 2) + SymExpr::coordinate(n, 0)},
      {"cap", SymExpr::constant(n, cap) - SymExpr::radial_power(n, 2 * p.m)},
  };
}

std::vector<NamedField> exterior_family(const ProblemParams& p) {
  p.validate();
  std::vector<NamedField> out;
  out.push_back({"gamma_inf", [g = gamma_inf(p)](std::span<const long double> y) {
                   return g.eval_ld(norm_ld(y));
                 }});
  out.push_back({"one", [](std::span<const long double>) { return 1.0L; }});
  for (const auto& u : interior_family(p)) {
    out.push_back({"kelvin_" + u.name, kelvin_transform(as_field(u.expr), p)});
  }
  return out;
}

VerificationReport check_interior_bound(const NamedExpr& u, const ProblemParams& p,
                                   const DyadicGrid& grid, const StabilityGate& gate) {
  p.validate();
  if (u.expr.dim() != p.n || grid.dim != p.n) throw DomainError("check_interior_bound: dimension mismatch");
  if (grid.exterior) throw DomainError("check_interior_bound: needs an interior grid");
  spot_check_interior(u.expr, p, "check_interior_bound");

  VerificationReport rep;
  rep.check_name = "interior_bound/" + u.name;
  rep.params = {{"m", std::int64_t{p.m}}, {"n", std::int64_t{p.n}}, {"solution", u.name}};
  const DyadicGrid fine = grid.refined(2 * grid.octaves);
  rep.grid = grid.describe() + "; refined: " + fine.describe();

  std::vector<Quantity> qs;
  for (int s = 0; s <= p.m; ++s) {
    SymExpr e = laplacian_iter(u.expr, s);
    if ((p.m + s) % 2 == 1) e = -e;
    const CompiledExpr num(e);
    if (s == p.m) {
      // (-1)^(2m) Delta^m u <= 0 is the hypothesis itself.
      qs.push_back({sigma_name(s), true, [num](const Point& x, double) -> std::optional<double> {
                      return num(std::span<const double>(x));
                    }});
      continue;
    }
    const RadialExpr den = gamma0_radial_derivative(p.n, 2 * s);
    qs.push_back({sigma_name(s), false, [num, den](const Point& x, double r) -> std::optional<double> {
                    return num(std::span<const double>(x)) / std::fabs(den(r));
                  }});
  }
  for (const auto& beta : MultiIndex::all_up_to(p.n, max_beta_order(p))) {
    const CompiledExpr num(multi_derivative(u.expr, beta));
    const RadialExpr den = gamma0_radial_derivative(p.n, beta.order());
    qs.push_back({"beta=" + beta.to_string(), false,
                  [num, den](const Point& x, double r) -> std::optional<double> {
                    return std::fabs(num(std::span<const double>(x))) / std::fabs(den(r));
                  }});
  }
  run_sweep(rep, grid, fine, qs, gate, 1e-9);
  return rep;
}

VerificationReport check_interior_bound_family(const ProblemParams& p, const std::string& only) {
  std::vector<VerificationReport> kids;
  for (const auto& u : interior_family(p)) {
    if (!only.empty() && u.name != only) continue;
    kids.push_back(check_interior_bound(u, p, default_interior_grid(p.n)));
  }
  if (kids.empty()) throw DomainError("check_interior_bound_family: unknown solution '" + only + "'");
  auto rep = aggregate("interior_bound", std::move(kids));
  rep.params = {{"m", std::int64_t{p.m}}, {"n", std::int64_t{p.n}}};
  return rep;
}

namespace {

const FdOptions kExteriorFd{1e-5};

// h0 = c |y|, c in {0.05, 0.1, 0.15}; the consistent result with the
// smallest error estimate.
template <class Fd>
std::optional<double> fd_best(Fd&& fd, double r) {
  std::optional<double> best;
  double best_err = 0;
  for (double c : {0.05, 0.1, 0.15}) {
    const FdResult res = fd(c * r);
    if (!res.consistent) continue;
    if (!best || res.error_estimate < best_err) {
      best = res.value;
      best_err = res.error_estimate;
    }
  }
  return best;
}

void spot_check_exterior_nonnegative(const ScalarFieldLd& v, const DyadicGrid& fine,
                                     const char* who) {
  for (const auto& y : fine.points()) {
    std::vector<long double> yl(y.begin(), y.end());
    if (v(yl) < 0) throw DomainError(std::string(who) + ": v is negative at |y| = " +
                                     std::to_string(norm(y)));
  }
}

}  // namespace

VerificationReport check_exterior_bound(const NamedField& v, const ProblemParams& p,
                                   const DyadicGrid& grid, const StabilityGate& gate) {
  p.validate();
  if (grid.dim != p.n || !grid.exterior || grid.base <= 1) {
    throw DomainError("check_exterior_bound: needs an exterior grid in |y| > 1");
  }
  const DyadicGrid fine = grid.refined(grid.octaves + 2);
  spot_check_exterior_nonnegative(v.field, fine, "check_exterior_bound");

  VerificationReport rep;
  rep.check_name = "exterior_bound/" + v.name;
  rep.params = {{"m", std::int64_t{p.m}}, {"n", std::int64_t{p.n}}, {"solution", v.name}};
  rep.grid = grid.describe() + "; refined: " + fine.describe();

  const int m = p.m, n = p.n;
  std::vector<Quantity> qs;
  for (int s = 0; s <= m; ++s) {
    const ScalarFieldLd g = [f = v.field, s, m](std::span<const long double> y) {
      const long double r = norm_ld(y);
      return std::pow(r, static_cast<long double>(2 * s - 2 * m)) * f(y);
    };
    const double sign = (m + s) % 2 == 0 ? 1.0 : -1.0;
    const bool log_rhs = s == 0 && n == 2;
    qs.push_back({sigma_name(s), false,
                  [g, s, sign, log_rhs](const Point& y, double r) -> std::optional<double> {
                    const auto lhs = fd_best([&](double h) { return fd_laplacian_iter(g, s, y, h, kExteriorFd); }, r);
                    if (!lhs) return std::nullopt;
                    const double rhs = std::pow(r, -2) * (log_rhs ? std::log(5 * r) : 1.0);
                    return sign * *lhs / rhs;
                  }});
  }
  // -Delta^m v >= 0, spot-checked to FD accuracy relative to |y|^-2.
  qs.push_back({"hypothesis", true, [f = v.field, m](const Point& y, double r) -> std::optional<double> {
                  const auto lhs = fd_best([&](double h) { return fd_laplacian_iter(f, m, y, h, kExteriorFd); }, r);
                  if (!lhs) return std::nullopt;
                  return *lhs * r * r;
                }});
  const RadialExpr ginf = gamma_inf(p);
  for (const auto& beta : MultiIndex::all_up_to(n, max_beta_order(p))) {
    const RadialExpr den = ginf.derivative(beta.order());
    qs.push_back({"beta=" + beta.to_string(), false,
                  [f = v.field, beta, den](const Point& y, double r) -> std::optional<double> {
                    double val;
                    if (beta.order() == 0) {
                      std::vector<long double> yl(y.begin(), y.end());
                      val = static_cast<double>(f(yl));
                    } else {
                      const auto d = fd_best([&](double h) { return fd_derivative(f, beta, y, h, kExteriorFd); }, r);
                      if (!d) return std::nullopt;
                      val = *d;
                    }
                    return std::fabs(val) / std::fabs(den(r));
                  }});
  }
  run_sweep(rep, grid, fine, qs, gate, 1e-3);
  return rep;
}

VerificationReport check_exterior_bound_family(const ProblemParams& p, const std::string& only) {
  std::vector<VerificationReport> kids;
  for (const auto& v : exterior_family(p)) {
    if (!only.empty() && v.name != only) continue;
    kids.push_back(check_exterior_bound(v, p, default_exterior_grid(p.n)));
  }
  if (kids.empty()) throw DomainError("check_exterior_bound_family: unknown solution '" + only + "'");
  auto rep = aggregate("exterior_bound", std::move(kids));
  rep.params = {{"m", std::int64_t{p.m}}, {"n", std::int64_t{p.n}}};
  return rep;
}

VerificationReport check_exterior_biharmonic(const NamedField& v, int n, const DyadicGrid& grid,
                                     const StabilityGate& gate) {
  if (n != 2 && n != 3) throw DomainError("check_exterior_biharmonic: n must be 2 or 3");
  if (grid.dim != n || !grid.exterior || grid.base <= 1) {
    throw DomainError("check_exterior_biharmonic: needs an exterior grid in |y| > 1");
  }
  const ProblemParams p{2, n};
  const DyadicGrid fine = grid.refined(grid.octaves + 2);
  spot_check_exterior_nonnegative(v.field, fine, "check_exterior_biharmonic");

  VerificationReport rep;
  rep.check_name = "exterior_biharmonic/" + v.name;
  rep.params = {{"m", std::int64_t{2}}, {"n", std::int64_t{n}}, {"solution", v.name}};
  rep.grid = grid.describe() + "; refined: " + fine.describe();

  const RadialExpr g0 = gamma_inf(p);
  const RadialExpr g1 = g0.derivative(), g2 = g0.derivative(2);
  const ScalarFieldLd f = v.field;
  std::vector<Quantity> qs;
  qs.push_back({"value", false, [f, g0](const Point& y, double r) -> std::optional<double> {
                  std::vector<long double> yl(y.begin(), y.end());
                  return static_cast<double>(f(yl)) / std::fabs(g0(r));
                }});
  qs.push_back({"gradient", false, [f, g1, n](const Point& y, double r) -> std::optional<double> {
                  double s = 0;
                  for (int i = 0; i < n; ++i) {
                    const auto d = fd_best([&](double h) { return fd_derivative(f, MultiIndex::unit(n, i), y, h, kExteriorFd); }, r);
                    if (!d) return std::nullopt;
                    s += *d * *d;
                  }
                  return std::sqrt(s) / std::fabs(g1(r));
                }});
  qs.push_back({"minus_laplacian", false, [f, g2](const Point& y, double r) -> std::optional<double> {
                  const auto d = fd_best([&](double h) { return fd_laplacian_iter(f, 1, y, h, kExteriorFd); }, r);
                  if (!d) return std::nullopt;
                  return -*d / std::fabs(g2(r));
                }});
  qs.push_back({"hypothesis", true, [f](const Point& y, double r) -> std::optional<double> {
                  const auto d = fd_best([&](double h) { return fd_laplacian_iter(f, 2, y, h, kExteriorFd); }, r);
                  if (!d) return std::nullopt;
                  return *d * r * r;
                }});
  run_sweep(rep, grid, fine, qs, gate, 1e-3);
  return rep;
}

VerificationReport check_exterior_biharmonic_family(int n, const std::string& only) {
  std::vector<VerificationReport> kids;
  for (const auto& v : exterior_family({2, n})) {
    if (!only.empty() && v.name != only) continue;
    kids.push_back(check_exterior_biharmonic(v, n, default_exterior_grid(n)));
  }
  if (kids.empty()) throw DomainError("check_exterior_biharmonic_family: unknown solution '" + only + "'");
  auto rep = aggregate("exterior_biharmonic", std::move(kids));
  rep.params = {{"m", std::int64_t{2}}, {"n", std::int64_t{n}}};
  return rep;
}

}  // namespace polyharm
