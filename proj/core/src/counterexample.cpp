#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>

#include "polyharm/error.hpp"
#include "polyharm/harness.hpp"

namespace polyharm {

namespace {

using Fn = std::function<double(double)>;

class GaugeParser {
 public:
  explicit GaugeParser(const std::string& s) : s_(s) {}

  Fn parse() {
    Fn f = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("parse_gauge: " + what + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Fn expr() {
    Fn f = term();
    while (eat('+')) {
      Fn g = term();
      f = [f, g](double r) { return f(r) + g(r); };
    }
    return f;
  }
  Fn term() {
    Fn f = factor();
    for (;;) {
      if (eat('*')) {
        Fn g = factor();
        f = [f, g](double r) { return f(r) * g(r); };
      } else if (eat('/')) {
        Fn g = factor();
        f = [f, g](double r) { return f(r) / g(r); };
      } else {
        return f;
      }
    }
  }
  Fn factor() {
    Fn f = primary();
    if (eat('^')) {
      const bool neg = eat('-');
      skip();
      double e = rational();
      if (neg) e = -e;
      f = [f, e](double r) { return std::pow(f(r), e); };
    }
    return f;
  }
  double rational() {
    skip();
    const double num = digits();
    // '/digits' belongs to the rational; any other '/' is a division
    std::size_t q = pos_;
    while (q < s_.size() && std::isspace(static_cast<unsigned char>(s_[q]))) ++q;
    std::size_t d = q + 1;
    while (d < s_.size() && std::isspace(static_cast<unsigned char>(s_[d]))) ++d;
    if (q < s_.size() && s_[q] == '/' && d < s_.size() && std::isdigit(static_cast<unsigned char>(s_[d]))) {
      pos_ = d;
      const double den = digits();
      if (den == 0) fail("zero denominator");
      return num / den;
    }
    return num;
  }
  double digits() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number");
    return std::stod(s_.substr(start, pos_ - start));
  }
  Fn primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (eat('(')) {
      Fn f = expr();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    if (s_.compare(pos_, 3, "log") == 0) {
      pos_ += 3;
      if (!eat('(')) fail("expected '(' after log");
      Fn f = expr();
      if (!eat(')')) fail("expected ')'");
      return [f](double r) { return std::log(f(r)); };
    }
    if (s_[pos_] == 'r') {
      ++pos_;
      return [](double r) { return r; };
    }
    const double c = rational();
    return [c](double) { return c; };
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

// 1 on [0, 1], 0 on [2, inf), quintic (C^2) bridge in between.
double cutoff(double t) {
  if (t <= 1) return 1;
  if (t >= 2) return 0;
  const double s = t - 1;
  return 1 - s * s * s * (10 - 15 * s + 6 * s * s);
}

struct ScaledKernel {
  SymExpr unit;
  double scale;
  int n;
  // -Phi(e^ell rho e_1)
  double minus_phi(double rho, double ell) const {
    Point w(static_cast<std::size_t>(n), 0.0);
    w[0] = rho;
    return -scale * static_cast<double>(evaluate_scaled(unit, w, ell));
  }
};

// R^-n int_{|z|<R} -Phi and R^-n int -Phi(z) cutoff(|z|/R), for R = e^ell.
struct LevelIntegrals {
  double inner = 0, inner_err = 0;
  double with_cutoff = 0;
  bool converged = false;
};

LevelIntegrals level_integrals(const ScaledKernel& k, double ell, bool need_cutoff) {
  LevelIntegrals out;
  const double area = unit_sphere_area(k.n);
  const auto in = integrate_radial([&](double rho) { return k.minus_phi(rho, ell); }, k.n, 1.0, 1e-12);
  out.inner = area * in.value;
  out.inner_err = area * in.error_estimate;
  out.converged = in.converged;
  if (need_cutoff) {
    const auto bridge = integrate_interval(
        [&](double rho) { return k.minus_phi(rho, ell) * cutoff(rho) * std::pow(rho, k.n - 1); }, 1.0,
        2.0, 1e-12);
    out.with_cutoff = out.inner + area * bridge.value;
    out.converged = out.converged && bridge.converged;
  }
  return out;
}

std::string rendered(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Gauge parse_gauge(const std::string& text) {
  GaugeParser p(text);
  return {text, p.parse()};
}

CounterexampleCertificate build_counterexample(const ProblemParams& p, const Gauge& psi,
                                               int levels, const CounterexampleOptions& opts) {
  p.validate();
  if (classify(p).bound_exists) {
    throw DomainError("refusing: a pointwise bound holds for (m, n) = (" + std::to_string(p.m) +
                      ", " + std::to_string(p.n) + ")");
  }
  if (levels < 1 || levels > 8) throw DomainError("build_counterexample: levels must lie in [1, 8]");
  if (!(opts.margin > 1)) throw DomainError("build_counterexample: margin must exceed 1");
  const FundamentalSolution phi = polyharm::phi(p);
  const ScaledKernel k{phi.unit_expr, phi.scale, p.n};

  CounterexampleCertificate cert;
  cert.params = p;
  cert.gauge = psi.text;
  cert.margin = opts.margin;
  cert.certified = true;
  for (int j = 1; j <= levels; ++j) {
    CounterexampleLevel lv;
    lv.j = j;
    lv.x_norm = std::pow(5.0, -j);
    lv.psi = psi(lv.x_norm);
    if (!(lv.psi > 0) || !std::isfinite(lv.psi)) {
      throw DomainError("build_counterexample: psi(" + rendered(lv.x_norm) + ") is not positive");
    }
    lv.alpha = opts.alpha ? opts.alpha(j, lv.psi) : j * lv.psi;
    // Need R^-n int_{|z|<R} -Phi > margin 2^j alpha_j. The mean of -Phi over
    // B_R decreases in R; search log R downward from log(|x_j|/8).
    const double target = opts.margin * std::ldexp(lv.alpha, j);
    auto excess = [&](double ell) { return level_integrals(k, ell, false).inner - target; };
    double hi = std::log(lv.x_norm / 8);
    double lo = hi;
    bool found = excess(hi) > 0;
    if (!found) {
      for (int step = 0; step < 64 && !found; ++step) {
        hi = lo;
        lo -= std::ldexp(1.0, step);
        found = excess(lo) > 0;
      }
      if (!found) {
        cert.certified = false;
        cert.failure = "level " + std::to_string(j) + ": no radius certifies the mean of -Phi";
        break;
      }
      for (int it = 0; it < 200 && hi - lo > 1e-12 * (1 + std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0 ? lo : hi) = mid;
      }
    } else {
      lo = hi;
    }
    lv.log_R = lo;
    lv.R = std::exp(lo);
    const auto ints = level_integrals(k, lo, true);
    lv.mean_minus_phi = ints.inner;
    // f_j = 2^-j R^-n cutoff(|x - x_j| / R):  u(x_j) >= 2^-j R^-n int -Phi(z) cutoff(|z|/R).
    lv.u_lower = std::ldexp(ints.with_cutoff, -j);
    lv.ratio = lv.u_lower / lv.psi;
    lv.certified = ints.converged && ints.inner - ints.inner_err > target && lv.u_lower > lv.alpha &&
                   lo < std::log(lv.x_norm / 4);
    cert.levels.push_back(lv);
    if (!lv.certified) {
      cert.certified = false;
      cert.failure = "level " + std::to_string(j) + ": quadrature does not certify the margin";
      break;
    }
  }
  return cert;
}

double counterexample_value(const CounterexampleCertificate& c, std::span<const double> x) {
  const int n = c.params.n;
  if (static_cast<int>(x.size()) != n) throw DomainError("counterexample_value: dimension");
  const FundamentalSolution phi = polyharm::phi(c.params);
  const CompiledExpr kern(phi.unit_expr, phi.scale);
  double total = 0;
  for (const auto& lv : c.levels) {
    // y = x_j + R w, |w| < 2: u_j(x) = 2^-j int -Phi(x - x_j - R w) cutoff(|w|) dw
    Point d(x.begin(), x.end());
    d[0] -= lv.x_norm;
    Point wstar(d);
    for (auto& v : wstar) v /= lv.R;
    double s = 0;
    for (double v : wstar) s += v * v;
    BallQuadratureOptions opts;
    opts.tol = 1e-8;
    opts.abs_tol = 0.0;
    if (lv.R > 0 && std::isfinite(s) && std::sqrt(s) < 2) opts.polar_origin = wstar;
    const Point c0(static_cast<std::size_t>(n), 0.0);
    Point z(static_cast<std::size_t>(n));
    const auto res = integrate_ball(
        [&](std::span<const double> w) {
          double rw = 0;
          for (int i = 0; i < n; ++i) {
            z[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)] - lv.R * w[static_cast<std::size_t>(i)];
            rw += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
          }
          return -kern(std::span<const double>(z)) * cutoff(std::sqrt(rw));
        },
        c0, 2.0, opts);
    if (!res.converged) throw ConvergenceError("counterexample_value: quadrature did not converge");
    total += std::ldexp(res.value, -lv.j);
  }
  return total;
}

VerificationReport CounterexampleCertificate::report() const {
  VerificationReport rep;
  rep.check_name = "counterexample";
  rep.params = {{"m", std::int64_t{params.m}}, {"n", std::int64_t{params.n}}, {"psi", gauge},
                {"margin", margin}};
  rep.grid = "x_j = 5^-j e_1, j = 1.." + std::to_string(levels.size());
  rep.metric_name = "min_ratio_minus_j";
  rep.threshold = Threshold::named("ratio_j >= j and u_lower > alpha_j at every level");
  auto& t = rep.table("levels", {"j", "x_norm", "R", "log_R", "alpha", "u_lower", "psi", "ratio",
                                 "certified"});
  double worst = std::numeric_limits<double>::infinity();
  bool ladder = true;
  for (const auto& lv : levels) {
    t.add_row({std::int64_t{lv.j}, lv.x_norm, lv.R, lv.log_R, lv.alpha, lv.u_lower, lv.psi, lv.ratio,
               lv.certified});
    worst = std::min(worst, lv.ratio - lv.j);
    ladder = ladder && lv.ratio >= lv.j;
  }
  rep.metric = levels.empty() ? 0 : worst;
  rep.pass = certified && ladder && !levels.empty();
  return rep;
}

}  // namespace polyharm
