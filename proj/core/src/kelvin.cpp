#include "polyharm/kelvin.hpp"

#include <cmath>

#include "polyharm/error.hpp"

namespace polyharm {

namespace {

template <class T>
T norm2(std::span<const T> v) {
  T s = 0;
  for (T c : v) s += c * c;
  return s;
}

template <class T, class F>
auto make_transform(F u, int power) {
  return [u = std::move(u), power](std::span<const T> y) -> T {
    const T s = norm2(y);
    if (!(s > 0)) throw DomainError("kelvin_transform: y = 0 is outside the domain");
    std::vector<T> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / s;
    // |x| = 1 / |y|, so |x|^power = s^(-power/2)
    const T scale = std::pow(s, static_cast<T>(-power) / 2);
    return scale * u(std::span<const T>(x));
  };
}

}  // namespace

Point kelvin_point(std::span<const double> y) {
  const double s = norm2(y);
  if (!(s > 0)) throw DomainError("kelvin_point: y = 0");
  Point x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / s;
  return x;
}

ScalarField sigma_kelvin_transform(ScalarField u, int n, int sigma) {
  return make_transform<double>(std::move(u), n - 2 * sigma);
}

ScalarFieldLd sigma_kelvin_transform(ScalarFieldLd u, int n, int sigma) {
  return make_transform<long double>(std::move(u), n - 2 * sigma);
}

ScalarField kelvin_transform(ScalarField u, const ProblemParams& p) {
  p.validate();
  return sigma_kelvin_transform(std::move(u), p.n, p.m);
}

ScalarFieldLd kelvin_transform(ScalarFieldLd u, const ProblemParams& p) {
  p.validate();
  return sigma_kelvin_transform(std::move(u), p.n, p.m);
}

VerificationReport verify_kelvin_identity(const ScalarFieldLd& u, const ProblemParams& p,
                                          const std::vector<Point>& samples, double tol) {
  p.validate();
  const ScalarFieldLd v = kelvin_transform(u, p);
  VerificationReport rep;
  rep.check_name = "kelvin_identity";
  rep.params = {{"m", std::int64_t{p.m}}, {"n", std::int64_t{p.n}}};
  rep.grid = std::to_string(samples.size()) + " sample points, |y| in [0.5, 3]";
  rep.metric_name = "max_relative_deviation";
  rep.threshold = Threshold::at_most(tol);
  auto& t = rep.table("samples", {"y_norm", "lhs", "rhs", "scale", "relative_deviation"});
  double worst = 0;
  for (const auto& y : samples) {
    if (static_cast<int>(y.size()) != p.n) throw DomainError("verify_kelvin_identity: dimension");
    const double ny = std::sqrt(norm2(std::span<const double>(y)));
    if (ny < 0.5 || ny > 3) throw DomainError("verify_kelvin_identity: |y| must lie in [0.5, 3]");
    const Point x = kelvin_point(y);
    const double nx = 1 / ny;
    const auto lhs = fd_laplacian_iter(v, p.m, y, 0.05 * ny);
    const auto lu = fd_laplacian_iter(u, p.m, x, 0.05 * nx);
    const double rhs = std::pow(nx, p.n + 2 * p.m) * lu.value;
    // Local magnitude of v: y itself and y +- |y|/4 e_i.
    std::vector<long double> yl(y.begin(), y.end());
    long double vmax = std::fabs(v(std::span<const long double>(yl)));
    for (std::size_t i = 0; i < yl.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        auto q = yl;
        q[i] += sgn * 0.25 * ny;
        vmax = std::max(vmax, std::fabs(v(std::span<const long double>(q))));
      }
    }
    const double scale =
        std::max(std::fabs(rhs), static_cast<double>(vmax) * std::pow(ny, -2 * p.m));
    const double dev = scale > 0 ? std::fabs(lhs.value - rhs) / scale : std::fabs(lhs.value - rhs);
    worst = std::max(worst, dev);
    t.add_row({ny, lhs.value, rhs, scale, dev});
    if (!std::isfinite(lhs.value) || !std::isfinite(rhs)) rep.non_converged = true;
  }
  rep.metric = worst;
  rep.pass = !rep.non_converged && worst <= tol;
  return rep;
}

}  // namespace polyharm
