#include "polyharm/psi.hpp"

#include <algorithm>
#include <cmath>

#include "polyharm/error.hpp"

namespace polyharm {

namespace {

double norm(std::span<const double> v) {
  double s = 0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// (-y)^alpha / alpha!
long double taylor_weight(const MultiIndex& alpha, std::span<const double> y) {
  long double w = 1;
  for (int i = 0; i < alpha.dim(); ++i) {
    for (int k = 0; k < alpha[i]; ++k) w *= -static_cast<long double>(y[static_cast<std::size_t>(i)]);
  }
  return w / static_cast<long double>(alpha.factorial());
}

void check_dim(const PsiKernel& k, std::span<const double> v, const char* what) {
  if (static_cast<int>(v.size()) != k.params().n) {
    throw DomainError(std::string("psi: ") + what + " has the wrong dimension");
  }
}

void check_points(const PsiKernel& k, std::span<const double> x, std::span<const double> y) {
  check_dim(k, x, "x");
  check_dim(k, y, "y");
  if (norm(x) < kPsiMinRadius) throw DomainError("psi: |x| below 1e-6 (x = 0 is excluded)");
  const double ny = norm(y);
  if (ny > 0 && ny < kPsiMinRadius) throw DomainError("psi: 0 < |y| < 1e-6 is declined");
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
  if (std::sqrt(d) < kPsiMinRadius) throw DomainError("psi: y = x is excluded");
}

}  // namespace

PsiAtY::PsiAtY(CompiledExpr shifted, CompiledExpr taylor, Point y)
    : shifted_(std::move(shifted)), taylor_(std::move(taylor)), y_(std::move(y)) {}

long double PsiAtY::operator()(std::span<const long double> x) const {
  thread_local std::vector<long double> d;
  d.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - static_cast<long double>(y_[i]);
  const long double a = shifted_(std::span<const long double>(d));
  if (taylor_.size() == 0) return a;
  return a - taylor_(x);
}

double PsiAtY::operator()(std::span<const double> x) const {
  thread_local std::vector<long double> xl;
  xl.assign(x.begin(), x.end());
  return static_cast<double>((*this)(std::span<const long double>(xl)));
}

PsiAtX::PsiAtX(CompiledExpr shifted, std::vector<MultiIndex> alphas,
               std::vector<long double> coeffs, Point x)
    : shifted_(std::move(shifted)),
      alphas_(std::move(alphas)),
      coeffs_(std::move(coeffs)),
      x_(std::move(x)) {}

long double PsiAtX::operator()(std::span<const long double> y) const {
  thread_local std::vector<long double> d;
  d.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = static_cast<long double>(x_[i]) - y[i];
  long double sum = 0;
  for (std::size_t j = 0; j < alphas_.size(); ++j) {
    long double w = coeffs_[j];
    const auto& a = alphas_[j];
    for (int i = 0; i < a.dim(); ++i) {
      for (int k = 0; k < a[i]; ++k) w *= -y[static_cast<std::size_t>(i)];
    }
    sum += w;
  }
  return shifted_(std::span<const long double>(d)) - sum;
}

double PsiAtX::operator()(std::span<const double> y) const {
  thread_local std::vector<long double> yl;
  yl.assign(y.begin(), y.end());
  return static_cast<double>((*this)(std::span<const long double>(yl)));
}

PsiKernel::PsiKernel(const ProblemParams& p) : phi_(polyharm::phi(p)), table_(std::make_shared<Table>()) {
  if (taylor_degree() >= 0) taylor_ = MultiIndex::all_up_to(p.n, taylor_degree());
  std::lock_guard lock(table_->mu);
  for (const auto& a : MultiIndex::all_up_to(p.n, 2 * p.m - 2)) unit_locked_(a);
}

const SymExpr& PsiKernel::unit_locked_(const MultiIndex& alpha) const {
  auto it = table_->unit.find(alpha);
  if (it != table_->unit.end()) return it->second;
  SymExpr e;
  if (alpha.order() == 0) {
    e = phi_.unit_expr;
  } else {
    int axis = 0;
    while (alpha[axis] == 0) ++axis;
    e = differentiate(unit_locked_(alpha.shifted(axis, -1)), axis);
  }
  return table_->unit.emplace(alpha, std::move(e)).first->second;
}

const SymExpr& PsiKernel::unit_derivative(const MultiIndex& alpha) const {
  if (alpha.dim() != params().n) throw DomainError("psi: multi-index dimension mismatch");
  std::lock_guard lock(table_->mu);
  return unit_locked_(alpha);
}

const CompiledExpr& PsiKernel::compiled_derivative(const MultiIndex& alpha) const {
  if (alpha.dim() != params().n) throw DomainError("psi: multi-index dimension mismatch");
  std::lock_guard lock(table_->mu);
  auto it = table_->compiled.find(alpha);
  if (it != table_->compiled.end()) return it->second;
  CompiledExpr c(unit_locked_(alpha), phi_.scale);
  return table_->compiled.emplace(alpha, std::move(c)).first->second;
}

std::size_t PsiKernel::table_size() const {
  std::lock_guard lock(table_->mu);
  return table_->unit.size();
}

PsiAtY PsiKernel::at_y(std::span<const double> y, const MultiIndex& beta) const {
  check_dim(*this, y, "y");
  CompiledExpr taylor(params().n);
  for (const auto& a : taylor_) {
    const long double w = taylor_weight(a, y);
    if (w != 0) taylor.add(unit_derivative(a + beta), w * phi_.scale);
  }
  return PsiAtY(compiled_derivative(beta), std::move(taylor), Point(y.begin(), y.end()));
}

PsiAtY PsiKernel::at_y(std::span<const double> y) const { return at_y(y, MultiIndex(params().n)); }

PsiAtY PsiKernel::laplacian_at_y(std::span<const double> y, int j) const {
  check_dim(*this, y, "y");
  if (j < 0) throw DomainError("psi: negative Laplacian power");
  const MultiIndex zero(params().n);
  CompiledExpr taylor(params().n);
  for (const auto& a : taylor_) {
    const long double w = taylor_weight(a, y);
    if (w != 0) taylor.add(laplacian_iter(unit_derivative(a), j), w * phi_.scale);
  }
  CompiledExpr shifted(laplacian_iter(unit_derivative(zero), j), phi_.scale);
  return PsiAtY(std::move(shifted), std::move(taylor), Point(y.begin(), y.end()));
}

PsiAtX PsiKernel::at_x(std::span<const double> x, const MultiIndex& beta) const {
  check_dim(*this, x, "x");
  std::vector<long double> xl(x.begin(), x.end());
  std::vector<long double> coeffs;
  coeffs.reserve(taylor_.size());
  for (const auto& a : taylor_) {
    coeffs.push_back(compiled_derivative(a + beta)(std::span<const long double>(xl)) /
                     static_cast<long double>(a.factorial()));
  }
  return PsiAtX(compiled_derivative(beta), taylor_, std::move(coeffs), Point(x.begin(), x.end()));
}

PsiAtX PsiKernel::at_x(std::span<const double> x) const { return at_x(x, MultiIndex(params().n)); }

double psi_value(const PsiKernel& k, std::span<const double> x, std::span<const double> y) {
  check_points(k, x, y);
  return k.at_x(x)(y);
}

double psi_x_derivative(const PsiKernel& k, const MultiIndex& beta, std::span<const double> x,
                        std::span<const double> y) {
  check_points(k, x, y);
  if (beta.dim() != k.params().n) throw DomainError("psi: multi-index dimension mismatch");
  if (beta.order() > 2 * k.params().m - 1) throw DomainError("psi: |beta| must be <= 2m-1");
  return k.at_x(x, beta)(y);
}

double remainder_ratio(const PsiKernel& k, std::span<const double> x, std::span<const double> y,
                       const MultiIndex& beta) {
  check_points(k, x, y);
  const double nx = norm(x);
  const double ny = norm(y);
  if (!(ny < nx / 2 && nx / 2 < 1)) throw DomainError("remainder_ratio: requires |y| < |x|/2 < 1");
  const int m = k.params().m;
  const int n = k.params().n;
  if (ny == 0 && m >= 2) return 0.0;
  const double v = std::fabs(psi_x_derivative(k, beta, x, y));
  const double gauge = std::pow(ny, 2 * m - 2) * std::pow(nx, 2 - n - beta.order()) *
                       std::log(5.0 / nx);
  return v / gauge;
}

PolyharmonicCheck psi_polyharmonic_report(const PsiKernel& k, std::span<const double> y) {
  check_dim(k, y, "y");
  const int m = k.params().m;
  const int n = k.params().n;
  PolyharmonicCheck out;
  out.taylor_terms_zero = true;
  for (const auto& a : k.taylor_indices()) {
    if (!is_zero(laplacian_iter(k.unit_derivative(a), m))) out.taylor_terms_zero = false;
  }
  out.kernel_zero = is_zero(laplacian_iter(k.phi().unit_expr, m));

  // Sample points at distance >= 0.3 from both 0 and y.
  const int s = std::min(m, 2);
  const auto psi = k.laplacian_at_y(y, m - s);
  const ScalarFieldLd f = [&](std::span<const long double> x) { return psi(x); };
  for (const auto& dir : quasi_uniform_directions(n, 16)) {
    if (out.sample_points.size() == 5) break;
    Point x(dir.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.7 * dir[i];
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
    if (std::sqrt(d) < 0.3) continue;
    const double h0 = 0.06 * std::min(0.7, std::sqrt(d));
    const auto r = fd_laplacian_iter(f, s, x, h0);
    out.sample_points.push_back(x);
    out.fd_values.push_back(r.value);
    out.fd_max_abs = std::max(out.fd_max_abs, std::fabs(r.value));
  }
  out.pass = out.taylor_terms_zero && out.kernel_zero && out.sample_points.size() == 5 &&
             out.fd_max_abs <= 1e-4;
  return out;
}

bool psi_polyharmonic_check(const PsiKernel& k, std::span<const double> y) {
  return psi_polyharmonic_report(k, y).pass;
}

QuadratureResult psi_abs_integral(const PsiKernel& k, double r, std::span<const double> y,
                                  double tol) {
  check_dim(k, y, "y");
  const int n = k.params().n;
  const Point origin(static_cast<std::size_t>(n), 0.0);
  const auto psi = k.at_y(y);
  const ScalarField f = [&](std::span<const double> x) { return std::fabs(psi(x)); };
  BallQuadratureOptions opts;
  opts.tol = tol;
  opts.abs_tol = 0.0;
  const double ny = norm(y);
  if (ny > 0) {
    opts.singular_points.push_back(Point(y.begin(), y.end()));
    opts.symmetry = AngularSymmetry::Axial;
    opts.axis = Point(y.begin(), y.end());
  } else {
    opts.symmetry = AngularSymmetry::Radial;
  }
  return integrate_ball(f, origin, r, opts);
}

}  // namespace polyharm
