#include "polyharm/symexpr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polyharm/error.hpp"

namespace polyharm {

namespace {

struct TermKey {
  int log_power;
  int radial_power;
  std::vector<int> mono;
  auto operator<=>(const TermKey&) const = default;
};

void check_dim(int dim) {
  if (dim < 2) throw DomainError("SymExpr: ambient dimension must be >= 2");
}

}  // namespace

// Accumulates terms in canonical form (beta_1 <= 1), merging equal keys.
class TermAccumulator {
 public:
  explicit TermAccumulator(int dim) : dim_(dim) {}

  void add(const Rational& c, std::vector<int> mono, int q, int p) {
    if (sgn(c) == 0) return;
    if (mono[0] >= 2) {
      // x_1^2 = |x|^2 - sum_{i>=2} x_i^2
      mono[0] -= 2;
      add(c, mono, q + 2, p);
      for (int i = 1; i < dim_; ++i) {
        auto m = mono;
        m[static_cast<std::size_t>(i)] += 2;
        add(-c, std::move(m), q, p);
      }
      return;
    }
    TermKey key{p, q, std::move(mono)};
    auto [it, inserted] = acc_.try_emplace(std::move(key), c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) acc_.erase(it);
    }
  }

  SymExpr finish() && {
    SymExpr out(dim_);
    out.terms_.reserve(acc_.size());
    for (auto& [key, c] : acc_) {
      out.terms_.push_back(SymTerm{c, key.mono, key.radial_power, key.log_power});
    }
    return out;
  }

 private:
  int dim_;
  std::map<TermKey, Rational> acc_;
};

// ---------------------------------------------------------------------------
// Rational helpers

std::string rational_to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

Rational rational_pow(const Rational& base, int exponent) {
  if (exponent == 0) return Rational(1);
  if (sgn(base) == 0) {
    if (exponent < 0) throw DomainError("rational_pow: zero to a negative power");
    return Rational(0);
  }
  mpz_class num = base.get_num();
  mpz_class den = base.get_den();
  unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_class pn, pd;
  mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), e);
  mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), e);
  Rational out = exponent > 0 ? Rational(pn, pd) : Rational(pd, pn);
  out.canonicalize();
  return out;
}

namespace {
long double mpz_to_ld(const mpz_class& z) {
  const std::size_t bits = mpz_sizeinbase(z.get_mpz_t(), 2);
  if (bits <= 63) {
    return static_cast<long double>(z.get_si());
  }
  const unsigned long shift = static_cast<unsigned long>(bits - 63);
  mpz_class top;
  mpz_tdiv_q_2exp(top.get_mpz_t(), z.get_mpz_t(), shift);
  return std::ldexp(static_cast<long double>(top.get_si()), static_cast<int>(shift));
}
}  // namespace

long double to_long_double(const Rational& r) {
  const mpz_class& num = r.get_num();
  const mpz_class& den = r.get_den();
  const std::size_t nb = mpz_sizeinbase(num.get_mpz_t(), 2);
  const std::size_t db = mpz_sizeinbase(den.get_mpz_t(), 2);
  if (nb < 4000 && db < 4000) {
    // Scale both to 63 bits before dividing to keep the full mantissa.
    const int ns = nb > 63 ? static_cast<int>(nb - 63) : 0;
    const int ds = db > 63 ? static_cast<int>(db - 63) : 0;
    mpz_class n2 = num, d2 = den;
    if (ns) mpz_tdiv_q_2exp(n2.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(ns));
    if (ds) mpz_tdiv_q_2exp(d2.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(ds));
    long double v = static_cast<long double>(n2.get_si()) / static_cast<long double>(d2.get_si());
    return std::ldexp(v, ns - ds);
  }
  return mpz_to_ld(num) / mpz_to_ld(den);
}

// ---------------------------------------------------------------------------
// Construction

SymExpr::SymExpr(int dim) : dim_(dim) { check_dim(dim); }

SymExpr SymExpr::constant(int dim, const Rational& c) {
  return term(dim, c, MultiIndex(dim), 0, 0);
}

SymExpr SymExpr::coordinate(int dim, int axis) {
  return term(dim, Rational(1), MultiIndex::unit(dim, axis), 0, 0);
}

SymExpr SymExpr::radial_power(int dim, int q) {
  return term(dim, Rational(1), MultiIndex(dim), q, 0);
}

SymExpr SymExpr::log_power(int dim, int p) {
  return term(dim, Rational(1), MultiIndex(dim), 0, p);
}

SymExpr SymExpr::term(int dim, const Rational& c, const MultiIndex& beta, int q, int p) {
  check_dim(dim);
  if (beta.dim() != dim) throw DomainError("SymExpr: multi-index dimension mismatch");
  if (p < 0) throw DomainError("SymExpr: negative log power");
  TermAccumulator acc(dim);
  acc.add(c, beta.exponents(), q, p);
  return std::move(acc).finish();
}

SymExpr SymExpr::raw(int dim, std::vector<SymTerm> terms) {
  check_dim(dim);
  for (const auto& t : terms) {
    if (static_cast<int>(t.mono.size()) != dim) {
      throw DomainError("SymExpr: monomial dimension mismatch");
    }
    if (t.log_power < 0) throw DomainError("SymExpr: negative log power");
    for (int b : t.mono) {
      if (b < 0) throw DomainError("SymExpr: negative monomial exponent");
    }
  }
  SymExpr out(dim);
  out.terms_ = std::move(terms);
  out.canonical_ = false;
  return out;
}

int SymExpr::max_monomial_degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    for (int b : t.mono) d = std::max(d, b);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Arithmetic

SymExpr canonicalize(const SymExpr& e) {
  if (e.canonical()) return e;
  TermAccumulator acc(e.dim());
  for (const auto& t : e.terms()) acc.add(t.coeff, t.mono, t.radial_power, t.log_power);
  return std::move(acc).finish();
}

SymExpr SymExpr::operator-() const { return Rational(-1) * *this; }

SymExpr operator+(const SymExpr& a, const SymExpr& b) {
  if (a.dim() != b.dim()) throw DomainError("SymExpr: dimension mismatch");
  TermAccumulator acc(a.dim());
  for (const auto& t : a.terms()) acc.add(t.coeff, t.mono, t.radial_power, t.log_power);
  for (const auto& t : b.terms()) acc.add(t.coeff, t.mono, t.radial_power, t.log_power);
  return std::move(acc).finish();
}

SymExpr operator-(const SymExpr& a, const SymExpr& b) { return a + (-b); }

SymExpr& SymExpr::operator+=(const SymExpr& other) {
  *this = *this + other;
  return *this;
}

SymExpr operator*(const Rational& c, const SymExpr& e) {
  TermAccumulator acc(e.dim());
  for (const auto& t : e.terms()) acc.add(c * t.coeff, t.mono, t.radial_power, t.log_power);
  return std::move(acc).finish();
}

SymExpr operator*(const SymExpr& a, const SymExpr& b) {
  if (a.dim() != b.dim()) throw DomainError("SymExpr: dimension mismatch");
  TermAccumulator acc(a.dim());
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) {
      std::vector<int> mono = s.mono;
      for (std::size_t i = 0; i < mono.size(); ++i) mono[i] += t.mono[i];
      acc.add(s.coeff * t.coeff, std::move(mono), s.radial_power + t.radial_power,
              s.log_power + t.log_power);
    }
  }
  return std::move(acc).finish();
}

bool operator==(const SymExpr& a, const SymExpr& b) {
  if (a.dim() != b.dim()) return false;
  return is_zero(a - b);
}

// ---------------------------------------------------------------------------
// Calculus

SymExpr differentiate(const SymExpr& e, int axis) {
  if (axis < 0 || axis >= e.dim()) {
    throw DomainError("differentiate: axis " + std::to_string(axis) + " out of range [0, " +
                      std::to_string(e.dim()) + ")");
  }
  const auto ax = static_cast<std::size_t>(axis);
  TermAccumulator acc(e.dim());
  for (const auto& t : e.terms()) {
    const int b = t.mono[ax];
    if (b > 0) {
      auto m = t.mono;
      m[ax] -= 1;
      acc.add(t.coeff * b, std::move(m), t.radial_power, t.log_power);
    }
    // d|x|^q = q x_i |x|^(q-2), dlog(5/|x|) = -x_i |x|^-2
    if (t.radial_power != 0) {
      auto m = t.mono;
      m[ax] += 1;
      acc.add(t.coeff * t.radial_power, std::move(m), t.radial_power - 2, t.log_power);
    }
    if (t.log_power > 0) {
      auto m = t.mono;
      m[ax] += 1;
      acc.add(-t.coeff * t.log_power, std::move(m), t.radial_power - 2, t.log_power - 1);
    }
  }
  return std::move(acc).finish();
}

SymExpr multi_derivative(const SymExpr& e, const MultiIndex& beta) {
  if (beta.dim() != e.dim()) throw DomainError("multi_derivative: dimension mismatch");
  SymExpr out = canonicalize(e);
  for (int axis = 0; axis < beta.dim(); ++axis) {
    for (int k = 0; k < beta[axis]; ++k) out = differentiate(out, axis);
  }
  return out;
}

SymExpr laplacian(const SymExpr& e) {
  const int n = e.dim();
  TermAccumulator acc(n);
  for (const auto& t : e.terms()) {
    int order = 0;
    for (int b : t.mono) order += b;
    for (std::size_t i = 0; i < t.mono.size(); ++i) {
      const int b = t.mono[i];
      if (b >= 2) {
        auto m = t.mono;
        m[i] -= 2;
        acc.add(t.coeff * (b * (b - 1)), std::move(m), t.radial_power, t.log_power);
      }
    }
    const int q = t.radial_power;
    const int p = t.log_power;
    const int k = n - 2 + 2 * order;
    if (q * (q + k) != 0) acc.add(t.coeff * (q * (q + k)), t.mono, q - 2, p);
    if (p >= 1) acc.add(t.coeff * (-p * (2 * q + k)), t.mono, q - 2, p - 1);
    if (p >= 2) acc.add(t.coeff * (p * (p - 1)), t.mono, q - 2, p - 2);
  }
  return std::move(acc).finish();
}

SymExpr laplacian_iter(const SymExpr& e, int sigma) {
  if (sigma < 0) throw DomainError("laplacian_iter: sigma must be >= 0");
  SymExpr out = canonicalize(e);
  for (int s = 0; s < sigma; ++s) out = laplacian(out);
  return out;
}

bool is_zero(const SymExpr& e) { return canonicalize(e).terms().empty(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <typename T>
T norm_of(std::span<const T> x) {
  T s = 0;
  for (T v : x) s += v * v;
  return std::sqrt(s);
}

template <typename T>
T int_pow(T base, int e) {
  T result = 1;
  bool inv = e < 0;
  unsigned u = static_cast<unsigned>(inv ? -e : e);
  while (u) {
    if (u & 1U) result *= base;
    base *= base;
    u >>= 1U;
  }
  return inv ? T(1) / result : result;
}

template <typename T>
T evaluate_impl(const SymExpr& e, std::span<const T> x) {
  if (static_cast<int>(x.size()) != e.dim()) {
    throw DomainError("evaluate: point dimension does not match expression");
  }
  const T r = norm_of(x);
  if (!(r > T(kOriginGuard))) throw DomainError("evaluate: x = 0 is outside the domain");
  const T log_term = std::log(T(5) / r);
  T sum = 0;
  for (const auto& t : e.terms()) {
    T v = static_cast<T>(to_long_double(t.coeff));
    for (std::size_t i = 0; i < t.mono.size(); ++i) {
      if (t.mono[i]) v *= int_pow(x[i], t.mono[i]);
    }
    if (t.radial_power) v *= int_pow(r, t.radial_power);
    if (t.log_power) v *= int_pow(log_term, t.log_power);
    sum += v;
  }
  return sum;
}

}  // namespace

double evaluate(const SymExpr& e, std::span<const double> x) {
  std::vector<long double> xl(x.begin(), x.end());
  return static_cast<double>(evaluate_impl<long double>(e, xl));
}

long double evaluate_ld(const SymExpr& e, std::span<const long double> x) {
  return evaluate_impl<long double>(e, x);
}

long double evaluate_scaled(const SymExpr& e, std::span<const double> w, long double log_scale) {
  if (static_cast<int>(w.size()) != e.dim()) {
    throw DomainError("evaluate_scaled: point dimension does not match expression");
  }
  std::vector<long double> wl(w.begin(), w.end());
  const long double r = norm_of<long double>(wl);
  if (!(r > kOriginGuard)) throw DomainError("evaluate_scaled: w = 0 is outside the domain");
  const long double log_term = std::log(5.0L / r) - log_scale;
  long double sum = 0;
  for (const auto& t : e.terms()) {
    long double v = to_long_double(t.coeff);
    int degree = t.radial_power;
    for (std::size_t i = 0; i < t.mono.size(); ++i) {
      if (t.mono[i]) v *= int_pow(wl[i], t.mono[i]);
      degree += t.mono[i];
    }
    if (t.radial_power) v *= int_pow(r, t.radial_power);
    if (t.log_power) v *= int_pow(log_term, t.log_power);
    if (degree) v *= std::exp(log_scale * degree);
    sum += v;
  }
  return sum;
}

namespace {

bool is_rational_square(const Rational& s, Rational& root) {
  if (sgn(s) < 0) return false;
  if (!mpz_perfect_square_p(s.get_num_mpz_t()) || !mpz_perfect_square_p(s.get_den_mpz_t())) {
    return false;
  }
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), s.get_num_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), s.get_den_mpz_t());
  root = Rational(rn, rd);
  root.canonicalize();
  return true;
}

}  // namespace

ExactValue evaluate_exact(const SymExpr& e, std::span<const Rational> x) {
  if (static_cast<int>(x.size()) != e.dim()) {
    throw DomainError("evaluate_exact: point dimension does not match expression");
  }
  ExactValue out;
  out.radius_squared = 0;
  for (const auto& v : x) out.radius_squared += v * v;
  if (sgn(out.radius_squared) == 0) throw DomainError("evaluate_exact: x = 0 is outside the domain");
  for (const auto& t : e.terms()) {
    Rational v = t.coeff;
    for (std::size_t i = 0; i < t.mono.size(); ++i) {
      if (t.mono[i]) v *= rational_pow(x[i], t.mono[i]);
    }
    // |x|^q = s^floor(q/2) * sqrt(s)^(q mod 2)
    const int q = t.radial_power;
    const int half = q >= 0 ? q / 2 : -((-q + 1) / 2);
    const bool odd = (q - 2 * half) != 0;
    v *= rational_pow(out.radius_squared, half);
    auto& [alpha, gamma] = out.groups[t.log_power];
    if (odd) {
      gamma += v;
    } else {
      alpha += v;
    }
  }
  Rational root;
  const bool square = is_rational_square(out.radius_squared, root);
  for (auto it = out.groups.begin(); it != out.groups.end();) {
    auto& [alpha, gamma] = it->second;
    if (square && sgn(gamma) != 0) {
      alpha += gamma * root;
      gamma = 0;
    }
    alpha.canonicalize();
    gamma.canonicalize();
    if (sgn(alpha) == 0 && sgn(gamma) == 0) {
      it = out.groups.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

double ExactValue::to_double() const {
  const long double s = to_long_double(radius_squared);
  const long double root = std::sqrt(s);
  const long double log_term = std::log(5.0L / root);
  long double sum = 0;
  for (const auto& [p, ag] : groups) {
    const long double group = to_long_double(ag.first) + to_long_double(ag.second) * root;
    sum += group * int_pow(log_term, p);
  }
  return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// Sign and structure queries

RadialSignResult radial_sign(const SymExpr& e) {
  const SymExpr c = canonicalize(e);
  RadialSignResult out;
  if (c.terms().empty()) {
    out.sign = Sign::Zero;
    out.everywhere = true;
    return out;
  }
  if (c.terms().size() != 1) return out;
  const SymTerm& t = c.terms().front();
  if (std::any_of(t.mono.begin(), t.mono.end(), [](int b) { return b != 0; })) return out;
  out.sign = sgn(t.coeff) > 0 ? Sign::Positive : Sign::Negative;
  out.everywhere = t.log_power == 0;
  out.coeff = t.coeff;
  out.radial_power = t.radial_power;
  out.log_power = t.log_power;
  return out;
}

namespace {

using Poly = std::map<std::vector<int>, Rational>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      auto m = ma;
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
      out[m] += ca * cb;
    }
  }
  std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
  return out;
}

Poly radius_squared_power(int dim, int k) {
  Poly base;
  for (int i = 0; i < dim; ++i) {
    std::vector<int> m(static_cast<std::size_t>(dim), 0);
    m[static_cast<std::size_t>(i)] = 2;
    base[m] = 1;
  }
  Poly out;
  out[std::vector<int>(static_cast<std::size_t>(dim), 0)] = 1;
  for (int j = 0; j < k; ++j) out = poly_mul(out, base);
  return out;
}

SymExpr poly_to_raw(int dim, const Poly& p) {
  std::vector<SymTerm> terms;
  for (const auto& [m, c] : p) {
    if (sgn(c) != 0) terms.push_back(SymTerm{c, m, 0, 0});
  }
  return SymExpr::raw(dim, std::move(terms));
}

}  // namespace

std::vector<ParityGroup> parity_split(const SymExpr& e) {
  const SymExpr c = canonicalize(e);
  const int dim = c.dim();
  std::map<int, std::vector<const SymTerm*>> by_log;
  for (const auto& t : c.terms()) by_log[t.log_power].push_back(&t);
  std::vector<ParityGroup> out;
  for (const auto& [p, terms] : by_log) {
    int q0 = 0;
    for (const SymTerm* t : terms) {
      const int q = t->radial_power;
      const int even_q = (q % 2 == 0) ? q : q - 1;
      q0 = std::min(q0, even_q);
    }
    Poly even, odd;
    for (const SymTerm* t : terms) {
      const int q = t->radial_power;
      const bool is_odd = (q - q0) % 2 != 0;
      const int k = (q - q0 - (is_odd ? 1 : 0)) / 2;
      Poly mono;
      mono[t->mono] = t->coeff;
      Poly folded = poly_mul(mono, radius_squared_power(dim, k));
      Poly& target = is_odd ? odd : even;
      for (const auto& [m, cf] : folded) target[m] += cf;
    }
    std::erase_if(even, [](const auto& kv) { return sgn(kv.second) == 0; });
    std::erase_if(odd, [](const auto& kv) { return sgn(kv.second) == 0; });
    out.push_back(ParityGroup{p, q0, poly_to_raw(dim, even), poly_to_raw(dim, odd)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string SymExpr::to_string() const {
  if (terms_.empty()) return "0";
  // Highest log power first, then highest radial power, then monomial.
  std::vector<const SymTerm*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const SymTerm* a, const SymTerm* b) {
    if (a->log_power != b->log_power) return a->log_power > b->log_power;
    if (a->radial_power != b->radial_power) return a->radial_power > b->radial_power;
    return a->mono > b->mono;
  });
  std::ostringstream os;
  bool first = true;
  for (const SymTerm* t : order) {
    Rational coeff = t->coeff;
    if (first) {
      if (sgn(coeff) < 0) {
        os << "-";
        coeff = -coeff;
      }
    } else {
      os << (sgn(coeff) < 0 ? " - " : " + ");
      if (sgn(coeff) < 0) coeff = -coeff;
    }
    first = false;
    os << rational_to_string(coeff);
    for (std::size_t i = 0; i < t->mono.size(); ++i) {
      if (t->mono[i] == 0) continue;
      os << "*x" << (i + 1);
      if (t->mono[i] != 1) os << "^" << t->mono[i];
    }
    if (t->radial_power != 0) os << "*|x|^" << t->radial_power;
    if (t->log_power != 0) {
      os << "*log(5/|x|)";
      if (t->log_power != 1) os << "^" << t->log_power;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// CompiledExpr

CompiledExpr::CompiledExpr(const SymExpr& e, long double weight) : dim_(e.dim()) {
  add(e, weight);
}

void CompiledExpr::add(const SymExpr& e, long double weight) {
  if (dim_ == 0) dim_ = e.dim();
  if (e.dim() != dim_) throw DomainError("CompiledExpr: dimension mismatch");
  if (weight == 0) return;
  const SymExpr ce = canonicalize(e);
  for (const auto& t : ce.terms()) {
    const long double c = weight * to_long_double(t.coeff);
    auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Term& s) {
      return s.radial_power == t.radial_power && s.log_power == t.log_power && s.mono == t.mono;
    });
    if (it != terms_.end()) {
      it->coeff += c;
    } else {
      terms_.push_back(Term{c, t.mono, t.radial_power, t.log_power});
    }
  }
  rebuild_index_();
}

void CompiledExpr::rebuild_index_() {
  max_mono_ = 0;
  min_q_ = 0;
  max_q_ = 0;
  max_p_ = 0;
  for (const auto& t : terms_) {
    for (int b : t.mono) max_mono_ = std::max(max_mono_, b);
    min_q_ = std::min(min_q_, t.radial_power);
    max_q_ = std::max(max_q_, t.radial_power);
    max_p_ = std::max(max_p_, t.log_power);
  }
}

long double CompiledExpr::operator()(std::span<const long double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw DomainError("CompiledExpr: point dimension mismatch");
  }
  long double r2 = 0;
  for (long double v : x) r2 += v * v;
  const long double r = std::sqrt(r2);
  if (!(r > kOriginGuard)) throw DomainError("CompiledExpr: x = 0 is outside the domain");
  const long double log_term = std::log(5.0L / r);

  // Power tables; the sizes are tiny so stack-like vectors are fine.
  const std::size_t stride = static_cast<std::size_t>(max_mono_ + 1);
  thread_local std::vector<long double> xpow;
  thread_local std::vector<long double> rpow;
  thread_local std::vector<long double> lpow;
  xpow.resize(stride * static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    long double* row = &xpow[static_cast<std::size_t>(i) * stride];
    row[0] = 1;
    for (int k = 1; k <= max_mono_; ++k) row[k] = row[k - 1] * x[static_cast<std::size_t>(i)];
  }
  rpow.resize(static_cast<std::size_t>(max_q_ - min_q_ + 1));
  {
    const std::size_t zero = static_cast<std::size_t>(-min_q_);
    rpow[zero] = 1;
    for (int k = 1; k <= max_q_; ++k) rpow[zero + k] = rpow[zero + k - 1] * r;
    const long double inv = 1.0L / r;
    for (int k = 1; k <= -min_q_; ++k) rpow[zero - k] = rpow[zero - k + 1] * inv;
  }
  lpow.resize(static_cast<std::size_t>(max_p_ + 1));
  lpow[0] = 1;
  for (int k = 1; k <= max_p_; ++k) lpow[static_cast<std::size_t>(k)] = lpow[k - 1] * log_term;

  long double sum = 0;
  for (const auto& t : terms_) {
    long double v = t.coeff;
    for (int i = 0; i < dim_; ++i) {
      const int b = t.mono[static_cast<std::size_t>(i)];
      if (b) v *= xpow[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(b)];
    }
    v *= rpow[static_cast<std::size_t>(t.radial_power - min_q_)];
    v *= lpow[static_cast<std::size_t>(t.log_power)];
    sum += v;
  }
  return sum;
}

double CompiledExpr::operator()(std::span<const double> x) const {
  thread_local std::vector<long double> xl;
  xl.assign(x.begin(), x.end());
  return static_cast<double>((*this)(std::span<const long double>(xl)));
}

}  // namespace polyharm
