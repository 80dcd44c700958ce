#pragma once

// Exact symbolic algebra for functions on R^n - {0} of the form
//
//   sum_k c_k * x^beta_k * |x|^q_k * log(5/|x|)^p_k
//
// with rational c_k. The family is closed under partial differentiation and
// under the Laplacian, and admits a decidable zero test.
//
// Canonical form: every stored monomial has beta_1 <= 1 (first axis). Any
// x_1^2 factor is rewritten as |x|^2 - (x_2^2 + ... + x_n^2). The functions
// x^beta |x|^q log(5/|x|)^p with beta_1 <= 1 are linearly independent, so an
// expression is identically zero iff its canonical form has no terms.

#include <gmpxx.h>

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polyharm/multi_index.hpp"

namespace polyharm {

using Rational = mpq_class;

/// coeff * x^mono * |x|^radial_power * log(5/|x|)^log_power
struct SymTerm {
  Rational coeff;
  std::vector<int> mono;
  int radial_power = 0;
  int log_power = 0;
};

class SymExpr {
 public:
  SymExpr() = default;
  /// The zero expression in dimension `dim` (dim >= 2).
  explicit SymExpr(int dim);

  static SymExpr constant(int dim, const Rational& c);
  static SymExpr coordinate(int dim, int axis);
  static SymExpr radial_power(int dim, int q);
  static SymExpr log_power(int dim, int p);
  static SymExpr term(int dim, const Rational& c, const MultiIndex& beta, int q, int p);
  /// Stores `terms` verbatim, without reduction; canonical() is false.
  static SymExpr raw(int dim, std::vector<SymTerm> terms);

  int dim() const { return dim_; }
  bool canonical() const { return canonical_; }
  const std::vector<SymTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  /// Largest single monomial exponent over terms.
  int max_monomial_degree() const;

  SymExpr operator-() const;
  friend SymExpr operator+(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator-(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator*(const SymExpr& a, const SymExpr& b);
  friend SymExpr operator*(const Rational& c, const SymExpr& e);
  SymExpr& operator+=(const SymExpr& other);

  /// Exact equality as functions (compares canonical forms).
  friend bool operator==(const SymExpr& a, const SymExpr& b);

  /// Debug rendering of the stored terms, sorted, coefficients as "p/q".
  std::string to_string() const;

 private:
  friend class TermAccumulator;
  int dim_ = 0;
  bool canonical_ = true;
  std::vector<SymTerm> terms_;
};

SymExpr canonicalize(const SymExpr& e);

/// d e / d x_axis, axis in [0, n).
SymExpr differentiate(const SymExpr& e, int axis);
/// D^beta e; the result does not depend on the order of the axes.
SymExpr multi_derivative(const SymExpr& e, const MultiIndex& beta);
/// Delta e, computed term by term from the closed form
///   Delta(x^b r^q L^p) = Delta(x^b) r^q L^p
///     + x^b r^(q-2) [ q(q+n-2+2|b|) L^p - p(2q+n-2+2|b|) L^(p-1) + p(p-1) L^(p-2) ].
SymExpr laplacian(const SymExpr& e);
SymExpr laplacian_iter(const SymExpr& e, int sigma);

/// True iff e vanishes identically on R^n - {0}.
bool is_zero(const SymExpr& e);

/// Float-mode evaluation. Throws DomainError at x = 0.
double evaluate(const SymExpr& e, std::span<const double> x);
long double evaluate_ld(const SymExpr& e, std::span<const long double> x);

/// Value at x = exp(log_scale) * w, without forming exp(log_scale) on its
/// own: each term picks up exp(log_scale * (|beta| + q)) and its log factor
/// becomes (log(5/|w|) - log_scale)^p.
long double evaluate_scaled(const SymExpr& e, std::span<const double> w, long double log_scale);

/// Exact value at a rational point: |x|^2 = s is rational and, per log
/// power p, the value is alpha_p + gamma_p * sqrt(s).
struct ExactValue {
  Rational radius_squared;
  std::map<int, std::pair<Rational, Rational>> groups;  // p -> (alpha, gamma)

  /// sum_p (alpha_p + gamma_p sqrt(s)) log(5/sqrt(s))^p, rounded once per group.
  double to_double() const;
  friend bool operator==(const ExactValue&, const ExactValue&) = default;
};

ExactValue evaluate_exact(const SymExpr& e, std::span<const Rational> x);

enum class Sign { Positive, Negative, Zero, Unknown };

struct RadialSignResult {
  Sign sign = Sign::Unknown;
  /// True when the sign holds on all of R^n - {0}; false when it holds
  /// on the punctured unit ball only (a log(5/|x|) factor is present).
  bool everywhere = false;
  /// Populated when the expression is a single term c |x|^q log(5/|x|)^p.
  Rational coeff;
  int radial_power = 0;
  int log_power = 0;
};

RadialSignResult radial_sign(const SymExpr& e);

/// Parity-split view of an expression: per log power p,
///   (A(x) + B(x) |x|) |x|^q0 log(5/|x|)^p
/// with A, B polynomials in x (all |x|^(2k) folded into sum x_i^2) and q0 the
/// smallest even exponent needed (q0 = 0 when the group has no negative powers).
struct ParityGroup {
  int log_power = 0;
  int base_power = 0;  // q0, always even
  SymExpr even_part;   // A, polynomial
  SymExpr odd_part;    // B, polynomial
};

std::vector<ParityGroup> parity_split(const SymExpr& e);

/// Values below this magnitude are treated as the origin by evaluators.
inline constexpr double kOriginGuard = 1e-300;

std::string rational_to_string(const Rational& r);
long double to_long_double(const Rational& r);
Rational rational_pow(const Rational& base, int exponent);

/// Numeric form of one or more symbolic expressions with floating-point
/// coefficients, for repeated evaluation. Terms with equal
/// (beta, q, p) are merged.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(int dim) : dim_(dim) {}
  CompiledExpr(const SymExpr& e, long double weight = 1.0L);

  /// this += weight * e
  void add(const SymExpr& e, long double weight);

  int dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  long double operator()(std::span<const long double> x) const;
  double operator()(std::span<const double> x) const;

 private:
  struct Term {
    long double coeff;
    std::vector<int> mono;
    int radial_power;
    int log_power;
  };
  void rebuild_index_();
  int dim_ = 0;
  int max_mono_ = 0;
  int min_q_ = 0;
  int max_q_ = 0;
  int max_p_ = 0;
  std::vector<Term> terms_;
};

}  // namespace polyharm
