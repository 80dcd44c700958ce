#pragma once

// One-dimensional expressions sum_k c_k r^q_k log^p_k(.) in the radial
// variable r > 0. The log argument is either 5/r (interior gauges) or 5r
// (exterior gauges); a given expression uses one of them throughout.

#include <string>
#include <vector>

#include "polyharm/symexpr.hpp"

namespace polyharm {

enum class LogKind { FiveOverR, FiveR };

struct RadialTerm {
  Rational coeff;
  int power = 0;
  int log_power = 0;
};

class RadialExpr {
 public:
  explicit RadialExpr(LogKind kind = LogKind::FiveOverR) : kind_(kind) {}
  static RadialExpr monomial(const Rational& c, int power, int log_power,
                             LogKind kind = LogKind::FiveOverR);

  LogKind log_kind() const { return kind_; }
  const std::vector<RadialTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  RadialExpr operator+(const RadialExpr& other) const;
  RadialExpr& operator+=(const RadialExpr& other);

  /// d/dr
  RadialExpr derivative() const;
  RadialExpr derivative(int k) const;

  double operator()(double r) const;
  long double eval_ld(long double r) const;
  std::string to_string(const std::string& var = "r") const;

  friend bool operator==(const RadialExpr&, const RadialExpr&);

 private:
  void add_term_(const Rational& c, int power, int log_power);
  LogKind kind_;
  std::vector<RadialTerm> terms_;  // sorted by (log_power, power) descending
};

}  // namespace polyharm
