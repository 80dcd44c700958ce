#include "polyharm/radial_expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polyharm/error.hpp"

namespace polyharm {

RadialExpr RadialExpr::monomial(const Rational& c, int power, int log_power, LogKind kind) {
  if (log_power < 0) throw DomainError("RadialExpr: negative log power");
  RadialExpr e(kind);
  e.add_term_(c, power, log_power);
  return e;
}

void RadialExpr::add_term_(const Rational& c, int power, int log_power) {
  if (sgn(c) == 0) return;
  auto it = std::find_if(terms_.begin(), terms_.end(), [&](const RadialTerm& t) {
    return t.power == power && t.log_power == log_power;
  });
  if (it != terms_.end()) {
    it->coeff += c;
    if (sgn(it->coeff) == 0) terms_.erase(it);
    return;
  }
  terms_.push_back(RadialTerm{c, power, log_power});
  std::sort(terms_.begin(), terms_.end(), [](const RadialTerm& a, const RadialTerm& b) {
    if (a.log_power != b.log_power) return a.log_power > b.log_power;
    return a.power > b.power;
  });
}

RadialExpr RadialExpr::operator+(const RadialExpr& other) const {
  RadialExpr out = *this;
  out += other;
  return out;
}

RadialExpr& RadialExpr::operator+=(const RadialExpr& other) {
  if (other.kind_ != kind_ && !other.is_zero() && !is_zero()) {
    throw DomainError("RadialExpr: cannot mix log(5/r) and log(5r) terms");
  }
  if (is_zero()) kind_ = other.kind_;
  for (const auto& t : other.terms_) add_term_(t.coeff, t.power, t.log_power);
  return *this;
}

RadialExpr RadialExpr::derivative() const {
  // d log(5/r)/dr = -1/r, d log(5r)/dr = 1/r
  const int log_sign = kind_ == LogKind::FiveOverR ? -1 : 1;
  RadialExpr out(kind_);
  for (const auto& t : terms_) {
    if (t.power != 0) out.add_term_(t.coeff * t.power, t.power - 1, t.log_power);
    if (t.log_power > 0) {
      out.add_term_(t.coeff * (log_sign * t.log_power), t.power - 1, t.log_power - 1);
    }
  }
  return out;
}

RadialExpr RadialExpr::derivative(int k) const {
  if (k < 0) throw DomainError("RadialExpr: negative derivative order");
  RadialExpr out = *this;
  for (int i = 0; i < k; ++i) out = out.derivative();
  return out;
}

long double RadialExpr::eval_ld(long double r) const {
  if (!(r > 0)) throw DomainError("RadialExpr: r must be positive");
  const long double lg = kind_ == LogKind::FiveOverR ? std::log(5.0L / r) : std::log(5.0L * r);
  long double sum = 0;
  for (const auto& t : terms_) {
    sum += to_long_double(t.coeff) * std::pow(r, static_cast<long double>(t.power)) *
           std::pow(lg, static_cast<long double>(t.log_power));
  }
  return sum;
}

double RadialExpr::operator()(double r) const { return static_cast<double>(eval_ld(r)); }

std::string RadialExpr::to_string(const std::string& var) const {
  if (terms_.empty()) return "0";
  const std::string lg =
      kind_ == LogKind::FiveOverR ? "log(5/" + var + ")" : "log(5*" + var + ")";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coeff;
    if (first) {
      if (sgn(c) < 0) os << "-";
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    if (sgn(c) < 0) c = -c;
    first = false;
    os << rational_to_string(c);
    if (t.power != 0) os << "*" << var << "^" << t.power;
    if (t.log_power != 0) {
      os << "*" << lg;
      if (t.log_power != 1) os << "^" << t.log_power;
    }
  }
  return os.str();
}

bool operator==(const RadialExpr& a, const RadialExpr& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  if (a.terms_.empty()) return true;
  if (a.kind_ != b.kind_) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    const auto& s = a.terms_[i];
    const auto& t = b.terms_[i];
    if (s.coeff != t.coeff || s.power != t.power || s.log_power != t.log_power) return false;
  }
  return true;
}

}  // namespace polyharm
