#include "polyharm/multi_index.hpp"

#include <numeric>

#include "polyharm/error.hpp"

namespace polyharm {

MultiIndex::MultiIndex(int dim) {
  if (dim < 1) throw DomainError("MultiIndex: dimension must be positive");
  exps_.assign(static_cast<std::size_t>(dim), 0);
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

MultiIndex::MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
  if (exps_.empty()) throw DomainError("MultiIndex: dimension must be positive");
  for (int e : exps_) {
    if (e < 0) throw DomainError("MultiIndex: negative exponent");
  }
  order_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

MultiIndex MultiIndex::unit(int dim, int axis) {
  MultiIndex e(dim);
  return e.shifted(axis, 1);
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.dim() != dim()) throw DomainError("MultiIndex: dimension mismatch");
  MultiIndex out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  out.order_ = order_ + other.order_;
  return out;
}

MultiIndex MultiIndex::shifted(int axis, int delta) const {
  if (axis < 0 || axis >= dim()) throw DomainError("MultiIndex: axis out of range");
  MultiIndex out = *this;
  auto& e = out.exps_[static_cast<std::size_t>(axis)];
  if (e + delta < 0) throw DomainError("MultiIndex: negative exponent");
  e += delta;
  out.order_ += delta;
  return out;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exps_) {
    for (int k = 2; k <= e; ++k) f *= k;
  }
  return f;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(exps_[i]);
  }
  return s + ")";
}

namespace {
void enumerate(std::vector<int>& cur, std::size_t axis, int remaining,
               std::vector<MultiIndex>& out) {
  if (axis + 1 == cur.size()) {
    cur[axis] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[axis] = e;
    enumerate(cur, axis + 1, remaining - e, out);
  }
}
}  // namespace

std::vector<MultiIndex> MultiIndex::all_of_order(int dim, int exact_order) {
  std::vector<MultiIndex> out;
  if (exact_order < 0) return out;
  if (dim < 1) throw DomainError("MultiIndex: dimension must be positive");
  std::vector<int> cur(static_cast<std::size_t>(dim), 0);
  enumerate(cur, 0, exact_order, out);
  return out;
}

std::vector<MultiIndex> MultiIndex::all_up_to(int dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_order; ++k) {
    auto level = all_of_order(dim, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace polyharm
