#pragma once

#include <compare>
#include <initializer_list>
#include <string>
#include <vector>

namespace polyharm {

/// Tuple of nonnegative exponents, one per axis.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim);
  MultiIndex(std::initializer_list<int> exponents);
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex unit(int dim, int axis);

  int dim() const { return static_cast<int>(exps_.size()); }
  int order() const { return order_; }
  int operator[](int axis) const { return exps_[static_cast<std::size_t>(axis)]; }
  const std::vector<int>& exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// Copy with exps[axis] += delta; throws if the entry would go negative.
  MultiIndex shifted(int axis, int delta) const;

  /// alpha! = prod alpha_i!
  double factorial() const;

  std::string to_string() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return a.exps_ <=> b.exps_;
  }

  /// Every multi-index of dimension `dim` with order <= max_order, sorted by
  /// (order, lexicographic). Empty when max_order < 0.
  static std::vector<MultiIndex> all_up_to(int dim, int max_order);
  /// Every multi-index of dimension `dim` with order == exact_order.
  static std::vector<MultiIndex> all_of_order(int dim, int exact_order);

 private:
  std::vector<int> exps_;
  int order_ = 0;
};

}  // namespace polyharm
