#pragma once

// Structured results of verification checks.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace polyharm {

using Cell = std::variant<bool, std::int64_t, double, std::string>;

struct ArtifactTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Either a numeric bound on the metric or a named gate.
struct Threshold {
  std::optional<double> value;
  std::string gate;  // e.g. "stability-gated", "exact"
  static Threshold at_most(double v) { return {v, "<="}; }
  static Threshold named(std::string g) { return {std::nullopt, std::move(g)}; }
};

struct VerificationReport {
  std::string check_name;
  std::vector<std::pair<std::string, Cell>> params;
  std::string grid;
  std::string metric_name;
  double metric = 0;
  Threshold threshold;
  bool pass = false;
  /// Numeric non-convergence somewhere in the check (distinct from a failed
  /// bound).
  bool non_converged = false;
  std::deque<ArtifactTable> artifacts;  // deque: table() references stay valid
  std::vector<VerificationReport> children;

  ArtifactTable& table(const std::string& name, std::vector<std::string> columns);
};

/// pass of every child and of the parent; non_converged if any is.
VerificationReport aggregate(std::string name, std::vector<VerificationReport> children);

}  // namespace polyharm
