#include "polyharm/report.hpp"

#include <algorithm>

#include "polyharm/error.hpp"

namespace polyharm {

void ArtifactTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DomainError("ArtifactTable: row width mismatch");
  rows.push_back(std::move(row));
}

ArtifactTable& VerificationReport::table(const std::string& name, std::vector<std::string> columns) {
  artifacts.push_back(ArtifactTable{name, std::move(columns), {}});
  return artifacts.back();
}

VerificationReport aggregate(std::string name, std::vector<VerificationReport> children) {
  VerificationReport out;
  out.check_name = std::move(name);
  out.metric_name = "failed_children";
  out.threshold = Threshold::at_most(0);
  int failed = 0;
  for (const auto& c : children) {
    if (!c.pass) ++failed;
    out.non_converged = out.non_converged || c.non_converged;
  }
  out.metric = failed;
  out.pass = failed == 0 && !children.empty();
  out.children = std::move(children);
  return out;
}

}  // namespace polyharm
