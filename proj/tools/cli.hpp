#pragma once

// Command-line front end. `run_cli` is the whole tool; main() only forwards
// argv and the standard streams.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyharm/harness.hpp"

namespace polyharm::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kInvalid = 2, kNonConverged = 3 };

nlohmann::ordered_json report_json(const VerificationReport& rep);
nlohmann::ordered_json certificate_json(const CounterexampleCertificate& cert);

/// One CSV per artifact table of every node in the report tree:
/// <dir>/<node path>__<table>.csv, where the node path indexes children.
std::vector<std::filesystem::path> write_report_csvs(const VerificationReport& rep,
                                                     const std::filesystem::path& dir);
/// j, |x_j|, R_j, alpha_j, u_lower, psi, ratio, then log_R and certified.
std::string certificate_csv(const CounterexampleCertificate& cert);

/// Cells as CSV fields; doubles in %.17g.
std::string csv_field(const Cell& c);
/// Write to a sibling temporary, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

int exit_code(const VerificationReport& rep);

/// argv-style arguments without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyharm::cli
