#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "polyharm/error.hpp"
#include "polyharm/fundsol.hpp"
#include "polyharm/psi.hpp"

namespace polyharm::cli {

using json = nlohmann::ordered_json;

namespace {

json cell_json(const Cell& c) {
  return std::visit([](const auto& v) -> json { return v; }, c);
}

json table_json(const ArtifactTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  return {{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

std::string sanitized(std::string s) {
  for (char& c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '-';
  }
  return s;
}

void collect_csvs(const VerificationReport& rep, const std::string& path,
                  const std::filesystem::path& dir, std::vector<std::filesystem::path>& out) {
  for (const auto& t : rep.artifacts) {
    std::string body;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) body += ',';
      body += csv_field(t.columns[i]);
    }
    body += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) body += ',';
        body += csv_field(row[i]);
      }
      body += '\n';
    }
    const auto file = dir / (sanitized(path + "_" + rep.check_name) + "__" + sanitized(t.name) + ".csv");
    write_atomic(file, body);
    out.push_back(file);
  }
  for (std::size_t i = 0; i < rep.children.size(); ++i) {
    collect_csvs(rep.children[i], path + "." + std::to_string(i), dir, out);
  }
}

std::string dumped(const json& j) { return j.dump(2) + "\n"; }

// JSON to --out when given, else to the stream.
void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << dumped(j);
  } else {
    write_atomic(out_path, dumped(j));
  }
}

Point point_arg(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw DomainError(std::string(what) + " needs " + std::to_string(n) + " coordinates");
  }
  return Point(v.begin(), v.end());
}

}  // namespace

std::string csv_field(const Cell& c) {
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << contents;
    f.close();
    if (!f) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json report_json(const VerificationReport& rep) {
  json params = json::object();
  for (const auto& [k, v] : rep.params) params[k] = cell_json(v);
  json threshold = {{"value", rep.threshold.value ? json(*rep.threshold.value) : json(nullptr)},
                    {"gate", rep.threshold.gate}};
  json artifacts = json::array();
  for (const auto& t : rep.artifacts) artifacts.push_back(table_json(t));
  json children = json::array();
  for (const auto& c : rep.children) children.push_back(report_json(c));
  return {{"schema_version", kSchemaVersion},
          {"check_name", rep.check_name},
          {"params", std::move(params)},
          {"grid", rep.grid},
          {"metric_name", rep.metric_name},
          {"metric", rep.metric},
          {"threshold", std::move(threshold)},
          {"pass", rep.pass},
          {"non_converged", rep.non_converged},
          {"artifacts", std::move(artifacts)},
          {"children", std::move(children)}};
}

json certificate_json(const CounterexampleCertificate& cert) {
  json j = report_json(cert.report());
  j["certified"] = cert.certified;
  j["failure"] = cert.failure;
  return j;
}

std::vector<std::filesystem::path> write_report_csvs(const VerificationReport& rep,
                                                     const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  collect_csvs(rep, "0", dir, out);
  return out;
}

std::string certificate_csv(const CounterexampleCertificate& cert) {
  std::string s = "j,x_norm,R,alpha,u_lower,psi,ratio,log_R,certified\n";
  for (const auto& lv : cert.levels) {
    const std::vector<Cell> row{std::int64_t{lv.j}, lv.x_norm, lv.R,        lv.alpha, lv.u_lower,
                                lv.psi,             lv.ratio,  lv.log_R,    lv.certified};
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += csv_field(row[i]);
    }
    s += '\n';
  }
  return s;
}

int exit_code(const VerificationReport& rep) {
  if (rep.non_converged) return kNonConverged;
  return rep.pass ? kPass : kCheckFailed;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polyharmonic a priori bounds: kernels, verification suites, counterexamples",
               "polyharm"};
  app.require_subcommand(1);

  int m = 0, n = 0;
  std::string out_path;

  auto* classify_cmd = app.add_subcommand("classify", "bound classification of (m, n)");
  classify_cmd->add_option("--m", m, "order of the operator")->required();
  classify_cmd->add_option("--n", n, "dimension")->required();
  classify_cmd->add_option("--out", out_path, "JSON output file (default stdout)");

  std::string kernel = "phi";
  std::vector<double> xs, ys;
  std::vector<int> beta;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a kernel or gauge at a point");
  eval_cmd->add_option("--kernel", kernel, "phi, psi, gamma0 or gamma-inf")
      ->check(CLI::IsMember({"phi", "psi", "gamma0", "gamma-inf"}));
  eval_cmd->add_option("--m", m)->required();
  eval_cmd->add_option("--n", n)->required();
  eval_cmd->add_option("--x", xs, "point x, comma separated")->required()->delimiter(',');
  eval_cmd->add_option("--y", ys, "point y for psi, comma separated")->delimiter(',');
  eval_cmd->add_option("--beta", beta, "x-derivative multi-index for phi and psi")->delimiter(',');
  eval_cmd->add_option("--out", out_path);

  std::string suite;
  SuiteConfig cfg;
  std::optional<int> vm, vn, vmax_m, vmax_n;
  std::string csv_dir;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  verify_cmd->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  verify_cmd->add_option("--m", vm);
  verify_cmd->add_option("--n", vn);
  verify_cmd->add_option("--max-m", vmax_m);
  verify_cmd->add_option("--max-n", vmax_n);
  verify_cmd->add_option("--solution", cfg.solution, "restrict bound checks to one family member");
  verify_cmd->add_option("--seed", cfg.seed, "seed for random point sets");
  verify_cmd->add_option("--samples", cfg.samples, "oracle triples");
  verify_cmd->add_option("--points", cfg.points, "Kelvin sample points");
  verify_cmd->add_option("--out", out_path, "JSON report file (default stdout)");
  verify_cmd->add_option("--csv-dir", csv_dir, "directory for per-table CSV files");

  std::string psi_text = "1";
  int levels = 4;
  double margin = 1.1;
  std::string csv_path;
  auto* ce_cmd = app.add_subcommand("counterexample", "certify an unbounded solution");
  ce_cmd->add_option("--m", m)->required();
  ce_cmd->add_option("--n", n)->required();
  ce_cmd->add_option("--psi", psi_text, "gauge psi(r), e.g. \"r^-1\" or \"log(5/r)\"");
  ce_cmd->add_option("--levels", levels, "number of levels J")->check(CLI::Range(1, 8));
  ce_cmd->add_option("--margin", margin, "certification margin (> 1)");
  ce_cmd->add_option("--out", out_path, "JSON summary file (default stdout)");
  ce_cmd->add_option("--csv", csv_path, "CSV of the levels");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kInvalid;
  }

  try {
    if (*classify_cmd) {
      const ProblemParams p{m, n};
      p.validate();
      const auto c = classify(p);
      json j = {{"schema_version", kSchemaVersion},
                {"m", m},
                {"n", n},
                {"bound_exists", c.bound_exists},
                {"gamma0", c.gamma0_radial.to_string("|x|")},
                {"gamma_inf", c.gamma_inf.to_string("|y|")},
                {"regime", regime_name(regime_of(p))}};
      emit(j, out_path, out);
      return kPass;
    }
    if (*eval_cmd) {
      const ProblemParams p{m, n};
      p.validate();
      const Point x = point_arg(xs, n, "--x");
      const MultiIndex b = beta.empty() ? MultiIndex(n) : MultiIndex(beta);
      if (b.dim() != n) throw DomainError("--beta needs " + std::to_string(n) + " entries");
      double value = 0;
      json j = {{"schema_version", kSchemaVersion}, {"kernel", kernel}, {"m", m}, {"n", n}, {"x", x}};
      if (kernel == "phi") {
        value = phi(p).derivative(b)(std::span<const double>(x));
        j["beta"] = b.exponents();
      } else if (kernel == "psi") {
        const Point y = point_arg(ys, n, "--y");
        const PsiKernel k(p);
        value = b.order() == 0 ? psi_value(k, x, y) : psi_x_derivative(k, b, x, y);
        j["y"] = y;
        j["beta"] = b.exponents();
      } else if (kernel == "gamma0") {
        value = evaluate(classify(p).gamma0, x);
      } else {
        double r = 0;
        for (double c : x) r += c * c;
        value = classify(p).gamma_inf(std::sqrt(r));
      }
      j["value"] = value;
      emit(j, out_path, out);
      return kPass;
    }
    if (*verify_cmd) {
      cfg.m = vm;
      cfg.n = vn;
      cfg.max_m = vmax_m;
      cfg.max_n = vmax_n;
      const VerificationReport rep = run_suite(suite, cfg, worker_count());
      if (!csv_dir.empty()) write_report_csvs(rep, csv_dir);
      emit(report_json(rep), out_path, out);
      return exit_code(rep);
    }
    if (*ce_cmd) {
      const ProblemParams p{m, n};
      p.validate();
      CounterexampleOptions opts;
      opts.margin = margin;
      const auto cert = build_counterexample(p, parse_gauge(psi_text), levels, opts);
      if (!csv_path.empty()) write_atomic(csv_path, certificate_csv(cert));
      emit(certificate_json(cert), out_path, out);
      if (!cert.certified) err << "certification failed: " << cert.failure << "\n";
      return cert.report().pass ? kPass : kCheckFailed;
    }
  } catch (const DomainError& e) {
    err << e.what() << "\n";
    return kInvalid;
  } catch (const ConvergenceError& e) {
    err << e.what() << "\n";
    return kNonConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kInvalid;
}

}  // namespace polyharm::cli
