// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "polyharm/error.hpp"
#include "polyharm/harness.hpp"

namespace fs = std::filesystem;
using namespace polyharm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool ok(const VerificationReport& r) { return r.pass && !r.non_converged; }

std::string pair_name(const ProblemParams& p) {
  return "(" + std::to_string(p.m) + "," + std::to_string(p.n) + ")";
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& what, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f s", seconds_since(t0));
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << what << ": " << o.detail << " ("
            << buf << ")" << std::endl;
  if (!o.pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Largest leaf metric; aggregates only count failed children.
double leaf_max(const VerificationReport& r) {
  if (r.children.empty()) return std::isfinite(r.metric) ? r.metric : 0;
  double m = 0;
  for (const auto& c : r.children) m = std::max(m, leaf_max(c));
  return m;
}

// Runs a report-producing check and collects pass state and the metric.
struct Tally {
  int total = 0, passed = 0;
  double worst = 0;
  std::string failed;
  void add(const std::string& name, const VerificationReport& r) {
    ++total;
    if (ok(r)) {
      ++passed;
    } else {
      failed += " " + name + (r.non_converged ? "[nc]" : "");
    }
    worst = std::max(worst, leaf_max(r));
  }
  bool all() const { return total > 0 && passed == total; }
  std::string summary() const {
    return std::to_string(passed) + "/" + std::to_string(total) + " pass" +
           (failed.empty() ? "" : ", failing:" + failed);
  }
};

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

int cli_code(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run_cli(args, out, err);
}

}  // namespace

int main() {
  const int workers = worker_count();

  criterion(1, "exact polyharmonicity, 1 <= m <= 4, 2 <= n <= 8, under 10 s", [] {
    const auto t0 = Clock::now();
    const auto r = check_symbolic(4, 8);
    const double t = seconds_since(t0);
    const auto rows = r.artifacts.empty() ? 0 : r.artifacts.front().rows.size();
    return Outcome{ok(r) && t < 10,
                   std::to_string(rows) + " cases, nonzero " + fmt(r.metric) + ", " + fmt(t) + " s"};
  });

  criterion(2, "delta normalization within 1e-3, under 1 min per case", [] {
    Tally tl;
    double slowest = 0;
    for (ProblemParams p : {ProblemParams{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 5}}) {
      const auto t0 = Clock::now();
      const auto r = check_delta_normalization(p, 1e-3);
      const double t = seconds_since(t0);
      slowest = std::max(slowest, t);
      tl.add(pair_name(p), t < 60 ? r : VerificationReport{});
    }
    return Outcome{tl.all(), tl.summary() + ", max rel err " + fmt(tl.worst) + ", slowest " + fmt(slowest) + " s"};
  });

  criterion(3, "symbolic derivatives against Richardson FD, 200 triples, 1e-6", [] {
    const auto r = check_derivative_oracle(200, 1, 1e-6);
    return Outcome{ok(r), "max rel err " + fmt(r.metric)};
  });

  criterion(4, "Kelvin identity within 1e-4, 20 points", [] {
    Tally tl;
    for (ProblemParams p : {ProblemParams{1, 3}, {2, 2}, {2, 5}}) {
      tl.add(pair_name(p), check_kelvin_family(p, 20, 1, 1e-4));
    }
    return Outcome{tl.all(), tl.summary() + ", max rel dev " + fmt(tl.worst)};
  });

  criterion(5, "exact sign tables, m <= 5, n <= 10, with (A,B) = (4,4) at (2,2)", [] {
    Tally tl;
    for (int m = 1; m <= 5; ++m) {
      for (int n = 2; n <= 10; ++n) tl.add(pair_name({m, n}), check_signs({m, n}));
    }
    double a = -1, b = -1;
    for (const auto& t : check_signs({2, 2}).artifacts) {
      if (t.name != "constants") continue;
      for (const auto& row : t.rows) {
        if (std::get<std::string>(row[0]) == "A") a = std::get<double>(row[2]);
        if (std::get<std::string>(row[0]) == "B") b = std::get<double>(row[2]);
      }
    }
    return Outcome{tl.all() && a == 4 && b == 4, tl.summary() + ", (A,B) = (" + fmt(a) + "," + fmt(b) + ")"};
  });

  criterion(6, "radial particular solution, -Laplacian u0 = f within 1e-5", [] {
    Tally tl;
    for (int n : {2, 3, 5}) tl.add("n=" + std::to_string(n), check_radial_particular(n, 1e-5));
    return Outcome{tl.all(), tl.summary() + ", max rel err " + fmt(tl.worst)};
  });

  criterion(7, "kernel ball ratio finite and 20% refinement-stable, 10x10 grid", [] {
    Tally tl;
    for (ProblemParams p : {ProblemParams{1, 2}, {2, 2}, {2, 3}, {3, 4}}) {
      tl.add(pair_name(p), check_kernel_ball_ratio(p, 10));
    }
    return Outcome{tl.all(), tl.summary() + ", largest refined sup " + fmt(tl.worst)};
  });

  criterion(8, "representation integral, Delta^m N = -f within 1e-3", [] {
    Tally tl;
    for (ProblemParams p : {ProblemParams{1, 3}, {2, 2}}) tl.add(pair_name(p), check_representation_family(p));
    return Outcome{tl.all(), tl.summary() + ", max rel err " + fmt(tl.worst)};
  });

  criterion(9, "interior and exterior bound checks on the test families", [] {
    Tally in, out, bih;
    for (int m = 1; m <= 3; ++m) {
      for (int n = 2; n <= 7; ++n) {
        if (!classify({m, n}).bound_exists) continue;
        in.add(pair_name({m, n}), check_interior_bound_family({m, n}));
        out.add(pair_name({m, n}), check_exterior_bound_family({m, n}));
      }
    }
    for (int n : {2, 3}) bih.add("n=" + std::to_string(n), check_exterior_biharmonic_family(n));
    return Outcome{in.all() && out.all() && bih.all(),
                   "interior " + in.summary() + "; exterior " + out.summary() + "; biharmonic " + bih.summary()};
  });

  criterion(10, "counterexample certified for every unbounded pair, refusal otherwise", [] {
    int certified = 0, wanted = 0, refused = 0, bounded = 0;
    double slowest = 0;
    std::string bad;
    for (int m = 1; m <= 4; ++m) {
      for (int n = 2; n <= 9; ++n) {
        const ProblemParams p{m, n};
        const auto args = std::vector<std::string>{"counterexample", "--m", std::to_string(m), "--n",
                                                   std::to_string(n), "--psi", "1", "--levels", "4"};
        if (classify(p).bound_exists) {
          ++bounded;
          if (cli_code(args) == cli::kInvalid) {
            ++refused;
          } else {
            bad += " refuse" + pair_name(p);
          }
          continue;
        }
        const auto t0 = Clock::now();
        for (const char* g : {"1", "r^-1"}) {
          ++wanted;
          const auto c = build_counterexample(p, parse_gauge(g), 4);
          bool ladder = c.certified && c.levels.size() == 4;
          for (const auto& lv : c.levels) ladder = ladder && lv.certified && lv.ratio >= lv.j;
          if (ladder) {
            ++certified;
          } else {
            bad += " " + pair_name(p) + "/" + g;
          }
        }
        const double t = seconds_since(t0);
        slowest = std::max(slowest, t);
        if (t >= 300) bad += " slow" + pair_name(p);
      }
    }
    return Outcome{bad.empty() && certified == wanted && refused == bounded,
                   std::to_string(certified) + "/" + std::to_string(wanted) + " certified, " +
                       std::to_string(refused) + "/" + std::to_string(bounded) + " refused, slowest pair " +
                       fmt(slowest) + " s" + (bad.empty() ? "" : ", failing:" + bad)};
  });

  criterion(11, "two full-suite runs give byte-identical JSON and CSV", [] {
    const fs::path root = fs::path(POLYHARM_ACCEPTANCE_DIR) / "determinism";
    fs::remove_all(root);
    std::vector<int> codes;
    for (const char* tag : {"a", "b"}) {
      const fs::path d = root / tag;
      const std::string cmd = std::string("\"") + POLYHARM_CLI_PATH + "\" verify all --seed 1 --out \"" +
                              (d / "report.json").string() + "\" --csv-dir \"" + (d / "csv").string() + "\"";
      const int raw = std::system(cmd.c_str());
      codes.push_back(WIFEXITED(raw) ? WEXITSTATUS(raw) : -1);
    }
    const auto a = tree(root / "a"), b = tree(root / "b");
    const bool ran = codes[0] >= 0 && codes[0] != cli::kInvalid && codes[0] == codes[1];
    const bool same = !a.empty() && a == b && a.count("report.json");
    return Outcome{ran && same, std::to_string(a.size()) + " files, " + (same ? "identical" : "differ") +
                                    ", exit codes " + std::to_string(codes[0]) + "," + std::to_string(codes[1])};
  });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail")
            << " (workers " << workers << ")" << std::endl;
  return failures == 0 ? 0 : 1;
}
