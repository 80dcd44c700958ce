#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using polyharm::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("polyharm_cli_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("classify") {
  auto r = run({"classify", "--m", "2", "--n", "3"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["bound_exists"] == true);
  CHECK(j["regime"] == "R2");
  r = run({"classify", "--m", "3", "--n", "7"});
  CHECK(nlohmann::json::parse(r.out)["bound_exists"] == false);
  CHECK(run({"classify", "--m", "0", "--n", "3"}).code == 2);
  CHECK(run({"classify", "--m", "2"}).code == 2);
}

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"verify", "nope"}).code == 2);
  CHECK(run({"counterexample", "--m", "1", "--n", "2", "--levels", "9"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("eval") {
  auto r = run({"eval", "--kernel", "phi", "--m", "1", "--n", "3", "--x", "2,0,0"});
  REQUIRE(r.code == 0);
  // -1 / (4 pi |x|)
  CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(-1.0 / (8 * 3.141592653589793)));
  CHECK(run({"eval", "--kernel", "phi", "--m", "1", "--n", "3", "--x", "1,0"}).code == 2);
  CHECK(run({"eval", "--kernel", "psi", "--m", "1", "--n", "3", "--x", "1,0,0"}).code == 2);
  r = run({"eval", "--kernel", "gamma0", "--m", "1", "--n", "2", "--x", "1,0"});
  CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(std::log(5.0)));
}

TEST_CASE("verify writes a report and per-table CSVs") {
  const fs::path d = scratch("verify");
  auto r = run({"verify", "signs", "--m", "2", "--n", "2", "--out", (d / "r.json").string(), "--csv-dir",
                (d / "csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(d / "r.json"));
  for (const char* key : {"schema_version", "check_name", "params", "grid", "metric_name", "metric", "threshold",
                          "pass", "non_converged", "artifacts"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["pass"] == true);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(d / "csv")) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "0_signs__cases.csv");
  const std::string consts = slurp(d / "csv" / names[1]);
  CHECK(consts.rfind("name,exact,value\n", 0) == 0);
  CHECK(consts.find("A,4,4\n") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("verify output is byte-identical across runs") {
  const fs::path d = scratch("repeat");
  for (const char* tag : {"a", "b"}) {
    REQUIRE(run({"verify", "oracle", "--samples", "20", "--seed", "7", "--out", (d / tag / "r.json").string(),
                 "--csv-dir", (d / tag).string()})
                .code == 0);
  }
  for (const auto& e : fs::directory_iterator(d / "a")) {
    CHECK(slurp(e.path()) == slurp(d / "b" / e.path().filename()));
  }
  fs::remove_all(d);
}

TEST_CASE("counterexample certificate and refusal") {
  const fs::path d = scratch("ce");
  auto r = run({"counterexample", "--m", "1", "--n", "2", "--psi", "1", "--levels", "3", "--csv",
                (d / "c.csv").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["certified"] == true);
  const std::string csv = slurp(d / "c.csv");
  CHECK(csv.rfind("j,x_norm,R,alpha,u_lower,psi,ratio,log_R,certified\n1,0.20000000000000001,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  r = run({"counterexample", "--m", "2", "--n", "3", "--psi", "1"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
  CHECK(run({"counterexample", "--m", "1", "--n", "2", "--psi", "r^"}).code == 2);
  fs::remove_all(d);
}

TEST_CASE("csv fields") {
  using polyharm::cli::csv_field;
  CHECK(csv_field(0.1) == "0.10000000000000001");
  CHECK(csv_field(std::int64_t{-3}) == "-3");
  CHECK(csv_field(true) == "true");
  CHECK(csv_field(std::string("a,b")) == "\"a,b\"");
  CHECK(csv_field(std::string("say \"hi\"")) == "\"say \"\"hi\"\"\"");
}
