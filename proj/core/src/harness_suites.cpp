#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "polyharm/error.hpp"
#include "polyharm/harness.hpp"

namespace polyharm {

int worker_count() {
  if (const char* env = std::getenv("POLYHARM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<VerificationReport> run_jobs(const std::vector<std::function<VerificationReport()>>& jobs,
                                         int workers) {
  std::vector<VerificationReport> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (t == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "symbolic", "oracle", "delta-norm",     "kelvin", "theorem13", "theorem14",
      "corollary11", "lemma31", "representation", "signs", "radial", "all"};
  return names;
}

namespace {

using Job = std::function<VerificationReport()>;
using Pairs = std::vector<ProblemParams>;

// Pairs from --m/--n when given, else the suite's default set filtered by
// --max-m/--max-n.
Pairs select(const SuiteConfig& cfg, const Pairs& defaults) {
  if (cfg.m || cfg.n) {
    if (!cfg.m || !cfg.n) throw DomainError("suite: --m and --n go together");
    const ProblemParams p{*cfg.m, *cfg.n};
    p.validate();
    return {p};
  }
  Pairs out;
  for (const auto& p : defaults) {
    if (cfg.max_m && p.m > *cfg.max_m) continue;
    if (cfg.max_n && p.n > *cfg.max_n) continue;
    out.push_back(p);
  }
  return out;
}

Pairs grid_pairs(int max_m, int max_n, bool bound_only) {
  Pairs out;
  for (int m = 1; m <= max_m; ++m) {
    for (int n = 2; n <= max_n; ++n) {
      if (!bound_only || classify({m, n}).bound_exists) out.push_back({m, n});
    }
  }
  return out;
}

std::vector<Job> suite_jobs(const std::string& suite, const SuiteConfig& cfg) {
  std::vector<Job> jobs;
  if (suite == "symbolic") {
    const int mm = cfg.m.value_or(cfg.max_m.value_or(4));
    const int nn = cfg.n.value_or(cfg.max_n.value_or(8));
    jobs.push_back([mm, nn] { return check_symbolic(mm, nn); });
  } else if (suite == "oracle") {
    if (cfg.samples < 1) throw DomainError("suite oracle: samples must be >= 1");
    jobs.push_back([s = cfg.samples, seed = cfg.seed] { return check_derivative_oracle(s, seed); });
  } else if (suite == "delta-norm") {
    for (const auto& p : select(cfg, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 5}})) {
      jobs.push_back([p] { return check_delta_normalization(p); });
    }
  } else if (suite == "kelvin") {
    if (cfg.points < 1) throw DomainError("suite kelvin: points must be >= 1");
    for (const auto& p : select(cfg, {{1, 3}, {2, 2}, {2, 5}})) {
      jobs.push_back([p, k = cfg.points, s = cfg.seed] { return check_kelvin_family(p, k, s); });
    }
  } else if (suite == "theorem13") {
    for (const auto& p : select(cfg, grid_pairs(3, 7, true))) {
      jobs.push_back([p, s = cfg.solution] { return check_interior_bound_family(p, s); });
    }
  } else if (suite == "theorem14") {
    for (const auto& p : select(cfg, grid_pairs(3, 7, true))) {
      jobs.push_back([p, s = cfg.solution] { return check_exterior_bound_family(p, s); });
    }
  } else if (suite == "corollary11") {
    for (const auto& p : select(cfg, {{2, 2}, {2, 3}})) {
      if (p.m != 2) throw DomainError("suite corollary11: m must be 2");
      jobs.push_back([p, s = cfg.solution] { return check_exterior_biharmonic_family(p.n, s); });
    }
  } else if (suite == "lemma31") {
    for (const auto& p : select(cfg, {{1, 2}, {2, 2}, {2, 3}, {3, 4}})) {
      jobs.push_back([p] { return check_kernel_ball_ratio(p); });
    }
  } else if (suite == "representation") {
    for (const auto& p : select(cfg, {{1, 3}, {2, 2}})) {
      jobs.push_back([p] { return check_representation_family(p); });
    }
  } else if (suite == "signs") {
    for (const auto& p : select(cfg, grid_pairs(5, 10, false))) {
      jobs.push_back([p] { return check_signs(p); });
    }
  } else if (suite == "radial") {
    std::vector<int> ns{2, 3, 5};
    if (cfg.n) ns = {*cfg.n};
    for (int n : ns) {
      if (n < 2) throw DomainError("suite radial: n must be >= 2");
      jobs.push_back([n] { return check_radial_particular(n); });
    }
  } else {
    throw DomainError("unknown suite '" + suite + "'");
  }
  return jobs;
}

}  // namespace

VerificationReport run_suite(const std::string& suite, const SuiteConfig& cfg, int workers) {
  if (suite == "all") {
    std::vector<VerificationReport> kids;
    for (const auto& s : suite_names()) {
      if (s == "all") continue;
      SuiteConfig sub;
      sub.seed = cfg.seed;
      sub.samples = cfg.samples;
      sub.points = cfg.points;
      kids.push_back(run_suite(s, sub, workers));
    }
    return aggregate("all", std::move(kids));
  }
  const auto jobs = suite_jobs(suite, cfg);
  if (jobs.empty()) throw DomainError("suite " + suite + ": no parameter pairs selected");
  auto kids = run_jobs(jobs, workers);
  if (kids.size() == 1) return std::move(kids.front());
  return aggregate(suite, std::move(kids));
}

}  // namespace polyharm
