#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "gwpath/harness.hpp"
#include "gwpath/offspring.hpp"

using namespace gwpath;

namespace {

using Clock = std::chrono::steady_clock;

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double metric(const Check& c, const std::string& key) {
  for (const auto& m : c.metrics) {
    if (m.key == key) return m.value;
  }
  return std::nan("");
}

// Folds every gating check accepted by `select` into one outcome.
Outcome fold(const Report& report, const std::function<bool(const Check&)>& select,
             const std::function<std::string(const Check&)>& describe) {
  Outcome out;
  int matched = 0;
  for (const auto& c : report.checks) {
    if (!c.gating || !select(c)) continue;
    ++matched;
    out.pass = out.pass && c.pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += c.name + (c.pass ? " ok" : " FAIL") + " " + describe(c);
  }
  if (matched == 0) {
    out.pass = false;
    out.detail = "no checks produced";
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

void print_supplementary(const Report& report) {
  for (const auto& c : report.checks) {
    if (c.gating) continue;
    std::string line = "[INFO] " + report.experiment + "/" + c.name + (c.pass ? " ok" : " not met");
    for (const auto& m : c.metrics) line += " " + m.key + "=" + fmt(m.value);
    std::puts(line.c_str());
  }
}

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

class Runner {
 public:
  explicit Runner(std::set<int> only) : only_(std::move(only)) {}

  void add(Criterion c) { criteria_.push_back(std::move(c)); }

  int run() {
    int failures = 0;
    for (auto& c : criteria_) {
      if (!only_.empty() && !only_.count(c.id)) continue;
      Outcome o;
      try {
        o = c.run();
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
      std::printf("[%s] criterion %d: %s | %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str());
      std::fflush(stdout);
      failures += !o.pass;
    }
    return failures;
  }

 private:
  std::set<int> only_;
  std::vector<Criterion> criteria_;
};

Outcome with_runtime(Outcome o, double elapsed, double limit) {
  const bool fast = elapsed < limit;
  o.pass = o.pass && fast;
  o.detail += "; runtime " + fmt(elapsed) + " s (limit " + fmt(limit) + " s)" + (fast ? "" : " EXCEEDED");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const unsigned threads = worker_count();
  Runner runner(only);

  // Height checks share one report.
  Report heights;
  double height_seconds = 0.0;
  auto height_report = [&]() -> const Report& {
    if (heights.experiment.empty()) {
      const auto start = Clock::now();
      heights = experiment_height_check(HeightCheckConfig{});
      height_seconds = seconds_since(start);
    }
    return heights;
  };

  runner.add({1, "height algorithm equals brute force on 1000 paths", [&] {
                const Report& r = height_report();
                Outcome o = fold(r, [](const Check& c) { return c.name == "height_oracle"; },
                                 [](const Check& c) { return "mismatches=" + fmt(metric(c, "mismatches")); });
                return with_runtime(o, height_seconds, 5.0);
              }});
  runner.add({2, "height invariant under future-infimum transform", [&] {
                const Report& r = height_report();
                return fold(r, [](const Check& c) { return c.name == "future_infimum_invariance"; },
                            [](const Check& c) { return "mismatches=" + fmt(metric(c, "mismatches")); });
              }});
  runner.add({3, "tilt root closed forms", [] {
                const double bin = find_xi(*binary_law(0.25)).xi;
                const double geo = find_xi(*geometric_law(2.0)).xi;
                // Roots of p e^{2x} - e^x + (1 - p) = 0 and of the geometric fixed point.
                const double p = 0.25;
                const double bin_oracle = std::log((1.0 + std::sqrt(1.0 - 4.0 * p * (1.0 - p))) / (2.0 * p));
                const double q = 2.0 / 3.0;
                const double geo_oracle = std::log(q / (1.0 - q));
                const double e1 = std::abs(bin - bin_oracle), e2 = std::abs(geo - geo_oracle);
                return Outcome{e1 <= 1e-10 && e2 <= 1e-10,
                               "binary xi=" + fmt(bin) + " err=" + fmt(e1) + "; geometric xi=" + fmt(geo) +
                                   " err=" + fmt(e2)};
              }});
  runner.add({4, "extinction frequency and censoring, binary p=1/4", [&] {
                ExtinctionConfig cfg;
                cfg.law = binary_law(0.25);
                cfg.threads = threads;
                const auto start = Clock::now();
                const Report r = experiment_extinction(cfg);
                const double elapsed = seconds_since(start);
                Outcome o = fold(r, [](const Check&) { return true; }, [](const Check& c) {
                  if (c.name == "extinction_frequency") {
                    return "observed=" + fmt(metric(c, "observed")) + " expected=" + fmt(metric(c, "expected"));
                  }
                  return "rate=" + fmt(metric(c, "vertex_cap_rate"));
                });
                return with_runtime(o, elapsed, 60.0);
              }});

  Report binary_pathwise, geometric_pathwise;
  double pathwise_seconds = 0.0;
  auto pathwise_reports = [&]() {
    if (binary_pathwise.experiment.empty()) {
      const auto start = Clock::now();
      PathwiseLawConfig cfg;
      cfg.threads = threads;
      cfg.law = binary_law(0.25);
      cfg.control_law = geometric_law(2.0);
      binary_pathwise = experiment_pathwise_law(cfg);
      cfg.law = geometric_law(2.0);
      cfg.control_law = binary_law(0.25);
      cfg.seed = 2;
      geometric_pathwise = experiment_pathwise_law(cfg);
      pathwise_seconds = seconds_since(start);
    }
  };
  runner.add({5, "spine pair law, binary p=1/4", [&] {
                pathwise_reports();
                return fold(binary_pathwise,
                            [](const Check& c) { return c.name == "spine_pair_B0_N2" || c.name == "spine_pair_B1_N2"; },
                            [](const Check& c) {
                              return "observed=" + fmt(metric(c, "observed")) + " expected=" + fmt(metric(c, "expected")) +
                                     " z=" + fmt(metric(c, "z"));
                            });
              }});
  runner.add({6, "pathwise construction matches direct sampler", [&] {
                pathwise_reports();
                auto select = [](const Check& c) {
                  return starts_with(c.name, "law_equality_") || c.name == "negative_control_rejected";
                };
                auto describe = [](const Check& c) {
                  if (c.name == "negative_control_rejected") return std::string();
                  return "batches=" + fmt(metric(c, "batches_passed"));
                };
                Outcome a = fold(binary_pathwise, select, describe);
                Outcome b = fold(geometric_pathwise, select, describe);
                Outcome o{a.pass && b.pass, "binary: " + a.detail + " | geometric: " + b.detail};
                return with_runtime(o, pathwise_seconds, 180.0);
              }});
  runner.add({7, "bundle self-consistency on 1000 bundles", [&] {
                pathwise_reports();
                auto select = [](const Check& c) { return c.name == "bundle_consistency"; };
                auto describe = [](const Check& c) {
                  return "height_mismatch=" + fmt(metric(c, "height_mismatch")) +
                         " negative_values=" + fmt(metric(c, "negative_values"));
                };
                Outcome a = fold(binary_pathwise, select, describe);
                Outcome b = fold(geometric_pathwise, select, describe);
                return Outcome{a.pass && b.pass, "binary: " + a.detail + " | geometric: " + b.detail};
              }});
  runner.add({8, "stable marginal Laplace transform, n=1e5", [&] {
                StableMarginalConfig cfg;
                cfg.threads = threads;
                const auto start = Clock::now();
                const Report r = experiment_stable_marginal(cfg);
                const double elapsed = seconds_since(start);
                print_supplementary(r);
                Outcome o = fold(r, [](const Check& c) { return starts_with(c.name, "stable_laplace_"); },
                                 [](const Check& c) {
                                   return "z=" + fmt(metric(c, "z")) + " (emp " + fmt(metric(c, "empirical")) + " ref " +
                                          fmt(metric(c, "reference")) + ")";
                                 });
                return with_runtime(o, elapsed, 300.0);
              }});
  runner.add({9, "K-tilde Laplace transform over full explorations", [&] {
                KTildeConfig cfg;
                cfg.threads = threads;
                cfg.height_ns.clear();
                const auto start = Clock::now();
                const Report r = experiment_k_tilde(cfg);
                const double elapsed = seconds_since(start);
                Outcome o = fold(r, [](const Check&) { return true; }, [](const Check& c) {
                  if (starts_with(c.name, "quadrature_vs_grid_")) {
                    return "quad=" + fmt(metric(c, "quadrature")) + " grid=" + fmt(metric(c, "grid_oracle"));
                  }
                  return "z=" + fmt(metric(c, "z")) + " (emp " + fmt(metric(c, "empirical")) + " ref " +
                         fmt(metric(c, "reference")) + ")";
                });
                return with_runtime(o, elapsed, 600.0);
              }});
  runner.add({10, "measure change mean and lower bound", [&] {
                PhiConfig cfg;
                cfg.threads = threads;
                const Report r = experiment_phi(cfg);
                return fold(r, [](const Check&) { return true; }, [](const Check& c) {
                  if (starts_with(c.name, "phi_mean_")) {
                    return "mean=" + fmt(metric(c, "mean")) + " z=" + fmt(metric(c, "z"));
                  }
                  return "min_ratio=" + fmt(metric(c, "min_ratio")) + " below=" + fmt(metric(c, "prefixes_below"));
                });
              }});

  Report explore_report;
  auto explore_once = [&]() -> const Report& {
    if (explore_report.experiment.empty()) {
      ExploreConfig cfg;
      cfg.threads = threads;
      explore_report = experiment_cm_explore(cfg);
    }
    return explore_report;
  };
  runner.add({11, "size-biased ordering of degrees (3,2,1)", [&] {
                return fold(explore_once(), [](const Check& c) { return starts_with(c.name, "size_biased_order_"); },
                            [](const Check& c) { return "z=" + fmt(metric(c, "z")); });
              }});
  runner.add({12, "exploration correctness", [&] {
                return fold(explore_once(), [](const Check& c) { return !starts_with(c.name, "size_biased_order_"); },
                            [](const Check& c) {
                              if (c.name == "surplus_distribution_22") return std::string();
                              return "passing=" + fmt(metric(c, "passing")) + "/" + fmt(metric(c, "runs"));
                            });
              }});
  runner.add({13, "height marginal stability across n and 4n", [&] {
                KTildeConfig cfg;
                cfg.threads = threads;
                cfg.lambdas.clear();
                const Report r = experiment_k_tilde(cfg);
                return fold(r, [](const Check&) { return true; },
                            [](const Check& c) { return "median_ks=" + fmt(metric(c, "median_ks")); });
              }});

  const int failures = runner.run();
  std::printf("%d criterion failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
