#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gwpath/config_model.hpp"
#include "gwpath/offspring.hpp"
#include "gwpath/walk.hpp"

namespace gwpath {

struct ScalingSpec {
  std::int64_t n = 1;
  double space_scale = 1.0;
  double time_scale = 1.0;
  double height_scale = 1.0;
  std::vector<double> t_grid;

  // DomainError on nonpositive scales or a t with an empty window.
  void validate() const;
};

// Scales n^-1/(alpha+1), n^(alpha/(alpha+1)), n^-(alpha-1)/(alpha+1).
ScalingSpec critical_window_scaling(std::int64_t n, double alpha, std::vector<double> t_grid);

std::int64_t scaled_index(const ScalingSpec& spec, double t);
double rescale_at(const Path& path, const ScalingSpec& spec, double t);
double rescale_height_at(const HeightSeq& heights, const ScalingSpec& spec, double t);

class EmpiricalDist {
 public:
  EmpiricalDist() = default;
  explicit EmpiricalDist(std::vector<double> samples);

  const std::vector<double>& samples() const noexcept { return sorted_; }
  std::size_t count() const noexcept { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};

// Limiting survival function P(K > x) of the Kolmogorov distribution.
double kolmogorov_survival(double x);
KsResult ks_two_sample(const EmpiricalDist& a, const EmpiricalDist& b);
Estimate empirical_laplace(const EmpiricalDist& dist, double theta);

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

struct Metric {
  std::string key;
  double value = 0.0;
};

struct Check {
  std::string name;
  bool pass = false;
  // Informational checks are reported but do not decide the exit status.
  bool gating = true;
  std::vector<Metric> metrics;
  std::string note;
};

struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  std::vector<Series> series;

  bool pass() const;
};

std::string report_to_json(const Report& report);

struct HeightCheckConfig {
  std::int64_t paths = 1000;
  std::int64_t max_length = 200;
  std::uint64_t seed = 1;
};
Report experiment_height_check(const HeightCheckConfig& config);

struct ExtinctionConfig {
  LawPtr law;
  std::int64_t trees = 100000;
  TreeCaps caps;
  double max_censoring = 1e-3;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
Report experiment_extinction(const ExtinctionConfig& config);

struct PathwiseLawConfig {
  LawPtr law;
  LawPtr control_law;
  std::vector<std::int64_t> ks{50, 100, 200};
  std::int64_t replicas = 10000;
  int batches = 3;
  int min_batch_passes = 2;
  double ks_level = 0.01;
  std::int64_t consistency_bundles = 1000;
  std::int64_t spine_draws = 100000;
  double sigmas = 3.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
Report experiment_pathwise_law(const PathwiseLawConfig& config);

struct StableMarginalConfig {
  double alpha = 1.5;
  std::int64_t kmin = 2;
  std::vector<double> lambdas{-1.0, 0.0, 1.0};
  std::int64_t n = 100000;
  std::int64_t replicas = 10000;
  double t = 1.0;
  std::vector<double> thetas{0.5, 1.0, 2.0};
  double sigmas = 3.0;
  std::vector<std::int64_t> trend_ns{10000, 100000, 1000000};
  std::int64_t trend_replicas = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
Report experiment_stable_marginal(const StableMarginalConfig& config);

struct KTildeConfig {
  double alpha = 1.5;
  std::int64_t kmin = 2;
  std::vector<double> lambdas{0.0, 1.0};
  std::int64_t n = 100000;
  std::int64_t replicas = 500;
  double t = 1.0;
  double theta = 1.0;
  double sigmas = 3.0;
  double quadrature_margin = 1e-6;
  double oracle_tolerance = 1e-6;
  // Height stability across n and 4n.
  double height_lambda = 1.0;
  std::vector<std::int64_t> height_ns{10000, 40000};
  std::int64_t height_seeds = 5;
  std::int64_t height_replicas = 5000;
  double height_threshold = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
Report experiment_k_tilde(const KTildeConfig& config);

// Rectangle rule at two resolutions with Richardson extrapolation; slow.
double k_tilde_grid_oracle(const StableRef& ref, double theta, double t);

struct ExploreConfig {
  double alpha = 1.5;
  std::int64_t kmin = 2;
  double lambda = 0.0;
  std::int64_t n = 10000;
  std::int64_t runs = 100;
  std::int64_t order_draws = 100000;
  std::int64_t surplus_runs = 100000;
  double sigmas = 3.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
Report experiment_cm_explore(const ExploreConfig& config);

struct PhiConfig {
  double alpha = 1.5;
  std::int64_t kmin = 2;
  std::vector<double> lambdas{0.0};
  std::int64_t n = 10000;
  double t = 0.5;
  std::int64_t outer = 1000;
  std::int64_t inner = 1000;
  double slack = 0.99;
  double sigmas = 3.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
Report experiment_phi(const PhiConfig& config);

struct Cm4Config {
  double alpha = 1.5;
  std::int64_t kmin = 2;
  double lambda = 0.0;
  double delta = 1.0;
  std::vector<std::int64_t> ns{1000, 10000, 100000};
  double threshold = 1e-3;
};
Report experiment_cm4(const Cm4Config& config);

}  // namespace gwpath
