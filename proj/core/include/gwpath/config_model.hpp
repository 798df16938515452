#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "gwpath/continuum.hpp"
#include "gwpath/offspring.hpp"
#include "gwpath/rng.hpp"
#include "gwpath/walk.hpp"

namespace gwpath {

// Percolated power-law degrees in the critical window.
struct DegreeModel {
  double alpha = 1.5;
  std::int64_t kmin = 2;
  double lambda_window = 0.0;
  std::int64_t n = 0;
  double p = 1.0;
  std::shared_ptr<const TabulatedLaw> base;
  std::shared_ptr<const TabulatedLaw> base_size_biased;
  std::shared_ptr<const PercolatedLaw> percolated;
  // P(B = k) for small k, cached for the class-count sampler.
  std::vector<double> head_pmf;

  double mu() const { return base->mean(); }
  double rho() const { return base->second_moment(); }
  double tail_c() const { return base->tail()->c; }
  double mu_n() const { return p * mu(); }
  double c_n() const;
  double c_alpha_n() const;
  // E[B^2] / E[B] for the percolated law.
  double size_biased_mean() const;

  StableRef stable_ref() const;
  std::int64_t window_index(double t) const;
  double space_scale() const;
  double height_scale() const;
};

DegreeModel make_degree_model(double alpha, std::int64_t kmin, double lambda_window, std::int64_t n);

double percolation_probability(const DegreeModel& model);
double percolation_probability(double mu, double rho, double alpha, double lambda_window, std::int64_t n);

// floor(t * n^(alpha/(alpha+1))) with a guard against round-off at exact powers.
std::int64_t window_index(double t, std::int64_t n, double alpha);

std::vector<std::int64_t> sample_degrees(const DegreeModel& model, Stream& rng);
std::int64_t sample_size_biased_child(const DegreeModel& model, Stream& rng);

// Sequential degree-proportional draws without replacement; zero-degree
// vertices follow in uniform order.
std::vector<std::size_t> size_biased_order(std::span<const std::int64_t> degrees, Stream& rng);

// First m degrees of a size-biased ordering of n i.i.d. percolated degrees,
// drawn from multinomial class counts.
std::vector<std::int64_t> size_biased_prefix(const DegreeModel& model, std::int64_t m, Stream& rng);

struct ExplorationRecord {
  std::vector<std::size_t> order;
  std::vector<std::int64_t> ordered_degrees;
  // Walk over positive-degree vertices in discovery order, steps D - 2.
  Path path;
  // Half-open index ranges into order.
  std::vector<std::pair<std::size_t, std::size_t>> component_spans;
  std::vector<std::int64_t> surplus_counts;
  // Graph distance to the component root in the exploration tree.
  std::vector<HeightSeq> heights;
  std::int64_t half_edges_paired = 0;
};

ExplorationRecord explore(std::span<const std::int64_t> degrees, Stream& rng);

struct ComponentSummary {
  std::int64_t size = 0;
  std::int64_t surplus = 0;
  std::int64_t max_height = 0;
};

std::vector<ComponentSummary> component_summaries(const ExplorationRecord& record);
void write_components_jsonl(std::ostream& out, const std::vector<ComponentSummary>& components);

double measure_change_lower_bound(const Path& prefix, const DegreeModel& model, double t);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// phi_m^n for a fixed prefix length m. Xi is drawn under the exponential tilt
// exp(-s Xi) with s = m / (n mu_n) and reweighted, which keeps the estimator
// unbiased.
class MeasureChange {
 public:
  MeasureChange(const DegreeModel& model, std::int64_t m);

  Estimate estimate(std::span<const std::int64_t> prefix, std::int64_t inner_reps, Stream& rng) const;

  std::int64_t prefix_length() const noexcept { return m_; }
  double tilt() const noexcept { return s_; }

 private:
  std::int64_t n_;
  std::int64_t m_;
  double s_ = 0.0;
  // log(n! mu_n^m / (n - m)!) + (n - m) log E[exp(-s B)].
  double log_constant_ = 0.0;
  std::shared_ptr<const PercolatedLaw> tilted_;
};

Estimate phi_exact_mc(std::span<const std::int64_t> prefix, const DegreeModel& model, std::int64_t inner_reps,
                      Stream& rng);

struct Cm4Row {
  std::int64_t n = 0;
  std::int64_t iterations = 0;
  std::int64_t power = 0;
  double iterate = 0.0;
  double value = 0.0;
};

std::vector<Cm4Row> cm4_pgf_iteration(const DegreeModel& model, double delta, std::span<const std::int64_t> n_grid);

}  // namespace gwpath
