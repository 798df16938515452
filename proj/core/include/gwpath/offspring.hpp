#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gwpath/rng.hpp"

namespace gwpath {

// P(D = k) ~ c k^-(alpha+2).
struct TailSpec {
  double c = 0.0;
  double alpha = 0.0;
};

class OffspringLaw {
 public:
  virtual ~OffspringLaw() = default;

  virtual double pmf(std::int64_t k) const = 0;
  virtual double mean() const = 0;
  virtual double second_moment() const = 0;
  // E[x^D] for x in [0, 1].
  virtual double pgf(double x) const = 0;
  virtual std::int64_t sample(Stream& rng) const = 0;
  // Exact draw of D_1 + ... + D_count.
  virtual std::int64_t sample_sum(std::int64_t count, Stream& rng) const;
  virtual std::optional<TailSpec> tail() const { return std::nullopt; }
  virtual std::string describe() const = 0;

  // E[exp(-theta (D - 1))], theta >= 0.
  double laplace_step(double theta) const;
};

using LawPtr = std::shared_ptr<const OffspringLaw>;

struct TableOptions {
  double tail_tolerance = 1e-14;
  std::size_t max_entries = std::size_t{1} << 22;
};

// Law stored as a frozen CDF table; mass beyond the table is reached through
// an exact conditional sampler (or a sequential walk over the pmf).
class TabulatedLaw final : public OffspringLaw {
 public:
  using PmfFn = std::function<double(std::int64_t)>;
  // P(D >= k).
  using TailMassFn = std::function<double(std::int64_t)>;
  // Draw from D conditioned on D >= k.
  using TailSamplerFn = std::function<std::int64_t(std::int64_t, Stream&)>;

  struct Moments {
    double mean;
    double second;
  };

  // Finite support given explicitly; pmf must sum to 1 within 1e-10.
  TabulatedLaw(std::vector<double> pmf, std::string name);

  TabulatedLaw(PmfFn pmf, TailMassFn tail_mass, std::string name, std::optional<Moments> moments = std::nullopt,
               std::optional<TailSpec> tail = std::nullopt, TailSamplerFn tail_sampler = nullptr,
               TableOptions options = {});

  double pmf(std::int64_t k) const override;
  double mean() const override { return mean_; }
  double second_moment() const override { return second_; }
  double pgf(double x) const override;
  std::int64_t sample(Stream& rng) const override;
  std::int64_t sample_sum(std::int64_t count, Stream& rng) const override;
  std::optional<TailSpec> tail() const override { return tail_; }
  std::string describe() const override { return name_; }

  // Draw from D conditioned on D >= k.
  std::int64_t sample_at_least(std::int64_t k, Stream& rng) const;

  std::size_t table_size() const noexcept { return probs_.size(); }
  // Mass covered by the table.
  double table_mass() const noexcept { return cdf_.empty() ? 0.0 : cdf_.back(); }

 private:
  void finish(std::optional<Moments> moments);

  std::vector<double> probs_;
  std::vector<double> cdf_;
  PmfFn pmf_fn_;
  TailMassFn tail_mass_;
  TailSamplerFn tail_sampler_;
  std::optional<TailSpec> tail_;
  std::string name_;
  double mean_ = 0.0;
  double second_ = 0.0;
};

// Binomial(D, p) thinning of a base law.
class PercolatedLaw final : public OffspringLaw {
 public:
  PercolatedLaw(std::shared_ptr<const TabulatedLaw> base, double p);

  double pmf(std::int64_t k) const override;
  double mean() const override;
  double second_moment() const override;
  double pgf(double x) const override;
  std::int64_t sample(Stream& rng) const override;
  std::int64_t sample_sum(std::int64_t count, Stream& rng) const override;
  std::optional<TailSpec> tail() const override;
  std::string describe() const override;

  double p() const noexcept { return p_; }
  const TabulatedLaw& base() const noexcept { return *base_; }

 private:
  std::shared_ptr<const TabulatedLaw> base_;
  double p_;
};

std::shared_ptr<const TabulatedLaw> binary_law(double p0);
std::shared_ptr<const TabulatedLaw> geometric_law(double mean);
// P(D = k) = k^-(alpha+2) / zeta(alpha+2, kmin) for k >= kmin.
std::shared_ptr<const TabulatedLaw> power_law(double alpha, std::int64_t kmin);
// Size-biased version of a power law: P(D~ = k) = k P(D = k) / E[D].
std::shared_ptr<const TabulatedLaw> size_biased_power_law(double alpha, std::int64_t kmin);

double hurwitz_zeta(double s, double a);

struct TiltRoot {
  double xi = 0.0;
};

TiltRoot find_xi(const OffspringLaw& law);
std::shared_ptr<const TabulatedLaw> tilt(const OffspringLaw& law, TiltRoot root);
double extinction_probability(TiltRoot root);

struct TreeCaps {
  std::int64_t max_vertices = 1'000'000;
  std::int64_t max_generation = 64;
};

enum class CensorReason { None, VertexCap, GenerationCap };

struct TreeOutcome {
  bool finite = false;
  std::int64_t size = 0;
  CensorReason reason = CensorReason::None;
};

TreeOutcome sample_tree_finite(const OffspringLaw& law, Stream& rng, const TreeCaps& caps);

}  // namespace gwpath
