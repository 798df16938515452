#include "gwpath/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gwpath/errors.hpp"
#include "gwpath/walk.hpp"

namespace gwpath {

namespace {

constexpr std::size_t kSumHeadCategories = 64;
constexpr std::int64_t kSumDirectThreshold = 24;

std::int64_t draw_binomial(std::int64_t trials, double p, Stream& rng) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(trials, p);
  return dist(rng);
}

// D conditioned on D >= k_min for pmf proportional to k^-s, by rejection
// from the discretised Pareto envelope.
std::int64_t power_tail_sample(double s, std::int64_t k_min, Stream& rng) {
  const double K = static_cast<double>(k_min);
  const double bound = std::pow((K + 1.0) / K, s);
  for (;;) {
    const double y = K * std::pow(rng.uniform(), -1.0 / (s - 1.0));
    if (!(y < 9.0e18)) continue;
    const double k = std::floor(y);
    const double cell = -std::expm1((1.0 - s) * std::log1p(1.0 / k));
    const double ratio = (s - 1.0) / (k * cell);
    if (rng.uniform() * bound <= ratio) return static_cast<std::int64_t>(k);
  }
}

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw DomainError("hurwitz_zeta needs s > 1 and a > 0");
  constexpr int N = 24;
  static constexpr double kBernoulliOverFactorial[] = {
      1.0 / 6.0 / 2.0,           -1.0 / 30.0 / 24.0,       1.0 / 42.0 / 720.0,
      -1.0 / 30.0 / 40320.0,     5.0 / 66.0 / 3628800.0,   -691.0 / 2730.0 / 479001600.0,
  };
  double sum = 0.0;
  for (int k = 0; k < N; ++k) sum += std::pow(a + k, -s);
  const double x = a + N;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;
  double power = std::pow(x, -s - 1.0);
  for (int j = 0; j < 6; ++j) {
    sum += kBernoulliOverFactorial[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= x * x;
  }
  return sum;
}

double OffspringLaw::laplace_step(double theta) const {
  if (!(theta >= 0.0)) throw DomainError("laplace_step needs theta >= 0");
  return std::exp(theta) * pgf(std::exp(-theta));
}

std::int64_t OffspringLaw::sample_sum(std::int64_t count, Stream& rng) const {
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < count; ++i) total = checked_add(total, sample(rng));
  return total;
}

TabulatedLaw::TabulatedLaw(std::vector<double> pmf, std::string name) : probs_(std::move(pmf)), name_(std::move(name)) {
  double total = 0.0;
  for (double v : probs_) {
    if (!(v >= 0.0)) throw InvalidLaw(name_ + ": negative or NaN probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10) throw InvalidLaw(name_ + ": probabilities sum to " + std::to_string(total));
  finish(std::nullopt);
}

TabulatedLaw::TabulatedLaw(PmfFn pmf, TailMassFn tail_mass, std::string name, std::optional<Moments> moments,
                           std::optional<TailSpec> tail, TailSamplerFn tail_sampler, TableOptions options)
    : pmf_fn_(std::move(pmf)),
      tail_mass_(std::move(tail_mass)),
      tail_sampler_(std::move(tail_sampler)),
      tail_(tail),
      name_(std::move(name)) {
  std::size_t limit = options.max_entries;
  if (tail_mass_) {
    // Smallest table length whose remaining mass is below tolerance.
    std::size_t hi = 1;
    while (hi < options.max_entries && !(tail_mass_(static_cast<std::int64_t>(hi)) < options.tail_tolerance)) hi *= 2;
    hi = std::min(hi, options.max_entries);
    std::size_t lo = hi / 2;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (tail_mass_(static_cast<std::int64_t>(mid)) < options.tail_tolerance) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    limit = std::max<std::size_t>(hi, 1);
  }
  double acc = 0.0;
  for (std::int64_t k = 0; static_cast<std::size_t>(k) < limit; ++k) {
    const double v = pmf_fn_(k);
    if (!(v >= 0.0)) throw InvalidLaw(name_ + ": negative or NaN probability");
    probs_.push_back(v);
    acc += v;
    if (!tail_mass_ && 1.0 - acc < options.tail_tolerance) break;
  }
  if (!tail_mass_ && !tail_sampler_ && 1.0 - acc >= options.tail_tolerance) {
    throw InvalidLaw(name_ + ": table limit reached before tail tolerance");
  }
  finish(moments);
}

void TabulatedLaw::finish(std::optional<Moments> moments) {
  cdf_.resize(probs_.size());
  double acc = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    acc += probs_[k];
    cdf_[k] = acc;
    m1 += static_cast<double>(k) * probs_[k];
    m2 += static_cast<double>(k) * static_cast<double>(k) * probs_[k];
  }
  if (moments) {
    mean_ = moments->mean;
    second_ = moments->second;
  } else {
    mean_ = m1;
    second_ = m2;
  }
}

double TabulatedLaw::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  if (static_cast<std::size_t>(k) < probs_.size()) return probs_[k];
  return pmf_fn_ ? pmf_fn_(k) : 0.0;
}

double TabulatedLaw::pgf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pgf argument outside [0, 1]");
  if (x == 1.0) return 1.0;
  double sum = 0.0, power = 1.0;
  for (double v : probs_) {
    sum += v * power;
    power *= x;
    if (power < 1e-300) break;
  }
  return sum;
}

std::int64_t TabulatedLaw::sample_at_least(std::int64_t k, Stream& rng) const {
  if (k <= 0) return sample(rng);
  if (tail_sampler_) return tail_sampler_(k, rng);
  const auto size = static_cast<std::int64_t>(probs_.size());
  if (k < size) {
    const double floor_mass = cdf_[k - 1];
    const double u = floor_mass + rng.uniform() * (1.0 - floor_mass);
    if (u < cdf_.back()) {
      return static_cast<std::int64_t>(std::upper_bound(cdf_.begin() + k, cdf_.end(), u) - cdf_.begin());
    }
    if (!pmf_fn_) return size - 1;
    k = size;
  }
  if (!pmf_fn_) throw DomainError(name_ + ": conditioning on an empty event");
  const double rest = tail_mass_ ? tail_mass_(k) : 1.0 - cdf_.back();
  double target = rng.uniform() * rest;
  for (std::int64_t j = k;; ++j) {
    const double v = pmf(j);
    if (target < v || j > k + (std::int64_t{1} << 40)) return j;
    target -= v;
  }
}

std::int64_t TabulatedLaw::sample(Stream& rng) const {
  const double u = rng.uniform();
  if (u < cdf_.back()) {
    return static_cast<std::int64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }
  if (!pmf_fn_) {
    auto k = static_cast<std::int64_t>(probs_.size()) - 1;
    while (k > 0 && probs_[k] == 0.0) --k;
    return k;
  }
  return sample_at_least(static_cast<std::int64_t>(probs_.size()), rng);
}

std::int64_t TabulatedLaw::sample_sum(std::int64_t count, Stream& rng) const {
  if (count < 0) throw DomainError("sample_sum with negative count");
  if (count <= kSumDirectThreshold) return OffspringLaw::sample_sum(count, rng);
  // Category counts by sequential conditional binomials, then the rare tail
  // draws one at a time.
  std::int64_t total = 0, remaining = count;
  double mass_left = 1.0;
  const std::size_t head = std::min(kSumHeadCategories, probs_.size());
  std::size_t k = 0;
  for (; k < head && remaining > kSumDirectThreshold; ++k) {
    const double q = mass_left > 0.0 ? std::min(1.0, probs_[k] / mass_left) : 1.0;
    const std::int64_t x = (k + 1 == probs_.size() && !pmf_fn_) ? remaining : draw_binomial(remaining, q, rng);
    total = checked_add(total, static_cast<std::int64_t>(k) * x);
    remaining -= x;
    mass_left = 1.0 - cdf_[k];
  }
  if (remaining == 0) return total;
  const double floor_mass = k > 0 ? cdf_[k - 1] : 0.0;
  const double span = cdf_.back() - floor_mass;
  const double above = 1.0 - floor_mass;
  for (std::int64_t i = 0; i < remaining; ++i) {
    const double u = floor_mass + rng.uniform() * above;
    std::int64_t v;
    if (u - floor_mass < span) {
      v = static_cast<std::int64_t>(std::upper_bound(cdf_.begin() + k, cdf_.end(), u) - cdf_.begin());
      if (static_cast<std::size_t>(v) >= probs_.size()) v = static_cast<std::int64_t>(probs_.size()) - 1;
    } else {
      v = pmf_fn_ ? sample_at_least(static_cast<std::int64_t>(probs_.size()), rng)
                  : static_cast<std::int64_t>(probs_.size()) - 1;
    }
    total = checked_add(total, v);
  }
  return total;
}

PercolatedLaw::PercolatedLaw(std::shared_ptr<const TabulatedLaw> base, double p) : base_(std::move(base)), p_(p) {
  if (!(p_ > 0.0 && p_ <= 1.0)) throw InvalidWindow("percolation probability outside (0, 1]");
}

double PercolatedLaw::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  if (p_ == 1.0) return base_->pmf(k);
  const double lp = std::log(p_), lq = std::log1p(-p_);
  double sum = 0.0;
  const auto limit = static_cast<std::int64_t>(base_->table_size());
  for (std::int64_t d = k; d < limit; ++d) {
    const double w = base_->pmf(d);
    if (w == 0.0) continue;
    const double lb = std::lgamma(d + 1.0) - std::lgamma(k + 1.0) - std::lgamma(d - k + 1.0) + k * lp + (d - k) * lq;
    const double term = w * std::exp(lb);
    sum += term;
    if (d > k + 64 && term < 1e-18 * sum) break;
  }
  return sum;
}

double PercolatedLaw::mean() const { return p_ * base_->mean(); }

double PercolatedLaw::second_moment() const {
  return p_ * p_ * (base_->second_moment() - base_->mean()) + p_ * base_->mean();
}

double PercolatedLaw::pgf(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pgf argument outside [0, 1]");
  return base_->pgf(1.0 - p_ + p_ * x);
}

std::int64_t PercolatedLaw::sample(Stream& rng) const { return draw_binomial(base_->sample(rng), p_, rng); }

std::int64_t PercolatedLaw::sample_sum(std::int64_t count, Stream& rng) const {
  return draw_binomial(base_->sample_sum(count, rng), p_, rng);
}

std::optional<TailSpec> PercolatedLaw::tail() const {
  auto t = base_->tail();
  if (!t) return t;
  t->c *= std::pow(p_, t->alpha + 1.0);
  return t;
}

std::string PercolatedLaw::describe() const {
  std::ostringstream os;
  os << "percolated(" << base_->describe() << ", p=" << p_ << ")";
  return os.str();
}

std::shared_ptr<const TabulatedLaw> binary_law(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw InvalidLaw("binary law needs p in [0, 1]");
  std::ostringstream os;
  os << "binary(" << p0 << ")";
  return std::make_shared<TabulatedLaw>(std::vector<double>{p0, 0.0, 1.0 - p0}, os.str());
}

std::shared_ptr<const TabulatedLaw> geometric_law(double mean) {
  if (!(mean > 0.0)) throw InvalidLaw("geometric law needs a positive mean");
  const double q = mean / (1.0 + mean);
  std::ostringstream os;
  os << "geometric(" << mean << ")";
  return std::make_shared<TabulatedLaw>(
      [q](std::int64_t k) { return (1.0 - q) * std::pow(q, static_cast<double>(k)); },
      [q](std::int64_t k) { return std::pow(q, static_cast<double>(k)); }, os.str(),
      TabulatedLaw::Moments{mean, mean * (1.0 + 2.0 * mean)}, std::nullopt,
      [q](std::int64_t k, Stream& rng) {
        return k + static_cast<std::int64_t>(std::floor(std::log(rng.uniform()) / std::log(q)));
      });
}

namespace {

std::shared_ptr<const TabulatedLaw> pure_power(double s, std::int64_t kmin, std::string name,
                                               std::optional<TabulatedLaw::Moments> moments,
                                               std::optional<TailSpec> tail, TableOptions options = {}) {
  const double z = hurwitz_zeta(s, static_cast<double>(kmin));
  return std::make_shared<TabulatedLaw>(
      [s, kmin, z](std::int64_t k) { return k < kmin ? 0.0 : std::pow(static_cast<double>(k), -s) / z; },
      [s, kmin, z](std::int64_t k) { return k <= kmin ? 1.0 : hurwitz_zeta(s, static_cast<double>(k)) / z; },
      std::move(name), moments, tail,
      [s, kmin](std::int64_t k, Stream& rng) { return power_tail_sample(s, std::max(k, kmin), rng); }, options);
}

}  // namespace

std::shared_ptr<const TabulatedLaw> power_law(double alpha, std::int64_t kmin) {
  if (!(alpha > 1.0 && alpha < 2.0) || kmin < 1) throw InvalidLaw("power law needs alpha in (1, 2) and kmin >= 1");
  const double a = static_cast<double>(kmin);
  const double z = hurwitz_zeta(alpha + 2.0, a);
  std::ostringstream os;
  os << "power_law(" << alpha << ", " << kmin << ")";
  return pure_power(alpha + 2.0, kmin, os.str(),
                    TabulatedLaw::Moments{hurwitz_zeta(alpha + 1.0, a) / z, hurwitz_zeta(alpha, a) / z},
                    TailSpec{1.0 / z, alpha});
}

std::shared_ptr<const TabulatedLaw> size_biased_power_law(double alpha, std::int64_t kmin) {
  if (!(alpha > 1.0 && alpha < 2.0) || kmin < 1) throw InvalidLaw("power law needs alpha in (1, 2) and kmin >= 1");
  const double a = static_cast<double>(kmin);
  std::ostringstream os;
  os << "size_biased_power_law(" << alpha << ", " << kmin << ")";
  return pure_power(alpha + 1.0, kmin, os.str(),
                    TabulatedLaw::Moments{hurwitz_zeta(alpha, a) / hurwitz_zeta(alpha + 1.0, a),
                                          std::numeric_limits<double>::infinity()},
                    std::nullopt, TableOptions{1e-14, std::size_t{1} << 20});
}

TiltRoot find_xi(const OffspringLaw& law) {
  if (!(law.mean() > 1.0)) throw SubcriticalLaw(law.describe() + " has mean " + std::to_string(law.mean()));
  auto above = [&](double t) { return law.laplace_step(t) > 1.0; };
  double lo, hi = 1.0;
  if (!above(hi)) {
    while (!above(hi)) {
      hi *= 2.0;
      if (hi > 1024.0) throw NonBracketable(law.describe() + ": step transform never exceeds 1");
    }
    lo = hi / 2.0;
  } else {
    lo = hi / 2.0;
    while (above(lo)) {
      hi = lo;
      lo /= 2.0;
      if (lo < 1e-300) throw NonBracketable(law.describe() + ": root too close to 0");
    }
  }
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return TiltRoot{0.5 * (lo + hi)};
}

std::shared_ptr<const TabulatedLaw> tilt(const OffspringLaw& law, TiltRoot root) {
  const double xi = root.xi;
  if (!(xi > 0.0)) throw DomainError("tilt needs a positive root");
  std::vector<double> probs;
  double total = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const double v = std::exp(-xi * static_cast<double>(k - 1)) * law.pmf(k);
    probs.push_back(v);
    total += v;
    if (1.0 - total < 1e-15 && v < 1e-17) break;
    if (k > 64 && v < 1e-18 * total && std::exp(-xi * static_cast<double>(k)) < 1e-16) break;
    if (probs.size() > (std::size_t{1} << 24)) break;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw NormalizationDrift("tilted mass of " + law.describe() + " is " + std::to_string(total));
  }
  while (probs.size() > 1 && probs.back() == 0.0) probs.pop_back();
  for (auto& v : probs) v /= total;
  return std::make_shared<TabulatedLaw>(std::move(probs), "tilt(" + law.describe() + ")");
}

double extinction_probability(TiltRoot root) { return std::exp(-root.xi); }

TreeOutcome sample_tree_finite(const OffspringLaw& law, Stream& rng, const TreeCaps& caps) {
  IncrementalHeight height;
  std::int64_t s = 0;
  for (std::int64_t i = 0;; ++i) {
    if (i >= caps.max_vertices) return {false, i, CensorReason::VertexCap};
    if (height.push(s) > caps.max_generation) return {false, i, CensorReason::GenerationCap};
    s += law.sample(rng) - 1;
    if (s == -1) return {true, i + 1, CensorReason::None};
  }
}

}  // namespace gwpath
