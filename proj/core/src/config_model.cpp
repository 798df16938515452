#include "gwpath/config_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "gwpath/errors.hpp"

namespace gwpath {

namespace {

constexpr std::size_t kHeadClasses = 64;

std::int64_t draw_binomial(std::int64_t trials, double p, Stream& rng) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::int64_t> dist(trials, p);
  return dist(rng);
}

}  // namespace

double DegreeModel::c_n() const { return tail_c() * std::pow(p, alpha + 1.0); }

double DegreeModel::c_alpha_n() const { return c_n() * std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0)); }

double DegreeModel::size_biased_mean() const { return percolated->second_moment() / percolated->mean(); }

StableRef DegreeModel::stable_ref() const { return StableRef{alpha, c_n(), mu_n(), lambda_window}; }

std::int64_t window_index(double t, std::int64_t n, double alpha) {
  if (!(t >= 0.0)) throw DomainError("negative time");
  const double x = t * std::pow(static_cast<double>(n), alpha / (alpha + 1.0));
  return static_cast<std::int64_t>(std::floor(x * (1.0 + 1e-12) + 1e-9));
}

std::int64_t DegreeModel::window_index(double t) const { return gwpath::window_index(t, n, alpha); }

double DegreeModel::space_scale() const { return std::pow(static_cast<double>(n), -1.0 / (alpha + 1.0)); }

double DegreeModel::height_scale() const {
  return std::pow(static_cast<double>(n), -(alpha - 1.0) / (alpha + 1.0));
}

double percolation_probability(double mu, double rho, double alpha, double lambda_window, std::int64_t n) {
  if (!(rho / mu - 1.0 > 1.0)) throw InvalidWindow("base law needs rho > 2 mu");
  const double eps = std::pow(static_cast<double>(n), -(alpha - 1.0) / (alpha + 1.0));
  const double p = (1.0 + lambda_window * eps) / (rho / mu - 1.0);
  if (!(p > 0.0 && p <= 1.0)) throw InvalidWindow("percolation probability " + std::to_string(p) + " outside (0, 1]");
  return p;
}

double percolation_probability(const DegreeModel& model) {
  return percolation_probability(model.mu(), model.rho(), model.alpha, model.lambda_window, model.n);
}

DegreeModel make_degree_model(double alpha, std::int64_t kmin, double lambda_window, std::int64_t n) {
  if (n < 1) throw InvalidWindow("n must be positive");
  DegreeModel m;
  m.alpha = alpha;
  m.kmin = kmin;
  m.lambda_window = lambda_window;
  m.n = n;
  m.base = power_law(alpha, kmin);
  m.p = percolation_probability(m);
  m.base_size_biased = size_biased_power_law(alpha, kmin);
  m.percolated = std::make_shared<PercolatedLaw>(m.base, m.p);
  for (std::size_t k = 0; k < kHeadClasses; ++k) m.head_pmf.push_back(m.percolated->pmf(static_cast<std::int64_t>(k)));
  return m;
}

std::vector<std::int64_t> sample_degrees(const DegreeModel& model, Stream& rng) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(model.n));
  std::int64_t total = 0;
  for (auto& d : out) {
    d = model.percolated->sample(rng);
    total += d;
  }
  if (total % 2 != 0) ++out.back();
  return out;
}

std::int64_t sample_size_biased_child(const DegreeModel& model, Stream& rng) {
  return 1 + draw_binomial(model.base_size_biased->sample(rng) - 1, model.p, rng);
}

std::vector<std::size_t> size_biased_order(std::span<const std::int64_t> degrees, Stream& rng) {
  std::vector<std::size_t> positive, zero;
  std::vector<double> key(degrees.size(), 0.0);
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] < 0) throw DomainError("negative degree");
    if (degrees[i] == 0) {
      zero.push_back(i);
    } else {
      positive.push_back(i);
      key[i] = -std::log(rng.uniform()) / static_cast<double>(degrees[i]);
    }
  }
  std::sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) {
    return key[a] < key[b] || (key[a] == key[b] && a < b);
  });
  for (std::size_t i = zero.size(); i > 1; --i) std::swap(zero[i - 1], zero[uniform_index(rng, i)]);
  positive.insert(positive.end(), zero.begin(), zero.end());
  return positive;
}

std::vector<std::int64_t> size_biased_prefix(const DegreeModel& model, std::int64_t m, Stream& rng) {
  if (m < 0 || m > model.n) throw DomainError("prefix length outside [0, n]");
  const std::size_t heads = model.head_pmf.size();
  std::vector<std::int64_t> counts(heads, 0);
  std::int64_t remaining = model.n;
  double mass_left = 1.0;
  for (std::size_t k = 0; k < heads && remaining > 0; ++k) {
    counts[k] = draw_binomial(remaining, std::min(1.0, model.head_pmf[k] / mass_left), rng);
    remaining -= counts[k];
    mass_left -= model.head_pmf[k];
  }
  std::vector<std::int64_t> tail_values;
  const auto cutoff = static_cast<std::int64_t>(heads);
  for (std::int64_t i = 0; i < remaining; ++i) {
    for (;;) {
      const std::int64_t b = draw_binomial(model.base->sample_at_least(cutoff, rng), model.p, rng);
      if (b >= cutoff) {
        tail_values.push_back(b);
        break;
      }
    }
  }
  std::int64_t weight = 0;
  for (std::size_t k = 0; k < heads; ++k) weight += static_cast<std::int64_t>(k) * counts[k];
  for (auto b : tail_values) weight += b;

  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(m));
  for (std::int64_t step = 0; step < m; ++step) {
    if (weight == 0) throw DomainError("prefix longer than the number of positive-degree vertices");
    auto u = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(weight)));
    std::int64_t picked = -1;
    for (std::size_t k = 1; k < heads; ++k) {
      const std::int64_t w = static_cast<std::int64_t>(k) * counts[k];
      if (u < w) {
        picked = static_cast<std::int64_t>(k);
        --counts[k];
        break;
      }
      u -= w;
    }
    if (picked < 0) {
      for (std::size_t i = 0; i < tail_values.size(); ++i) {
        if (u < tail_values[i]) {
          picked = tail_values[i];
          tail_values[i] = tail_values.back();
          tail_values.pop_back();
          break;
        }
        u -= tail_values[i];
      }
    }
    weight -= picked;
    out.push_back(picked);
  }
  return out;
}

ExplorationRecord explore(std::span<const std::int64_t> degrees, Stream& rng) {
  const std::size_t n = degrees.size();
  std::vector<std::int64_t> first(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (degrees[v] < 0) throw DomainError("negative degree");
    first[v + 1] = first[v] + degrees[v];
  }
  const std::int64_t total = first[n];
  if (total % 2 != 0) throw DomainError("degree sum must be even");

  enum : std::uint8_t { kFresh, kOnStack, kPaired };
  std::vector<std::uint32_t> owner(static_cast<std::size_t>(total));
  for (std::size_t v = 0; v < n; ++v) {
    for (std::int64_t h = first[v]; h < first[v + 1]; ++h) owner[h] = static_cast<std::uint32_t>(v);
  }
  std::vector<std::int64_t> pool(static_cast<std::size_t>(total));
  std::vector<std::int64_t> where(static_cast<std::size_t>(total));
  std::iota(pool.begin(), pool.end(), 0);
  std::iota(where.begin(), where.end(), 0);
  std::vector<std::uint8_t> state(static_cast<std::size_t>(total), kFresh);
  auto take = [&](std::int64_t h) {
    const std::int64_t last = pool.back();
    pool[where[h]] = last;
    where[last] = where[h];
    pool.pop_back();
  };

  ExplorationRecord rec;
  std::vector<std::int64_t> vertex_height(n, 0);
  std::vector<std::int64_t> stack;
  std::vector<std::int64_t> steps;
  auto discover = [&](std::size_t v, std::int64_t height) {
    rec.order.push_back(v);
    rec.ordered_degrees.push_back(degrees[v]);
    steps.push_back(degrees[v] - 2);
    vertex_height[v] = height;
    rec.heights.back().push_back(height);
    for (std::int64_t h = first[v + 1]; h-- > first[v];) {
      if (state[h] == kFresh) {
        state[h] = kOnStack;
        stack.push_back(h);
      }
    }
  };
  auto close_component = [&]() {
    const std::size_t start = rec.component_spans.empty() ? 0 : rec.component_spans.back().second;
    rec.component_spans.emplace_back(start, rec.order.size());
  };

  while (!pool.empty()) {
    rec.surplus_counts.push_back(0);
    rec.heights.emplace_back();
    const std::int64_t root_half = pool[uniform_index(rng, pool.size())];
    discover(owner[root_half], 0);
    for (;;) {
      while (!stack.empty() && state[stack.back()] != kOnStack) stack.pop_back();
      if (stack.empty()) break;
      const std::int64_t h = stack.back();
      stack.pop_back();
      take(h);
      state[h] = kPaired;
      const std::int64_t r = pool[uniform_index(rng, pool.size())];
      take(r);
      rec.half_edges_paired += 2;
      if (state[r] == kOnStack) {
        state[r] = kPaired;
        ++rec.surplus_counts.back();
      } else {
        state[r] = kPaired;
        discover(owner[r], vertex_height[owner[h]] + 1);
      }
    }
    close_component();
  }
  rec.path = Path::from_steps(steps);

  std::vector<std::size_t> isolated;
  for (std::size_t v = 0; v < n; ++v) {
    if (degrees[v] == 0) isolated.push_back(v);
  }
  for (std::size_t i = isolated.size(); i > 1; --i) std::swap(isolated[i - 1], isolated[uniform_index(rng, i)]);
  for (auto v : isolated) {
    rec.order.push_back(v);
    rec.ordered_degrees.push_back(0);
    rec.surplus_counts.push_back(0);
    rec.heights.push_back({0});
    close_component();
  }
  return rec;
}

std::vector<ComponentSummary> component_summaries(const ExplorationRecord& record) {
  std::vector<ComponentSummary> out;
  out.reserve(record.component_spans.size());
  for (std::size_t c = 0; c < record.component_spans.size(); ++c) {
    const auto [a, b] = record.component_spans[c];
    const auto& hs = record.heights[c];
    out.push_back({static_cast<std::int64_t>(b - a), record.surplus_counts[c],
                   hs.empty() ? 0 : *std::max_element(hs.begin(), hs.end())});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.size > y.size; });
  return out;
}

void write_components_jsonl(std::ostream& out, const std::vector<ComponentSummary>& components) {
  for (const auto& c : components) {
    out << "{\"size\":" << c.size << ",\"surplus\":" << c.surplus << ",\"max_height\":" << c.max_height << "}\n";
  }
}

double measure_change_lower_bound(const Path& prefix, const DegreeModel& model, double t) {
  const std::int64_t m = model.window_index(t);
  if (static_cast<std::int64_t>(prefix.size()) < m + 1) throw PrefixTooShort("need " + std::to_string(m + 1) + " values");
  const double alpha = model.alpha, mu = model.mu_n();
  double area = 0.0;
  for (std::int64_t i = 0; i <= m; ++i) area += static_cast<double>(prefix[i] - prefix[m]);
  const double n = static_cast<double>(model.n);
  const double exponent = area / (n * mu) - model.c_alpha_n() * std::pow(t, alpha + 1.0) / ((alpha + 1.0) * std::pow(mu, alpha + 1.0)) +
                          model.lambda_window * t * t / (2.0 * mu);
  return std::exp(exponent);
}

MeasureChange::MeasureChange(const DegreeModel& model, std::int64_t m) : n_(model.n), m_(m) {
  if (m < 0 || m > model.n) throw DomainError("prefix length outside [0, n]");
  const double mu = model.mu_n();
  for (std::int64_t i = 0; i < m; ++i) log_constant_ += std::log(static_cast<double>(model.n - i) * mu);
  if (m == 0 || m == model.n) return;
  s_ = static_cast<double>(m) / (static_cast<double>(model.n) * mu);
  const double p = model.p;
  const double y = 1.0 - p + p * std::exp(-s_);
  const double norm = model.base->pgf(y);
  // Base degrees reweighted by y^D, then thinned with the matching probability.
  std::vector<double> probs;
  double total = 0.0, weight = 1.0;
  for (std::int64_t d = 0;; ++d) {
    const double v = model.base->pmf(d) * weight / norm;
    probs.push_back(v);
    total += v;
    weight *= y;
    if (d > model.kmin && (weight < 1e-18 || 1.0 - total < 1e-15)) break;
    if (probs.size() > (std::size_t{1} << 24)) throw SeriesTruncation("tilted degree table too long");
  }
  if (std::abs(total - 1.0) > 1e-10) throw NormalizationDrift("tilted degree mass " + std::to_string(total));
  for (auto& v : probs) v /= total;
  auto base = std::make_shared<TabulatedLaw>(std::move(probs), "tilted(" + model.base->describe() + ")");
  tilted_ = std::make_shared<PercolatedLaw>(std::move(base), p * std::exp(-s_) / y);
  log_constant_ += static_cast<double>(model.n - m) * std::log(norm);
}

Estimate MeasureChange::estimate(std::span<const std::int64_t> prefix, std::int64_t inner_reps, Stream& rng) const {
  if (static_cast<std::int64_t>(prefix.size()) != m_) throw DomainError("prefix length does not match");
  if (inner_reps < 1) throw DomainError("inner_reps must be positive");
  if (m_ == 0) return {1.0, 0.0};
  std::vector<std::int64_t> suffix(prefix.size());
  std::int64_t acc = 0;
  for (std::size_t i = prefix.size(); i-- > 0;) {
    acc += prefix[i];
    suffix[i] = acc;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t r = 0; r < inner_reps; ++r) {
    const auto xi = tilted_ ? static_cast<double>(tilted_->sample_sum(n_ - m_, rng)) : 0.0;
    double log_value = log_constant_ + s_ * xi;
    for (auto a : suffix) log_value -= std::log(static_cast<double>(a) + xi);
    const double v = std::exp(log_value);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / static_cast<double>(inner_reps);
  const double var = inner_reps > 1 ? std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(inner_reps - 1)) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(inner_reps))};
}

Estimate phi_exact_mc(std::span<const std::int64_t> prefix, const DegreeModel& model, std::int64_t inner_reps,
                      Stream& rng) {
  const auto m = static_cast<std::int64_t>(prefix.size());
  if (m > model.n) throw DomainError("prefix longer than n");
  return MeasureChange(model, m).estimate(prefix, inner_reps, rng);
}

std::vector<Cm4Row> cm4_pgf_iteration(const DegreeModel& model, double delta, std::span<const std::int64_t> n_grid) {
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  const auto& sb = *model.base_size_biased;
  const double alpha = model.alpha;
  std::vector<Cm4Row> rows;
  for (auto n : n_grid) {
    const double p = percolation_probability(model.mu(), model.rho(), alpha, model.lambda_window, n);
    const auto iterations = static_cast<std::int64_t>(
        std::floor(delta * std::pow(static_cast<double>(n), (alpha - 1.0) / (alpha + 1.0)) + 1e-9));
    const auto power = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / (alpha + 1.0)) + 1e-9));
    const double missing = 1.0 - sb.table_mass();
    double x = 0.0;
    for (std::int64_t i = 0; i < iterations; ++i) {
      const double y = 1.0 - p + p * x;
      const double truncation = missing * std::pow(y, static_cast<double>(sb.table_size()) - 1.0);
      if (truncation > 1e-12) throw SeriesTruncation("size-biased pgf tail " + std::to_string(truncation));
      const double next = sb.pgf(y) / y;
      if (!(next >= x - 1e-15 && next <= 1.0 + 1e-15)) throw SeriesTruncation("pgf iteration left [x, 1]");
      x = std::min(1.0, next);
    }
    rows.push_back({n, iterations, power, x, std::pow(x, static_cast<double>(power))});
  }
  return rows;
}

}  // namespace gwpath
