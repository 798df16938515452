#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "gwpath/continuum.hpp"
#include "gwpath/errors.hpp"
#include "gwpath/harness.hpp"

namespace gwpath {

namespace {

Check make_check(std::string name, bool pass, std::vector<Metric> metrics, std::string note = {}) {
  return Check{std::move(name), pass, true, std::move(metrics), std::move(note)};
}

Check info_check(std::string name, bool pass, std::vector<Metric> metrics, std::string note = {}) {
  return Check{std::move(name), pass, false, std::move(metrics), std::move(note)};
}

std::string fmt(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Rescaled S(m) for i.i.d. size-biased child steps Z - 2.
std::vector<double> iid_window_samples(const DegreeModel& model, double t, std::size_t replicas, Stream base,
                                       unsigned threads) {
  const std::int64_t m = model.window_index(t);
  const double scale = model.space_scale();
  std::vector<double> out(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    Stream rng = base.split(static_cast<std::uint64_t>(r));
    std::int64_t s = 0;
    for (std::int64_t i = 0; i < m; ++i) s += sample_size_biased_child(model, rng) - 2;
    out[r] = scale * static_cast<double>(s);
  });
  return out;
}

// E[exp(-theta scale S(m))] for the i.i.d. size-biased walk, in closed form.
double exact_window_laplace(const DegreeModel& model, double t, double theta) {
  const std::int64_t m = model.window_index(t);
  const double s = theta * model.space_scale();
  const double y = 1.0 - model.p + model.p * std::exp(-s);
  const double step = std::exp(s) * model.base_size_biased->pgf(y) / y;
  return std::exp(static_cast<double>(m) * std::log(step));
}

}  // namespace

Report experiment_stable_marginal(const StableMarginalConfig& config) {
  Report report{"stable-marginal", config.seed, {}, {}};
  Stream base = make_stream(config.seed, "stable_marginal");
  for (double lambda : config.lambdas) {
    const DegreeModel model = make_degree_model(config.alpha, config.kmin, lambda, config.n);
    const StableRef ref = model.stable_ref();
    const std::string tag = "lambda=" + fmt(lambda);
    Stream ls = base.split(tag);
    const EmpiricalDist dist(iid_window_samples(model, config.t, static_cast<std::size_t>(config.replicas),
                                                ls.split("walk"), config.threads));
    for (double theta : config.thetas) {
      const Estimate e = empirical_laplace(dist, theta);
      const double limit = std::exp(config.t * laplace_exponent(ref, theta));
      const double exact = exact_window_laplace(model, config.t, theta);
      report.checks.push_back(make_check("stable_laplace_" + tag + "_theta=" + fmt(theta),
                                         std::abs(e.value - limit) <= config.sigmas * e.std_error,
                                         {{"empirical", e.value},
                                          {"stderr", e.std_error},
                                          {"reference", limit},
                                          {"z", (e.value - limit) / e.std_error},
                                          {"finite_n_exact", exact}}));
      report.checks.push_back(info_check("finite_n_laplace_" + tag + "_theta=" + fmt(theta),
                                         std::abs(e.value - exact) <= config.sigmas * e.std_error,
                                         {{"empirical", e.value},
                                          {"stderr", e.std_error},
                                          {"finite_n_exact", exact},
                                          {"z", (e.value - exact) / e.std_error}},
                                         "same samples against the exact finite-n transform"));
    }
    Stream rs = ls.split("reference");
    const EmpiricalDist reference(sample_stable_marginal(ref, config.t, static_cast<std::size_t>(config.replicas), rs));
    const KsResult ks = ks_two_sample(dist, reference);
    report.checks.push_back(info_check("stable_ks_" + tag, ks.p_value > 0.01,
                                       {{"distance", ks.distance}, {"p_value", ks.p_value}},
                                       "rescaled walk vs stable sampler"));
    Series sr;
    sr.name = "rescaled_S_ecdf_" + tag;
    sr.x_label = "n^(-1/(alpha+1)) S(m)";
    sr.y_label = "ECDF";
    const auto& xs = dist.samples();
    for (std::size_t i = 0; i < xs.size(); i += std::max<std::size_t>(1, xs.size() / 200)) {
      sr.x.push_back(xs[i]);
      sr.y.push_back(static_cast<double>(i + 1) / static_cast<double>(xs.size()));
    }
    report.series.push_back(std::move(sr));
  }
  {
    const DegreeModel m0 = make_degree_model(config.alpha, config.kmin, 0.0, config.n);
    StableRef r0 = m0.stable_ref(), r1 = r0;
    r1.lambda_drift = 1.0;
    const double ratio = std::exp(config.t * laplace_exponent(r1, 1.0)) / std::exp(config.t * laplace_exponent(r0, 1.0));
    report.checks.push_back(make_check("drift_ratio", std::abs(ratio - std::exp(-config.t)) < 1e-12,
                                       {{"ratio", ratio}, {"expected", std::exp(-config.t)}}));
  }
  if (!config.trend_ns.empty()) {
    std::vector<double> medians;
    Stream ts = base.split("trend");
    for (auto n : config.trend_ns) {
      const DegreeModel model = make_degree_model(config.alpha, config.kmin, 0.0, n);
      std::vector<double> distances;
      for (std::uint64_t rep = 0; rep < 3; ++rep) {
        Stream rs = ts.split(static_cast<std::uint64_t>(n)).split(rep);
        const EmpiricalDist walk(iid_window_samples(model, config.t, static_cast<std::size_t>(config.trend_replicas),
                                                    rs.split("walk"), config.threads));
        Stream ss = rs.split("reference");
        const EmpiricalDist ref(
            sample_stable_marginal(model.stable_ref(), config.t, static_cast<std::size_t>(config.trend_replicas), ss));
        distances.push_back(ks_two_sample(walk, ref).distance);
      }
      medians.push_back(median(distances));
    }
    std::vector<Metric> metrics;
    bool monotone = true;
    for (std::size_t i = 0; i < medians.size(); ++i) {
      metrics.push_back({"median_ks_n=" + std::to_string(config.trend_ns[i]), medians[i]});
      if (i > 0 && medians[i] > medians[i - 1]) monotone = false;
    }
    report.checks.push_back(info_check("ks_trend_nonincreasing", monotone, std::move(metrics)));
  }
  return report;
}

double k_tilde_grid_oracle(const StableRef& ref, double theta, double t) {
  if (theta == 0.0 || t == 0.0) return 1.0;
  const double alpha = ref.alpha, mu = ref.mu, cm = ref.tail_c / mu;
  // Inner integral over x = e^v by the trapezoid rule on a wide window.
  auto inner = [&](double a) {
    constexpr double lo = -60.0, hi = 80.0, h = 0.04;
    double sum = 0.0;
    for (int i = 0; lo + i * h <= hi; ++i) {
      const double x = std::exp(lo + i * h);
      sum += x * std::pow(x, -(alpha + 1.0)) * std::exp(-a * x) * (std::expm1(-theta * x) + theta * x);
    }
    return cm * h * sum;
  };
  // Outer over s = t w^2, midpoint rule, two resolutions.
  auto outer = [&](int cells) {
    double sum = 0.0;
    const double h = 1.0 / cells;
    for (int i = 0; i < cells; ++i) {
      const double w = (i + 0.5) * h;
      sum += 2.0 * t * w * inner(t * w * w / mu);
    }
    return sum * h;
  };
  const double coarse = outer(400), fine = outer(800);
  const double integral = (4.0 * fine - coarse) / 3.0;
  return std::exp(-theta * ref.lambda_drift * t + theta * ref.c_alpha() * std::pow(t / mu, alpha) + integral);
}

Report experiment_k_tilde(const KTildeConfig& config) {
  Report report{"k-tilde", config.seed, {}, {}};
  Stream base = make_stream(config.seed, "k_tilde");
  for (double lambda : config.lambdas) {
    const DegreeModel model = make_degree_model(config.alpha, config.kmin, lambda, config.n);
    const StableRef ref = model.stable_ref();
    const std::string tag = "lambda=" + fmt(lambda);
    const QuadratureResult quad = k_tilde_laplace(ref, config.theta, config.t);
    const double oracle = k_tilde_grid_oracle(ref, config.theta, config.t);
    report.checks.push_back(make_check("quadrature_vs_grid_" + tag, std::abs(quad.value - oracle) <= config.oracle_tolerance,
                                       {{"quadrature", quad.value}, {"quadrature_error", quad.error}, {"grid_oracle", oracle}}));
    const std::int64_t m = model.window_index(config.t);
    const double scale = model.space_scale();
    std::vector<double> samples(static_cast<std::size_t>(config.replicas));
    Stream es = base.split(tag).split("explore");
    parallel_for(samples.size(), config.threads, [&](std::size_t r) {
      Stream rng = es.split(static_cast<std::uint64_t>(r));
      const auto degrees = sample_degrees(model, rng);
      const ExplorationRecord rec = explore(degrees, rng);
      samples[r] = rescale_at(rec.path, ScalingSpec{model.n, scale, static_cast<double>(m), 1.0, {}}, 1.0);
    });
    const Estimate e = empirical_laplace(EmpiricalDist(samples), config.theta);
    report.checks.push_back(make_check("k_tilde_laplace_" + tag,
                                       std::abs(e.value - quad.value) <= config.sigmas * e.std_error + config.quadrature_margin,
                                       {{"empirical", e.value},
                                        {"stderr", e.std_error},
                                        {"reference", quad.value},
                                        {"z", (e.value - quad.value) / e.std_error},
                                        {"window_index", static_cast<double>(m)}}));
  }

  // Height marginals at n and 4n, continuity corrected by U(0,1).
  Stream hs = base.split("height");
  auto height_samples = [&](std::int64_t n, std::uint64_t seed_index) {
    const DegreeModel model = make_degree_model(config.alpha, config.kmin, config.height_lambda, n);
    const std::int64_t m = model.window_index(config.t);
    const double scale = model.height_scale();
    std::vector<double> out(static_cast<std::size_t>(config.height_replicas));
    Stream s = hs.split(seed_index).split(static_cast<std::uint64_t>(n));
    parallel_for(out.size(), config.threads, [&](std::size_t r) {
      Stream rng = s.split(static_cast<std::uint64_t>(r));
      const auto prefix = size_biased_prefix(model, m + 1, rng);
      std::vector<std::int64_t> steps(prefix.size());
      for (std::size_t i = 0; i < prefix.size(); ++i) steps[i] = prefix[i] - 2;
      const HeightSeq h = height_process(Path::from_steps(steps));
      out[r] = scale * (static_cast<double>(h[static_cast<std::size_t>(m)]) + rng.uniform());
    });
    return out;
  };
  for (auto n : config.height_ns) {
    std::vector<double> distances;
    std::vector<Metric> metrics;
    for (std::int64_t seed_index = 0; seed_index < config.height_seeds; ++seed_index) {
      const auto idx = static_cast<std::uint64_t>(seed_index);
      const KsResult ks = ks_two_sample(EmpiricalDist(height_samples(n, idx)), EmpiricalDist(height_samples(4 * n, idx)));
      distances.push_back(ks.distance);
      metrics.push_back({"ks_seed" + std::to_string(seed_index), ks.distance});
    }
    const double med = median(distances);
    metrics.insert(metrics.begin(), Metric{"median_ks", med});
    report.checks.push_back(make_check("height_stability_n=" + std::to_string(n), med < config.height_threshold,
                                       std::move(metrics)));
  }
  return report;
}

namespace {

struct MatchingOutcome {
  std::int64_t components;
  std::int64_t surplus;
  bool operator<(const MatchingOutcome& o) const {
    return components != o.components ? components < o.components : surplus < o.surplus;
  }
};

// Enumerates all perfect matchings of the half-edges and tallies (components, surplus).
std::map<MatchingOutcome, double> enumerate_matchings(const std::vector<std::int64_t>& degrees) {
  std::vector<std::int64_t> owner;
  for (std::size_t v = 0; v < degrees.size(); ++v) {
    for (std::int64_t i = 0; i < degrees[v]; ++i) owner.push_back(static_cast<std::int64_t>(v));
  }
  std::map<MatchingOutcome, double> counts;
  std::vector<bool> used(owner.size(), false);
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  double total = 0.0;
  std::function<void()> rec = [&]() {
    std::size_t first = 0;
    while (first < used.size() && used[first]) ++first;
    if (first == used.size()) {
      std::vector<std::int64_t> parent(degrees.size());
      std::iota(parent.begin(), parent.end(), 0);
      std::function<std::int64_t(std::int64_t)> find = [&](std::int64_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
      };
      for (auto [a, b] : edges) parent[find(a)] = find(b);
      std::int64_t comps = 0;
      for (std::size_t v = 0; v < degrees.size(); ++v) {
        if (degrees[v] > 0 && find(static_cast<std::int64_t>(v)) == static_cast<std::int64_t>(v)) ++comps;
      }
      std::int64_t active = 0;
      for (auto d : degrees) active += d > 0;
      const auto surplus = static_cast<std::int64_t>(edges.size()) - (active - comps);
      counts[{comps, surplus}] += 1.0;
      total += 1.0;
      return;
    }
    used[first] = true;
    for (std::size_t j = first + 1; j < used.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      edges.emplace_back(owner[first], owner[j]);
      rec();
      edges.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec();
  for (auto& [k, v] : counts) v /= total;
  return counts;
}

}  // namespace

Report experiment_cm_explore(const ExploreConfig& config) {
  Report report{"cm-explore", config.seed, {}, {}};
  Stream base = make_stream(config.seed, "cm_explore");

  {
    const std::vector<std::int64_t> degrees{3, 2, 1};
    std::map<std::vector<std::size_t>, std::int64_t> freq;
    Stream rng = base.split("order");
    for (std::int64_t r = 0; r < config.order_draws; ++r) ++freq[size_biased_order(degrees, rng)];
    std::vector<std::size_t> perm{0, 1, 2};
    const double draws = static_cast<double>(config.order_draws);
    do {
      double p = 1.0, rest = 6.0;
      for (auto v : perm) {
        p *= static_cast<double>(degrees[v]) / rest;
        rest -= static_cast<double>(degrees[v]);
      }
      const double observed = static_cast<double>(freq[perm]) / draws;
      const double z = std::abs(observed - p) / std::sqrt(p * (1.0 - p) / draws);
      const std::string name = "size_biased_order_" + std::to_string(perm[0]) + std::to_string(perm[1]) + std::to_string(perm[2]);
      report.checks.push_back(make_check(name, z <= config.sigmas, {{"expected", p}, {"observed", observed}, {"z", z}}));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  {
    const std::vector<std::int64_t> degrees{2, 2};
    const auto exact = enumerate_matchings(degrees);
    std::map<MatchingOutcome, std::int64_t> seen;
    Stream rng = base.split("surplus");
    for (std::int64_t r = 0; r < config.surplus_runs; ++r) {
      const ExplorationRecord rec = explore(degrees, rng);
      std::int64_t surplus = 0;
      for (auto s : rec.surplus_counts) surplus += s;
      ++seen[{static_cast<std::int64_t>(rec.component_spans.size()), surplus}];
    }
    const double runs = static_cast<double>(config.surplus_runs);
    bool ok = true;
    std::vector<Metric> metrics;
    for (const auto& [outcome, count] : seen) {
      if (!exact.count(outcome)) ok = false;
    }
    for (const auto& [outcome, p] : exact) {
      const double observed = static_cast<double>(seen[outcome]) / runs;
      const double z = std::abs(observed - p) / std::sqrt(p * (1.0 - p) / runs);
      if (z > config.sigmas) ok = false;
      const std::string key = "components" + std::to_string(outcome.components) + "_surplus" + std::to_string(outcome.surplus);
      metrics.push_back({key + "_expected", p});
      metrics.push_back({key + "_observed", observed});
    }
    report.checks.push_back(make_check("surplus_distribution_22", ok, std::move(metrics)));
  }

  {
    const DegreeModel model = make_degree_model(config.alpha, config.kmin, config.lambda, config.n);
    std::vector<int> degree_ok(static_cast<std::size_t>(config.runs)), size_ok(degree_ok.size()),
        path_ok(degree_ok.size());
    std::vector<double> components(degree_ok.size()), largest(degree_ok.size());
    Stream es = base.split("runs");
    parallel_for(degree_ok.size(), config.threads, [&](std::size_t r) {
      Stream rng = es.split(static_cast<std::uint64_t>(r));
      auto degrees = sample_degrees(model, rng);
      const ExplorationRecord rec = explore(degrees, rng);
      auto consumed = rec.ordered_degrees;
      auto input = degrees;
      std::sort(consumed.begin(), consumed.end());
      std::sort(input.begin(), input.end());
      const std::int64_t total = std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0});
      degree_ok[r] = consumed == input && rec.half_edges_paired == total;
      std::int64_t sizes = 0;
      for (auto [a, b] : rec.component_spans) sizes += static_cast<std::int64_t>(b - a);
      size_ok[r] = sizes == model.n;
      std::int64_t s = 0;
      bool ok = true;
      std::size_t j = 0;
      for (auto d : rec.ordered_degrees) {
        if (d == 0) continue;
        s += d - 2;
        ++j;
        if (j >= rec.path.size() || rec.path[j] != s) ok = false;
      }
      path_ok[r] = ok && j + 1 == rec.path.size();
      const auto summary = component_summaries(rec);
      components[r] = static_cast<double>(summary.size());
      largest[r] = summary.empty() ? 0.0 : static_cast<double>(summary.front().size);
    });
    const auto count_ok = [](const std::vector<int>& v) { return std::count(v.begin(), v.end(), 1); };
    const double runs = static_cast<double>(config.runs);
    report.checks.push_back(make_check("degree_preservation", count_ok(degree_ok) == config.runs,
                                       {{"runs", runs}, {"passing", static_cast<double>(count_ok(degree_ok))}}));
    report.checks.push_back(make_check("component_sizes_sum_to_n", count_ok(size_ok) == config.runs,
                                       {{"runs", runs}, {"passing", static_cast<double>(count_ok(size_ok))}}));
    report.checks.push_back(make_check("path_matches_ordered_degrees", count_ok(path_ok) == config.runs,
                                       {{"runs", runs}, {"passing", static_cast<double>(count_ok(path_ok))}}));
    report.checks.push_back(info_check("component_statistics", true,
                                       {{"mean_components", std::accumulate(components.begin(), components.end(), 0.0) / runs},
                                        {"median_largest", median(largest)}}));
  }
  return report;
}

Report experiment_phi(const PhiConfig& config) {
  Report report{"phi-check", config.seed, {}, {}};
  Stream base = make_stream(config.seed, "phi_check");
  for (double lambda : config.lambdas) {
    const DegreeModel model = make_degree_model(config.alpha, config.kmin, lambda, config.n);
    const std::int64_t m = model.window_index(config.t);
    const std::string tag = "lambda=" + fmt(lambda);
    std::vector<double> phi(static_cast<std::size_t>(config.outer)), ratio(phi.size()), phi_se(phi.size());
    Stream os = base.split(tag);
    const MeasureChange change(model, m);
    parallel_for(phi.size(), config.threads, [&](std::size_t o) {
      Stream rng = os.split(static_cast<std::uint64_t>(o));
      std::vector<std::int64_t> prefix(static_cast<std::size_t>(m));
      for (auto& z : prefix) z = sample_size_biased_child(model, rng);
      std::vector<std::int64_t> steps(prefix.size());
      for (std::size_t i = 0; i < prefix.size(); ++i) steps[i] = prefix[i] - 2;
      Stream inner = rng.split("inner");
      const Estimate e = change.estimate(prefix, config.inner, inner);
      phi[o] = e.value;
      phi_se[o] = e.std_error;
      ratio[o] = e.value / measure_change_lower_bound(Path::from_steps(steps), model, config.t);
    });
    const double n = static_cast<double>(phi.size());
    const double mean = std::accumulate(phi.begin(), phi.end(), 0.0) / n;
    double var = 0.0;
    for (double v : phi) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (n - 1.0) / n);
    report.checks.push_back(make_check("phi_mean_" + tag, std::abs(mean - 1.0) <= config.sigmas * se,
                                       {{"mean", mean}, {"stderr", se}, {"z", (mean - 1.0) / se},
                                        {"window_index", static_cast<double>(m)}}));
    const double worst = *std::min_element(ratio.begin(), ratio.end());
    const auto below = std::count_if(ratio.begin(), ratio.end(), [&](double r) { return r < config.slack; });
    report.checks.push_back(make_check("phi_lower_bound_" + tag, below == 0,
                                       {{"min_ratio", worst},
                                        {"prefixes_below", static_cast<double>(below)},
                                        {"prefixes", n},
                                        {"slack", config.slack},
                                        {"max_inner_stderr", *std::max_element(phi_se.begin(), phi_se.end())}}));
  }
  return report;
}

Report experiment_cm4(const Cm4Config& config) {
  Report report{"cm4-check", 0, {}, {}};
  const DegreeModel model = make_degree_model(config.alpha, config.kmin, config.lambda, config.ns.front());
  const auto rows = cm4_pgf_iteration(model, config.delta, config.ns);
  std::vector<Metric> metrics;
  bool ok = true;
  Series sr{"cm4_values", "n", "value", {}, {}};
  for (const auto& r : rows) {
    metrics.push_back({"value_n=" + std::to_string(r.n), r.value});
    metrics.push_back({"iterations_n=" + std::to_string(r.n), static_cast<double>(r.iterations)});
    if (!(r.value > config.threshold)) ok = false;
    sr.x.push_back(static_cast<double>(r.n));
    sr.y.push_back(r.value);
  }
  report.checks.push_back(make_check("cm4_bounded_away_from_zero", ok, std::move(metrics),
                                     "finite-n heuristic for an asymptotic liminf condition"));
  report.series.push_back(std::move(sr));
  return report;
}

}  // namespace gwpath
