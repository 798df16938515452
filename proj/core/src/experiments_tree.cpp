#include <algorithm>
#include <cmath>
#include <map>

#include "gwpath/errors.hpp"
#include "gwpath/harness.hpp"
#include "gwpath/pathwise.hpp"

namespace gwpath {

namespace {

Check make_check(std::string name, bool pass, std::vector<Metric> metrics, std::string note = {}) {
  return Check{std::move(name), pass, true, std::move(metrics), std::move(note)};
}

std::vector<double> ecdf_points(const EmpiricalDist& d, std::vector<double>& ys) {
  const auto& xs = d.samples();
  std::vector<double> out;
  ys.clear();
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 200);
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    out.push_back(xs[i]);
    ys.push_back(static_cast<double>(i + 1) / static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

Report experiment_height_check(const HeightCheckConfig& config) {
  Report report{"height-check", config.seed, {}, {}};
  Stream base = make_stream(config.seed, "height_check");
  std::int64_t height_mismatch = 0, infimum_mismatch = 0, nonnegative_fail = 0, longest = 0;
  for (std::int64_t r = 0; r < config.paths; ++r) {
    Stream rng = base.split(static_cast<std::uint64_t>(r));
    const auto len = static_cast<std::int64_t>(1 + uniform_index(rng, static_cast<std::uint64_t>(config.max_length)));
    std::vector<std::int64_t> steps(static_cast<std::size_t>(len));
    for (auto& s : steps) s = static_cast<std::int64_t>(uniform_index(rng, 4)) - 1;
    const Path path = Path::from_steps(steps);
    const HeightSeq fast = height_process(path);
    if (fast != height_process_bruteforce(path.values())) ++height_mismatch;
    const Path shifted = future_infimum_transform(path);
    if (height_process(shifted) != fast) ++infimum_mismatch;
    if (std::any_of(shifted.values().begin(), shifted.values().end(), [](auto v) { return v < 0; }) ||
        shifted.values().back() != 0) {
      ++nonnegative_fail;
    }
    longest = std::max(longest, len);
  }
  const double paths = static_cast<double>(config.paths);
  report.checks.push_back(make_check("height_oracle", height_mismatch == 0,
                                     {{"paths", paths}, {"mismatches", static_cast<double>(height_mismatch)},
                                      {"longest_path", static_cast<double>(longest)}}));
  report.checks.push_back(make_check("future_infimum_invariance", infimum_mismatch == 0 && nonnegative_fail == 0,
                                     {{"paths", paths},
                                      {"mismatches", static_cast<double>(infimum_mismatch)},
                                      {"sign_failures", static_cast<double>(nonnegative_fail)}}));
  return report;
}

Report experiment_extinction(const ExtinctionConfig& config) {
  if (!config.law) throw ConfigError("extinction needs a law");
  Report report{"extinction", config.seed, {}, {}};
  const TiltRoot root = find_xi(*config.law);
  const double q = extinction_probability(root);
  std::vector<TreeOutcome> outcomes(static_cast<std::size_t>(config.trees));
  Stream base = make_stream(config.seed, "extinction");
  parallel_for(outcomes.size(), config.threads, [&](std::size_t i) {
    Stream rng = base.split(static_cast<std::uint64_t>(i));
    outcomes[i] = sample_tree_finite(*config.law, rng, config.caps);
  });
  std::int64_t finite = 0, vertex_capped = 0, generation_capped = 0;
  for (const auto& o : outcomes) {
    if (o.finite) ++finite;
    if (o.reason == CensorReason::VertexCap) ++vertex_capped;
    if (o.reason == CensorReason::GenerationCap) ++generation_capped;
  }
  const double trees = static_cast<double>(config.trees);
  const double freq = static_cast<double>(finite) / trees;
  const double sigma = std::sqrt(q * (1.0 - q) / trees);
  report.checks.push_back(make_check("extinction_frequency", std::abs(freq - q) <= 3.0 * sigma,
                                     {{"xi", root.xi},
                                      {"expected", q},
                                      {"observed", freq},
                                      {"sigma", sigma},
                                      {"trees", trees}}));
  const double censoring = static_cast<double>(vertex_capped) / trees;
  report.checks.push_back(make_check(
      "censoring_rate", censoring < config.max_censoring,
      {{"vertex_cap_rate", censoring},
       {"generation_cap_rate", static_cast<double>(generation_capped) / trees},
       {"max_vertices", static_cast<double>(config.caps.max_vertices)},
       {"max_generation", static_cast<double>(config.caps.max_generation)}},
      "trees reaching the generation cap are counted as infinite"));
  return report;
}

namespace {

struct Marginals {
  // [k index][replica]
  std::vector<std::vector<double>> s, h;
};

Marginals collect(std::size_t replicas, std::size_t nk, unsigned threads,
                  const std::function<void(std::size_t, std::vector<double>&, std::vector<double>&)>& draw) {
  Marginals m;
  m.s.assign(nk, std::vector<double>(replicas));
  m.h.assign(nk, std::vector<double>(replicas));
  parallel_for(replicas, threads, [&](std::size_t r) {
    std::vector<double> s(nk), h(nk);
    draw(r, s, h);
    for (std::size_t i = 0; i < nk; ++i) {
      m.s[i][r] = s[i];
      m.h[i][r] = h[i];
    }
  });
  return m;
}

}  // namespace

Report experiment_pathwise_law(const PathwiseLawConfig& config) {
  if (!config.law) throw ConfigError("pathwise-law needs a law");
  if (config.replicas < 20) throw TooFewSamples("pathwise-law needs at least 20 replicas");
  if (config.ks.empty()) throw ConfigError("pathwise-law needs at least one k");
  Report report{"pathwise-law", config.seed, {}, {}};
  const PathwiseSampler sampler(config.law);
  const std::int64_t horizon = *std::max_element(config.ks.begin(), config.ks.end());
  const std::size_t nk = config.ks.size();
  const auto replicas = static_cast<std::size_t>(config.replicas);
  Stream base = make_stream(config.seed, "pathwise_law");

  auto pathwise_draw = [&](Stream stream) {
    return [&, stream](std::size_t r, std::vector<double>& s, std::vector<double>& h) {
      const PathwiseBundle b = sampler.build(horizon, stream.split(static_cast<std::uint64_t>(r)));
      for (std::size_t i = 0; i < nk; ++i) {
        s[i] = static_cast<double>(b.s[config.ks[i]]);
        h[i] = static_cast<double>(b.h[config.ks[i]]);
      }
    };
  };
  auto direct_draw = [&](const OffspringLaw& law, Stream stream) {
    return [&, stream](std::size_t r, std::vector<double>& s, std::vector<double>& h) {
      Stream rng = stream.split(static_cast<std::uint64_t>(r));
      const DirectSample d = sample_direct(law, horizon, rng);
      for (std::size_t i = 0; i < nk; ++i) {
        s[i] = static_cast<double>(d.s[config.ks[i]]);
        h[i] = static_cast<double>(d.h[config.ks[i]]);
      }
    };
  };

  // passes[variable][k]
  std::vector<std::vector<int>> passes(2, std::vector<int>(nk, 0));
  std::vector<std::vector<int>> control_passes(2, std::vector<int>(nk, 0));
  std::vector<std::vector<double>> min_p(2, std::vector<double>(nk, 1.0));
  for (int batch = 0; batch < config.batches; ++batch) {
    Stream bs = base.split("batch").split(static_cast<std::uint64_t>(batch));
    const Marginals built = collect(replicas, nk, config.threads, pathwise_draw(bs.split("pathwise")));
    const Marginals direct = collect(replicas, nk, config.threads, direct_draw(*config.law, bs.split("direct")));
    Marginals control;
    if (config.control_law) {
      control = collect(replicas, nk, config.threads, direct_draw(*config.control_law, bs.split("control")));
    }
    for (std::size_t i = 0; i < nk; ++i) {
      for (int v = 0; v < 2; ++v) {
        const auto& a = v == 0 ? built.s[i] : built.h[i];
        const auto& b = v == 0 ? direct.s[i] : direct.h[i];
        const KsResult ks = ks_two_sample(EmpiricalDist(a), EmpiricalDist(b));
        if (ks.p_value > config.ks_level) ++passes[v][i];
        min_p[v][i] = std::min(min_p[v][i], ks.p_value);
        if (config.control_law) {
          const auto& c = v == 0 ? control.s[i] : control.h[i];
          if (ks_two_sample(EmpiricalDist(a), EmpiricalDist(c)).p_value > config.ks_level) ++control_passes[v][i];
        }
      }
    }
    if (batch == 0) {
      for (int v = 0; v < 2; ++v) {
        Series sr;
        sr.name = std::string(v == 0 ? "S" : "H") + "_k" + std::to_string(config.ks.back()) + "_ecdf_pathwise";
        sr.x_label = v == 0 ? "S(k)" : "H(k)";
        sr.y_label = "ECDF";
        sr.x = ecdf_points(EmpiricalDist(v == 0 ? built.s.back() : built.h.back()), sr.y);
        report.series.push_back(std::move(sr));
      }
    }
  }
  bool control_detected = false;
  for (std::size_t i = 0; i < nk; ++i) {
    for (int v = 0; v < 2; ++v) {
      const std::string name = std::string("law_equality_") + (v == 0 ? "S" : "H") + "_k" + std::to_string(config.ks[i]);
      report.checks.push_back(make_check(name, passes[v][i] >= config.min_batch_passes,
                                         {{"batches_passed", static_cast<double>(passes[v][i])},
                                          {"batches", static_cast<double>(config.batches)},
                                          {"min_p_value", min_p[v][i]}}));
      if (control_passes[v][i] < config.min_batch_passes) control_detected = true;
    }
  }
  if (config.control_law) {
    report.checks.push_back(make_check("negative_control_rejected", control_detected, {},
                                       "pathwise sampler of " + config.law->describe() + " vs direct sampler of " +
                                           config.control_law->describe()));
  }

  // Self-consistency of the construction on separate bundles.
  std::int64_t height_fail = 0, shifted_fail = 0, sign_fail = 0, window_fail = 0, monotone_fail = 0;
  Stream cs = base.split("consistency");
  for (std::int64_t r = 0; r < config.consistency_bundles; ++r) {
    const PathwiseBundle b = sampler.build(horizon, cs.split(static_cast<std::uint64_t>(r)));
    if (height_process(b.s) != b.h) ++height_fail;
    HeightSeq shifted = height_process(b.s_minus_ffinf);
    HeightSeq prefix(b.h.begin(), b.h.begin() + static_cast<std::ptrdiff_t>(shifted.size()));
    if (shifted != prefix) ++shifted_fail;
    if (std::any_of(b.s_minus_ffinf.begin(), b.s_minus_ffinf.end(), [](auto v) { return v < 0; })) ++sign_fail;
    // Future infimum against the right-to-left minimum over the window.
    const std::size_t len = b.s_minus_ffinf.size();
    std::vector<std::int64_t> rl(len);
    for (std::size_t k = len; k-- > 0;) rl[k] = k + 1 == len ? b.s[k] : std::min(rl[k + 1], b.s[k]);
    std::size_t last_zero = 0;
    for (std::size_t k = 0; k < len; ++k) {
      if (b.s_minus_ffinf[k] == 0) last_zero = k;
    }
    bool ok = true;
    for (std::size_t k = 0; k < len; ++k) {
      const std::int64_t ffinf = b.s[k] - b.s_minus_ffinf[k];
      if (ffinf > rl[k] || (k > 0 && ffinf < b.s[k - 1] - b.s_minus_ffinf[k - 1])) ok = false;
      if (k <= last_zero && ffinf != rl[k]) ok = false;
    }
    if (!ok) ++window_fail;
    for (std::size_t k = 1; k < b.f.size(); ++k) {
      if (b.f[k] < b.f[k - 1] || static_cast<std::int64_t>(k) - b.f[k] < static_cast<std::int64_t>(k - 1) - b.f[k - 1] ||
          b.f[k] > static_cast<std::int64_t>(k)) {
        ++monotone_fail;
        break;
      }
    }
    for (std::size_t l = 1; l < b.q.size(); ++l) {
      if (b.q[l] - b.d[l] < static_cast<std::int64_t>(l)) {
        ++monotone_fail;
        break;
      }
    }
  }
  report.checks.push_back(make_check(
      "bundle_consistency", height_fail + shifted_fail + sign_fail + window_fail + monotone_fail == 0,
      {{"bundles", static_cast<double>(config.consistency_bundles)},
       {"height_mismatch", static_cast<double>(height_fail)},
       {"shifted_height_mismatch", static_cast<double>(shifted_fail)},
       {"negative_values", static_cast<double>(sign_fail)},
       {"future_infimum_mismatch", static_cast<double>(window_fail)},
       {"index_invariant_failures", static_cast<double>(monotone_fail)}}));

  // Spine pairs against P(B = k, N = l) = exp(-k xi) P(D = l).
  const TiltRoot root = sampler.root();
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> cells;
  Stream ps = base.split("spine_pairs");
  for (std::int64_t r = 0; r < config.spine_draws; ++r) {
    const SpinePair p = sample_spine_pair(*config.law, root, ps);
    ++cells[{p.b, p.n_children}];
  }
  const double draws = static_cast<double>(config.spine_draws);
  std::int64_t tested = 0, failed = 0;
  double worst = 0.0;
  for (std::int64_t l = 1; l < 4096; ++l) {
    const double pl = config.law->pmf(l);
    if (pl * draws < 25.0 && l > 64) break;
    for (std::int64_t k = 0; k < l; ++k) {
      const double expected = std::exp(-static_cast<double>(k) * root.xi) * pl;
      if (expected * draws < 25.0) continue;
      const auto it = cells.find({k, l});
      const double observed = it == cells.end() ? 0.0 : static_cast<double>(it->second) / draws;
      const double z = std::abs(observed - expected) / std::sqrt(expected * (1.0 - expected) / draws);
      worst = std::max(worst, z);
      ++tested;
      if (z > config.sigmas) ++failed;
      if (l == 2 && k <= 1) {
        report.checks.push_back(make_check("spine_pair_B" + std::to_string(k) + "_N2", z <= config.sigmas,
                                           {{"expected", expected}, {"observed", observed}, {"z", z}}));
      }
    }
  }
  report.checks.push_back(make_check("spine_pair_cells", failed == 0 && tested > 0,
                                     {{"cells_tested", static_cast<double>(tested)},
                                      {"cells_failed", static_cast<double>(failed)},
                                      {"max_abs_z", worst}}));
  return report;
}

}  // namespace gwpath
