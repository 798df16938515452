#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "gwpath/config_model.hpp"
#include "gwpath/errors.hpp"
#include "gwpath/harness.hpp"
#include "gwpath/pathwise.hpp"
#include "outputs.hpp"
#include "run_config.hpp"

using namespace gwpath;
using namespace gwpath::cli;

namespace {

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2, kConfig = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 0;
  bool json = false;
  std::string law;
};

struct Context {
  const Options& opt;
  RunConfig cfg;
  std::string section;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

Context make_context(const Options& opt, const std::string& section) {
  Context ctx{opt, opt.config.empty() ? RunConfig::parse("", "<defaults>") : RunConfig::load(opt.config), section, 1, 1,
              {}};
  ctx.seed = ctx.cfg.get_u64("run", "seed", 1);
  if (opt.seed) ctx.seed = *opt.seed;
  const auto threads = ctx.cfg.get_int("run", "threads", 0);
  require(threads >= 0, "[run] threads must be nonnegative");
  unsigned t = opt.threads ? opt.threads : static_cast<unsigned>(threads);
  ctx.threads = t ? t : std::max(1u, std::thread::hardware_concurrency());
  std::string out = ctx.cfg.get_string("run", "out", "");
  if (const char* env = std::getenv("GWPATH_OUT"); env && *env) out = env;
  if (!opt.out.empty()) out = opt.out;
  ctx.out = out.empty() ? std::filesystem::path("out") / section : std::filesystem::path(out);
  return ctx;
}

LawPtr law_from(const Context& ctx, const std::string& key, LawPtr fallback) {
  if (key == "law" && !ctx.opt.law.empty()) {
    ctx.cfg.get_law(ctx.section, key, nullptr);
    return parse_law(ctx.opt.law);
  }
  return ctx.cfg.get_law(ctx.section, key, std::move(fallback));
}

std::int64_t positive(const Context& ctx, const std::string& key, std::int64_t fallback) {
  const auto v = ctx.cfg.get_int(ctx.section, key, fallback);
  require(v > 0, "[" + ctx.section + "] " + key + " must be positive");
  return v;
}

double in_range(const Context& ctx, const std::string& key, double fallback, double lo, double hi) {
  const double v = ctx.cfg.get_double(ctx.section, key, fallback);
  require(v >= lo && v <= hi, "[" + ctx.section + "] " + key + " must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
  return v;
}

std::vector<std::int64_t> positive_list(const Context& ctx, const std::string& key, std::vector<std::int64_t> fallback) {
  auto v = ctx.cfg.get_ints(ctx.section, key, fallback);
  for (auto x : v) require(x > 0, "[" + ctx.section + "] " + key + " entries must be positive");
  return v;
}

std::vector<double> real_list(const Context& ctx, const std::string& key, std::vector<double> fallback, double lo,
                              double hi) {
  auto v = ctx.cfg.get_doubles(ctx.section, key, fallback);
  for (double x : v) require(x >= lo && x <= hi, "[" + ctx.section + "] " + key + " entries out of range");
  return v;
}

// Degree-model keys shared by the configuration-model experiments.
void degree_keys(const Context& ctx, double& alpha, std::int64_t& kmin) {
  alpha = in_range(ctx, "alpha", alpha, 1.0 + 1e-9, 2.0 - 1e-9);
  kmin = positive(ctx, "kmin", kmin);
}

int finish(const Context& ctx, const Report& report, const std::function<void(const std::filesystem::path&)>& extra) {
  const auto files = write_report(report, ctx.out);
  if (extra) extra(ctx.out);
  if (ctx.opt.json) {
    std::cout << report_to_json(report) << '\n';
  } else {
    std::cout << summary_text(report);
    std::cout << "outputs written to " << ctx.out.string() << '\n';
  }
  return report.pass() ? kOk : kFailed;
}

void write_path_svg(const std::filesystem::path& file, const std::string& title, const Path& s, const HeightSeq& h) {
  Polyline ps{"S", {}, {}}, ph{"H", {}, {}};
  for (std::size_t i = 0; i < s.size(); ++i) {
    ps.x.push_back(static_cast<double>(i));
    ps.y.push_back(static_cast<double>(s[i]));
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    ph.x.push_back(static_cast<double>(i));
    ph.y.push_back(static_cast<double>(h[i]));
  }
  write_text(file, render_svg(title, "k", "value", {ps, ph}));
}

int run_height_check(const Options& opt) {
  Context ctx = make_context(opt, "height-check");
  HeightCheckConfig c;
  c.paths = positive(ctx, "paths", c.paths);
  c.max_length = positive(ctx, "max_length", c.max_length);
  c.seed = ctx.seed;
  ctx.cfg.reject_unused();
  const Report report = experiment_height_check(c);
  return finish(ctx, report, [&](const std::filesystem::path& dir) {
    Stream rng = make_stream(ctx.seed, "height_check_example");
    std::vector<std::int64_t> steps(static_cast<std::size_t>(c.max_length));
    for (auto& x : steps) x = static_cast<std::int64_t>(uniform_index(rng, 4)) - 1;
    const Path p = Path::from_steps(steps);
    const HeightSeq h = height_process(p);
    std::ofstream csv(dir / "path.csv");
    write_path_csv(csv, p, h);
    write_path_svg(dir / "path.svg", "random skip-free path and its height", p, h);
  });
}

int run_xi(const Options& opt) {
  Context ctx = make_context(opt, "xi");
  const LawPtr law = law_from(ctx, "law", nullptr);
  require(law != nullptr, "xi needs --law or [xi] law");
  ctx.cfg.reject_unused();
  const TiltRoot root = find_xi(*law);
  if (opt.json) {
    std::printf("{\"law\": \"%s\", \"xi\": %.17g, \"extinction_probability\": %.17g}\n", law->describe().c_str(), root.xi,
                extinction_probability(root));
  } else {
    std::printf("xi = %.10f\nextinction probability = %.10f\n", root.xi, extinction_probability(root));
  }
  return kOk;
}

int run_extinction(const Options& opt) {
  Context ctx = make_context(opt, "extinction");
  ExtinctionConfig c;
  c.law = law_from(ctx, "law", binary_law(0.25));
  c.trees = positive(ctx, "trees", c.trees);
  c.caps.max_vertices = positive(ctx, "max_vertices", c.caps.max_vertices);
  c.caps.max_generation = positive(ctx, "max_generation", c.caps.max_generation);
  c.max_censoring = in_range(ctx, "max_censoring", c.max_censoring, 0.0, 1.0);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  ctx.cfg.reject_unused();
  return finish(ctx, experiment_extinction(c), nullptr);
}

int run_pathwise(const Options& opt) {
  Context ctx = make_context(opt, "pathwise-law");
  PathwiseLawConfig c;
  c.law = law_from(ctx, "law", binary_law(0.25));
  c.control_law = law_from(ctx, "control_law", geometric_law(2.0));
  c.ks = positive_list(ctx, "ks", c.ks);
  require(!c.ks.empty(), "[pathwise-law] ks must not be empty");
  c.replicas = positive(ctx, "replicas", c.replicas);
  c.batches = static_cast<int>(positive(ctx, "batches", c.batches));
  c.min_batch_passes = static_cast<int>(positive(ctx, "min_batch_passes", c.min_batch_passes));
  require(c.min_batch_passes <= c.batches, "[pathwise-law] min_batch_passes exceeds batches");
  c.ks_level = in_range(ctx, "ks_level", c.ks_level, 0.0, 1.0);
  c.consistency_bundles = positive(ctx, "consistency_bundles", c.consistency_bundles);
  c.spine_draws = positive(ctx, "spine_draws", c.spine_draws);
  c.sigmas = in_range(ctx, "sigmas", c.sigmas, 0.0, 100.0);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  ctx.cfg.reject_unused();
  const Report report = experiment_pathwise_law(c);
  return finish(ctx, report, [&](const std::filesystem::path& dir) {
    const std::int64_t horizon = *std::max_element(c.ks.begin(), c.ks.end());
    const PathwiseBundle b = build_pathwise(c.law, horizon, ctx.seed);
    std::ofstream csv(dir / "bundle.csv");
    write_bundle_csv(csv, b);
    write_path_svg(dir / "bundle.svg", "pathwise bundle: S and H", b.s, b.h);
  });
}

int run_stable(const Options& opt) {
  Context ctx = make_context(opt, "stable-marginal");
  StableMarginalConfig c;
  degree_keys(ctx, c.alpha, c.kmin);
  c.lambdas = real_list(ctx, "lambdas", c.lambdas, -1e6, 1e6);
  c.n = positive(ctx, "n", c.n);
  c.replicas = positive(ctx, "replicas", c.replicas);
  c.t = in_range(ctx, "t", c.t, 1e-9, 1e6);
  c.thetas = real_list(ctx, "thetas", c.thetas, 0.0, 1e6);
  c.sigmas = in_range(ctx, "sigmas", c.sigmas, 0.0, 100.0);
  c.trend_ns = positive_list(ctx, "trend_ns", c.trend_ns);
  c.trend_replicas = positive(ctx, "trend_replicas", c.trend_replicas);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  ctx.cfg.reject_unused();
  return finish(ctx, experiment_stable_marginal(c), nullptr);
}

int run_explore(const Options& opt) {
  Context ctx = make_context(opt, "cm-explore");
  ExploreConfig c;
  degree_keys(ctx, c.alpha, c.kmin);
  c.lambda = in_range(ctx, "lambda", c.lambda, -1e6, 1e6);
  c.n = positive(ctx, "n", c.n);
  c.runs = positive(ctx, "runs", c.runs);
  c.order_draws = positive(ctx, "order_draws", c.order_draws);
  c.surplus_runs = positive(ctx, "surplus_runs", c.surplus_runs);
  c.sigmas = in_range(ctx, "sigmas", c.sigmas, 0.0, 100.0);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  ctx.cfg.reject_unused();
  const Report report = experiment_cm_explore(c);
  return finish(ctx, report, [&](const std::filesystem::path& dir) {
    const DegreeModel model = make_degree_model(c.alpha, c.kmin, c.lambda, c.n);
    Stream rng = make_stream(ctx.seed, "cm_explore_example");
    const ExplorationRecord rec = explore(sample_degrees(model, rng), rng);
    std::ofstream jsonl(dir / "components.jsonl");
    write_components_jsonl(jsonl, component_summaries(rec));
    const HeightSeq h = height_process(rec.path);
    std::ofstream csv(dir / "path.csv");
    write_path_csv(csv, rec.path, h);
    write_path_svg(dir / "path.svg", "exploration walk S~ and its height", rec.path, h);
  });
}

int run_k_tilde(const Options& opt) {
  Context ctx = make_context(opt, "k-tilde");
  KTildeConfig c;
  degree_keys(ctx, c.alpha, c.kmin);
  c.lambdas = real_list(ctx, "lambdas", c.lambdas, -1e6, 1e6);
  c.n = positive(ctx, "n", c.n);
  c.replicas = positive(ctx, "replicas", c.replicas);
  c.t = in_range(ctx, "t", c.t, 1e-9, 1e6);
  c.theta = in_range(ctx, "theta", c.theta, 0.0, 1e6);
  c.sigmas = in_range(ctx, "sigmas", c.sigmas, 0.0, 100.0);
  c.quadrature_margin = in_range(ctx, "quadrature_margin", c.quadrature_margin, 0.0, 1.0);
  c.oracle_tolerance = in_range(ctx, "oracle_tolerance", c.oracle_tolerance, 0.0, 1.0);
  c.height_lambda = in_range(ctx, "height_lambda", c.height_lambda, -1e6, 1e6);
  c.height_ns = ctx.cfg.get_ints(ctx.section, "height_ns", c.height_ns);
  for (auto n : c.height_ns) require(n > 0, "[k-tilde] height_ns entries must be positive");
  c.height_seeds = positive(ctx, "height_seeds", c.height_seeds);
  c.height_replicas = positive(ctx, "height_replicas", c.height_replicas);
  c.height_threshold = in_range(ctx, "height_threshold", c.height_threshold, 0.0, 1.0);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  ctx.cfg.reject_unused();
  return finish(ctx, experiment_k_tilde(c), nullptr);
}

int run_phi(const Options& opt) {
  Context ctx = make_context(opt, "phi-check");
  PhiConfig c;
  degree_keys(ctx, c.alpha, c.kmin);
  c.lambdas = real_list(ctx, "lambdas", c.lambdas, -1e6, 1e6);
  c.n = positive(ctx, "n", c.n);
  c.t = in_range(ctx, "t", c.t, 0.0, 1e6);
  c.outer = positive(ctx, "outer", c.outer);
  c.inner = positive(ctx, "inner", c.inner);
  c.slack = in_range(ctx, "slack", c.slack, 0.0, 1.0);
  c.sigmas = in_range(ctx, "sigmas", c.sigmas, 0.0, 100.0);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  ctx.cfg.reject_unused();
  return finish(ctx, experiment_phi(c), nullptr);
}

int run_cm4(const Options& opt) {
  Context ctx = make_context(opt, "cm4-check");
  Cm4Config c;
  degree_keys(ctx, c.alpha, c.kmin);
  c.lambda = in_range(ctx, "lambda", c.lambda, -1e6, 1e6);
  c.delta = in_range(ctx, "delta", c.delta, 0.0, 1e6);
  c.ns = positive_list(ctx, "ns", c.ns);
  require(!c.ns.empty(), "[cm4-check] ns must not be empty");
  c.threshold = in_range(ctx, "threshold", c.threshold, 0.0, 1.0);
  ctx.cfg.reject_unused();
  return finish(ctx, experiment_cm4(c), nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galton-Watson path, height and configuration-model experiments"};
  app.require_subcommand(1);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
    bool takes_law;
  };
  const Command commands[] = {
      {"height-check", "O(n) height vs brute force and future-infimum invariance", run_height_check, false},
      {"xi", "tilt root xi and extinction probability of a supercritical law", run_xi, true},
      {"pathwise-law", "pathwise construction vs direct i.i.d. walk", run_pathwise, true},
      {"extinction", "finite-tree frequency vs exp(-xi)", run_extinction, true},
      {"stable-marginal", "rescaled size-biased walk vs drifted stable marginal", run_stable, false},
      {"cm-explore", "configuration-model exploration checks", run_explore, false},
      {"k-tilde", "K~ Laplace transform and height stability", run_k_tilde, false},
      {"cm4-check", "pgf iteration heuristic for the finite-n condition", run_cm4, false},
      {"phi-check", "measure change mean and lower bound", run_phi, false},
  };
  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "config file (sections of key = value)");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    sub->add_flag("--json", opt.json, "print the report as JSON");
    if (c.takes_law) sub->add_option("--law", opt.law, "binary:P0 | geometric:MEAN | power_law:A,KMIN | pmf:P0,P1,...");
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return chosen->run(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return kFailed;
  }
}
