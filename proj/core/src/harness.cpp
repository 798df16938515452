#include "gwpath/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <mutex>
#include <thread>

#include "gwpath/errors.hpp"

namespace gwpath {

void ScalingSpec::validate() const {
  if (!(space_scale > 0.0 && time_scale > 0.0 && height_scale > 0.0)) throw DomainError("scales must be positive");
  for (double t : t_grid) {
    if (scaled_index(*this, t) < 1) throw DomainError("empty window at t = " + std::to_string(t));
  }
}

ScalingSpec critical_window_scaling(std::int64_t n, double alpha, std::vector<double> t_grid) {
  const double nn = static_cast<double>(n);
  ScalingSpec s{n, std::pow(nn, -1.0 / (alpha + 1.0)), std::pow(nn, alpha / (alpha + 1.0)),
                std::pow(nn, -(alpha - 1.0) / (alpha + 1.0)), std::move(t_grid)};
  s.validate();
  return s;
}

std::int64_t scaled_index(const ScalingSpec& spec, double t) {
  if (!(t >= 0.0)) throw DomainError("negative time");
  const double x = t * spec.time_scale;
  return static_cast<std::int64_t>(std::floor(x * (1.0 + 1e-12) + 1e-9));
}

double rescale_at(const Path& path, const ScalingSpec& spec, double t) {
  const std::int64_t k = scaled_index(spec, t);
  if (k >= static_cast<std::int64_t>(path.size())) throw HorizonTooShort("path shorter than index " + std::to_string(k));
  return spec.space_scale * static_cast<double>(path[k]);
}

double rescale_height_at(const HeightSeq& heights, const ScalingSpec& spec, double t) {
  const std::int64_t k = scaled_index(spec, t);
  if (k >= static_cast<std::int64_t>(heights.size())) {
    throw HorizonTooShort("height sequence shorter than index " + std::to_string(k));
  }
  return spec.height_scale * static_cast<double>(heights[k]);
}

EmpiricalDist::EmpiricalDist(std::vector<double> samples) : sorted_(std::move(samples)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // Theta-function form converges fast for small arguments.
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= 20; ++j) {
      const double odd = 2.0 * j - 1.0;
      sum += std::exp(-odd * odd * pi * pi / (8.0 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(const EmpiricalDist& a, const EmpiricalDist& b) {
  if (a.count() < 20 || b.count() < 20) throw TooFewSamples("two-sample KS needs at least 20 samples per side");
  const auto& x = a.samples();
  const auto& y = b.samples();
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double root = std::sqrt(ne);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

Estimate empirical_laplace(const EmpiricalDist& dist, double theta) {
  if (!(theta >= 0.0)) throw DomainError("empirical_laplace needs theta >= 0");
  const auto& xs = dist.samples();
  if (xs.empty()) throw TooFewSamples("empty distribution");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : xs) {
    const double v = std::exp(-theta * x);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  const double var = xs.size() > 1 ? std::max(0.0, (sum_sq - sum * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || !c.gating; });
}

std::string report_to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  j["pass"] = report.pass();
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["gating"] = c.gating;
    auto& metrics = cj["metrics"] = nlohmann::ordered_json::object();
    for (const auto& m : c.metrics) {
      if (std::isfinite(m.value)) {
        metrics[m.key] = m.value;
      } else {
        metrics[m.key] = nullptr;
      }
    }
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  return j.dump(2) + "\n";
}

}  // namespace gwpath
