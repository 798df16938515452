#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gwpath/config_model.hpp"
#include "gwpath/errors.hpp"
#include "gwpath/harness.hpp"

using namespace gwpath;

TEST_CASE("critical window percolation") {
  for (double lambda : {-1.0, 0.0, 1.0}) {
    const DegreeModel m = make_degree_model(1.5, 2, lambda, 100000);
    const double eps = std::pow(1e5, -0.2);
    CHECK(m.p == doctest::Approx((1.0 + lambda * eps) / (m.rho() / m.mu() - 1.0)));
    CHECK(m.size_biased_mean() == doctest::Approx(2.0 + lambda * eps).epsilon(1e-9));
    CHECK(m.mu_n() == doctest::Approx(m.p * m.mu()));
    CHECK(m.c_n() == doctest::Approx(m.tail_c() * std::pow(m.p, 2.5)));
  }
  CHECK_THROWS_AS(make_degree_model(1.5, 2, 1e6, 100), InvalidWindow);
  CHECK_THROWS_AS(make_degree_model(1.5, 2, 0.0, 0), InvalidWindow);
}

TEST_CASE("window index at exact powers") {
  CHECK(window_index(1.0, 100000, 1.5) == 1000);
  CHECK(window_index(0.5, 10000, 1.5) == 125);
  CHECK(window_index(0.0, 10000, 1.5) == 0);
  CHECK(window_index(1.0, 1000000, 1.5) == 3981);
}

TEST_CASE("degree sampling keeps an even sum") {
  const DegreeModel m = make_degree_model(1.5, 2, 0.0, 1001);
  Stream rng = make_stream(1, "deg");
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = sample_degrees(m, rng);
    CHECK(d.size() == 1001);
    CHECK(std::accumulate(d.begin(), d.end(), std::int64_t{0}) % 2 == 0);
  }
}

TEST_CASE("size-biased order puts zero degrees last") {
  const std::vector<std::int64_t> degrees{0, 3, 0, 1, 2};
  Stream rng = make_stream(2, "order");
  int first_is_three = 0;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const auto order = size_biased_order(degrees, rng);
    REQUIRE(order.size() == 5);
    CHECK(degrees[order[3]] == 0);
    CHECK(degrees[order[4]] == 0);
    first_is_three += order[0] == 1;
  }
  CHECK(std::abs(first_is_three / double(draws) - 0.5) < 4.0 * std::sqrt(0.25 / draws));
}

TEST_CASE("explore on small instances") {
  Stream rng = make_stream(3, "small");
  {
    const std::vector<std::int64_t> degrees{1, 1};
    const ExplorationRecord rec = explore(degrees, rng);
    CHECK(rec.path.values() == std::vector<std::int64_t>{0, -1, -2});
    REQUIRE(rec.component_spans.size() == 1);
    CHECK(rec.surplus_counts[0] == 0);
    const auto summary = component_summaries(rec);
    CHECK(summary[0].size == 2);
    CHECK(summary[0].max_height == 1);
  }
  {
    const std::vector<std::int64_t> degrees{0, 0, 0};
    const ExplorationRecord rec = explore(degrees, rng);
    CHECK(rec.component_spans.size() == 3);
    CHECK(rec.path.size() == 1);
  }
  {
    const std::vector<std::int64_t> degrees{2, 2, 2};
    const ExplorationRecord rec = explore(degrees, rng);
    CHECK(rec.half_edges_paired == 6);
    std::int64_t surplus = 0;
    for (auto s : rec.surplus_counts) surplus += s;
    std::int64_t edges = 3;
    CHECK(surplus == edges - (3 - static_cast<std::int64_t>(rec.component_spans.size())));
  }
  CHECK_THROWS_AS(explore(std::vector<std::int64_t>{1, 2}, rng), DomainError);
}

TEST_CASE("explore and the class-count sampler give the same prefix law") {
  const DegreeModel m = make_degree_model(1.5, 2, 0.0, 3000);
  const std::int64_t k = m.window_index(1.0);
  Stream rng = make_stream(4, "prefix");
  std::vector<double> a(3000), b(3000);
  for (auto& x : a) {
    const auto rec = explore(sample_degrees(m, rng), rng);
    x = static_cast<double>(rec.path[static_cast<std::size_t>(k)]);
  }
  for (auto& x : b) {
    const auto pre = size_biased_prefix(m, k, rng);
    std::int64_t s = 0;
    for (auto d : pre) s += d - 2;
    x = static_cast<double>(s);
  }
  CHECK(ks_two_sample(EmpiricalDist(a), EmpiricalDist(b)).p_value > 0.001);
}

TEST_CASE("components export one line per component") {
  Stream rng = make_stream(5, "json");
  const auto rec = explore(std::vector<std::int64_t>{1, 1, 0, 2, 2}, rng);
  const auto summary = component_summaries(rec);
  std::int64_t total = 0;
  for (const auto& c : summary) total += c.size;
  CHECK(total == 5);
  CHECK(std::is_sorted(summary.begin(), summary.end(), [](auto& x, auto& y) { return x.size > y.size; }));
  std::ostringstream out;
  write_components_jsonl(out, summary);
  const std::string text = out.str();
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == summary.size());
}

TEST_CASE("lower bound of the measure change") {
  const DegreeModel m = make_degree_model(1.5, 2, 1.0, 10000);
  const std::int64_t k = m.window_index(0.5);
  const Path flat(std::vector<std::int64_t>(static_cast<std::size_t>(k) + 1, 0));
  const double mu = m.mu_n();
  const double expected = std::exp(-m.c_alpha_n() * std::pow(0.5, 2.5) / (2.5 * std::pow(mu, 2.5)) + 0.25 / (2.0 * mu));
  CHECK(measure_change_lower_bound(flat, m, 0.5) == doctest::Approx(expected));
  CHECK(measure_change_lower_bound(Path(std::vector<std::int64_t>{0}), m, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(measure_change_lower_bound(Path(std::vector<std::int64_t>{0, 1}), m, 0.5), PrefixTooShort);
}

TEST_CASE("tilted measure-change estimator agrees with the plain one") {
  const DegreeModel m = make_degree_model(1.5, 2, 0.0, 400);
  const std::int64_t k = 12;
  Stream rng = make_stream(6, "phi");
  std::vector<std::int64_t> prefix(static_cast<std::size_t>(k));
  for (auto& z : prefix) z = sample_size_biased_child(m, rng);
  double log_c = 0.0;
  for (std::int64_t i = 0; i < k; ++i) log_c += std::log((m.n - i) * m.mu_n());
  double s1 = 0.0, s2 = 0.0;
  const int reps = 200000;
  for (int r = 0; r < reps; ++r) {
    const double xi = static_cast<double>(m.percolated->sample_sum(m.n - k, rng));
    double lv = log_c, acc = 0.0;
    for (std::size_t i = prefix.size(); i-- > 0;) {
      acc += static_cast<double>(prefix[i]);
      lv -= std::log(acc + xi);
    }
    const double v = std::exp(lv);
    s1 += v;
    s2 += v * v;
  }
  const double plain = s1 / reps, plain_se = std::sqrt((s2 / reps - plain * plain) / reps);
  const Estimate tilted = phi_exact_mc(prefix, m, 20000, rng);
  CHECK(std::abs(plain - tilted.value) < 4.0 * std::hypot(plain_se, tilted.std_error));
}

TEST_CASE("measure change has mean one") {
  const DegreeModel m = make_degree_model(1.5, 2, 0.0, 500);
  const std::int64_t k = 10;
  const MeasureChange change(m, k);
  Stream rng = make_stream(7, "mean");
  double s1 = 0.0, s2 = 0.0;
  const int outer = 20000;
  for (int o = 0; o < outer; ++o) {
    std::vector<std::int64_t> prefix(static_cast<std::size_t>(k));
    for (auto& z : prefix) z = sample_size_biased_child(m, rng);
    const double v = change.estimate(prefix, 10, rng).value;
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / outer, se = std::sqrt((s2 / outer - mean * mean) / outer);
  CHECK(std::abs(mean - 1.0) < 4.0 * se);
}

TEST_CASE("pgf iteration rows") {
  const DegreeModel m = make_degree_model(1.5, 2, 0.0, 1000);
  const std::vector<std::int64_t> ns{1000, 100000};
  const auto rows = cm4_pgf_iteration(m, 1.0, ns);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].iterations == 3);
  CHECK(rows[1].iterations == 10);
  CHECK(rows[1].power == static_cast<std::int64_t>(std::floor(std::pow(1e5, 0.4) + 1e-9)));
  for (const auto& r : rows) {
    CHECK(r.iterate > 0.0);
    CHECK(r.iterate <= 1.0);
    CHECK(r.value == doctest::Approx(std::pow(r.iterate, static_cast<double>(r.power))));
  }
}

TEST_CASE("percolated second moment sits in the critical window") {
  const DegreeModel m = make_degree_model(1.5, 2, 1.0, 100000);
  Stream rng = make_stream(8, "cm2");
  const int draws = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto b = static_cast<double>(m.percolated->sample(rng));
    s1 += b * b;
    s2 += b * b * b * b;
  }
  const double mean = s1 / draws, se = std::sqrt((s2 / draws - mean * mean) / draws);
  const double target = (2.0 + std::pow(1e5, -0.2)) * m.mu_n();
  CHECK(std::abs(mean - target) < 3.0 * se);
  CHECK(m.percolated->second_moment() == doctest::Approx(target).epsilon(1e-9));
}

TEST_CASE("pgf iteration degenerate cases") {
  const DegreeModel m = make_degree_model(1.5, 2, 0.0, 1000);
  const std::vector<std::int64_t> ns{1000};
  CHECK(cm4_pgf_iteration(m, 0.0, ns)[0].value == 0.0);
  // One iteration from zero gives g(0) = P(B~ = 1) / (1 - p) at y = 1 - p.
  const double delta = 1.0 / std::pow(1000.0, 0.2);
  const auto row = cm4_pgf_iteration(m, delta * 1.0000001, ns)[0];
  REQUIRE(row.iterations == 1);
  const double y = 1.0 - m.p;
  CHECK(row.iterate == doctest::Approx(m.base_size_biased->pgf(y) / y).epsilon(1e-12));
}
