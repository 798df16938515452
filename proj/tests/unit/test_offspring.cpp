#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gwpath/errors.hpp"
#include "gwpath/offspring.hpp"

using namespace gwpath;

namespace {

// Partial sum plus integral tail, an independent route to zeta(s, a).
double zeta_oracle(double s, double a) {
  const int terms = 200000;
  double sum = 0.0;
  for (int k = terms - 1; k >= 0; --k) sum += std::pow(a + k, -s);
  const double x = a + terms;
  return sum + std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s) + s * std::pow(x, -s - 1.0) / 12.0;
}

double sample_mean(const OffspringLaw& law, int draws, Stream& rng) {
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(law.sample(rng));
  return sum / draws;
}

}  // namespace

TEST_CASE("hurwitz zeta against known values and a partial-sum oracle") {
  const double pi = std::numbers::pi;
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-13));
  CHECK(hurwitz_zeta(4.0, 1.0) == doctest::Approx(std::pow(pi, 4) / 90.0).epsilon(1e-13));
  for (double s : {2.5, 3.5}) {
    for (double a : {1.0, 2.0, 7.0}) CHECK(hurwitz_zeta(s, a) == doctest::Approx(zeta_oracle(s, a)).epsilon(1e-10));
  }
}

TEST_CASE("binary law moments and pgf") {
  const auto law = binary_law(0.25);
  CHECK(law->pmf(0) == doctest::Approx(0.25));
  CHECK(law->pmf(2) == doctest::Approx(0.75));
  CHECK(law->pmf(1) == 0.0);
  CHECK(law->mean() == doctest::Approx(1.5));
  CHECK(law->second_moment() == doctest::Approx(3.0));
  CHECK(law->pgf(0.5) == doctest::Approx(0.25 + 0.75 * 0.25));
  CHECK(law->laplace_step(0.0) == doctest::Approx(1.0));
}

TEST_CASE("geometric law pgf and sampling") {
  const auto law = geometric_law(2.0);
  for (double x : {0.0, 0.3, 0.9}) CHECK(law->pgf(x) == doctest::Approx(1.0 / (1.0 + 2.0 * (1.0 - x))));
  CHECK(law->second_moment() == doctest::Approx(2.0 + 2.0 * 4.0));
  Stream rng = make_stream(3, "geo");
  const int draws = 200000;
  CHECK(std::abs(sample_mean(*law, draws, rng) - 2.0) < 4.0 * std::sqrt(6.0 / draws));
}

TEST_CASE("power law normalisation and moments") {
  const auto law = power_law(1.5, 2);
  const double z = zeta_oracle(3.5, 2.0);
  CHECK(law->pmf(1) == 0.0);
  CHECK(law->pmf(2) == doctest::Approx(std::pow(2.0, -3.5) / z).epsilon(1e-10));
  CHECK(law->mean() == doctest::Approx(zeta_oracle(2.5, 2.0) / z).epsilon(1e-9));
  CHECK(law->second_moment() == doctest::Approx(zeta_oracle(1.5, 2.0) / z).epsilon(1e-8));
  REQUIRE(law->tail().has_value());
  CHECK(law->tail()->c == doctest::Approx(1.0 / z).epsilon(1e-10));
  CHECK(law->table_mass() > 1.0 - 1e-10);
  const auto sb = size_biased_power_law(1.5, 2);
  CHECK(sb->pmf(5) == doctest::Approx(5.0 * law->pmf(5) / law->mean()).epsilon(1e-10));
}

TEST_CASE("conditional tail sampler") {
  const auto law = power_law(1.5, 2);
  Stream rng = make_stream(4, "tail");
  const std::int64_t k = 20;
  double tail_mass = 0.0;
  for (std::int64_t j = 2; j < k; ++j) tail_mass += law->pmf(j);
  tail_mass = 1.0 - tail_mass;
  const int draws = 100000;
  int at_k = 0;
  for (int i = 0; i < draws; ++i) {
    const auto v = law->sample_at_least(k, rng);
    REQUIRE(v >= k);
    at_k += v == k;
  }
  const double expected = law->pmf(k) / tail_mass;
  CHECK(std::abs(at_k / double(draws) - expected) < 4.0 * std::sqrt(expected * (1 - expected) / draws));
  // Beyond the table the exact tail sampler takes over.
  const auto far = static_cast<std::int64_t>(law->table_size()) + 1000;
  CHECK(law->sample_at_least(far, rng) >= far);
}

TEST_CASE("sum sampler agrees with summed draws") {
  const auto law = geometric_law(1.5);
  Stream rng = make_stream(8, "sum");
  const int reps = 20000;
  const std::int64_t count = 300;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double v = static_cast<double>(law->sample_sum(count, rng));
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / reps, var = s2 / reps - mean * mean;
  const double true_var = count * (1.5 + 1.5 * 1.5);
  CHECK(std::abs(mean - count * 1.5) < 4.0 * std::sqrt(true_var / reps));
  CHECK(var == doctest::Approx(true_var).epsilon(0.05));
}

TEST_CASE("percolated law") {
  const auto base = power_law(1.5, 2);
  const PercolatedLaw perc(base, 0.4);
  double total = 0.0;
  for (std::int64_t k = 0; k < 2000; ++k) total += perc.pmf(k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(perc.mean() == doctest::Approx(0.4 * base->mean()));
  CHECK(perc.pgf(0.3) == doctest::Approx(base->pgf(1.0 - 0.4 + 0.4 * 0.3)).epsilon(1e-12));
  // P(B = 0) = E[(1 - p)^D].
  CHECK(perc.pmf(0) == doctest::Approx(base->pgf(0.6)).epsilon(1e-12));
  REQUIRE(perc.tail().has_value());
  CHECK(perc.tail()->c == doctest::Approx(base->tail()->c * std::pow(0.4, 2.5)));
  Stream rng = make_stream(9, "perc");
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += perc.sample(rng) == 0;
  const double p0 = perc.pmf(0);
  CHECK(std::abs(zeros / 1e5 - p0) < 4.0 * std::sqrt(p0 * (1 - p0) / 1e5));
}

TEST_CASE("tilt root closed forms and errors") {
  // p e^{2x} - e^x + (1 - p) = 0 gives e^x = (1 - p) / p.
  for (double p0 : {0.1, 0.25, 0.4}) {
    CHECK(find_xi(*binary_law(p0)).xi == doctest::Approx(std::log((1.0 - p0) / p0)).epsilon(1e-12));
  }
  for (double m : {1.5, 2.0, 5.0}) CHECK(find_xi(*geometric_law(m)).xi == doctest::Approx(std::log(m)).epsilon(1e-12));
  CHECK_THROWS_AS(find_xi(*binary_law(0.6)), SubcriticalLaw);
  // No mass at zero: survival is certain and there is no finite root.
  CHECK_THROWS_AS(find_xi(*power_law(1.5, 1)), NonBracketable);
  CHECK(extinction_probability(TiltRoot{std::log(3.0)}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("tilted law is a subcritical probability law") {
  for (const auto& law : {LawPtr(binary_law(0.25)), LawPtr(geometric_law(2.0)), LawPtr(std::make_shared<PercolatedLaw>(power_law(1.5, 2), 0.6))}) {
    const TiltRoot root = find_xi(*law);
    const auto t = tilt(*law, root);
    double total = 0.0;
    for (std::size_t k = 0; k < t->table_size(); ++k) total += t->pmf(static_cast<std::int64_t>(k));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t->mean() < 1.0);
    CHECK(t->pmf(0) == doctest::Approx(law->pmf(0) * std::exp(root.xi)).epsilon(1e-12));
  }
}

TEST_CASE("finite trees of a subcritical law") {
  // Mean offspring 1/2 gives expected total size 2.
  const auto law = binary_law(0.75);
  Stream rng = make_stream(10, "trees");
  double total = 0.0;
  const int trees = 50000;
  for (int i = 0; i < trees; ++i) {
    const TreeOutcome t = sample_tree_finite(*law, rng, TreeCaps{});
    REQUIRE(t.finite);
    total += static_cast<double>(t.size);
  }
  // Var(size) = sigma^2 / (1 - m)^3 with sigma^2 = 0.75.
  CHECK(std::abs(total / trees - 2.0) < 4.0 * std::sqrt(0.75 / 0.125 / trees));
}

TEST_CASE("censoring is reported") {
  const auto law = binary_law(0.05);
  Stream rng = make_stream(12, "censor");
  int censored = 0;
  for (int i = 0; i < 200; ++i) {
    const TreeOutcome t = sample_tree_finite(*law, rng, TreeCaps{1000, 64});
    if (!t.finite) {
      ++censored;
      CHECK(t.reason != CensorReason::None);
    }
  }
  CHECK(censored > 150);
}

TEST_CASE("invalid pmf is rejected") {
  CHECK_THROWS_AS(TabulatedLaw(std::vector<double>{0.5, 0.2}, "bad"), InvalidLaw);
  CHECK_THROWS_AS(TabulatedLaw(std::vector<double>{1.2, -0.2}, "bad"), InvalidLaw);
}
