#include <doctest.h>

#include <cmath>
#include <map>

#include "gwpath/errors.hpp"
#include "gwpath/pathwise.hpp"

using namespace gwpath;

TEST_CASE("geometric tree count has tail exp(-xi k)") {
  const TiltRoot root{std::log(3.0)};
  Stream rng = make_stream(1, "g");
  const int draws = 200000;
  int at_least_two = 0;
  for (int i = 0; i < draws; ++i) at_least_two += sample_geometric_tree_count(root, rng) >= 2;
  const double p = 1.0 / 9.0;
  CHECK(std::abs(at_least_two / double(draws) - p) < 4.0 * std::sqrt(p * (1 - p) / draws));
}

TEST_CASE("spine pairs follow the size-biased joint law") {
  // P(N = n, B = b) proportional to p_n exp(-xi b) for 0 <= b < n.
  const auto law = geometric_law(2.0);
  const TiltRoot root = find_xi(*law);
  std::map<std::pair<int, int>, double> expected;
  double z = 0.0;
  for (int n = 1; n < 200; ++n) {
    for (int b = 0; b < n; ++b) {
      const double w = law->pmf(n) * std::exp(-root.xi * b);
      expected[{b, n}] = w;
      z += w;
    }
  }
  std::map<std::pair<int, int>, int> seen;
  Stream rng = make_stream(2, "pairs");
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const SpinePair pr = sample_spine_pair(*law, root, rng);
    REQUIRE(pr.b >= 0);
    REQUIRE(pr.b < pr.n_children);
    ++seen[{static_cast<int>(pr.b), static_cast<int>(pr.n_children)}];
  }
  for (const auto& cell : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}, std::pair{0, 3}, std::pair{2, 4}}) {
    const double p = expected[cell] / z;
    const double observed = seen[cell] / double(draws);
    CHECK(std::abs(observed - p) < 4.0 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST_CASE("binary spine pairs match 3/4 and 1/4") {
  const auto law = binary_law(0.25);
  const TiltRoot root = find_xi(*law);
  Stream rng = make_stream(3, "binary");
  int b0 = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const SpinePair pr = sample_spine_pair(*law, root, rng);
    REQUIRE(pr.n_children == 2);
    b0 += pr.b == 0;
  }
  CHECK(std::abs(b0 / double(draws) - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / draws));
}

TEST_CASE("bundle invariants") {
  for (const auto& law : {LawPtr(binary_law(0.25)), LawPtr(geometric_law(2.0)), LawPtr(std::make_shared<PercolatedLaw>(power_law(1.5, 2), 0.6))}) {
    const PathwiseSampler sampler(law);
    Stream rng = make_stream(4, law->describe());
    for (int rep = 0; rep < 100; ++rep) {
      const PathwiseBundle b = sampler.build(150, rng.split(static_cast<std::uint64_t>(rep)));
      REQUIRE(b.s.size() == 152);
      REQUIRE(b.h.size() == 151);
      REQUIRE(b.s_minus_ffinf.size() >= 151);
      CHECK(height_process(b.s) == b.h);
      for (std::size_t k = 0; k < b.h.size(); ++k) CHECK(b.s_minus_ffinf[k] >= 0);
      CHECK(b.s[0] == 0);
      CHECK(b.q.front() == b.g);
      CHECK(b.d.front() == b.g);
      for (std::size_t l = 1; l < b.q.size(); ++l) {
        CHECK(b.q[l] - b.q[l - 1] == b.pairs[l - 1].n_children);
        CHECK(b.d[l] - b.d[l - 1] == b.pairs[l - 1].b);
      }
    }
  }
}

TEST_CASE("builds are reproducible from a seed") {
  const auto a = build_pathwise(binary_law(0.25), 80, 17);
  const auto b = build_pathwise(binary_law(0.25), 80, 17);
  const auto c = build_pathwise(binary_law(0.25), 80, 18);
  CHECK(a.s.values() == b.s.values());
  CHECK(a.h == b.h);
  CHECK((a.s.values() != c.s.values() || a.g != c.g));
}

TEST_CASE("pathwise errors") {
  CHECK_THROWS_AS(PathwiseSampler(binary_law(0.7)), SubcriticalLaw);
  const PathwiseSampler capped(binary_law(0.25), 50);
  CHECK_THROWS_AS(capped.build(100, make_stream(1, "cap")), HorizonOverflow);
  Stream rng = make_stream(1, "direct");
  const DirectSample d = sample_direct(*binary_law(0.25), 40, rng);
  CHECK(d.s.size() == 42);
  CHECK(d.h == height_process(d.s));
}
