#include <doctest.h>

#include <cmath>
#include <vector>

#include "gwpath/rng.hpp"

using namespace gwpath;

TEST_CASE("streams are reproducible and named splits differ") {
  Stream a = make_stream(42, "x"), b = make_stream(42, "x"), c = make_stream(42, "y");
  for (int i = 0; i < 10; ++i) {
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
  }
}

TEST_CASE("uniform index is unbiased") {
  Stream rng = make_stream(1, "index");
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[uniform_index(rng, 7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 4.0 * std::sqrt(10000.0 * 6.0 / 7.0));
}

TEST_CASE("uniform is in the open unit interval with mean one half") {
  Stream rng = make_stream(2, "u");
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100000.0 - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}
