#include <doctest.h>

#include <cmath>
#include <vector>

#include "gwpath/continuum.hpp"
#include "gwpath/errors.hpp"
#include "gwpath/harness.hpp"

using namespace gwpath;

namespace {

// int_0^inf (e^{-theta x} - 1 + theta x) c x^{-alpha-1} dx by trapezoid in log x.
double levy_integral(double c, double alpha, double theta) {
  double sum = 0.0;
  const double h = 0.01;
  for (int i = 0; i <= 40000; ++i) {
    const double x = std::exp(-200.0 + i * h);
    const double y = theta * x;
    const double g = y < 1e-3 ? y * y * (0.5 - y / 6.0 + y * y / 24.0) : std::expm1(-y) + y;
    sum += x * c * std::pow(x, -alpha - 1.0) * g;
  }
  return sum * h;
}

// Closed form of the double integral when the Levy measure is a pure power.
double k_tilde_closed(const StableRef& r, double theta, double t) {
  const double u = t / r.mu, ca = r.c_alpha() / r.mu, a1 = r.alpha + 1.0;
  const double log_value =
      -theta * r.lambda_drift * t +
      r.mu * ca / a1 * (std::pow(theta + u, a1) - std::pow(theta, a1) - std::pow(u, a1));
  return std::exp(log_value);
}

}  // namespace

TEST_CASE("laplace exponent matches the Levy-Khintchine integral") {
  for (double alpha : {1.3, 1.5, 1.8}) {
    const StableRef r{alpha, 0.7, 2.0, 0.5};
    for (double theta : {0.25, 1.0, 3.0}) {
      const double integral = levy_integral(r.tail_c / r.mu, alpha, theta);
      CHECK(laplace_exponent(r, theta) == doctest::Approx(integral - r.lambda_drift * theta).epsilon(1e-7));
    }
  }
}

TEST_CASE("continuum root and tilted exponent") {
  const StableRef r = stable_ref_from_ratio(1.5, 2.0, 1.0);
  const double xi = continuum_xi(r);
  CHECK(xi == doctest::Approx(std::pow(1.0 / 2.0, 1.0 / 0.5)));
  CHECK(laplace_exponent(r, xi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tilted_exponent(r, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  const StableRef flat = stable_ref_from_ratio(1.5, 2.0, -1.0);
  CHECK_THROWS_AS(continuum_xi(flat), NotSupercritical);
  CHECK(dq_levy_density(flat, 2.0, 1.0) == 0.0);
  CHECK(dq_levy_density(flat, 1.0, 2.0) == doctest::Approx(flat.tail_c / flat.mu * std::pow(2.0, -2.5)));
  CHECK(dq_drift(r) == std::pair<double, double>{0.0, 0.0});
}

TEST_CASE("k-tilde quadrature matches the closed form") {
  for (double lambda : {-1.0, 0.0, 1.0}) {
    for (double mu : {1.0, 2.6945}) {
      const StableRef r = stable_ref_from_ratio(1.5, 0.9, lambda, mu);
      for (double theta : {0.5, 1.0, 2.0}) {
        for (double t : {0.5, 1.0}) {
          const QuadratureResult q = k_tilde_laplace(r, theta, t);
          CHECK(q.value == doctest::Approx(k_tilde_closed(r, theta, t)).epsilon(1e-8));
        }
      }
    }
  }
  const StableRef r = stable_ref_from_ratio(1.5, 0.9, 1.0);
  CHECK(k_tilde_laplace(r, 0.0, 1.0).value == doctest::Approx(1.0));
}

TEST_CASE("stable sampler reproduces its Laplace transform") {
  const StableRef r = stable_ref_from_ratio(1.5, 1.3, 0.5, 2.0);
  Stream rng = make_stream(21, "stable");
  const EmpiricalDist dist(sample_stable_marginal(r, 1.0, 200000, rng));
  for (double theta : {0.3, 1.0}) {
    const Estimate e = empirical_laplace(dist, theta);
    CHECK(std::abs(e.value - std::exp(laplace_exponent(r, theta))) < 4.0 * e.std_error);
  }
}

TEST_CASE("k-tilde transform is one at zero and log-convex in theta") {
  for (double lambda : {0.0, 1.0}) {
    const StableRef r = stable_ref_from_ratio(1.5, 0.9, lambda, 2.7);
    CHECK(k_tilde_laplace(r, 0.0, 1.0).value == 1.0);
    std::vector<double> logs;
    for (double theta = 0.0; theta <= 4.0; theta += 0.25) logs.push_back(std::log(k_tilde_laplace(r, theta, 1.0).value));
    for (std::size_t i = 1; i + 1 < logs.size(); ++i) CHECK(logs[i - 1] - 2.0 * logs[i] + logs[i + 1] >= -1e-9);
  }
}
