#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gwpath/rng.hpp"

namespace gwpath {

// Drifted spectrally positive stable process L_t + lambda t with Lévy density
// (tail_c / mu) x^-(alpha+1); convention E[exp(-theta X_t)] = exp(t phi(theta)).
struct StableRef {
  double alpha = 1.5;
  double tail_c = 1.0;
  double mu = 1.0;
  double lambda_drift = 0.0;

  double c_alpha() const;
};

// StableRef with C_alpha / mu equal to the given ratio (tail_c solved for).
StableRef stable_ref_from_ratio(double alpha, double ratio, double lambda_drift, double mu = 1.0);

double laplace_exponent(const StableRef& ref, double theta);
double continuum_xi(const StableRef& ref);
double tilted_exponent(const StableRef& ref, double theta);

// exp(-xi x) (c/mu) y^-(alpha+1) on {x < y}; xi = 0 when lambda_drift <= 0.
double dq_levy_density(const StableRef& ref, double x, double y);
// Drift vector (b, 2b) with b = 0.
std::pair<double, double> dq_drift(const StableRef& ref);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// E[exp(-theta K~(t))] by adaptive quadrature of the double integral.
QuadratureResult k_tilde_laplace(const StableRef& ref, double theta, double t);

// Samples of L_t + lambda t.
std::vector<double> sample_stable_marginal(const StableRef& ref, double t, std::size_t count, Stream& rng);

}  // namespace gwpath
