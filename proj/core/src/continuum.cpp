#include "gwpath/continuum.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "gwpath/errors.hpp"

namespace gwpath {

namespace {

constexpr double kInnerTolerance = 1e-10;
constexpr double kOuterTolerance = 1e-8;
constexpr int kSeriesTerms = 40;

// ∫_0^∞ x^-(alpha+1) e^{-a x} (e^{-theta x} - 1 + theta x) dx.
double inner_integral(double alpha, double a, double theta, double& error) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double x) {
    return std::pow(x, -(alpha + 1.0)) * std::exp(-a * x) * (std::expm1(-theta * x) + theta * x);
  };
  const double xs = std::min(0.5, 0.25 / (a + theta));
  // Series part: coefficients of e^{-a x}(e^{-theta x} - 1 + theta x).
  double series = 0.0;
  std::vector<double> ga(kSeriesTerms + 1), gt(kSeriesTerms + 1);
  ga[0] = gt[0] = 1.0;
  for (int m = 1; m <= kSeriesTerms; ++m) {
    ga[m] = ga[m - 1] * (-a) / m;
    gt[m] = gt[m - 1] * (-theta) / m;
  }
  for (int m = 2; m <= kSeriesTerms; ++m) {
    double c = 0.0;
    for (int i = 2; i <= m; ++i) c += gt[i] * ga[m - i];
    series += c * std::pow(xs, m - alpha) / (m - alpha);
  }
  double e1 = 0.0, e2 = 0.0;
  const double mid = xs < 1.0 ? gauss_kronrod<double, 31>::integrate(f, xs, 1.0, 15, kInnerTolerance, &e1) : 0.0;
  exp_sinh<double> tail_rule;
  const double lo = std::max(1.0, xs);
  const double tail = tail_rule.integrate(f, lo, std::numeric_limits<double>::infinity(), kInnerTolerance, &e2);
  const double value = series + mid + tail;
  error = std::abs(e1 * mid) + std::abs(e2 * tail);
  return value;
}

}  // namespace

double StableRef::c_alpha() const { return tail_c * std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0)); }

StableRef stable_ref_from_ratio(double alpha, double ratio, double lambda_drift, double mu) {
  StableRef r{alpha, 1.0, mu, lambda_drift};
  r.tail_c = ratio * mu / r.c_alpha();
  return r;
}

double laplace_exponent(const StableRef& ref, double theta) {
  if (!(theta >= 0.0)) throw DomainError("laplace_exponent needs theta >= 0");
  return ref.c_alpha() / ref.mu * std::pow(theta, ref.alpha) - ref.lambda_drift * theta;
}

double continuum_xi(const StableRef& ref) {
  if (!(ref.lambda_drift > 0.0)) throw NotSupercritical("lambda_drift must be positive");
  return std::pow(ref.lambda_drift * ref.mu / ref.c_alpha(), 1.0 / (ref.alpha - 1.0));
}

double tilted_exponent(const StableRef& ref, double theta) { return laplace_exponent(ref, theta + continuum_xi(ref)); }

double dq_levy_density(const StableRef& ref, double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw DomainError("dq_levy_density needs x, y > 0");
  if (x >= y) return 0.0;
  const double xi = ref.lambda_drift > 0.0 ? continuum_xi(ref) : 0.0;
  return std::exp(-xi * x) * ref.tail_c / ref.mu * std::pow(y, -(ref.alpha + 1.0));
}

std::pair<double, double> dq_drift(const StableRef&) { return {0.0, 0.0}; }

QuadratureResult k_tilde_laplace(const StableRef& ref, double theta, double t) {
  if (!(theta >= 0.0 && t >= 0.0)) throw DomainError("k_tilde_laplace needs theta, t >= 0");
  if (theta == 0.0 || t == 0.0) return {1.0, 0.0};
  const double alpha = ref.alpha, mu = ref.mu, cm = ref.tail_c / mu;
  double inner_error = 0.0;
  auto outer = [&](double s) {
    double e = 0.0;
    const double v = cm * inner_integral(alpha, s / mu, theta, e);
    inner_error = std::max(inner_error, cm * e);
    return v;
  };
  boost::math::quadrature::tanh_sinh<double> rule;
  double outer_error = 0.0, l1 = 0.0;
  const double integral = rule.integrate(outer, 0.0, t, kOuterTolerance, &outer_error, &l1);
  const double abs_error = outer_error * std::abs(l1) + inner_error * t;
  if (!(abs_error <= kOuterTolerance * std::max(1.0, std::abs(integral))) || !std::isfinite(integral)) {
    throw QuadratureFailure("k_tilde_laplace", abs_error);
  }
  const double exponent =
      -theta * ref.lambda_drift * t + theta * ref.c_alpha() * std::pow(t / mu, alpha) + integral;
  const double value = std::exp(exponent);
  return {value, value * abs_error};
}

std::vector<double> sample_stable_marginal(const StableRef& ref, double t, std::size_t count, Stream& rng) {
  if (!(t > 0.0)) throw DomainError("sample_stable_marginal needs t > 0");
  const double alpha = ref.alpha;
  const double pi = std::numbers::pi;
  const double cos_half = std::cos(pi * alpha / 2.0);
  // Totally skewed standard variable X has E[exp(-theta X)] = exp(-theta^alpha / cos(pi alpha / 2)).
  const double kappa = t * ref.c_alpha() / ref.mu;
  const double scale = std::pow(-kappa * cos_half, 1.0 / alpha);
  const double b = (pi * alpha / 2.0 - pi) / alpha;
  const double s = std::pow(1.0 / std::abs(cos_half), 1.0 / alpha);
  std::vector<double> out(count);
  for (auto& v : out) {
    const double u = pi * (rng.uniform() - 0.5);
    const double w = -std::log(rng.uniform());
    const double x = s * std::sin(alpha * (u + b)) / std::pow(std::cos(u), 1.0 / alpha) *
                     std::pow(std::cos(u - alpha * (u + b)) / w, (1.0 - alpha) / alpha);
    v = scale * x + ref.lambda_drift * t;
  }
  return out;
}

}  // namespace gwpath
