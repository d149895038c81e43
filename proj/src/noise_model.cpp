#include "hdent/noise_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hdent {

void validate(const NoiseParams& params) {
  if (!(params.mu >= 0.0) || !std::isfinite(params.mu)) {
    throw std::invalid_argument("NoiseParams: mu must be finite and >= 0, got " +
                                std::to_string(params.mu));
  }
  if (!(params.n >= 0.0 && params.n < 1.0)) {
    throw std::invalid_argument("NoiseParams: n must lie in [0,1), got " +
                                std::to_string(params.n));
  }
  if (!(params.eta > 0.0 && params.eta <= 1.0)) {
    throw std::invalid_argument("NoiseParams: eta must lie in (0,1], got " +
                                std::to_string(params.eta));
  }
}

double quantum_contrast(const NoiseParams& params) {
  validate(params);
  if (params.n == 0.0 && params.mu == 0.0) {
    throw std::domain_error("quantum_contrast: undefined for n = 0 and mu = 0");
  }
  const double r = params.n / params.eta + params.mu;
  return 1.0 + params.mu * (1.0 + params.mu) / (r * r);
}

double optimal_pair_rate(double n, double eta) {
  if (!(n > 0.0) || !(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("optimal_pair_rate: need n > 0 and eta in (0,1]");
  }
  if (eta <= 2.0 * n) {
    throw std::domain_error(
        "optimal_pair_rate: no finite optimum for eta <= 2n (Q -> 2 as mu grows)");
  }
  return n / (eta - 2.0 * n);
}

double max_contrast(double n, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("max_contrast: eta must lie in (0,1]");
  }
  if (!(n > 0.0 && n < eta)) {
    throw std::domain_error("max_contrast: requires 0 < n < eta");
  }
  return 1.0 + eta * eta / (4.0 * n * (eta - n));
}

ContrastOptimum contrast_optimum(double n, double eta) {
  if (!(n > 0.0) || !(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("contrast_optimum: need n > 0 and eta in (0,1]");
  }
  ContrastOptimum opt;
  if (eta <= 2.0 * n) {
    opt.finite = false;
    opt.mu_opt = std::numeric_limits<double>::infinity();
    opt.q_max = 2.0;  // supremum, approached as mu -> infinity
    return opt;
  }
  opt.mu_opt = optimal_pair_rate(n, eta);
  opt.q_max = max_contrast(n, eta);
  return opt;
}

double isotropic_weight(int d, double q) {
  if (d < 2) throw std::invalid_argument("isotropic_weight: d must be >= 2");
  if (!(q >= 1.0)) throw std::invalid_argument("isotropic_weight: q must be >= 1");
  return (q - 1.0) / (q - 1.0 + d);
}

double contrast_from_weight(int d, double p) {
  if (d < 2) throw std::invalid_argument("contrast_from_weight: d must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("contrast_from_weight: p must lie in [0,1]");
  }
  if (p == 1.0) {
    throw std::domain_error("contrast_from_weight: p = 1 gives infinite contrast");
  }
  return 1.0 + p * d / (1.0 - p);
}

}  // namespace hdent
