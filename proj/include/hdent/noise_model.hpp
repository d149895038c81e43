#pragma once

namespace hdent {

// Source/channel/detector parameters for one detection window.
//   mu  - pair-generation probability per mode per window
//   n   - noise-click probability per detector per window (dark counts,
//         background, ... treated as one aggregate probability)
//   eta - end-to-end collection/detection efficiency
struct NoiseParams {
  double mu = 0.0;
  double n = 0.0;
  double eta = 1.0;

  // The closed forms keep their (1+mu) terms, but the single-pair reading
  // of the state degrades once mu is no longer small.
  bool multi_photon_regime() const { return mu >= 0.1; }
};

// Throws std::invalid_argument unless mu >= 0, 0 <= n < 1, 0 < eta <= 1.
void validate(const NoiseParams& params);

// Signal-to-noise ratio of coincidences:
//   Q = 1 + mu(1+mu) / (n/eta + mu)^2.
// Depends on n and eta only through n/eta. Throws std::domain_error for
// the degenerate n = 0, mu = 0 input (no signal, no noise).
double quantum_contrast(const NoiseParams& params);

// Pair rate maximizing Q at fixed n, eta: mu_opt = n / (eta - 2n).
// Throws std::domain_error when eta <= 2n; there Q grows monotonically
// in mu toward its supremum 2 and has no finite optimum.
double optimal_pair_rate(double n, double eta);

// Contrast at the optimal pair rate: Q_max = 1 + eta^2 / (4 n (eta - n)).
// Requires 0 < n < eta (std::domain_error otherwise).
double max_contrast(double n, double eta);

// Non-throwing optimum summary: in the eta <= 2n regime reports the
// supremum q_max = 2 with finite = false instead of failing.
struct ContrastOptimum {
  bool finite = true;
  double mu_opt = 0.0;
  double q_max = 0.0;
};
ContrastOptimum contrast_optimum(double n, double eta);

// Isotropic-state weight reachable at contrast q: p = (q-1)/(q-1+d).
double isotropic_weight(int d, double q);

// Inverse map: q = 1 + p d/(1-p). Throws std::domain_error at p = 1
// (infinite contrast).
double contrast_from_weight(int d, double p);

}  // namespace hdent
