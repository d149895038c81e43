#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "hdent/mubs.hpp"
#include "hdent/noise_model.hpp"
#include "hdent/states.hpp"

namespace hdent {

enum class MatrixMode { probability, counts };

// Joint detection statistics for one (signal basis, idler basis) pair.
// Rows index the signal outcome, columns the idler outcome.
struct CoincidenceMatrix {
  int d = 0;
  int signal_mub = 0;
  int idler_mub = 0;
  MatrixMode mode = MatrixMode::probability;
  Eigen::MatrixXd entries;
};

// Born-rule matrix P(a,a') = |sum_j c_j v*_{a,j} u*_{a',j}|^2, normalized.
// The idler is measured in the conjugate of the passed basis (u = w*), so a
// flat spectrum gives perfect correlations delta_{a,a'}/d in every matched
// MUB pair; callers pass the same MubSet basis for both arms.
CoincidenceMatrix joint_probability(const SchmidtSpectrum& spectrum,
                                    const Basis& signal, const Basis& idler);

// Signal term scaled by eta^2 mu(1+mu) d, uniform accidental floor
// (n + eta mu)^2 on every cell, renormalized.
CoincidenceMatrix add_noise(const CoincidenceMatrix& ideal, const NoiseParams& params);

// Direct parameterization by the target contrast: mixes the matrix with the
// uniform one so a flat-state diagonal input attains diag/offdiag = q.
// Equivalent to the physical form with q = quantum_contrast(params).
CoincidenceMatrix add_noise(const CoincidenceMatrix& ideal, double target_q);

// Multinomial draw of total_events over the d^2 cells; counts mode.
CoincidenceMatrix sample_counts(const CoincidenceMatrix& probabilities,
                                std::uint64_t total_events, std::uint64_t seed);

// Counts normalized to probabilities (no-op on probability mode).
CoincidenceMatrix normalized(const CoincidenceMatrix& matrix);

// mean(diagonal) / mean(off-diagonal). Returns +infinity when the
// off-diagonal average is zero (noiseless signal, not an error). Works on
// counts or probabilities; the ratio is insensitive to normalization.
double estimate_contrast(const CoincidenceMatrix& matrix);

// Provenance of a synthetic record.
struct RecordParams {
  std::optional<double> sigma;             // empty = flat spectrum
  std::optional<double> target_q;          // exactly one of target_q/physical set
  std::optional<NoiseParams> physical;
  std::uint64_t total_events = 0;          // 0 = analytic probabilities
};

// One matrix per MUB, matched signal/idler basis index.
struct ExperimentRecord {
  int d = 0;
  bool complete_mubs = false;  // d+1 matrices present
  std::vector<CoincidenceMatrix> matrices;
  std::uint64_t seed = 0;
  RecordParams params;
};

// Arithmetic mean of per-MUB estimate_contrast values.
double average_contrast(const ExperimentRecord& record);

struct SimulationSpec {
  int d = 2;
  std::optional<double> sigma;            // empty = flat spectrum
  std::optional<double> target_q;
  std::optional<NoiseParams> physical;    // used when target_q is empty
  std::uint64_t total_events = 0;         // 0 = keep analytic probabilities
  std::uint64_t seed = 0;
};

// Builds the spectrum, all MUBs (prime d; computational+Fourier otherwise),
// noisy matched-MUB matrices, optional finite-count sampling.
ExperimentRecord simulate_record(const SimulationSpec& spec);

// Monte Carlo estimate of the per-window coincidence rates of the click
// model: pair numbers are drawn from pair_number_pmf per mode, photons
// thinned with probability eta, noise clicks added with probability n per
// detector, and coincidences counted as click pairings (products of the two
// sides' click counts). p_same pairs a mode with itself, p_cross with a
// different mode. Expectations: eta^2 mu(1+mu) + (n+eta mu)^2 and
// (n + eta mu)^2.
struct McEstimate {
  std::uint64_t trials = 0;
  double p_same = 0.0;
  double p_cross = 0.0;
  double se_same = 0.0;   // standard errors of the two rates
  double se_cross = 0.0;
  double q = 0.0;         // p_same / p_cross
  double se_q = 0.0;      // delta-method standard error of q
};

// Deterministic for fixed (trials, seed) independent of `workers`: trials
// are split into fixed blocks with seeds derived per block, merged in block
// order.
McEstimate monte_carlo_coincidence(const NoiseParams& params, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers = 1);

// The closed forms the oracle is validated against.
double analytic_p_same(const NoiseParams& params);
double analytic_p_cross(const NoiseParams& params);

}  // namespace hdent
