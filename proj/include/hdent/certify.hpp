#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hdent/coincidence.hpp"

namespace hdent {

// Two-MUB fidelity lower bound from the average contrast:
// F >= (q - d + 1)/(q + d - 1). Not clamped; negative values signal a
// vacuous bound.
double fidelity_bound_two_mub(double q, int d);

// Contrast needed to certify k dimensions from two MUBs:
// q > (d-1)(d+k-1)/(d-k+1), strict. Requires 2 <= k <= d.
double required_contrast_two_mub(int k, int d);

// Largest k <= d with q strictly above required_contrast_two_mub(k, d);
// at least 1.
int k_max_two_mub(double q, int d);

// Dimension minimizing the two-MUB contrast requirement for a target k.
struct OptimalOperatingPoint {
  int k = 0;
  int d_opt = 0;
  double q_opt = 0.0;
};
OptimalOperatingPoint optimal_operating_point(int k);

// All-MUB (exact-fidelity) relations.
double fidelity_all_mub_from_contrast(double q, int d);

// Contrast needed for k from all d+1 MUBs: q > k(d-1)/(d-k+1); equals
// d^2 - d at k = d and tends to k as d grows.
double required_contrast_all_mub(int k, int d);

// k = min(d, floor(F d) + 1), floored at 1, with the strict boundary
// convention: F exactly (k-1)/d certifies only k-1 dimensions. Values of
// F d within 1e-6 of an integer are snapped before the test so the
// float data path agrees with the closed forms.
int schmidt_number_from_fidelity(double fidelity, int d);

// Largest k strictly below (d+1)q/(d+q-1), capped at d. Near the
// d -> infinity asymptote, bounds within a relative 1e-5 of the next
// integer certify it (the "at most floor(q) dimensions" limit); exact
// integer bounds stay strict.
int k_max_all_mub(double q, int d);

// Exact fidelity from a complete d+1 MUB record: F = (S - 1)/d with S the
// total correlated-outcome probability mass across the MUBs. Counts-mode
// matrices are normalized first.
double fidelity_exact_from_data(const ExperimentRecord& record);

// Shannon H(X|Y) in bits; rows X (signal), columns Y (idler).
double conditional_entropy(const CoincidenceMatrix& matrix);

// Two-basis entropic steering functional at contrast q:
//   log2(q+d-1) - (q/(q+d-1)) log2 q - (1/2) log2 d,
// negative iff the steering inequality H1 + H2 >= log2 d is violated.
double steering_functional(double q, int d);

// Root q* of steering_functional(., d), bisection to 1e-6.
double steering_threshold(int d);

struct SteeringVerdict {
  bool violated = false;
  double margin_bits = 0.0;  // log2 d - (H1 + H2); positive = violation
};

// Data path: conditional entropies of the two matrices (computational and
// Fourier MUB pair) against log2 d.
SteeringVerdict steering_test_from_data(const CoincidenceMatrix& basis0,
                                        const CoincidenceMatrix& basis1);

// CGLMP functional S_d of the maximally entangled state under the canonical
// four-setting protocol, evaluated through joint_probability. Values are
// memoized (pure in d).
double cglmp_quantum_value(int d);

// S_d attenuated by isotropic noise at contrast q: ((q-1)/(q-1+d)) S_d.
double cglmp_noisy(double q, int d);

enum class CglmpBoundStatus {
  no_violation,          // not even d = 2 violates
  bounded,               // violation up to d_max
  unbounded_within_scan  // still violating at the scan cap
};

struct CglmpDimensionBound {
  CglmpBoundStatus status = CglmpBoundStatus::no_violation;
  int d_max = 0;
};

// Largest d with cglmp_noisy(q, d) > 2, by scan. S_d < 3 rules out
// violation beyond (q-1)/2, so the scan stops there or at scan_cap,
// whichever is smaller. Requires q > 1.
CglmpDimensionBound cglmp_dimension_bound(double q, int scan_cap = 512);

struct CertificationReport {
  int d = 0;
  double average_q = 0.0;
  std::vector<double> per_mub_q;
  double fidelity_lower_bound = 0.0;           // two-MUB path (may be negative)
  std::optional<double> fidelity_exact;        // all-MUB path
  int k_two_mub = 1;
  std::optional<int> k_all_mub;
  int certified_k = 1;
  bool steering_violated = false;
  double steering_margin_bits = 0.0;
  double cglmp_value = 0.0;
  bool cglmp_violated = false;
  std::vector<std::string> methods;
};

// Full analysis of a record: per-MUB and average contrast, both fidelity
// paths, certified k, steering verdict from MUBs 0/1, Q-based CGLMP value.
CertificationReport certify_record(const ExperimentRecord& record);

}  // namespace hdent
