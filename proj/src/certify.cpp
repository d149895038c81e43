#include "hdent/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hdent {

namespace {

// Strictly-below boundary convention with float-noise snapping: bounds
// within kSnapTol of an integer are treated as exactly that integer, and
// exact integers do not certify themselves.
constexpr double kBoundSnapTol = 1e-9;
constexpr double kFidelitySnapTol = 1e-6;
// Relative slack for the d -> infinity all-MUB asymptote, where the bound
// approaches floor-certifying integers from below (deficit q(q-2)/(d+q-1)).
constexpr double kAsymptoteSlack = 1e-5;

void require_q(double q, const char* who) {
  if (!(q >= 1.0)) {
    throw std::invalid_argument(std::string(who) + ": q must be >= 1");
  }
}

void require_d(int d, const char* who) {
  if (d < 2) {
    throw std::invalid_argument(std::string(who) + ": d must be >= 2");
  }
}

// Largest integer strictly below `bound`, after snapping near-integers.
int strictly_below(double bound) {
  const double rounded = std::round(bound);
  if (std::abs(bound - rounded) < kBoundSnapTol) {
    return (int)rounded - 1;
  }
  return (int)std::floor(bound);
}

}  // namespace

double fidelity_bound_two_mub(double q, int d) {
  require_d(d, "fidelity_bound_two_mub");
  require_q(q, "fidelity_bound_two_mub");
  if (std::isinf(q)) return 1.0;
  return (q - d + 1.0) / (q + d - 1.0);
}

double required_contrast_two_mub(int k, int d) {
  if (k < 2) throw std::invalid_argument("required_contrast_two_mub: k must be >= 2");
  if (k > d) {
    throw std::invalid_argument("required_contrast_two_mub: k must not exceed d");
  }
  return double(d - 1) * double(d + k - 1) / double(d - k + 1);
}

int k_max_two_mub(double q, int d) {
  require_d(d, "k_max_two_mub");
  require_q(q, "k_max_two_mub");
  if (std::isinf(q)) return d;
  const double bound = (q * (d + 1) - double(d - 1) * (d - 1)) / (q + d - 1.0);
  return std::clamp(strictly_below(bound), 1, d);
}

OptimalOperatingPoint optimal_operating_point(int k) {
  if (k < 2) throw std::invalid_argument("optimal_operating_point: k must be >= 2");
  // continuous optimum of (d-1)(d+k-1)/(d-k+1) in d
  const double d_star = std::sqrt(2.0) * std::sqrt(double(k) * k - 3.0 * k + 2.0) + k - 1.0;
  OptimalOperatingPoint best{k, 0, 0.0};
  for (long long cand : {(long long)std::floor(d_star) - 1, (long long)std::floor(d_star),
                         (long long)std::ceil(d_star), (long long)std::ceil(d_star) + 1}) {
    const int d = (int)std::max<long long>(cand, std::max(k, 2));
    const double q = required_contrast_two_mub(k, d);
    if (best.d_opt == 0 || q < best.q_opt) {
      best.d_opt = d;
      best.q_opt = q;
    }
  }
  return best;
}

double fidelity_all_mub_from_contrast(double q, int d) {
  require_d(d, "fidelity_all_mub_from_contrast");
  require_q(q, "fidelity_all_mub_from_contrast");
  if (std::isinf(q)) return 1.0;
  return (q + 1.0 / d - 1.0) / (q + d - 1.0);
}

double required_contrast_all_mub(int k, int d) {
  if (k < 2) throw std::invalid_argument("required_contrast_all_mub: k must be >= 2");
  if (k > d) {
    throw std::invalid_argument("required_contrast_all_mub: k must not exceed d");
  }
  return double(k) * double(d - 1) / double(d - k + 1);
}

int schmidt_number_from_fidelity(double fidelity, int d) {
  require_d(d, "schmidt_number_from_fidelity");
  if (!(fidelity >= -1.0 && fidelity <= 1.0)) {
    throw std::invalid_argument("schmidt_number_from_fidelity: F must lie in [-1,1]");
  }
  double x = fidelity * d;
  const double rounded = std::round(x);
  if (std::abs(x - rounded) < kFidelitySnapTol) x = rounded;
  // largest k with k - 1 strictly below x
  const int k = (x == std::floor(x)) ? (int)x : (int)std::floor(x) + 1;
  return std::clamp(k, 1, d);
}

int k_max_all_mub(double q, int d) {
  require_d(d, "k_max_all_mub");
  require_q(q, "k_max_all_mub");
  if (std::isinf(q)) return d;
  const double bound = (d + 1.0) * q / (d + q - 1.0);
  int k = strictly_below(bound);
  // asymptote slack: certify ceil(bound) when the deficit is a relative
  // 1e-5 or less (exact integer bounds were already handled, and stay strict)
  const double up = std::ceil(bound);
  if (k < (int)up && up - bound > kBoundSnapTol && up - bound <= kAsymptoteSlack * up) {
    k = (int)up;
  }
  return std::clamp(k, 1, d);
}

double fidelity_exact_from_data(const ExperimentRecord& record) {
  const int d = record.d;
  require_d(d, "fidelity_exact_from_data");
  if (!record.complete_mubs || (int)record.matrices.size() != d + 1) {
    throw std::invalid_argument(
        "fidelity_exact_from_data: requires a complete d+1 MUB record");
  }
  double s = 0.0;
  for (const auto& m : record.matrices) {
    if (m.d != d) {
      throw std::invalid_argument("fidelity_exact_from_data: matrix dimension mismatch");
    }
    const CoincidenceMatrix p = normalized(m);
    s += p.entries.diagonal().sum();
  }
  return (s - 1.0) / d;
}

double conditional_entropy(const CoincidenceMatrix& matrix) {
  require_d(matrix.d, "conditional_entropy");
  const CoincidenceMatrix p = normalized(matrix);
  double h_joint = 0.0;
  for (int r = 0; r < p.d; ++r) {
    for (int c = 0; c < p.d; ++c) {
      const double v = p.entries(r, c);
      if (v > 0.0) h_joint -= v * std::log2(v);
    }
  }
  double h_idler = 0.0;
  for (int c = 0; c < p.d; ++c) {
    const double v = p.entries.col(c).sum();
    if (v > 0.0) h_idler -= v * std::log2(v);
  }
  return h_joint - h_idler;
}

double steering_functional(double q, int d) {
  require_d(d, "steering_functional");
  require_q(q, "steering_functional");
  const double qd = q + d - 1.0;
  return std::log2(qd) - (q / qd) * std::log2(q) - 0.5 * std::log2(double(d));
}

double steering_threshold(int d) {
  require_d(d, "steering_threshold");
  // f(1) = (1/2) log2 d > 0 and f is strictly decreasing in q; find the
  // sign change by doubling, then bisect.
  double lo = 1.0;
  double hi = 2.0;
  constexpr double kQCap = 1e6;
  while (steering_functional(hi, d) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kQCap) {
      throw std::domain_error("steering_threshold: no sign change below q = 1e6");
    }
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (steering_functional(mid, d) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SteeringVerdict steering_test_from_data(const CoincidenceMatrix& basis0,
                                        const CoincidenceMatrix& basis1) {
  if (basis0.d != basis1.d) {
    throw std::invalid_argument("steering_test_from_data: dimension mismatch");
  }
  const double h_sum = conditional_entropy(basis0) + conditional_entropy(basis1);
  SteeringVerdict verdict;
  verdict.margin_bits = std::log2(double(basis0.d)) - h_sum;
  verdict.violated = verdict.margin_bits > 0.0;
  return verdict;
}

namespace {

// Fourier-type basis with fractional phase offset: rows
// exp(i 2 pi j (k + shift)/d)/sqrt(d). CGLMP's Alice bases use
// shift = alpha_a directly; Bob's vectors exp(i 2 pi j (-l + beta_b)/d)
// are passed pre-conjugated (shift = -beta on index +l) so that
// joint_probability's conjugate-idler convention measures them physically.
Basis shifted_fourier_basis(int d, double shift) {
  Eigen::MatrixXcd v(d, d);
  const double s = 1.0 / std::sqrt(double(d));
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      const double phase = 2.0 * std::numbers::pi * j * (k + shift) / d;
      v(k, j) = s * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return Basis{std::move(v)};
}

// P(A = B + m mod d) from a joint matrix, rows = A outcomes.
double outcome_diff_probability(const CoincidenceMatrix& m, int diff) {
  const int d = m.d;
  const int shift = ((diff % d) + d) % d;
  double p = 0.0;
  for (int l = 0; l < d; ++l) p += m.entries((l + shift) % d, l);
  return p;
}

double cglmp_value_uncached(int d) {
  constexpr double kAlpha[2] = {0.0, 0.5};
  constexpr double kBeta[2] = {0.25, -0.25};
  const SchmidtSpectrum flat = flat_spectrum(d);
  CoincidenceMatrix m[2][2];
  for (int a = 0; a < 2; ++a) {
    const Basis alice = shifted_fourier_basis(d, kAlpha[a]);
    for (int b = 0; b < 2; ++b) {
      const Basis bob_conj = shifted_fourier_basis(d, -kBeta[b]);
      m[a][b] = joint_probability(flat, alice, bob_conj);
    }
  }
  // P(B_b = A_a + x) = P(A_a = B_b - x)
  auto p_ab = [&](int a, int b, int diff) {
    return outcome_diff_probability(m[a][b], diff);
  };
  double s = 0.0;
  for (int k = 0; k < d / 2; ++k) {
    const double w = 1.0 - 2.0 * k / double(d - 1);
    const double plus = p_ab(0, 0, k) + p_ab(1, 0, -(k + 1)) +
                        p_ab(1, 1, k) + p_ab(0, 1, -k);
    const double minus = p_ab(0, 0, -(k + 1)) + p_ab(1, 0, k) +
                         p_ab(1, 1, -(k + 1)) + p_ab(0, 1, k + 1);
    s += w * (plus - minus);
  }
  return s;
}

}  // namespace

double cglmp_quantum_value(int d) {
  require_d(d, "cglmp_quantum_value");
  static std::map<int, double> cache;
  static std::mutex cache_mutex;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(d); it != cache.end()) return it->second;
  }
  const double value = cglmp_value_uncached(d);
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(d, value);
  return value;
}

double cglmp_noisy(double q, int d) {
  require_d(d, "cglmp_noisy");
  require_q(q, "cglmp_noisy");
  const double s = cglmp_quantum_value(d);
  if (std::isinf(q)) return s;
  return (q - 1.0) / (q - 1.0 + d) * s;
}

CglmpDimensionBound cglmp_dimension_bound(double q, int scan_cap) {
  if (scan_cap < 2) throw std::invalid_argument("cglmp_dimension_bound: scan_cap < 2");
  CglmpDimensionBound result;
  if (!(q > 1.0)) return result;  // no violation at any d
  // S_d < 3 makes violation impossible beyond d = (q-1)/2
  int limit = scan_cap;
  if (std::isfinite(q)) {
    limit = (int)std::min<double>(scan_cap, std::floor((q - 1.0) / 2.0) + 2.0);
  }
  int best = 0;
  for (int d = 2; d <= limit; ++d) {
    if (cglmp_noisy(q, d) > 2.0) best = d;
  }
  if (best == 0) return result;  // status no_violation, d_max 0
  result.d_max = best;
  result.status = (best >= scan_cap) ? CglmpBoundStatus::unbounded_within_scan
                                     : CglmpBoundStatus::bounded;
  return result;
}

CertificationReport certify_record(const ExperimentRecord& record) {
  const int d = record.d;
  require_d(d, "certify_record");
  if (record.matrices.empty()) {
    throw std::invalid_argument("certify_record: record has no matrices");
  }
  CertificationReport report;
  report.d = d;
  for (const auto& m : record.matrices) {
    report.per_mub_q.push_back(estimate_contrast(m));
  }
  report.average_q = average_contrast(record);

  report.fidelity_lower_bound = fidelity_bound_two_mub(report.average_q, d);
  report.k_two_mub = k_max_two_mub(report.average_q, d);
  report.certified_k = report.k_two_mub;
  report.methods.push_back("two_mub_fidelity_bound");

  if (record.complete_mubs && (int)record.matrices.size() == d + 1) {
    const double f = fidelity_exact_from_data(record);
    report.fidelity_exact = f;
    const int k = schmidt_number_from_fidelity(std::clamp(f, -1.0, 1.0), d);
    report.k_all_mub = k;
    report.certified_k = std::max(report.certified_k, k);
    report.methods.push_back("all_mub_exact_fidelity");
  }

  if (record.matrices.size() >= 2) {
    const SteeringVerdict verdict =
        steering_test_from_data(record.matrices[0], record.matrices[1]);
    report.steering_violated = verdict.violated;
    report.steering_margin_bits = verdict.margin_bits;
    report.methods.push_back("entropic_steering");
  }

  report.cglmp_value = cglmp_noisy(report.average_q, d);
  report.cglmp_violated = report.cglmp_value > 2.0;
  report.methods.push_back("cglmp_from_average_q");
  return report;
}

}  // namespace hdent
