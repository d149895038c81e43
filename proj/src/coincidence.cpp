#include "hdent/coincidence.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hdent/rng.hpp"

namespace hdent {

namespace {

void require_probability_mode(const CoincidenceMatrix& m, const char* who) {
  if (m.mode != MatrixMode::probability) {
    throw std::invalid_argument(std::string(who) + ": requires a probability-mode matrix");
  }
}

}  // namespace

CoincidenceMatrix joint_probability(const SchmidtSpectrum& spectrum,
                                    const Basis& signal, const Basis& idler) {
  const int d = spectrum.dim();
  if (signal.dim() != d || idler.dim() != d) {
    throw std::invalid_argument("joint_probability: basis dimension mismatch");
  }
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(spectrum.amplitudes.data(), d);
  // amplitude(a,a') = sum_j c_j v*_{a,j} w_{a',j}  (conjugate-idler convention)
  const Eigen::MatrixXcd amp =
      signal.vectors.conjugate() * c.asDiagonal() * idler.vectors.transpose();
  CoincidenceMatrix out;
  out.d = d;
  out.mode = MatrixMode::probability;
  out.entries = amp.cwiseAbs2();
  out.entries /= out.entries.sum();
  return out;
}

CoincidenceMatrix add_noise(const CoincidenceMatrix& ideal, double target_q) {
  require_probability_mode(ideal, "add_noise");
  if (!(target_q >= 1.0)) {
    throw std::invalid_argument("add_noise: target_q must be >= 1");
  }
  const int d = ideal.d;
  CoincidenceMatrix out = ideal;
  if (std::isinf(target_q)) return out;
  const double w = (target_q - 1.0) / (target_q - 1.0 + d);
  out.entries = w * ideal.entries.array() + (1.0 - w) / double(d * d);
  return out;
}

CoincidenceMatrix add_noise(const CoincidenceMatrix& ideal, const NoiseParams& params) {
  // Scaling the signal by eta^2 mu(1+mu) d and adding the accidental floor
  // (n + eta mu)^2 to every cell renormalizes to the same mixture as the
  // target-q form at q = quantum_contrast(params).
  return add_noise(ideal, quantum_contrast(params));
}

CoincidenceMatrix sample_counts(const CoincidenceMatrix& probabilities,
                                std::uint64_t total_events, std::uint64_t seed) {
  require_probability_mode(probabilities, "sample_counts");
  const int d = probabilities.d;
  CoincidenceMatrix out = probabilities;
  out.mode = MatrixMode::counts;
  out.entries.setZero(d, d);
  std::mt19937_64 rng(splitmix64(seed));
  // multinomial via sequential conditional binomials, row-major cell order
  long long remaining = (long long)total_events;
  double mass_left = probabilities.entries.sum();
  for (int r = 0; r < d && remaining > 0; ++r) {
    for (int c = 0; c < d && remaining > 0; ++c) {
      const double p = probabilities.entries(r, c);
      if (r == d - 1 && c == d - 1) {
        out.entries(r, c) = double(remaining);
        remaining = 0;
        break;
      }
      double ratio = mass_left > 0.0 ? p / mass_left : 0.0;
      ratio = std::min(1.0, std::max(0.0, ratio));
      std::binomial_distribution<long long> binom(remaining, ratio);
      const long long k = binom(rng);
      out.entries(r, c) = double(k);
      remaining -= k;
      mass_left -= p;
    }
  }
  return out;
}

CoincidenceMatrix normalized(const CoincidenceMatrix& matrix) {
  CoincidenceMatrix out = matrix;
  const double total = matrix.entries.sum();
  if (!(total > 0.0)) {
    throw std::domain_error("normalized: matrix has no mass");
  }
  out.entries /= total;
  out.mode = MatrixMode::probability;
  return out;
}

double estimate_contrast(const CoincidenceMatrix& matrix) {
  const int d = matrix.d;
  if (d < 2) throw std::invalid_argument("estimate_contrast: d must be >= 2");
  if ((matrix.entries.array() < 0.0).any()) {
    throw std::invalid_argument("estimate_contrast: negative entries");
  }
  const double diag = matrix.entries.diagonal().sum();
  const double off = matrix.entries.sum() - diag;
  const double diag_mean = diag / double(d);
  const double off_mean = off / double(d * (d - 1));
  if (off_mean == 0.0) {
    return std::numeric_limits<double>::infinity();  // noiseless signal
  }
  return diag_mean / off_mean;
}

double average_contrast(const ExperimentRecord& record) {
  if (record.matrices.empty()) {
    throw std::invalid_argument("average_contrast: record has no matrices");
  }
  double sum = 0.0;
  for (const auto& m : record.matrices) sum += estimate_contrast(m);
  return sum / double(record.matrices.size());
}

ExperimentRecord simulate_record(const SimulationSpec& spec) {
  if (spec.target_q.has_value() == spec.physical.has_value()) {
    throw std::invalid_argument(
        "simulate_record: set exactly one of target_q and physical params");
  }
  const SchmidtSpectrum spectrum = spec.sigma.has_value()
                                       ? gaussian_spectrum(spec.d, *spec.sigma)
                                       : flat_spectrum(spec.d);
  const MubSet set = mub_set_for(spec.d);
  ExperimentRecord record;
  record.d = spec.d;
  record.complete_mubs = set.complete;
  record.seed = spec.seed;
  record.params.sigma = spec.sigma;
  record.params.target_q = spec.target_q;
  record.params.physical = spec.physical;
  record.params.total_events = spec.total_events;
  record.matrices.reserve(set.count());
  for (int b = 0; b < set.count(); ++b) {
    CoincidenceMatrix m = joint_probability(spectrum, set.bases[b], set.bases[b]);
    m.signal_mub = b;
    m.idler_mub = b;
    m = spec.target_q ? add_noise(m, *spec.target_q) : add_noise(m, *spec.physical);
    if (spec.total_events > 0) {
      m = sample_counts(m, spec.total_events, derive_seed(spec.seed, (std::uint64_t)b));
    }
    record.matrices.push_back(std::move(m));
  }
  return record;
}

double analytic_p_same(const NoiseParams& params) {
  validate(params);
  const double acc = params.n + params.eta * params.mu;
  return params.eta * params.eta * params.mu * (1.0 + params.mu) + acc * acc;
}

double analytic_p_cross(const NoiseParams& params) {
  validate(params);
  const double acc = params.n + params.eta * params.mu;
  return acc * acc;
}

namespace {

struct McBlock {
  std::uint64_t trials = 0;
  // per-window pairing counts and their second moments, exact integers
  unsigned long long same = 0, cross = 0;
  unsigned long long same_sq = 0, cross_sq = 0, same_cross = 0;

  void merge(const McBlock& o) {
    trials += o.trials;
    same += o.same;
    cross += o.cross;
    same_sq += o.same_sq;
    cross_sq += o.cross_sq;
    same_cross += o.same_cross;
  }
};

// Geometric law P(m) = mu^m/(1+mu)^(m+1) by inversion.
inline unsigned sample_pairs(std::mt19937_64& rng, double log_ratio, double mu) {
  if (mu == 0.0) return 0;
  const double u = uniform_open(rng);
  return (unsigned)(std::log(u) / log_ratio);
}

inline unsigned thin(std::mt19937_64& rng, unsigned m, double eta) {
  unsigned clicks = 0;
  for (unsigned i = 0; i < m; ++i) {
    clicks += uniform_open(rng) < eta;
  }
  return clicks;
}

McBlock run_block(const NoiseParams& p, std::uint64_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double log_ratio =
      p.mu > 0.0 ? std::log(p.mu / (1.0 + p.mu)) : -1.0;  // unused when mu = 0
  McBlock block;
  block.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const unsigned m0 = sample_pairs(rng, log_ratio, p.mu);
    const unsigned m1 = sample_pairs(rng, log_ratio, p.mu);
    const unsigned s0 = thin(rng, m0, p.eta);  // signal arm, mode 0
    const unsigned i0 = thin(rng, m0, p.eta);  // idler arm, mode 0
    const unsigned i1 = thin(rng, m1, p.eta);  // idler arm, mode 1
    const unsigned ns = p.n > 0.0 && uniform_open(rng) < p.n;
    const unsigned ni0 = p.n > 0.0 && uniform_open(rng) < p.n;
    const unsigned ni1 = p.n > 0.0 && uniform_open(rng) < p.n;
    const unsigned long long same = (unsigned long long)(s0 + ns) * (i0 + ni0);
    const unsigned long long cross = (unsigned long long)(s0 + ns) * (i1 + ni1);
    block.same += same;
    block.cross += cross;
    block.same_sq += same * same;
    block.cross_sq += cross * cross;
    block.same_cross += same * cross;
  }
  return block;
}

}  // namespace

McEstimate monte_carlo_coincidence(const NoiseParams& params, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers) {
  validate(params);
  if (trials == 0) throw std::invalid_argument("monte_carlo_coincidence: trials must be >= 1");
  // fixed partitioning, independent of worker count
  constexpr std::uint64_t kBlockSize = 1u << 20;
  const std::uint64_t num_blocks = (trials + kBlockSize - 1) / kBlockSize;
  std::vector<McBlock> blocks(num_blocks);
  if (workers == 0) workers = std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, (unsigned)num_blocks));

  auto worker_fn = [&](std::atomic<std::uint64_t>& next) {
    for (std::uint64_t b = next.fetch_add(1); b < num_blocks; b = next.fetch_add(1)) {
      const std::uint64_t lo = b * kBlockSize;
      const std::uint64_t count = std::min(kBlockSize, trials - lo);
      blocks[b] = run_block(params, count, derive_seed(seed, b));
    }
  };
  std::atomic<std::uint64_t> next{0};
  if (workers == 1) {
    worker_fn(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn, std::ref(next));
    for (auto& th : pool) th.join();
  }

  McBlock total;
  for (const auto& b : blocks) total.merge(b);

  McEstimate est;
  est.trials = trials;
  const double n = double(trials);
  est.p_same = double(total.same) / n;
  est.p_cross = double(total.cross) / n;
  const double var_same = double(total.same_sq) / n - est.p_same * est.p_same;
  const double var_cross = double(total.cross_sq) / n - est.p_cross * est.p_cross;
  const double cov = double(total.same_cross) / n - est.p_same * est.p_cross;
  est.se_same = std::sqrt(std::max(0.0, var_same) / n);
  est.se_cross = std::sqrt(std::max(0.0, var_cross) / n);
  if (est.p_cross > 0.0) {
    est.q = est.p_same / est.p_cross;
    const double pc2 = est.p_cross * est.p_cross;
    const double var_q = var_same / pc2 +
                         est.p_same * est.p_same * var_cross / (pc2 * pc2) -
                         2.0 * est.p_same * cov / (pc2 * est.p_cross);
    est.se_q = std::sqrt(std::max(0.0, var_q) / n);
  } else {
    est.q = std::numeric_limits<double>::quiet_NaN();
    est.se_q = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

}  // namespace hdent
