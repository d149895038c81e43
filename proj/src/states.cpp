#include "hdent/states.hpp"

#include <cmath>
#include <stdexcept>

namespace hdent {

namespace {

SchmidtSpectrum normalized_spectrum(std::vector<double> amplitudes) {
  double norm_sq = 0.0;
  for (double c : amplitudes) norm_sq += c * c;
  if (!(norm_sq > 0.0)) {
    throw std::invalid_argument("SchmidtSpectrum: amplitudes must not be all zero");
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& c : amplitudes) c *= inv;
  return SchmidtSpectrum{std::move(amplitudes)};
}

}  // namespace

SchmidtSpectrum flat_spectrum(int d) {
  if (d < 2) throw std::invalid_argument("flat_spectrum: d must be >= 2");
  return SchmidtSpectrum{std::vector<double>(d, 1.0 / std::sqrt(double(d)))};
}

SchmidtSpectrum gaussian_spectrum(int d, double sigma) {
  if (d < 2) throw std::invalid_argument("gaussian_spectrum: d must be >= 2");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_spectrum: sigma must be > 0");
  std::vector<double> c(d);
  const double center = 0.5 * (d - 1);
  for (int j = 0; j < d; ++j) {
    const double x = j - center;
    c[j] = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return normalized_spectrum(std::move(c));
}

SchmidtSpectrum spectrum_from_amplitudes(std::vector<double> amplitudes) {
  if (amplitudes.size() < 2) {
    throw std::invalid_argument("SchmidtSpectrum: need at least 2 amplitudes");
  }
  for (double c : amplitudes) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("SchmidtSpectrum: amplitudes must be finite and >= 0");
    }
  }
  return normalized_spectrum(std::move(amplitudes));
}

double isotropic_fidelity(int d, double p) {
  if (d < 2) throw std::invalid_argument("isotropic_fidelity: d must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("isotropic_fidelity: p must lie in [0,1]");
  }
  return p + (1.0 - p) / (double(d) * double(d));
}

double pair_number_pmf(double mu, int m) {
  if (!(mu >= 0.0)) throw std::invalid_argument("pair_number_pmf: mu must be >= 0");
  if (m < 0) throw std::invalid_argument("pair_number_pmf: m must be >= 0");
  if (mu == 0.0) return m == 0 ? 1.0 : 0.0;
  return std::pow(mu / (1.0 + mu), m) / (1.0 + mu);
}

}  // namespace hdent
