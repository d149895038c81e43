#pragma once

#include <vector>

namespace hdent {

// Normalized Schmidt-mode amplitudes c_j of the two-photon state,
// |psi> = sum_j c_j |j>|j>. Real and nonnegative; any phases are absorbed
// into the basis definitions.
struct SchmidtSpectrum {
  std::vector<double> amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }
};

// c_j = 1/sqrt(d): the maximally entangled state.
SchmidtSpectrum flat_spectrum(int d);

// Gaussian amplitude envelope c_j ~ exp(-x_j^2 / (2 sigma^2)) with offsets
// x_j = j - (d-1)/2 (integers for odd d, half-integers for even d), then
// normalized. sigma is in mode-index units.
SchmidtSpectrum gaussian_spectrum(int d, double sigma);

// Validates (d >= 2, entries >= 0, not all zero) and normalizes.
SchmidtSpectrum spectrum_from_amplitudes(std::vector<double> amplitudes);

// Fidelity of the isotropic state p|Phi><Phi| + (1-p) 1/d^2 to |Phi>:
// F = p + (1-p)/d^2.
double isotropic_fidelity(int d, double p);

// Geometric pair-number law of the per-mode two-mode-squeezed state:
// P(m) = mu^m / (1+mu)^(m+1); mean mu, variance mu(1+mu).
double pair_number_pmf(double mu, int m);

}  // namespace hdent
