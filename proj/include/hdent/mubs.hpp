#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hdent {

// One measurement basis; rows of `vectors` are the basis vectors.
struct Basis {
  Eigen::MatrixXcd vectors;

  int dim() const { return static_cast<int>(vectors.rows()); }
};

// Ordered set of mutually unbiased bases.
// Ordering contract: bases[0] is computational, bases[1] is Fourier. For
// prime d the remaining bases follow the quadratic-phase construction
// omega^(b j^2 + a j)/sqrt(d) in parameter order b = 1..d-1 (d = 2 uses the
// standard X/Y eigenbases instead, since the quadratic form needs odd d).
// Nothing downstream depends on the order of bases 2..d.
struct MubSet {
  int d = 0;
  std::vector<Basis> bases;
  bool complete = false;  // true iff bases.size() == d+1

  int count() const { return static_cast<int>(bases.size()); }
};

bool is_prime(int d);

Basis computational_basis(int d);

// Entries omega^(jk)/sqrt(d), omega = exp(2 pi i / d).
Basis fourier_basis(int d);

// Full set of d+1 MUBs for prime d; std::domain_error otherwise (only the
// 2-basis subset exists for non-prime d in this toolkit).
MubSet all_mubs(int d);

// {computational, Fourier}, available for every d >= 2; complete is false.
MubSet two_mub_subset(int d);

// all_mubs(d) for prime d, two_mub_subset(d) otherwise.
MubSet mub_set_for(int d);

struct UnbiasednessReport {
  bool ok = false;
  double max_deviation = 0.0;
};

// Checks each basis is unitary and each cross-basis |<a|b>|^2 equals 1/d,
// all within 1e-10; reports the worst deviation seen.
UnbiasednessReport verify_unbiasedness(const MubSet& set);

// Max elementwise deviation of
//   sum_b sum_a |a_b><a_b| (x) |a_b*><a_b*|
// from d |Phi><Phi| + identity, where |Phi> = sum_j |jj>/sqrt(d). This
// operator identity is what makes the all-MUB fidelity formula exact.
// Requires a complete set (std::invalid_argument otherwise).
double mub_projector_sum_check(const MubSet& set);

}  // namespace hdent
