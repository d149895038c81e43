#include "hdent/mubs.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hdent {

namespace {

constexpr double kDeviationTol = 1e-10;

using Cx = std::complex<double>;

// omega^e with omega = exp(2 pi i / d), e reduced mod d to keep the
// argument small.
Cx unit_root(int d, long long e) {
  const long long r = ((e % d) + d) % d;
  const double phase = 2.0 * std::numbers::pi * double(r) / double(d);
  return Cx(std::cos(phase), std::sin(phase));
}

void require_dim(int d) {
  if (d < 2) throw std::invalid_argument("mubs: d must be >= 2");
}

}  // namespace

bool is_prime(int d) {
  if (d < 2) return false;
  for (int f = 2; f * f <= d; ++f) {
    if (d % f == 0) return false;
  }
  return true;
}

Basis computational_basis(int d) {
  require_dim(d);
  return Basis{Eigen::MatrixXcd::Identity(d, d)};
}

Basis fourier_basis(int d) {
  require_dim(d);
  Eigen::MatrixXcd v(d, d);
  const double s = 1.0 / std::sqrt(double(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      v(j, k) = s * unit_root(d, (long long)j * k);
    }
  }
  return Basis{std::move(v)};
}

MubSet two_mub_subset(int d) {
  require_dim(d);
  MubSet set;
  set.d = d;
  set.bases.push_back(computational_basis(d));
  set.bases.push_back(fourier_basis(d));
  set.complete = false;
  return set;
}

MubSet all_mubs(int d) {
  require_dim(d);
  if (!is_prime(d)) {
    throw std::domain_error("all_mubs: unsupported dimension " + std::to_string(d) +
                            " (full MUB sets are generated for prime d only; "
                            "use two_mub_subset)");
  }
  MubSet set;
  set.d = d;
  set.bases.reserve(d + 1);
  set.bases.push_back(computational_basis(d));
  if (d == 2) {
    Eigen::MatrixXcd x(2, 2), y(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    x << s, s, s, -s;
    y << s, Cx(0, s), s, Cx(0, -s);
    set.bases.push_back(Basis{std::move(x)});
    set.bases.push_back(Basis{std::move(y)});
  } else {
    // Quadratic-phase family for odd prime d: vector a of basis b has
    // entries omega^(b j^2 + a j)/sqrt(d); b = 0 is the plain Fourier
    // basis, and distinct b give quadratic Gauss sums of modulus sqrt(d),
    // hence pairwise unbiasedness.
    const double s = 1.0 / std::sqrt(double(d));
    for (int b = 0; b < d; ++b) {
      Eigen::MatrixXcd v(d, d);
      for (int a = 0; a < d; ++a) {
        for (int j = 0; j < d; ++j) {
          v(a, j) = s * unit_root(d, (long long)b * j * j + (long long)a * j);
        }
      }
      set.bases.push_back(Basis{std::move(v)});
    }
  }
  set.complete = true;
  return set;
}

MubSet mub_set_for(int d) {
  return is_prime(d) ? all_mubs(d) : two_mub_subset(d);
}

UnbiasednessReport verify_unbiasedness(const MubSet& set) {
  UnbiasednessReport report;
  if (set.bases.empty()) return report;
  const int d = set.d;
  const double target = 1.0 / double(d);
  double worst = 0.0;
  for (std::size_t i = 0; i < set.bases.size(); ++i) {
    const auto& vi = set.bases[i].vectors;
    if (vi.rows() != d || vi.cols() != d) return UnbiasednessReport{false, 1.0};
    const Eigen::MatrixXcd gram = vi * vi.adjoint();
    worst = std::max(worst,
                     (gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff());
    for (std::size_t j = i + 1; j < set.bases.size(); ++j) {
      const Eigen::MatrixXcd cross = vi * set.bases[j].vectors.adjoint();
      worst = std::max(
          worst, (cross.cwiseAbs2().array() - target).abs().maxCoeff());
    }
  }
  report.max_deviation = worst;
  report.ok = worst < kDeviationTol;
  return report;
}

double mub_projector_sum_check(const MubSet& set) {
  if (!set.complete || set.count() != set.d + 1) {
    throw std::invalid_argument(
        "mub_projector_sum_check: requires a complete d+1 MUB set");
  }
  const int d = set.d;
  const int dd = d * d;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dd, dd);
  for (const Basis& basis : set.bases) {
    for (int a = 0; a < d; ++a) {
      const Eigen::VectorXcd v = basis.vectors.row(a).transpose();
      const Eigen::MatrixXcd proj = v * v.adjoint();
      const Eigen::MatrixXcd proj_conj = proj.conjugate();
      // kron(proj, proj_conj), signal factor first
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          sum.block(r * d, c * d, d, d) += proj(r, c) * proj_conj;
        }
      }
    }
  }
  Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(dd, dd);
  // d |Phi><Phi| has a 1 at every (jd+j, kd+k) cell
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      target(j * d + j, k * d + k) += 1.0;
    }
  }
  return (sum - target).cwiseAbs().maxCoeff();
}

}  // namespace hdent
