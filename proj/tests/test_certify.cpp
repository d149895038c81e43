#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

#include "hdent/certify.hpp"
#include "hdent/coincidence.hpp"
#include "hdent/mubs.hpp"
#include "hdent/noise_model.hpp"
#include "hdent/states.hpp"

using namespace hdent;

namespace {

// ORACLE: closed form for the CGLMP value of the maximally entangled state
// under the canonical settings,
//   S_d = (2/d^2) sum_{k=0}^{floor(d/2)-1} (1 - 2k/(d-1))
//         * [ 1/sin^2(pi(k+1/4)/d) - 1/sin^2(pi(k+3/4)/d) ],
// pure trigonometry, no quantum simulation involved.
double cglmp_closed_form(int d) {
  double s = 0.0;
  for (int k = 0; k < d / 2; ++k) {
    const double w = 1.0 - 2.0 * k / (d - 1.0);
    const double plus = std::sin(M_PI * (k + 0.25) / d);
    const double minus = std::sin(M_PI * (k + 0.75) / d);
    s += w * (1.0 / (plus * plus) - 1.0 / (minus * minus));
  }
  return 2.0 * s / (d * d);
}

// ORACLE: brute-force qubit CGLMP. For d = 2 the functional reduces to a
// CHSH combination; maximize it over four planar measurement angles with a
// coarse grid plus refinement. Correlators of |Phi+> for measurements in
// the x-z plane: E(a, b) = cos(a - b).
double qubit_brute_force() {
  auto value = [](double a0, double a1, double b0, double b1) {
    return std::cos(a0 - b0) - std::cos(a1 - b0) + std::cos(a1 - b1) +
           std::cos(a0 - b1);
  };
  double best = -8.0;
  double ba0 = 0, ba1 = 0, bb0 = 0, bb1 = 0;
  const int n = 24;
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int j0 = 0; j0 < n; ++j0) {
        for (int j1 = 0; j1 < n; ++j1) {
          const double v = value(2 * M_PI * i0 / n, 2 * M_PI * i1 / n,
                                 2 * M_PI * j0 / n, 2 * M_PI * j1 / n);
          if (v > best) {
            best = v;
            ba0 = 2 * M_PI * i0 / n;
            ba1 = 2 * M_PI * i1 / n;
            bb0 = 2 * M_PI * j0 / n;
            bb1 = 2 * M_PI * j1 / n;
          }
        }
      }
    }
  }
  double step = 2 * M_PI / n;
  for (int round = 0; round < 40; ++round) {
    bool moved = false;
    for (double* angle : {&ba0, &ba1, &bb0, &bb1}) {
      for (double delta : {-step, step}) {
        const double saved = *angle;
        *angle += delta;
        const double v = value(ba0, ba1, bb0, bb1);
        if (v > best) {
          best = v;
          moved = true;
        } else {
          *angle = saved;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

// ORACLE: exhaustive integer argmin of the two-MUB contrast requirement.
OptimalOperatingPoint operating_point_scan(int k) {
  OptimalOperatingPoint best;
  best.k = k;
  best.q_opt = std::numeric_limits<double>::infinity();
  for (int d = std::max(k, 2); d <= 4 * k + 8; ++d) {
    const double q = required_contrast_two_mub(k, d);
    if (q < best.q_opt) {
      best.q_opt = q;
      best.d_opt = d;
    }
  }
  return best;
}

ExperimentRecord flat_record(int d, double q) {
  SimulationSpec spec;
  spec.d = d;
  spec.target_q = q;
  return simulate_record(spec);
}

}  // namespace

TEST_CASE("two-MUB bound, required contrast and k are mutually consistent") {
  for (int d : {3, 5, 7, 11, 17}) {
    for (int k = 2; k <= d; ++k) {
      CAPTURE(d);
      CAPTURE(k);
      const double q_req = required_contrast_two_mub(k, d);
      // strict threshold: exactly at the requirement certifies only k-1
      CHECK(k_max_two_mub(q_req + 1e-6, d) == k);
      CHECK(k_max_two_mub(q_req, d) == k - 1);
      CHECK(k_max_two_mub(q_req - 1e-6, d) == k - 1);
      // the bound crosses the fidelity threshold (k-1)/d at the same q
      CHECK(fidelity_bound_two_mub(q_req, d) ==
            doctest::Approx((k - 1.0) / d).epsilon(1e-12));
      // proportional nudge: a fixed 1e-6 in q can move F d by less than the
      // integer-snap width at large d, where the two routes legitimately
      // differ by design
      const double q_above = q_req * (1.0 + 1e-4);
      CHECK(k_max_two_mub(q_above, d) ==
            schmidt_number_from_fidelity(fidelity_bound_two_mub(q_above, d), d));
    }
  }
  // Table 1 contrast-to-k rows
  CHECK(k_max_two_mub(71, 3) == 3);
  CHECK(k_max_two_mub(70, 5) == 5);
  CHECK(k_max_two_mub(68, 7) == 6);
  CHECK(k_max_two_mub(81, 11) == 9);
  // vacuous bound below q = d - 1
  CHECK(fidelity_bound_two_mub(2.0, 7) < 0.0);
  CHECK(k_max_two_mub(2.0, 7) == 1);
}

TEST_CASE("all-MUB fidelity identities") {
  for (int d : {2, 3, 10, 50}) {
    for (double q : {1.0, 2.0, 7.5, 100.0}) {
      CAPTURE(d);
      CAPTURE(q);
      // spec of the isotropic state: same F through either parametrization
      CHECK(fidelity_all_mub_from_contrast(q, d) ==
            doctest::Approx(isotropic_fidelity(d, isotropic_weight(d, q)))
                .epsilon(1e-12));
      // two-MUB bound is never above the exact value; known gap
      const double gap = fidelity_all_mub_from_contrast(q, d) -
                         fidelity_bound_two_mub(q, d);
      CHECK(gap == doctest::Approx((d - 2.0 + 1.0 / d) / (q + d - 1.0))
                       .epsilon(1e-12));
      CHECK(gap >= 0.0);
    }
  }
}

TEST_CASE("k from all MUBs") {
  SUBCASE("strict at exact integer bounds") {
    for (int d : {3, 5, 7, 11}) {
      for (int k = 2; k <= d; ++k) {
        const double q_req = required_contrast_all_mub(k, d);
        CHECK(k_max_all_mub(q_req, d) == k - 1);
        CHECK(k_max_all_mub(q_req + 1e-6, d) == k);
      }
      CHECK(required_contrast_all_mub(d, d) == doctest::Approx(double(d) * d - d));
    }
  }
  SUBCASE("large-d examples pin both sides of the convention") {
    // bound (d+1)q/(d+q-1) = 4.985 at q=5: certifies 4, not 5
    CHECK(k_max_all_mub(5.0, 1000) == 4);
    CHECK(k_max_all_mub(5.1, 1000) == 5);
    // d -> infinity limit certifies floor(q)
    CHECK(k_max_all_mub(2.5, 1000000) == 2);
    CHECK(k_max_all_mub(7.0, 1000000) == 7);
    CHECK(k_max_all_mub(19.99, 1000000) == 19);
  }
  SUBCASE("capped at d") {
    CHECK(k_max_all_mub(1e9, 7) == 7);
    CHECK(k_max_all_mub(1.0, 7) == 1);
  }
}

TEST_CASE("schmidt number from fidelity") {
  CHECK(schmidt_number_from_fidelity(0.0, 8) == 1);
  CHECK(schmidt_number_from_fidelity(1.0, 8) == 8);
  CHECK(schmidt_number_from_fidelity(-0.5, 8) == 1);
  // strict at exact multiples of 1/d
  CHECK(schmidt_number_from_fidelity(3.0 / 8.0, 8) == 3);
  CHECK(schmidt_number_from_fidelity(3.0 / 8.0 + 1e-3, 8) == 4);
  // float dust within 1e-6 of the threshold snaps to the strict side
  CHECK(schmidt_number_from_fidelity((3.0 + 1e-8) / 8.0, 8) == 3);
  CHECK(schmidt_number_from_fidelity((3.0 - 1e-8) / 8.0, 8) == 3);
}

TEST_CASE("exact fidelity from complete records") {
  SUBCASE("isotropic records match the closed form") {
    for (int d : {2, 3, 5, 7}) {
      for (double q : {2.0, 10.0, 70.0}) {
        CAPTURE(d);
        CAPTURE(q);
        const ExperimentRecord rec = flat_record(d, q);
        CHECK(fidelity_exact_from_data(rec) ==
              doctest::Approx(fidelity_all_mub_from_contrast(q, d)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("pure non-flat state: F = (sum c)^2/d") {
    const int d = 5;
    const SchmidtSpectrum s = gaussian_spectrum(d, 1.0);
    const MubSet set = all_mubs(d);
    ExperimentRecord rec;
    rec.d = d;
    rec.complete_mubs = true;
    for (int b = 0; b <= d; ++b) {
      rec.matrices.push_back(joint_probability(s, set.bases[b], set.bases[b]));
    }
    double amp_sum = 0.0;
    for (double c : s.amplitudes) amp_sum += c;
    CHECK(fidelity_exact_from_data(rec) ==
          doctest::Approx(amp_sum * amp_sum / d).epsilon(1e-12));
  }
  SUBCASE("incomplete record is rejected") {
    ExperimentRecord rec = flat_record(6, 10.0);  // two MUBs only
    CHECK_THROWS_AS(fidelity_exact_from_data(rec), std::invalid_argument);
  }
}

TEST_CASE("conditional entropy") {
  CoincidenceMatrix m;
  m.d = 8;
  m.mode = MatrixMode::probability;
  m.entries = Eigen::MatrixXd::Identity(8, 8) / 8.0;
  CHECK(conditional_entropy(m) == doctest::Approx(0.0));

  m.entries = Eigen::MatrixXd::Constant(8, 8, 1.0 / 64.0);
  CHECK(conditional_entropy(m) == doctest::Approx(3.0).epsilon(1e-12));

  // two-level noisy matrix: H = log2(q+d-1) - (q/(q+d-1)) log2 q
  for (double q : {2.0, 8.0, 30.0}) {
    const int d = 5;
    const MubSet set = all_mubs(d);
    const CoincidenceMatrix noisy = add_noise(
        joint_probability(flat_spectrum(d), set.bases[0], set.bases[0]), q);
    const double want =
        std::log2(q + d - 1.0) - q / (q + d - 1.0) * std::log2(q);
    CHECK(conditional_entropy(noisy) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("steering functional and threshold") {
  // sign flip bracketing the d=2 threshold
  CHECK(steering_functional(8.0, 2) == doctest::Approx(0.0032583348).epsilon(1e-4));
  CHECK(steering_functional(9.0, 2) == doctest::Approx(-0.031004406).epsilon(1e-4));
  CHECK(steering_functional(1.0, 4) == doctest::Approx(1.0));  // half log2 d

  const int dims[] = {2, 3, 5, 7, 11, 13};
  const double expected[] = {8.088607, 10.542212, 15.059653,
                             19.290828, 27.288382, 31.137664};
  for (int i = 0; i < 6; ++i) {
    const double q_star = steering_threshold(dims[i]);
    CHECK(q_star == doctest::Approx(expected[i]).epsilon(1e-5));
    // root property, and strictly decreasing across it
    CHECK(std::abs(steering_functional(q_star, dims[i])) < 1e-5);
    CHECK(steering_functional(q_star - 0.1, dims[i]) > 0.0);
    CHECK(steering_functional(q_star + 0.1, dims[i]) < 0.0);
  }
  CHECK(steering_threshold(4) > steering_threshold(2));
}

TEST_CASE("steering test from data") {
  SUBCASE("isotropic records: margin = -2 * functional") {
    for (int d : {2, 3, 5}) {
      for (double q : {8.0, 30.0}) {
        const ExperimentRecord rec = flat_record(d, q);
        const SteeringVerdict v =
            steering_test_from_data(rec.matrices[0], rec.matrices[1]);
        CHECK(v.margin_bits ==
              doctest::Approx(-2.0 * steering_functional(q, d)).epsilon(1e-10));
        CHECK(v.violated == (steering_functional(q, d) < 0.0));
      }
    }
  }
  SUBCASE("extremes") {
    const ExperimentRecord perfect = flat_record(4, 1e12);
    const SteeringVerdict v =
        steering_test_from_data(perfect.matrices[0], perfect.matrices[1]);
    CHECK(v.violated);
    CHECK(v.margin_bits == doctest::Approx(2.0).epsilon(1e-9));

    const ExperimentRecord uniform = flat_record(4, 1.0);
    const SteeringVerdict u =
        steering_test_from_data(uniform.matrices[0], uniform.matrices[1]);
    CHECK_FALSE(u.violated);
    CHECK(u.margin_bits == doctest::Approx(-2.0).epsilon(1e-9));
  }
  SUBCASE("dimension mismatch") {
    const ExperimentRecord a = flat_record(3, 5.0);
    const ExperimentRecord b = flat_record(4, 5.0);
    CHECK_THROWS_AS(steering_test_from_data(a.matrices[0], b.matrices[1]),
                    std::invalid_argument);
  }
}

TEST_CASE("CGLMP quantum value") {
  SUBCASE("against the closed-form oracle") {
    for (int d : {2, 3, 4, 5, 10, 50, 100}) {
      CAPTURE(d);
      CHECK(cglmp_quantum_value(d) ==
            doctest::Approx(cglmp_closed_form(d)).epsilon(1e-9));
    }
  }
  SUBCASE("d=2 recovers the Tsirelson bound, brute-force checked") {
    const double brute = qubit_brute_force();
    CHECK(brute == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK(cglmp_quantum_value(2) == doctest::Approx(brute).epsilon(1e-6));
  }
  SUBCASE("increases with d, always above the local bound") {
    double prev = 2.0;
    for (int d = 2; d <= 12; ++d) {
      const double s = cglmp_quantum_value(d);
      CHECK(s > prev);
      prev = s;
    }
  }
}

TEST_CASE("noisy CGLMP value and dimension bound") {
  CHECK(cglmp_noisy(1.0, 5) == doctest::Approx(0.0));
  CHECK(cglmp_noisy(1e12, 5) ==
        doctest::Approx(cglmp_quantum_value(5)).epsilon(1e-9));
  CHECK(cglmp_noisy(21.0, 10) == doctest::Approx(1.9598668652851636).epsilon(1e-12));
  CHECK(cglmp_noisy(30.0, 10) ==
        doctest::Approx(29.0 / 39.0 * cglmp_quantum_value(10)).epsilon(1e-12));

  SUBCASE("dimension bound by exact scan") {
    struct Expect {
      double q;
      int d_max;
    };
    const Expect table[] = {{10, 4}, {21, 9}, {25, 11}, {50, 23}};
    for (const auto& e : table) {
      const CglmpDimensionBound b = cglmp_dimension_bound(e.q);
      CHECK(b.status == CglmpBoundStatus::bounded);
      CHECK(b.d_max == e.d_max);
      // boundary property of the scan
      CHECK(cglmp_noisy(e.q, e.d_max) > 2.0);
      CHECK(cglmp_noisy(e.q, e.d_max + 1) <= 2.0);
    }
  }
  SUBCASE("low contrast violates nowhere") {
    const CglmpDimensionBound b = cglmp_dimension_bound(3.0);
    CHECK(b.status == CglmpBoundStatus::no_violation);
    CHECK(b.d_max == 0);
    CHECK(cglmp_dimension_bound(1.0).status == CglmpBoundStatus::no_violation);
  }
  SUBCASE("scan cap reports unbounded") {
    const CglmpDimensionBound b = cglmp_dimension_bound(1e9, 16);
    CHECK(b.status == CglmpBoundStatus::unbounded_within_scan);
    CHECK(b.d_max == 16);
  }
}

TEST_CASE("optimal operating point") {
  SUBCASE("matches the exhaustive scan") {
    for (int k : {2, 3, 5, 7, 11, 31}) {
      CAPTURE(k);
      const OptimalOperatingPoint got = optimal_operating_point(k);
      const OptimalOperatingPoint want = operating_point_scan(k);
      CHECK(got.d_opt == want.d_opt);
      CHECK(got.q_opt == doctest::Approx(want.q_opt).epsilon(1e-12));
    }
  }
  SUBCASE("reference points") {
    CHECK(optimal_operating_point(3).d_opt == 4);
    CHECK(optimal_operating_point(3).q_opt == doctest::Approx(9.0));
    CHECK(optimal_operating_point(5).d_opt == 9);
    CHECK(optimal_operating_point(5).q_opt == doctest::Approx(20.8).epsilon(1e-12));
    CHECK(optimal_operating_point(1000).d_opt == 2411);
    CHECK(optimal_operating_point(1000).q_opt ==
          doctest::Approx(5820.184135977337).epsilon(1e-12));
  }
  SUBCASE("large-k gain over measuring at d = k") {
    for (int k : {100, 1000}) {
      const double ratio =
          required_contrast_two_mub(k, k) / optimal_operating_point(k).q_opt;
      CHECK(ratio > 0.0);
      CHECK(ratio == doctest::Approx(0.343 * k).epsilon(0.02));
    }
  }
}

TEST_CASE("certify_record") {
  SUBCASE("high contrast certifies the full dimension by both paths") {
    SimulationSpec spec;
    spec.d = 5;
    spec.sigma = 100000.0;
    spec.target_q = 70.0;
    const CertificationReport rep = certify_record(simulate_record(spec));
    CHECK(rep.k_two_mub == 5);
    REQUIRE(rep.k_all_mub.has_value());
    CHECK(*rep.k_all_mub == 5);
    CHECK(rep.certified_k == 5);
    CHECK(rep.average_q == doctest::Approx(70.0).epsilon(1e-6));
    CHECK(rep.steering_violated);
    CHECK(rep.cglmp_violated);
  }
  SUBCASE("moderate contrast: all-MUB path sees more than two MUBs do") {
    const CertificationReport rep = certify_record(flat_record(7, 12.0));
    CHECK(rep.k_two_mub == 3);
    REQUIRE(rep.k_all_mub.has_value());
    CHECK(*rep.k_all_mub == 5);
    CHECK(rep.certified_k == 5);
    REQUIRE(rep.fidelity_exact.has_value());
    CHECK(*rep.fidelity_exact ==
          doctest::Approx(fidelity_all_mub_from_contrast(12.0, 7)).epsilon(1e-9));
    CHECK(rep.per_mub_q.size() == 8);
    for (double q : rep.per_mub_q) CHECK(q == doctest::Approx(12.0).epsilon(1e-9));
  }
  SUBCASE("uniform record certifies nothing") {
    const CertificationReport rep = certify_record(flat_record(5, 1.0));
    CHECK(rep.certified_k == 1);
    CHECK(rep.k_two_mub == 1);
    CHECK(*rep.k_all_mub == 1);
    CHECK_FALSE(rep.steering_violated);
    CHECK_FALSE(rep.cglmp_violated);
    CHECK(rep.fidelity_lower_bound < 0.0);
  }
  SUBCASE("non-prime dimension has no all-MUB path") {
    const CertificationReport rep = certify_record(flat_record(6, 25.0));
    CHECK_FALSE(rep.k_all_mub.has_value());
    CHECK_FALSE(rep.fidelity_exact.has_value());
    CHECK(rep.certified_k == rep.k_two_mub);
    const auto& m = rep.methods;
    CHECK(std::find(m.begin(), m.end(), "two_mub_fidelity_bound") != m.end());
    CHECK(std::find(m.begin(), m.end(), "all_mub_exact_fidelity") == m.end());
    CHECK(std::find(m.begin(), m.end(), "entropic_steering") != m.end());
  }
  SUBCASE("single-matrix record skips steering") {
    ExperimentRecord rec = flat_record(5, 40.0);
    rec.matrices.resize(1);
    rec.complete_mubs = false;
    const CertificationReport rep = certify_record(rec);
    const auto& m = rep.methods;
    CHECK(std::find(m.begin(), m.end(), "entropic_steering") == m.end());
    CHECK(rep.k_two_mub == k_max_two_mub(40.0, 5));
  }
}
