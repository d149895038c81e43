#include <filesystem>
#include <string>

#include "doctest.h"

#include "hdent/coincidence.hpp"
#include "hdent/io.hpp"
#include "hdent/mubs.hpp"
#include "hdent/noise_model.hpp"
#include "hdent/states.hpp"

using namespace hdent;
namespace fs = std::filesystem;

namespace {

CoincidenceMatrix pipeline_matrix(int d, double q, int b) {
  const MubSet set = mub_set_for(d);
  CoincidenceMatrix m =
      add_noise(joint_probability(flat_spectrum(d), set.bases[b], set.bases[b]), q);
  m.signal_mub = b;
  m.idler_mub = b;
  return m;
}

}  // namespace

TEST_CASE("matrix CSV round trip") {
  const CoincidenceMatrix m = pipeline_matrix(5, 17.3, 2);
  const std::string csv = matrix_to_csv(m);
  CHECK(csv.rfind("# d=5 signal_mub=2 idler_mub=2 mode=probability", 0) == 0);

  std::string warning;
  const CoincidenceMatrix back = matrix_from_csv(csv, &warning);
  CHECK(warning.empty());
  CHECK(back.d == 5);
  CHECK(back.signal_mub == 2);
  CHECK(back.idler_mub == 2);
  CHECK(back.mode == MatrixMode::probability);
  // %.17g survives the double round trip bit for bit
  CHECK((back.entries - m.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("counts-mode CSV round trip") {
  CoincidenceMatrix counts = sample_counts(pipeline_matrix(3, 9.0, 1), 50000, 5);
  const CoincidenceMatrix back = matrix_from_csv(matrix_to_csv(counts));
  CHECK(back.mode == MatrixMode::counts);
  CHECK((back.entries - counts.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix CSV rejects malformed input") {
  const CoincidenceMatrix m = pipeline_matrix(3, 5.0, 0);
  const std::string csv = matrix_to_csv(m);

  SUBCASE("bad header") {
    CHECK_THROWS_AS(matrix_from_csv("not a header\n1,2\n3,4\n"), std::runtime_error);
  }
  SUBCASE("row count mismatch") {
    std::string truncated = csv.substr(0, csv.rfind('\n', csv.size() - 2) + 1);
    CHECK_THROWS_AS(matrix_from_csv(truncated), std::runtime_error);
  }
  SUBCASE("column count mismatch") {
    std::string extra = csv;
    extra.insert(extra.find('\n', extra.find('\n') + 1), ",0.1");
    CHECK_THROWS_AS(matrix_from_csv(extra), std::runtime_error);
  }
  SUBCASE("negative entry") {
    std::string negative = csv;
    negative.replace(negative.find("0."), 2, "-0.");
    CHECK_THROWS_AS(matrix_from_csv(negative), std::runtime_error);
  }
  SUBCASE("probability mass off by more than the tolerance") {
    CHECK_THROWS_AS(
        matrix_from_csv("# d=2 signal_mub=0 idler_mub=0 mode=probability\n"
                        "0.5,0.2\n0.2,0.2\n"),
        std::runtime_error);
  }
  SUBCASE("small drift renormalizes with a warning") {
    std::string warning;
    const CoincidenceMatrix back =
        matrix_from_csv("# d=2 signal_mub=0 idler_mub=0 mode=probability\n"
                        "0.5000001,0.2\n0.15,0.15\n",
                        &warning);
    CHECK_FALSE(warning.empty());
    CHECK(back.entries.sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("record JSON round trip") {
  SimulationSpec spec;
  spec.d = 3;
  spec.sigma = 1.4;
  spec.physical = NoiseParams{0.01, 2e-4, 0.6};
  spec.total_events = 30000;
  spec.seed = 321;
  const ExperimentRecord rec = simulate_record(spec);

  const nlohmann::json j = record_to_json(rec);
  CHECK(j["d"] == 3);
  CHECK(j["mub_count"] == 4);
  CHECK(j["seed"] == 321);
  CHECK(j["params"]["sigma"] == 1.4);
  CHECK(j["params"]["physical"]["mu"] == 0.01);
  CHECK(j["params"]["target_q"].is_null());

  const ExperimentRecord back = record_from_json(j);
  CHECK(back.d == rec.d);
  CHECK(back.complete_mubs == rec.complete_mubs);
  CHECK(back.seed == rec.seed);
  REQUIRE(back.matrices.size() == rec.matrices.size());
  for (size_t i = 0; i < rec.matrices.size(); ++i) {
    CHECK(back.matrices[i].mode == rec.matrices[i].mode);
    CHECK((back.matrices[i].entries - rec.matrices[i].entries)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  // serialization is deterministic
  CHECK(record_to_json(back).dump() == j.dump());
}

TEST_CASE("record file IO") {
  const fs::path dir = fs::temp_directory_path() / "hdent_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SimulationSpec spec;
  spec.d = 5;
  spec.target_q = 22.0;
  spec.seed = 77;
  const ExperimentRecord rec = simulate_record(spec);

  const fs::path path = dir / "rec.json";
  write_record_json(rec, path);
  const ExperimentRecord back = read_record_json(path);
  CHECK(record_to_json(back).dump() == record_to_json(rec).dump());

  write_matrix_csv(rec.matrices[1], dir / "m1.csv");
  const CoincidenceMatrix m = read_matrix_csv(dir / "m1.csv");
  CHECK((m.entries - rec.matrices[1].entries).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(read_record_json(dir / "absent.json"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("report JSON carries the full certification") {
  const CertificationReport rep = certify_record([] {
    SimulationSpec spec;
    spec.d = 7;
    spec.target_q = 12.0;
    return simulate_record(spec);
  }());
  const nlohmann::json j = report_to_json(rep);
  CHECK(j["d"] == 7);
  CHECK(j["k_two_mub"] == 3);
  CHECK(j["k_all_mub"] == 5);
  CHECK(j["certified_k"] == 5);
  CHECK(j["steering"]["violated"] == false);
  CHECK(j["cglmp"]["value"].get<double>() ==
        doctest::Approx(cglmp_noisy(12.0, 7)).epsilon(1e-9));
  CHECK(j["methods"].is_array());
  CHECK(j["fidelity_exact"].is_number());
}

TEST_CASE("spectrum and MUB set serialization") {
  const SchmidtSpectrum s = gaussian_spectrum(4, 1.1);
  const SchmidtSpectrum back = spectrum_from_json(spectrum_to_json(s));
  REQUIRE(back.dim() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.amplitudes[i] == s.amplitudes[i]);
  }

  const nlohmann::json jm = mubset_to_json(all_mubs(3));
  CHECK(jm["d"] == 3);
  CHECK(jm["bases"].size() == 4);
  CHECK(jm["bases"][0][0][0][0] == 1.0);  // computational basis, entry (0,0) re
}
