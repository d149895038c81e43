#include "hdent/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdent {

namespace {

constexpr double kNormalizationTol = 1e-6;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& what) {
  throw std::runtime_error("coincidence CSV: " + what);
}

// Applies probability-mode validation shared by the CSV and JSON readers:
// rejects negative cells (naming the first offender) and sums off by more
// than kNormalizationTol; renormalizes smaller drifts.
void check_entries(CoincidenceMatrix& m, std::string* warning, const std::string& origin) {
  for (int r = 0; r < m.d; ++r) {
    for (int c = 0; c < m.d; ++c) {
      const double v = m.entries(r, c);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::runtime_error(origin + ": negative or non-finite entry at row " +
                                 std::to_string(r) + ", column " + std::to_string(c));
      }
    }
  }
  if (m.mode == MatrixMode::probability) {
    const double sum = m.entries.sum();
    if (std::abs(sum - 1.0) > kNormalizationTol) {
      throw std::runtime_error(origin + ": probability matrix sums to " +
                               format_double(sum) + ", not 1");
    }
    // drift at the float-noise level is left alone so files round-trip
    // bit-exactly; only real drift is renormalized
    if (std::abs(sum - 1.0) > 1e-9 && sum > 0.0) {
      m.entries /= sum;
      if (warning) {
        *warning = origin + ": renormalized probability sum " + format_double(sum);
      }
    }
  }
}

}  // namespace

std::string matrix_to_csv(const CoincidenceMatrix& matrix) {
  std::ostringstream out;
  out << "# d=" << matrix.d << " signal_mub=" << matrix.signal_mub
      << " idler_mub=" << matrix.idler_mub << " mode="
      << (matrix.mode == MatrixMode::probability ? "probability" : "counts") << "\n";
  for (int r = 0; r < matrix.d; ++r) {
    for (int c = 0; c < matrix.d; ++c) {
      if (c) out << ",";
      out << format_double(matrix.entries(r, c));
    }
    out << "\n";
  }
  return out.str();
}

CoincidenceMatrix matrix_from_csv(const std::string& text, std::string* warning) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) parse_fail("empty input");
  CoincidenceMatrix m;
  char mode_buf[16] = {0};
  if (std::sscanf(line.c_str(), "# d=%d signal_mub=%d idler_mub=%d mode=%15s", &m.d,
                  &m.signal_mub, &m.idler_mub, mode_buf) != 4) {
    parse_fail("bad header line '" + line + "'");
  }
  const std::string mode = mode_buf;
  if (mode == "probability") {
    m.mode = MatrixMode::probability;
  } else if (mode == "counts") {
    m.mode = MatrixMode::counts;
  } else {
    parse_fail("unknown mode '" + mode + "'");
  }
  if (m.d < 2) parse_fail("d must be >= 2, got " + std::to_string(m.d));
  m.entries.setZero(m.d, m.d);
  for (int r = 0; r < m.d; ++r) {
    if (!std::getline(in, line)) {
      parse_fail("expected " + std::to_string(m.d) + " rows, got " + std::to_string(r));
    }
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < m.d; ++c) {
      if (!std::getline(row, cell, ',')) {
        parse_fail("row " + std::to_string(r) + " has fewer than " +
                   std::to_string(m.d) + " columns");
      }
      try {
        std::size_t used = 0;
        m.entries(r, c) = std::stod(cell, &used);
        while (used < cell.size() && std::isspace((unsigned char)cell[used])) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_fail("row " + std::to_string(r) + ", column " + std::to_string(c) +
                   ": not a number: '" + cell + "'");
      }
    }
    if (std::getline(row, cell, ',')) {
      parse_fail("row " + std::to_string(r) + " has more than " + std::to_string(m.d) +
                 " columns");
    }
  }
  check_entries(m, warning, "coincidence CSV");
  return m;
}

void write_matrix_csv(const CoincidenceMatrix& matrix, const std::filesystem::path& path) {
  write_text_file(path, matrix_to_csv(matrix));
}

CoincidenceMatrix read_matrix_csv(const std::filesystem::path& path, std::string* warning) {
  return matrix_from_csv(read_text_file(path), warning);
}

namespace {

nlohmann::json matrix_to_json(const CoincidenceMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.d; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.d; ++c) row.push_back(m.entries(r, c));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{
      {"signal_mub", m.signal_mub},
      {"idler_mub", m.idler_mub},
      {"mode", m.mode == MatrixMode::probability ? "probability" : "counts"},
      {"entries", std::move(rows)},
  };
}

CoincidenceMatrix matrix_from_json(const nlohmann::json& j, int d, std::string* warning) {
  CoincidenceMatrix m;
  m.d = d;
  m.signal_mub = j.at("signal_mub").get<int>();
  m.idler_mub = j.at("idler_mub").get<int>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "probability") {
    m.mode = MatrixMode::probability;
  } else if (mode == "counts") {
    m.mode = MatrixMode::counts;
  } else {
    throw std::runtime_error("record JSON: unknown matrix mode '" + mode + "'");
  }
  const auto& rows = j.at("entries");
  if ((int)rows.size() != d) {
    throw std::runtime_error("record JSON: matrix has " + std::to_string(rows.size()) +
                             " rows, expected " + std::to_string(d));
  }
  m.entries.setZero(d, d);
  for (int r = 0; r < d; ++r) {
    if ((int)rows[r].size() != d) {
      throw std::runtime_error("record JSON: matrix row " + std::to_string(r) + " has " +
                               std::to_string(rows[r].size()) + " columns, expected " +
                               std::to_string(d));
    }
    for (int c = 0; c < d; ++c) m.entries(r, c) = rows[r][c].get<double>();
  }
  check_entries(m, warning, "record JSON matrix");
  return m;
}

}  // namespace

nlohmann::json record_to_json(const ExperimentRecord& record) {
  nlohmann::json params{
      {"sigma", nullptr},
      {"target_q", nullptr},
      {"physical", nullptr},
      {"total_events", record.params.total_events},
  };
  if (record.params.sigma) params["sigma"] = *record.params.sigma;
  if (record.params.target_q) params["target_q"] = *record.params.target_q;
  if (record.params.physical) {
    params["physical"] = {{"mu", record.params.physical->mu},
                          {"n", record.params.physical->n},
                          {"eta", record.params.physical->eta}};
  }
  nlohmann::json matrices = nlohmann::json::array();
  for (const auto& m : record.matrices) matrices.push_back(matrix_to_json(m));
  return nlohmann::json{
      {"d", record.d},
      {"mub_count", record.matrices.size()},
      {"complete_mubs", record.complete_mubs},
      {"seed", record.seed},
      {"params", std::move(params)},
      {"matrices", std::move(matrices)},
  };
}

ExperimentRecord record_from_json(const nlohmann::json& j, std::string* warning) {
  ExperimentRecord record;
  record.d = j.at("d").get<int>();
  if (record.d < 2) throw std::runtime_error("record JSON: d must be >= 2");
  record.complete_mubs = j.value("complete_mubs", false);
  record.seed = j.value("seed", (std::uint64_t)0);
  if (j.contains("params")) {
    const auto& p = j["params"];
    if (p.contains("sigma") && !p["sigma"].is_null()) {
      record.params.sigma = p["sigma"].get<double>();
    }
    if (p.contains("target_q") && !p["target_q"].is_null()) {
      record.params.target_q = p["target_q"].get<double>();
    }
    if (p.contains("physical") && !p["physical"].is_null()) {
      record.params.physical = NoiseParams{p["physical"].at("mu").get<double>(),
                                           p["physical"].at("n").get<double>(),
                                           p["physical"].at("eta").get<double>()};
    }
    record.params.total_events = p.value("total_events", (std::uint64_t)0);
  }
  const auto& matrices = j.at("matrices");
  const std::size_t declared = j.value("mub_count", matrices.size());
  if (declared != matrices.size()) {
    throw std::runtime_error("record JSON: mub_count " + std::to_string(declared) +
                             " does not match " + std::to_string(matrices.size()) +
                             " matrices");
  }
  for (const auto& mj : matrices) {
    record.matrices.push_back(matrix_from_json(mj, record.d, warning));
  }
  if (record.matrices.empty()) throw std::runtime_error("record JSON: no matrices");
  return record;
}

void write_record_json(const ExperimentRecord& record, const std::filesystem::path& path) {
  write_text_file(path, record_to_json(record).dump(2) + "\n");
}

ExperimentRecord read_record_json(const std::filesystem::path& path, std::string* warning) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("record JSON " + path.string() + ": " + e.what());
  }
  return record_from_json(j, warning);
}

nlohmann::json report_to_json(const CertificationReport& report) {
  nlohmann::json j{
      {"d", report.d},
      {"average_q", report.average_q},
      {"per_mub_q", report.per_mub_q},
      {"fidelity_lower_bound", report.fidelity_lower_bound},
      {"fidelity_exact", nullptr},
      {"k_two_mub", report.k_two_mub},
      {"k_all_mub", nullptr},
      {"certified_k", report.certified_k},
      {"steering", {{"violated", report.steering_violated},
                    {"margin_bits", report.steering_margin_bits}}},
      {"cglmp", {{"value", report.cglmp_value}, {"violated", report.cglmp_violated}}},
      {"methods", report.methods},
  };
  if (report.fidelity_exact) j["fidelity_exact"] = *report.fidelity_exact;
  if (report.k_all_mub) j["k_all_mub"] = *report.k_all_mub;
  return j;
}

nlohmann::json spectrum_to_json(const SchmidtSpectrum& spectrum) {
  return nlohmann::json(spectrum.amplitudes);
}

SchmidtSpectrum spectrum_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::runtime_error("spectrum JSON: expected an array");
  return spectrum_from_amplitudes(j.get<std::vector<double>>());
}

nlohmann::json mubset_to_json(const MubSet& set) {
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& basis : set.bases) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < set.d; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < set.d; ++c) {
        row.push_back({basis.vectors(r, c).real(), basis.vectors(r, c).imag()});
      }
      rows.push_back(std::move(row));
    }
    bases.push_back(std::move(rows));
  }
  return nlohmann::json{{"d", set.d}, {"complete", set.complete}, {"bases", std::move(bases)}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace hdent
