#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hdent/certify.hpp"
#include "hdent/coincidence.hpp"
#include "hdent/mubs.hpp"

namespace hdent {

// CSV layout: header line `# d=<d> signal_mub=<b> idler_mub=<b>
// mode=<probability|counts>`, then d comma-separated rows (signal mode =
// row, idler mode = column). Probability matrices off by more than 1e-6
// from unit sum are rejected; smaller drifts are renormalized and noted in
// *warning when given.
std::string matrix_to_csv(const CoincidenceMatrix& matrix);
CoincidenceMatrix matrix_from_csv(const std::string& text, std::string* warning = nullptr);

void write_matrix_csv(const CoincidenceMatrix& matrix, const std::filesystem::path& path);
CoincidenceMatrix read_matrix_csv(const std::filesystem::path& path,
                                  std::string* warning = nullptr);

nlohmann::json record_to_json(const ExperimentRecord& record);
ExperimentRecord record_from_json(const nlohmann::json& j, std::string* warning = nullptr);

void write_record_json(const ExperimentRecord& record, const std::filesystem::path& path);
ExperimentRecord read_record_json(const std::filesystem::path& path,
                                  std::string* warning = nullptr);

nlohmann::json report_to_json(const CertificationReport& report);

nlohmann::json spectrum_to_json(const SchmidtSpectrum& spectrum);
SchmidtSpectrum spectrum_from_json(const nlohmann::json& j);

// Bases as nested arrays of [re, im] pairs, in set order (0 computational,
// 1 Fourier).
nlohmann::json mubset_to_json(const MubSet& set);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hdent
