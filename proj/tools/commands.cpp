#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hdent/certify.hpp"
#include "hdent/coincidence.hpp"
#include "hdent/io.hpp"
#include "hdent/noise_model.hpp"
#include "hdent/rng.hpp"

namespace hdent::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_hash_hex(const Config& config) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                (unsigned long long)fnv1a64(config.canonical()));
  return buf;
}

fs::path out_dir(const Config& config, const std::string& section) {
  const fs::path dir = config.get(section, "out").value_or(".");
  fs::create_directories(dir);
  return dir;
}

std::string format_of(const Config& config, const std::string& section) {
  const std::string format = config.get(section, "format").value_or("csv");
  if (format != "csv" && format != "json") {
    throw CliError("format must be csv or json, got '" + format + "'");
  }
  return format;
}

std::uint64_t required_seed(const Config& config, const std::string& section) {
  const auto seed = config.get_uint(section, "seed");
  if (!seed) throw CliError(section + ": seed is required for stochastic output");
  return *seed;
}

unsigned workers_of(const Config& config, const std::string& section) {
  return (unsigned)config.get_uint(section, "workers").value_or(1);
}

std::vector<double> grid_of(const Config& config, const std::string& section,
                            const std::string& key, const std::string& fallback) {
  const std::string spec = config.get(section, key).value_or(fallback);
  try {
    return parse_grid(spec);
  } catch (const std::invalid_argument& e) {
    throw CliError(section + "." + key + ": " + e.what());
  }
}

std::vector<int> int_grid_of(const Config& config, const std::string& section,
                             const std::string& key, const std::string& fallback) {
  const std::string spec = config.get(section, key).value_or(fallback);
  try {
    return parse_int_grid(spec);
  } catch (const std::invalid_argument& e) {
    throw CliError(section + "." + key + ": " + e.what());
  }
}

// Tabular output shared by the sweep commands: CSV with a provenance
// comment, or a JSON object {config_hash, rows: [...]}.
class Table {
 public:
  Table(std::vector<std::string> columns, std::string hash)
      : columns_(std::move(columns)), hash_(std::move(hash)) {}

  void add_row(const std::vector<json>& values) {
    rows_.push_back(values);
  }

  void write(const fs::path& path_base, const std::string& format) const {
    if (format == "json") {
      json rows = json::array();
      for (const auto& row : rows_) {
        json obj;
        for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = row[i];
        rows.push_back(std::move(obj));
      }
      const json doc{{"config_hash", hash_}, {"rows", std::move(rows)}};
      write_text_file(path_base.string() + ".json", doc.dump(2) + "\n");
      return;
    }
    std::ostringstream out;
    out << "# config_hash=" << hash_ << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      out << (i ? "," : "") << columns_[i];
    }
    out << "\n";
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        const json& v = row[i];
        if (v.is_number_float()) {
          out << fmt(v.get<double>());
        } else {
          out << v.dump();
        }
      }
      out << "\n";
    }
    write_text_file(path_base.string() + ".csv", out.str());
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::string hash_;
  std::vector<std::vector<json>> rows_;
};

}  // namespace

int cmd_contrast_surface(const Config& config, std::ostream& out) {
  const std::string section = "contrast-surface";
  const auto mu_grid = grid_of(config, section, "mu", "log:1e-8:1:161");
  const auto ratio_grid = grid_of(config, section, "noise_ratio", "log:1e-7:1e-2:6");
  Table table({"mu", "n_over_eta", "q", "is_row_optimum"}, config_hash_hex(config));
  for (double ratio : ratio_grid) {
    if (!(ratio >= 0.0 && ratio < 1.0)) {
      throw CliError("contrast-surface: n/eta must lie in [0,1), got " + fmt(ratio));
    }
    // row optimum: argmax of Q over the mu grid at this noise ratio
    std::size_t best = 0;
    double best_q = -1.0;
    std::vector<double> qs(mu_grid.size());
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
      qs[i] = quantum_contrast({mu_grid[i], ratio, 1.0});
      if (qs[i] > best_q) {
        best_q = qs[i];
        best = i;
      }
    }
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
      table.add_row({mu_grid[i], ratio, qs[i], i == best});
    }
  }
  table.write(out_dir(config, section) / "contrast_surface",
              format_of(config, section));
  out << "contrast-surface: " << table.row_count() << " rows ("
      << mu_grid.size() << " mu x " << ratio_grid.size() << " n/eta)\n";
  return kExitOk;
}

int cmd_required_contrast(const Config& config, std::ostream& out) {
  const std::string section = "required-contrast";
  const auto k_grid = int_grid_of(config, section, "k", "3,5,7,11");
  const auto d_grid = int_grid_of(config, section, "d", "2:40:39");
  Table table({"k", "d", "q_two_mub", "q_all_mub", "is_d_opt"},
              config_hash_hex(config));
  for (int k : k_grid) {
    if (k < 2) throw CliError("required-contrast: k must be >= 2");
    const OptimalOperatingPoint opt = optimal_operating_point(k);
    for (int d : d_grid) {
      if (d < k) continue;
      table.add_row({k, d, required_contrast_two_mub(k, d),
                     required_contrast_all_mub(k, d), d == opt.d_opt});
    }
  }
  table.write(out_dir(config, section) / "required_contrast",
              format_of(config, section));
  out << "required-contrast: " << table.row_count() << " rows\n";
  return kExitOk;
}

int cmd_table1(const Config& config, std::ostream& out) {
  const std::string section = "table1";
  format_of(config, section);  // validate only; output is fixed text + json
  struct Row {
    int d;
    double q_exp;
  };
  constexpr Row kRows[] = {{3, 71}, {5, 70}, {7, 68}, {11, 81}};
  json rows = json::array();
  out << "  d  Q_exp  F_pred(%)  k_pred  d_opt  Q_opt\n";
  for (const Row& row : kRows) {
    const double f = fidelity_bound_two_mub(row.q_exp, row.d);
    const int k = k_max_two_mub(row.q_exp, row.d);
    // optimal columns: cheapest way to certify the full k = d of this
    // experiment, which generally needs a larger measured dimension
    const OptimalOperatingPoint opt = optimal_operating_point(row.d);
    char f_str[16], q_str[16];
    std::snprintf(f_str, sizeof(f_str), "%.1f", 100.0 * f);
    std::snprintf(q_str, sizeof(q_str), "%.1f", opt.q_opt);
    char line[96];
    std::snprintf(line, sizeof(line), "%3d  %5.0f  %9s  %6d  %5d  %5s\n", row.d,
                  row.q_exp, f_str, k, opt.d_opt, q_str);
    out << line;
    rows.push_back({
        {"d", row.d},
        {"q_exp", row.q_exp},
        {"fidelity_bound", f},
        {"fidelity_percent", f_str},
        {"k", k},
        {"d_opt", opt.d_opt},
        {"q_opt", opt.q_opt},
        {"q_opt_printed", q_str},
    });
  }
  const json doc{{"config_hash", config_hash_hex(config)}, {"rows", std::move(rows)}};
  write_text_file(out_dir(config, section) / "table1.json", doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate(const Config& config, std::ostream& out) {
  const std::string section = "simulate";
  const auto d_value = config.get_int(section, "d");
  if (!d_value) throw CliError("simulate: d is required");
  const int d = (int)*d_value;
  const auto sigma = config.get_double(section, "sigma");
  const std::uint64_t total_events = config.get_uint(section, "total_events").value_or(0);
  const std::uint64_t seed = required_seed(config, section);
  const std::string format = format_of(config, section);
  const fs::path dir = out_dir(config, section);
  const std::string hash = config_hash_hex(config);

  const auto target_q_spec = config.get(section, "target_q");
  const auto mu = config.get_double(section, "mu");
  const auto n = config.get_double(section, "n");
  const auto eta = config.get_double(section, "eta");
  const bool physical = mu || n || eta;
  if (target_q_spec && physical) {
    throw CliError("simulate: give either target_q or mu/n/eta, not both");
  }
  if (physical && !(mu && n && eta)) {
    throw CliError("simulate: physical mode needs all of mu, n, eta");
  }
  if (!target_q_spec && !physical) {
    throw CliError("simulate: give target_q or mu/n/eta");
  }

  std::vector<SimulationSpec> specs;
  if (target_q_spec) {
    for (double q : grid_of(config, section, "target_q", "")) {
      SimulationSpec spec;
      spec.d = d;
      spec.sigma = sigma;
      spec.target_q = q;
      spec.total_events = total_events;
      specs.push_back(spec);
    }
  } else {
    SimulationSpec spec;
    spec.d = d;
    spec.sigma = sigma;
    spec.physical = NoiseParams{*mu, *n, *eta};
    spec.total_events = total_events;
    specs.push_back(spec);
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    specs[i].seed = derive_seed(seed, i);
  }

  struct Result {
    ExperimentRecord record;
    CertificationReport report;
  };
  const auto results = parallel_map<Result>(
      specs.size(), workers_of(config, section), [&](std::size_t i) {
        Result r;
        r.record = simulate_record(specs[i]);
        r.report = certify_record(r.record);
        return r;
      });

  Table summary({"index", "d", "sigma", "target_q", "average_q", "k_two_mub",
                 "k_all_mub", "certified_k", "fidelity_lower_bound", "fidelity_exact",
                 "steering_violated", "steering_margin_bits", "cglmp_value",
                 "cglmp_violated"},
                hash);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    char stem[32];
    std::snprintf(stem, sizeof(stem), "record_%03zu", i);
    write_record_json(r.record, dir / (std::string(stem) + ".json"));
    json report = report_to_json(r.report);
    report["config_hash"] = hash;
    report["seed"] = r.record.seed;
    write_text_file(dir / (std::string(stem) + "_report.json"), report.dump(2) + "\n");
    if (format == "csv") {
      for (const auto& m : r.record.matrices) {
        char name[48];
        std::snprintf(name, sizeof(name), "%s_mub%02d.csv", stem, m.signal_mub);
        write_matrix_csv(m, dir / name);
      }
    }
    summary.add_row({(int)i, r.record.d,
                     r.record.params.sigma ? json(*r.record.params.sigma) : json(),
                     r.record.params.target_q ? json(*r.record.params.target_q) : json(),
                     r.report.average_q, r.report.k_two_mub,
                     r.report.k_all_mub ? json(*r.report.k_all_mub) : json(),
                     r.report.certified_k, r.report.fidelity_lower_bound,
                     r.report.fidelity_exact ? json(*r.report.fidelity_exact) : json(),
                     r.report.steering_violated, r.report.steering_margin_bits,
                     r.report.cglmp_value, r.report.cglmp_violated});
  }
  summary.write(dir / "summary", format);
  out << "simulate: wrote " << results.size() << " record(s) to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_certify(const Config& config, const std::vector<std::string>& files,
                std::ostream& out, std::ostream& err) {
  const std::string section = "certify";
  if (files.empty()) throw CliError("certify: no input files");
  ExperimentRecord record;
  std::string warning;
  try {
    if (files.size() == 1 && fs::path(files[0]).extension() == ".json") {
      record = read_record_json(files[0], &warning);
    } else {
      std::vector<CoincidenceMatrix> matrices;
      for (const auto& file : files) {
        matrices.push_back(read_matrix_csv(file, &warning));
        if (!warning.empty()) {
          err << file << ": " << warning << "\n";
          warning.clear();
        }
        if (matrices.back().d != matrices.front().d) {
          throw std::runtime_error("matrix dimension mismatch: " + files[0] + " has d=" +
                                   std::to_string(matrices.front().d) + ", " + file +
                                   " has d=" + std::to_string(matrices.back().d));
        }
      }
      std::sort(matrices.begin(), matrices.end(),
                [](const auto& a, const auto& b) { return a.signal_mub < b.signal_mub; });
      record.d = matrices[0].d;
      for (std::size_t i = 0; i < matrices.size(); ++i) {
        if (matrices[i].signal_mub != (int)i || matrices[i].idler_mub != (int)i) {
          throw std::runtime_error(
              "expected matched signal/idler MUB indices 0.." +
              std::to_string(matrices.size() - 1) + " across the input files");
        }
      }
      record.matrices = std::move(matrices);
      record.complete_mubs = (int)record.matrices.size() == record.d + 1;
    }
  } catch (const std::runtime_error& e) {
    throw CliError(e.what());
  }
  if (!warning.empty()) err << warning << "\n";

  CertificationReport report;
  try {
    report = certify_record(record);
  } catch (const std::invalid_argument& e) {
    throw CliError(e.what());
  }
  json doc = report_to_json(report);
  doc["config_hash"] = config_hash_hex(config);
  const fs::path path = out_dir(config, section) / "report.json";
  write_text_file(path, doc.dump(2) + "\n");
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_validate_mc(const Config& config, std::ostream& out) {
  const std::string section = "validate-mc";
  const auto mu_grid = grid_of(config, section, "mu", "1e-3,3e-3,1e-2");
  const auto eta_grid = grid_of(config, section, "eta", "0.3,0.5,0.8");
  const auto n_spec = config.get(section, "n");
  const std::uint64_t trials = config.get_uint(section, "trials").value_or(10'000'000);
  const std::uint64_t seed = required_seed(config, section);
  const unsigned workers = workers_of(config, section);
  // test hook: scales the analytic reference to verify the 5-sigma gate
  const double analytic_scale =
      config.get_double(section, "analytic_scale").value_or(1.0);

  // (mu, n) pairs: explicit n grid crosses mu x n; by default n tracks mu
  std::vector<std::pair<double, double>> mu_n;
  if (n_spec) {
    for (double m : mu_grid) {
      for (double nv : grid_of(config, section, "n", "")) mu_n.push_back({m, nv});
    }
  } else {
    for (double m : mu_grid) mu_n.push_back({m, m});
  }

  struct Cell {
    NoiseParams params;
    McEstimate est;
  };
  std::vector<NoiseParams> grid;
  for (const auto& [m, nv] : mu_n) {
    for (double e : eta_grid) grid.push_back({m, nv, e});
  }
  const auto cells = parallel_map<Cell>(grid.size(), workers, [&](std::size_t i) {
    // one worker per cell; the MC itself runs single-threaded inside
    return Cell{grid[i], monte_carlo_coincidence(grid[i], trials,
                                                 derive_seed(seed, i), 1)};
  });

  Table table({"mu", "n", "eta", "trials", "p_same", "se_same", "p_same_analytic",
               "z_same", "p_cross", "se_cross", "p_cross_analytic", "z_cross", "q",
               "se_q", "q_analytic", "z_q", "flagged"},
              config_hash_hex(config));
  // the empirical se underestimates badly when few events land (zero
  // observed -> se 0), so floor it with the Poisson se of the reference
  auto zscore = [](double value, double reference, double se, double se_floor) {
    se = std::max(se, se_floor);
    if (se > 0.0) return (value - reference) / se;
    return value == reference ? 0.0 : std::numeric_limits<double>::infinity();
  };
  int flagged_cells = 0;
  for (const auto& cell : cells) {
    const double ps_ref = analytic_scale * analytic_p_same(cell.params);
    const double pc_ref = analytic_scale * analytic_p_cross(cell.params);
    const double q_ref = pc_ref > 0.0 ? ps_ref / pc_ref
                                      : std::numeric_limits<double>::quiet_NaN();
    const double n_trials = (double)cell.est.trials;
    const double se_same_floor = std::sqrt(ps_ref / n_trials);
    const double se_cross_floor = std::sqrt(pc_ref / n_trials);
    const double se_q_floor =
        pc_ref > 0.0 ? q_ref * se_cross_floor / pc_ref : 0.0;
    const double z_same = zscore(cell.est.p_same, ps_ref, cell.est.se_same, se_same_floor);
    const double z_cross =
        zscore(cell.est.p_cross, pc_ref, cell.est.se_cross, se_cross_floor);
    // q is undefined with zero cross events; the rate z-scores still apply
    const double z_q = std::isfinite(cell.est.q) && std::isfinite(q_ref)
                           ? zscore(cell.est.q, q_ref, cell.est.se_q, se_q_floor)
                           : std::numeric_limits<double>::quiet_NaN();
    const bool flagged =
        std::abs(z_same) > 5.0 || std::abs(z_cross) > 5.0 || std::abs(z_q) > 5.0;
    flagged_cells += flagged;
    table.add_row({cell.params.mu, cell.params.n, cell.params.eta, cell.est.trials,
                   cell.est.p_same, cell.est.se_same, ps_ref, z_same, cell.est.p_cross,
                   cell.est.se_cross, pc_ref, z_cross, cell.est.q, cell.est.se_q, q_ref,
                   z_q, flagged});
  }
  table.write(out_dir(config, section) / "validate_mc", format_of(config, section));
  out << "validate-mc: " << cells.size() << " cells, " << flagged_cells
      << " flagged at 5 standard errors\n";
  return flagged_cells == 0 ? kExitOk : kExitValidation;
}

int cmd_steering_scan(const Config& config, std::ostream& out) {
  const std::string section = "steering-scan";
  const auto d_grid = int_grid_of(config, section, "d", "2,3,5,7,11,13");
  const auto q_grid = grid_of(config, section, "q", "2:40:39");
  const std::uint64_t total_events = config.get_uint(section, "total_events").value_or(0);
  const std::string format = format_of(config, section);
  const fs::path dir = out_dir(config, section);
  const std::string hash = config_hash_hex(config);

  Table boundary({"d", "q_star"}, hash);
  Table scan({"d", "q", "functional_bits", "violated"}, hash);
  for (int d : d_grid) {
    boundary.add_row({d, steering_threshold(d)});
    for (double q : q_grid) {
      const double f = steering_functional(q, d);
      scan.add_row({d, q, f, f < 0.0});
    }
  }
  scan.write(dir / "steering_scan", format);
  boundary.write(dir / "steering_boundary", format);

  if (total_events > 0) {
    const std::uint64_t seed = required_seed(config, section);
    const unsigned workers = workers_of(config, section);
    struct Point {
      int d;
      double q;
    };
    std::vector<Point> points;
    for (int d : d_grid) {
      for (double q : q_grid) points.push_back({d, q});
    }
    struct Classified {
      SteeringVerdict verdict;
    };
    const auto classified = parallel_map<Classified>(
        points.size(), workers, [&](std::size_t i) {
          SimulationSpec spec;
          spec.d = points[i].d;
          spec.target_q = points[i].q;
          spec.total_events = total_events;
          spec.seed = derive_seed(seed, i);
          const ExperimentRecord record = simulate_record(spec);
          return Classified{
              steering_test_from_data(record.matrices[0], record.matrices[1])};
        });
    Table empirical({"d", "q", "margin_bits", "violated_empirical", "functional_bits",
                     "violated_functional"},
                    hash);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double f = steering_functional(points[i].q, points[i].d);
      empirical.add_row({points[i].d, points[i].q, classified[i].verdict.margin_bits,
                         classified[i].verdict.violated, f, f < 0.0});
    }
    empirical.write(dir / "steering_classified", format);
  }
  out << "steering-scan: " << scan.row_count() << " grid points, boundary for "
      << d_grid.size() << " dimension(s)\n";
  return kExitOk;
}

}  // namespace hdent::cli
