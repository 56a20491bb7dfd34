// Copyright 2026 The lzs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lzs/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <ostream>

#include "json.hpp"
#include "lzs/cli/series_io.hpp"
#include "lzs/errors.hpp"

namespace lzs::cli {
namespace {

using nlohmann::json;

using FileList = std::vector<std::pair<std::string, std::string>>;

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IntegrationError& e) {
    err << "integration failure: " << e.what() << "\n";
    return kExitIntegration;
  } catch (const NoOscillationError& e) {
    err << "analysis failure: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const FitError& e) {
    err << "analysis failure: " << e.what() << " (residual_rms " << e.residual_rms() << ", iterations "
        << e.iterations() << ")\n";
    return kExitAnalysis;
  } catch (const std::domain_error& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

std::string resolve_out_dir(const CommandOptions& opts, const OutputConfig& cfg) {
  if (opts.out_dir) return *opts.out_dir;
  if (!cfg.dir.empty()) return cfg.dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

std::string extension(OutputFormat f) { return f == OutputFormat::kCsv ? ".csv" : ".json"; }

// Keeps file names portable; derived scenario names contain '+' and '='.
std::string file_stem(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.' || c == '+' || c == '=';
    if (!ok) c = '_';
  }
  return out;
}

json scalars_json(const ExperimentResult& r) {
  json j = json::object();
  for (const auto& [k, v] : r.scalars) j[k] = v;
  return j;
}

// Series files plus <stem>_summary.json; returns the summary printed to stdout.
json write_result(const ExperimentResult& r, const std::string& stem, const std::string& dir,
                  OutputFormat format) {
  FileList files;
  json names = json::array();
  for (const auto& s : r.series) {
    const std::string file = stem + "_" + s.name + extension(format);
    files.emplace_back(file, format_series(s, r.provenance, format));
    names.push_back(file);
  }
  const std::string summary_file = stem + "_summary.json";
  json prov = json::object();
  for (const auto& [k, v] : r.provenance) prov[k] = v;
  json summary{{"schema_version", kSchemaVersion},
               {"name", r.name},
               {"scalars", scalars_json(r)},
               {"files", names},
               {"provenance", prov}};
  files.emplace_back(summary_file, summary.dump(2) + "\n");
  write_files_atomically(dir, files);
  names.push_back(summary_file);
  return json{{"name", r.name}, {"scalars", scalars_json(r)}, {"files", names}};
}

std::string compact_echo(RunConfig c) {
  c.output.dir.clear();
  return json::parse(echo(c)).dump();
}

std::string compact_echo(SweepConfig c) {
  c.output.dir.clear();
  return json::parse(echo(c)).dump();
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4"};
  return ids;
}

int cmd_simulate(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    RunConfig c = parse_run_config(read_text_file(config_path));
    if (opts.seed) c.seed = *opts.seed;
    if (opts.workers) {
      if (*opts.workers < 1) throw ConfigError("workers", "must be >= 1");
      c.workers = *opts.workers;
    }
    if (opts.format) c.output.format = *opts.format;
    const std::string dir = resolve_out_dir(opts, c.output);

    ExperimentResult r = run_scenario(to_scenario(c));
    r.provenance["config"] = compact_echo(c);
    r.provenance["schema_version"] = std::to_string(kSchemaVersion);
    if (c.rabi) {
      const auto& s = r.series.front();
      const FitResult fit = rabi_frequency(s.trajectory);
      r.scalars["rabi_frequency_mhz"] = fit.frequency_mhz;
      r.scalars["rabi_amplitude"] = fit.amplitude;
      r.scalars["rabi_residual_rms"] = fit.residual_rms;
    }
    out << write_result(r, file_stem(c.name), dir, c.output.format).dump() << "\n";
  });
}

int cmd_reproduce(const std::string& figure_id, const CommandOptions& opts, std::ostream& out,
                  std::ostream& err) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), figure_id) == ids.end()) {
    err << "unknown figure id '" << figure_id << "'; valid ids:";
    for (const auto& id : ids) err << " " << id;
    err << "\n";
    return kExitConfig;
  }
  return guarded(err, [&] {
    if (opts.workers && *opts.workers < 1) throw ConfigError("workers", "must be >= 1");
    ExperimentResult r;
    if (figure_id == "fig2c") {
      r = run_double_passage(PassageRegime::kFast, double_passage_preset(PassageRegime::kFast));
    } else if (figure_id == "fig2d") {
      r = run_double_passage(PassageRegime::kSlow, double_passage_preset(PassageRegime::kSlow));
    } else if (figure_id == "fig4") {
      r = run_cdt_comparison();
    } else {
      const Figure fig = figure_id == "fig3a"   ? Figure::kFig3a
                         : figure_id == "fig3b" ? Figure::kFig3b
                         : figure_id == "fig3c" ? Figure::kFig3c
                                                : Figure::kFig3d;
      r = run_long_drive(fig);
    }
    r.provenance["figure_id"] = figure_id;
    r.provenance["schema_version"] = std::to_string(kSchemaVersion);
    if (opts.seed) r.provenance["seed"] = std::to_string(*opts.seed);
    const OutputFormat format = opts.format.value_or(OutputFormat::kCsv);
    out << write_result(r, figure_id, resolve_out_dir(opts, {}), format).dump() << "\n";
  });
}

int cmd_sweep(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    SweepConfig c = parse_sweep_config(read_text_file(config_path));
    if (opts.workers) {
      if (*opts.workers < 1) throw ConfigError("workers", "must be >= 1");
      c.workers = *opts.workers;
    }
    if (opts.format) c.output.format = *opts.format;
    const std::string dir = resolve_out_dir(opts, c.output);

    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    json summary{{"name", c.name}};
    if (c.kind == SweepKind::kResonance) {
      const auto scan = resonance_scan(c.base, c.parameter, c.grid, c.workers, c.impulse_model);
      columns = {"index", c.parameter == ScanParameter::kPeriod ? "period_ns" : "epsilon_m_mhz",
                 "rotation_angle", "axis_z"};
      for (std::size_t i = 0; i < scan.size(); ++i) {
        rows.push_back({static_cast<double>(i), scan[i].parameter, scan[i].rotation_angle, scan[i].axis_z});
      }
      const std::size_t best = argmin_rotation_angle(scan);
      summary["argmin_parameter"] = scan[best].parameter;
      summary["min_rotation_angle"] = scan[best].rotation_angle;
    } else {
      const LZSweepResult res =
          run_lz_probability_sweep(c.base.delta_mhz, c.base.epsilon_m_mhz, c.grid, c.workers);
      columns = {"index", "period_ns", "transfer_probability"};
      for (std::size_t i = 0; i < res.points.size(); ++i) {
        rows.push_back({static_cast<double>(i), res.points[i].period_ns, res.points[i].transfer_probability});
      }
      summary["delta_fit_mhz"] = res.delta_fit_mhz;
      summary["residual_rms"] = res.residual_rms;
    }
    summary["rows"] = rows.size();

    const std::string config_echo = compact_echo(c);
    std::string content;
    if (c.output.format == OutputFormat::kCsv) {
      content += "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
      content += "# table: " + c.name + "\n";
      content += "# columns: " + std::to_string(columns.size()) + "\n";
      content += "# provenance: " + json{{"config", config_echo}, {"version", std::string(kVersion)}}.dump() + "\n";
      for (std::size_t k = 0; k < columns.size(); ++k) content += (k ? "," : "") + columns[k];
      content += "\n";
      for (const auto& row : rows) {
        content += std::to_string(static_cast<std::size_t>(row[0]));
        for (std::size_t k = 1; k < row.size(); ++k) content += "," + format_number(row[k]);
        content += "\n";
      }
    } else {
      json data = json::object();
      for (std::size_t k = 0; k < columns.size(); ++k) {
        json col = json::array();
        for (const auto& row : rows) {
          if (k == 0) {
            col.push_back(static_cast<std::size_t>(row[0]));
          } else {
            col.push_back(row[k]);
          }
        }
        data[columns[k]] = std::move(col);
      }
      json j{{"schema_version", kSchemaVersion},
             {"table", c.name},
             {"provenance", {{"config", config_echo}, {"version", std::string(kVersion)}}},
             {"columns", columns},
             {"data", std::move(data)}};
      content = j.dump(1) + "\n";
    }
    const std::string file = file_stem(c.name) + extension(c.output.format);
    write_files_atomically(dir, {{file, content}});
    summary["files"] = json::array({file});
    out << summary.dump() << "\n";
  });
}

int cmd_analyze_rabi(const std::string& series_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedSeries s = load_series(series_path);
    const FitResult fit = rabi_frequency(s.trajectory);
    json j{{"series", s.name},
           {"frequency_mhz", fit.frequency_mhz},
           {"amplitude", fit.amplitude},
           {"offset", fit.offset},
           {"residual_rms", fit.residual_rms}};
    out << j.dump() << "\n";
  });
}

}  // namespace lzs::cli
