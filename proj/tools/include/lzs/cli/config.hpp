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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzs/experiments.hpp"

namespace lzs::cli {

inline constexpr int kSchemaVersion = 1;

/// Bad or unknown configuration key. key() names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class OutputFormat { kCsv, kJson };

std::string to_string(OutputFormat f);
OutputFormat parse_output_format(const std::string& text);

struct OutputConfig {
  std::string dir;  ///< Empty: $LZS_OUT_DIR, else the working directory.
  OutputFormat format = OutputFormat::kCsv;

  bool operator==(const OutputConfig&) const = default;
};

/// Configuration of `simulate`. The file is a flat JSON object; every key
/// carries its unit in the name.
struct RunConfig {
  std::string name = "simulation";
  std::string preset;  ///< fig3a..fig3d, or empty for raw drive keys.
  DriveParameters drive;
  Method method = Method::kOde;
  ImpulseModel impulse_model = ImpulseModel::kTurningPointCorrected;
  IntegratorConfig integrator;
  double t_start_ns = 0.0;
  double t_end_ns = 0.0;  ///< <= t_start_ns: whole drive.
  double sample_every_ns = 2.0;
  std::optional<double> t2_star_us;
  int n_samples = 1;
  std::uint64_t seed = 20140101;
  int workers = 1;
  std::optional<double> adiabatic_threshold_ratio;
  bool rabi = false;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;
};

enum class SweepKind { kResonance, kLzProbability };

/// Configuration of `sweep`.
struct SweepConfig {
  std::string name = "sweep";
  SweepKind kind = SweepKind::kResonance;
  ScanParameter parameter = ScanParameter::kPeriod;
  DriveParameters base;
  std::vector<double> grid;
  ImpulseModel impulse_model = ImpulseModel::kTurningPointCorrected;
  int workers = 1;
  OutputConfig output;

  bool operator==(const SweepConfig&) const = default;
};

RunConfig parse_run_config(const std::string& json_text);
SweepConfig parse_sweep_config(const std::string& json_text);

/// Full echo, including defaults. parse(echo(c)) == c.
std::string echo(const RunConfig& c);
std::string echo(const SweepConfig& c);

ScenarioSpec to_scenario(const RunConfig& c);

std::string read_text_file(const std::string& path);

}  // namespace lzs::cli
