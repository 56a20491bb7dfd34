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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lzs/analysis.hpp"
#include "lzs/drive.hpp"
#include "lzs/propagator.hpp"
#include "lzs/state.hpp"
#include "lzs/transfer_matrix.hpp"

namespace lzs {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Method { kOde, kTransferMatrix, kBoth };

std::string_view to_string(Method m);

struct ScenarioSpec {
  std::string name;
  DriveParameters drive;
  Method method = Method::kOde;
  std::optional<DephasingConfig> noise;
  IntegratorConfig integrator;
  TimeSpan span{0.0, 0.0};  ///< end <= begin means the full drive duration.
  double sample_every_ns = 2.0;
  ImpulseModel impulse_model = ImpulseModel::kTurningPointCorrected;
  /// When set, the "ode" series gets adiabatic columns where |eps| > ratio * Delta.
  std::optional<double> adiabatic_threshold_ratio;
};

/// Kept samples of a diabatic series converted to the adiabatic basis.
struct AdiabaticColumns {
  std::vector<std::size_t> indices;  ///< Rows of the parent series.
  Trajectory trajectory;
};

struct NamedSeries {
  std::string name;
  Trajectory trajectory;
  std::vector<double> epsilon_mhz;  ///< Drive detuning at each sample.
  std::optional<AdiabaticColumns> adiabatic;
};

/// Everything a run produced. Provenance is an ordered key/value echo of the
/// full configuration (drive, integrator, seed, version), enough to rerun.
struct ExperimentResult {
  std::string name;
  std::vector<NamedSeries> series;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> provenance;

  const NamedSeries& find_series(std::string_view series_name) const;
};

/// Runs a scenario: ODE series, transfer-matrix series, or both plus the
/// period-boundary comparison scalar "max_abs_deviation".
ExperimentResult run_scenario(const ScenarioSpec& spec);

enum class PassageRegime { kFast, kSlow };

/// One-period preset for the double-passage experiment: the fast regime uses
/// the fig3a drive, the slow one the fig3b drive.
DriveParameters double_passage_preset(PassageRegime regime);

/// ODE P0(t) over one period, the transfer-matrix prediction at trough/apex,
/// and LZ steps. Scalars: p_lz, first_passage_transfer (population of the
/// adiabatic ground state at the apex after the first crossing, i.e. the
/// diabatic |0> -> |1> transfer), step_1, step_2, step_window_ns.
ExperimentResult run_double_passage(PassageRegime regime, const DriveParameters& drive);

enum class Figure { kFig3a, kFig3b, kFig3c, kFig3d };

std::string_view to_string(Figure f);

struct DriveOverrides {
  std::optional<double> delta_mhz;
  std::optional<double> epsilon_m_mhz;
  std::optional<double> period_ns;
  std::optional<int> n_periods;

  bool empty() const { return !delta_mhz && !epsilon_m_mhz && !period_ns && !n_periods; }
};

/// Frozen parameter set and duration for a long-drive preset.
ScenarioSpec long_drive_preset(Figure figure, const DriveOverrides& overrides = {});

/// Long-drive reproduction. Series "ode" and "transfer_matrix"; fig3c adds
/// adiabatic columns to "ode". Scalars include p_lz, g1_rotation_angle,
/// g1_axis_{x,y,z}, max_abs_deviation, and per figure rabi_frequency_mhz
/// (fig3a) or steps_alternate (fig3d).
ExperimentResult run_long_drive(Figure figure, const DriveOverrides& overrides = {});

/// fig3a drive at T = 128 ns and T = 149 ns over the same window.
/// Scalars: max_p1_constructive, max_p1_destructive and the two G1 angles.
ExperimentResult run_cdt_comparison(double period_constructive_ns = 128.0,
                                    double period_destructive_ns = 149.0,
                                    double window_ns = 1000.0);

struct LZSweepPoint {
  double period_ns = 0.0;
  double transfer_probability = 0.0;
};

struct LZSweepResult {
  std::vector<LZSweepPoint> points;
  double delta_fit_mhz = 0.0;
  double residual_rms = 0.0;
};

/// Single-passage |0> -> |1> probability (ODE, trough to apex) for each sweep
/// period, then a least-squares fit of 1 - exp(-pi^2 Delta^2 / v) for Delta.
LZSweepResult run_lz_probability_sweep(double delta_mhz, double epsilon_m_mhz,
                                       std::span<const double> periods_ns, int workers = 1);

}  // namespace lzs
