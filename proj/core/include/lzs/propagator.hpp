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
#include <limits>
#include <optional>
#include <string_view>

#include "lzs/drive.hpp"
#include "lzs/state.hpp"

namespace lzs {

enum class IntegratorMethod {
  kFixedRk4,        ///< Classical RK4 on the 2x2 system.
  kPiecewiseExact,  ///< Fourth-order Magnus step, exact exponential per sub-step.
};

std::string_view to_string(IntegratorMethod m);

struct IntegratorConfig {
  double max_step_ns = std::numeric_limits<double>::infinity();
  int steps_per_min_period = 400;
  double norm_drift_tolerance = 1e-8;
  IntegratorMethod method = IntegratorMethod::kFixedRk4;

  bool operator==(const IntegratorConfig&) const = default;
};

/// Step ceiling min(T, 2 pi / Omega_max) / steps_per_min_period, further capped
/// by max_step_ns. Omega_max is the largest instantaneous gap of the drive.
double max_time_step_ns(const DriveParameters& p, const IntegratorConfig& cfg);

struct TimeSpan {
  double begin_ns;
  double end_ns;
};

/// Integrates i d|psi>/dt = H(t)|psi> for the rotating-frame Hamiltonian and
/// samples at begin + k * sample_every (plus the span end). Kinks of the
/// triangle wave and every sample time are step boundaries, so the grid is
/// identical for identical inputs.
///
/// The state is never renormalized. If the norm drifts more than
/// cfg.norm_drift_tolerance, IntegrationError is thrown.
Trajectory evolve(const DriveParameters& p, const IntegratorConfig& cfg, const QubitState& initial,
                  TimeSpan span, double sample_every_ns);

/// Lab-frame toy model -omega0/2 sigma_z + delta cos(phi(t)) sigma_x with
/// phi(t) = omega0 t + 2 pi int eps. Its populations coincide with evolve()
/// up to counter-rotating (Bloch-Siegert) corrections of order delta/omega0.
/// Requires omega0/delta >= 20 (any omega0 when delta is zero).
Trajectory evolve_lab_frame_toy(double delta_mhz, double omega0_mhz, const DriveParameters& drive,
                                const QubitState& initial, TimeSpan span, double sample_every_ns,
                                const IntegratorConfig& cfg = {});

/// Quasi-static Gaussian detuning noise.
struct DephasingConfig {
  /// Gaussian FID time. Infinity disables the noise.
  double t2_star_us = std::numeric_limits<double>::infinity();
  int n_samples = 1;
  std::uint64_t seed = 20140101;
  int workers = 1;
};

/// Angular standard deviation sqrt(2)/T2* of the static detuning, in rad/ns.
double dephasing_sigma(double t2_star_us);

/// The detuning offsets (MHz) used for an ensemble: stratified draws from
/// N(0, sigma^2), one per equal-probability stratum, jittered by the seeded
/// generator. Deterministic for a fixed seed.
std::vector<double> dephasing_offsets_mhz(const DephasingConfig& noise);

/// Average of the populations of n_samples runs, each with eps -> eps + delta_i.
/// `readout`, when given, is applied to each member's state before taking
/// populations (e.g. the final pi/2 pulse of a Ramsey sequence). The result
/// carries no states unless n_samples == 1.
Trajectory evolve_ensemble_dephased(const DriveParameters& p, const IntegratorConfig& cfg,
                                    const DephasingConfig& noise, const QubitState& initial,
                                    TimeSpan span, double sample_every_ns,
                                    const std::optional<Matrix2c>& readout = std::nullopt);

/// exp(-i angle/2 sigma_y).
Matrix2c rotation_y(double angle);

}  // namespace lzs
