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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lzs/drive.hpp"
#include "lzs/state.hpp"

namespace lzs {

/// Samples far enough from the crossing (|eps| > threshold_ratio * Delta) that
/// diabatic and adiabatic populations differ by little.
struct AdiabaticMask {
  double threshold_ratio = 3.0;
  std::vector<std::size_t> kept_indices;
};

AdiabaticMask make_adiabatic_mask(const Trajectory& traj, const DriveParameters& p,
                                  double threshold_ratio = 3.0);

/// Population-level discrepancy between the bases, (1 - |cos theta|)/2 with
/// cos theta = eps / sqrt(eps^2 + Delta^2).
double basis_discrepancy(double epsilon_mhz, double delta_mhz);

/// Population map diabatic (P0, P1) -> adiabatic (P_ground, P_excited) at
/// detuning eps. Coherences are not used.
std::array<double, 2> adiabatic_populations(std::array<double, 2> diabatic, double epsilon_mhz,
                                            double delta_mhz);

/// Inverse of adiabatic_populations; requires eps != 0.
std::array<double, 2> diabatic_populations(std::array<double, 2> adiabatic, double epsilon_mhz,
                                           double delta_mhz);

/// Converts the kept samples of a diabatic trajectory to the adiabatic basis.
/// Pure-state trajectories are rotated amplitude by amplitude; ensemble
/// averages (no states) fall back to the population map above, which drops
/// coherences. Throws DomainError if traj is already adiabatic.
Trajectory to_adiabatic(const Trajectory& traj, const DriveParameters& p, const AdiabaticMask& mask);

struct FitResult {
  double frequency_mhz = 0.0;
  double amplitude = 0.0;
  std::optional<double> decay_time_us;
  double offset = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
};

/// Dominant oscillation frequency of a uniformly sampled signal: Hann window,
/// zero-padded DFT, quadratic interpolation of the log-magnitude peak.
/// Amplitude/offset/residual come from a linear sinusoid fit at that
/// frequency. Throws NoOscillationError when the peak is below 3x the median
/// spectral magnitude or the signal is flat, PreconditionError on non-uniform
/// sampling or fewer than three oscillation periods in the window.
FitResult dominant_frequency(std::span<const double> times_ns, std::span<const double> signal);

/// dominant_frequency of P0(t).
FitResult rabi_frequency(const Trajectory& traj);

/// Least-squares fit of A exp[-(t/tau)^2] cos(2 pi f t) + c (t in us).
/// Throws FitError on flat data or non-convergence.
FitResult ramsey_fit(std::span<const double> times_ns, std::span<const double> signal);

/// ramsey_fit of P1(t).
FitResult ramsey_fit(const Trajectory& traj);

struct StepJump {
  double crossing_time_ns = 0.0;
  double jump = 0.0;  ///< P1(t_c + w/2) - P1(t_c - w/2).
  bool partial = false;
};

struct StepDetection {
  double window_ns = 0.0;
  std::vector<StepJump> steps;
  bool partial = false;  ///< Some window was clipped to the trajectory bounds.
};

/// Population change across a window of width window_fraction * T centred on
/// each crossing inside the trajectory. Windows that leave the trajectory are
/// clipped and flagged.
StepDetection detect_steps(const Trajectory& traj, const DriveParameters& p,
                           double window_fraction = 0.1);

/// True when consecutive jumps (ignoring those below min_magnitude) alternate in sign.
bool steps_alternate(const StepDetection& steps, double min_magnitude = 1e-3);

/// Linear interpolation of P1 at time t; t must lie within the trajectory.
double interpolate_p1(const Trajectory& traj, double t_ns);

}  // namespace lzs
