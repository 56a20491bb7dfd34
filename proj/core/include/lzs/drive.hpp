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

#include <vector>

namespace lzs {

/// Parameters of the rotating-frame qubit Hamiltonian
///
///     H(t) = eps(t)/2 sigma_z + delta/2 sigma_x
///
/// with eps(t) a triangle wave of amplitude epsilon_m and period T that starts
/// at its trough (-epsilon_m) when t_offset is zero.
struct DriveParameters {
  double delta_mhz = 0.0;      ///< Coupling, equal to the minimum gap at the crossing.
  double epsilon_m_mhz = 0.0;  ///< Triangle-wave amplitude (half the range).
  double period_ns = 0.0;
  int n_periods = 1;
  double t_offset_ns = 0.0;  ///< Phase shift of the triangle: eps(t) uses t + t_offset.
  /// Static shift added to eps(t). Zero for the figure presets; used for
  /// quasi-static dephasing ensembles and free-induction decay.
  double detuning_offset_mhz = 0.0;

  /// Throws DomainError on NaN/inf, negative delta or epsilon_m,
  /// non-positive period, or n_periods < 1.
  void validate() const;

  double duration_ns() const { return n_periods * period_ns; }

  bool operator==(const DriveParameters&) const = default;
};

/// Detuning eps(t) in MHz. Exact at the apex and trough; the breakpoint itself
/// is evaluated on the branch that ends there.
double epsilon_at(const DriveParameters& p, double t_ns);

/// d eps/dt in MHz/ns on the branch containing t (left branch at breakpoints).
double epsilon_slope_at(const DriveParameters& p, double t_ns);

/// Integral of eps over [t1, t2] in MHz*ns (closed form per linear piece).
double epsilon_integral(const DriveParameters& p, double t1_ns, double t2_ns);

/// Apex/trough times strictly inside (t1, t2), ascending.
std::vector<double> breakpoints(const DriveParameters& p, double t1_ns, double t2_ns);

/// Sign changes of eps(t) inside [0, n_periods * T], ascending. Empty when
/// epsilon_m is zero or the static offset keeps eps away from zero.
std::vector<double> crossing_times(const DriveParameters& p);

/// Sweep rate 4 epsilon_m / T in MHz/ns. Throws DegenerateDriveError when
/// epsilon_m is zero.
double sweep_rate(const DriveParameters& p);

/// Ground-state spin parameters of an NV center with a 15N nucleus.
struct NVParameters {
  double d_zfs_mhz = 2870.0;
  double gamma_e_mhz_per_gauss = 2.8;
  double a_zz_mhz = -3.05;
  double b_field_gauss = 0.0;
  double i_z = -0.5;

  void validate() const;  // i_z must be exactly +-1/2
};

/// |m_s=0> -> |m_s=+1> transition frequency D + gamma_e B + A_zz I_z (MHz).
double nv_transition_frequency(const NVParameters& nv);

}  // namespace lzs
