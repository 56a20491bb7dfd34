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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lzs/drive.hpp"
#include "lzs/state.hpp"

// Adiabatic-impulse model. Between crossings the state follows the adiabatic
// basis and only picks up the dynamical phase zeta; each crossing mixes the
// two adiabatic states through the LZ matrix N. Matrices act on adiabatic
// amplitudes ordered (excited, ground) in the gauge of adiabatic_basis().
//
// At the apex and trough of the triangle the sweep velocity reverses, which
// kicks the state off the (first-order superadiabatic) basis by an angle of
// order Delta v / Omega^3. The corrected model applies that kick as an extra
// step at each turning point; the plain model omits it.
namespace lzs {

/// Survival probability of the diabatic state for one passage,
/// exp(-pi Delta^2 / (2 v)) in angular units.
double lz_probability(const DriveParameters& p);

/// Adiabaticity Delta^2/(4 v) in angular units, so that P_LZ = exp(-2 pi delta).
double adiabaticity(const DriveParameters& p);

/// Stokes phase pi/4 + delta (ln delta - 1) + arg Gamma(1 - i delta).
/// Throws DomainError for delta <= 0.
double stokes_phase(double adiabaticity);

struct LZNode {
  double p_lz = 1.0;
  double stokes_phase = 0.0;  ///< Rad; the delta -> 0 limit pi/4 when the coupling vanishes.
  double adiabaticity = 0.0;

  static LZNode from_drive(const DriveParameters& p);
};

enum class StepKind { kMixing, kFree, kTurningPoint };
enum class SweepDirection { kUp, kDown };

enum class ImpulseModel {
  kTurningPointCorrected,  ///< N and U plus the velocity-reversal kick at apex/trough.
  kPlain,                  ///< N and U only.
};

std::string_view to_string(ImpulseModel m);

struct TransferStep {
  Matrix2c matrix;
  StepKind kind = StepKind::kFree;
  double t_begin_ns = 0.0;
  double t_end_ns = 0.0;
};

/// N = [[alpha, -gamma*], [gamma, alpha*]], alpha = sqrt(1-P) e^{-i phi},
/// gamma = sqrt(P). A down-sweep in the same gauge is sigma_z N sigma_z.
TransferStep mixing_matrix(const LZNode& node, SweepDirection dir = SweepDirection::kUp,
                           double t_crossing_ns = 0.0);

/// zeta = 1/2 int_{t1}^{t2} sqrt(eps^2 + Delta^2) dt in angular units (rad),
/// exact per linear piece of the triangle. Throws DomainError if t1 > t2.
double free_phase(const DriveParameters& p, double t1_ns, double t2_ns);

/// diag(e^{-i zeta}, e^{+i zeta}) on (excited, ground).
TransferStep free_evolution(const DriveParameters& p, double t1_ns, double t2_ns);

/// Tilt atan(theta_dot / Omega) of the first-order superadiabatic basis
/// relative to the adiabatic one, for detuning eps (MHz) moving at slope
/// (MHz/ns). Zero when Delta is zero.
double superadiabatic_tilt(const DriveParameters& p, double epsilon_mhz, double slope_mhz_per_ns);

/// exp(-i (chi_before - chi_after)/2 sigma_x) at a breakpoint t_b, where the
/// slope of eps flips sign. Identity for ImpulseModel::kPlain.
TransferStep turning_point_step(const DriveParameters& p, double t_breakpoint_ns,
                                ImpulseModel model = ImpulseModel::kTurningPointCorrected);

/// Angle/axis of an SU(2) element after removing the global phase
/// (det = 1, Re tr >= 0). angle in [0, pi]; at angle = pi the axis is chosen
/// with z >= 0, then x >= 0. A zero rotation reports the z axis.
struct RotationDecomposition {
  double angle = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};
RotationDecomposition decompose_rotation(const Matrix2c& u);

struct PeriodRotation {
  Matrix2c g1;
  double rotation_angle = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  double anchor_ns = 0.0;          ///< First crossing; G1 maps the state just before it one period ahead.
  std::optional<std::string> warning;  ///< Set when epsilon_m/Delta < 5.
};

/// G1 = U2 N2 U1 N1 starting at the first crossing, where U1 and U2 are the
/// free evolutions between crossings (each through one turning point, whose
/// kick is included for the corrected model). Throws DegenerateDriveError
/// when the drive has fewer than two crossings per period.
PeriodRotation single_period_rotation(const DriveParameters& p,
                                      ImpulseModel model = ImpulseModel::kTurningPointCorrected);

/// The steps making up G1, in application order (N1, free, [kick], free, N2, ...).
std::vector<TransferStep> period_schedule(const DriveParameters& p,
                                          ImpulseModel model = ImpulseModel::kTurningPointCorrected);

/// Transfer-matrix evolution over n periods starting at t = 0. The anchor
/// states just before each period's first crossing are G1^k applied to the
/// initial state; samples are emitted at the turning points midway between
/// consecutive crossings (apex and trough), far from the impulse regions,
/// where the amplitudes are mapped back to the diabatic basis. The first
/// sample is t = 0.
Trajectory stroboscopic_evolve(const DriveParameters& p, int n, const QubitState& initial,
                               ImpulseModel model = ImpulseModel::kTurningPointCorrected);

enum class ScanParameter { kPeriod, kEpsilonM };

struct ScanPoint {
  double parameter = 0.0;
  double rotation_angle = 0.0;
  double axis_z = 0.0;
};

/// G1 diagnostics over a grid of T (ns) or epsilon_m (MHz); output order
/// matches grid order for any worker count.
std::vector<ScanPoint> resonance_scan(const DriveParameters& base, ScanParameter which,
                                      std::span<const double> grid, int workers = 1,
                                      ImpulseModel model = ImpulseModel::kTurningPointCorrected);

/// Index of the smallest rotation angle (CDT candidate) in a scan.
std::size_t argmin_rotation_angle(std::span<const ScanPoint> scan);

}  // namespace lzs
