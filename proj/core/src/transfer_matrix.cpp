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

#include "lzs/transfer_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "lzs/errors.hpp"
#include "lzs/parallel.hpp"
#include "lzs/units.hpp"

namespace lzs {
namespace {

using units::angular_from_mhz;

constexpr double kPi = std::numbers::pi;

// Angular sweep rate of eps at a crossing, rad/ns^2.
double angular_sweep_rate(const DriveParameters& p) {
  return angular_from_mhz(sweep_rate(p));
}

// Antiderivative of sqrt(x^2 + d^2).
double gap_antiderivative(double x, double d) {
  if (d == 0.0) return 0.5 * x * std::abs(x);
  return 0.5 * (x * std::hypot(x, d) + d * d * std::asinh(x / d));
}

Vector2c to_excited_ground(const Eigen::Matrix2d& basis, const Vector2c& diabatic) {
  const Vector2c ge = basis.transpose().cast<Complex>() * diabatic;
  return Vector2c(ge(1), ge(0));
}

Vector2c to_diabatic(const Eigen::Matrix2d& basis, const Vector2c& excited_ground) {
  return basis.col(1).cast<Complex>() * excited_ground(0) +
         basis.col(0).cast<Complex>() * excited_ground(1);
}

SweepDirection direction_at(const DriveParameters& p, double t) {
  return epsilon_slope_at(p, t) > 0.0 ? SweepDirection::kUp : SweepDirection::kDown;
}

// exp(-i chi/2 sigma_x).
Matrix2c tilt_matrix(double chi) {
  const Complex c = std::cos(0.5 * chi);
  const Complex s(0.0, -std::sin(0.5 * chi));
  Matrix2c m;
  m << c, s,
       s, c;
  return m;
}

// Slope of eps just after t (the branch starting at t when t is a breakpoint).
double slope_after(const DriveParameters& p, double t) {
  const auto next = breakpoints(p, t, t + p.period_ns);
  const double probe = next.empty() ? t + 0.25 * p.period_ns : 0.5 * (t + next.front());
  return epsilon_slope_at(p, probe);
}

struct PeriodLayout {
  double c1;  // first crossing
  double c2;  // second crossing
  double c3;  // c1 + T
};

PeriodLayout period_layout(const DriveParameters& p) {
  if (p.epsilon_m_mhz == 0.0) throw DegenerateDriveError("drive has no crossings (epsilon_m = 0)");
  DriveParameters two = p;
  two.n_periods = 2;
  const auto c = crossing_times(two);
  if (c.size() < 3) {
    throw DegenerateDriveError("drive has fewer than two crossings per period");
  }
  return {c[0], c[1], c[0] + p.period_ns};
}

}  // namespace

std::string_view to_string(ImpulseModel m) {
  return m == ImpulseModel::kPlain ? "plain" : "turning-point-corrected";
}

double lz_probability(const DriveParameters& p) {
  p.validate();
  const double v = angular_sweep_rate(p);
  const double delta = angular_from_mhz(p.delta_mhz);
  return std::exp(-kPi * delta * delta / (2.0 * v));
}

double adiabaticity(const DriveParameters& p) {
  p.validate();
  const double v = angular_sweep_rate(p);
  const double delta = angular_from_mhz(p.delta_mhz);
  return delta * delta / (4.0 * v);
}

double stokes_phase(double adiabaticity) {
  if (!(adiabaticity > 0.0) || !std::isfinite(adiabaticity)) {
    throw DomainError("stokes_phase: adiabaticity must be positive and finite");
  }
  const double d = adiabaticity;
  gsl_sf_result ln_mod;
  gsl_sf_result arg;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_sf_lngamma_complex_e(1.0, -d, &ln_mod, &arg);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS) throw DomainError("stokes_phase: log-gamma evaluation failed");
  // GSL wraps arg Gamma into (-pi, pi]; the true phase lies in (0, pi/4].
  const double raw = kPi / 4.0 + d * (std::log(d) - 1.0) + arg.val;
  return std::remainder(raw, 2.0 * kPi);
}

LZNode LZNode::from_drive(const DriveParameters& p) {
  LZNode node;
  node.p_lz = lz_probability(p);
  node.adiabaticity = lzs::adiabaticity(p);
  node.stokes_phase = node.adiabaticity > 0.0 ? lzs::stokes_phase(node.adiabaticity) : kPi / 4.0;
  return node;
}

TransferStep mixing_matrix(const LZNode& node, SweepDirection dir, double t_crossing_ns) {
  const double p = std::clamp(node.p_lz, 0.0, 1.0);
  const Complex alpha = std::sqrt(1.0 - p) * std::polar(1.0, -node.stokes_phase);
  const Complex gamma = std::sqrt(p);
  TransferStep step;
  step.kind = StepKind::kMixing;
  step.t_begin_ns = step.t_end_ns = t_crossing_ns;
  if (dir == SweepDirection::kUp) {
    step.matrix << alpha, -std::conj(gamma),
                   gamma, std::conj(alpha);
  } else {
    step.matrix << alpha, std::conj(gamma),
                   -gamma, std::conj(alpha);
  }
  return step;
}

double free_phase(const DriveParameters& p, double t1_ns, double t2_ns) {
  if (t1_ns > t2_ns) throw DomainError("free_phase: t1 must not exceed t2");
  if (t1_ns == t2_ns) return 0.0;
  const double d = angular_from_mhz(p.delta_mhz);
  auto knots = breakpoints(p, t1_ns, t2_ns);
  knots.push_back(t2_ns);
  double a = t1_ns;
  double total = 0.0;
  for (double b : knots) {
    const double ea = angular_from_mhz(epsilon_at(p, a));
    const double eb = angular_from_mhz(epsilon_at(p, b));
    const double slope = (eb - ea) / (b - a);
    if (slope == 0.0) {
      total += std::hypot(ea, d) * (b - a);
    } else {
      total += (gap_antiderivative(eb, d) - gap_antiderivative(ea, d)) / slope;
    }
    a = b;
  }
  return 0.5 * total;
}

TransferStep free_evolution(const DriveParameters& p, double t1_ns, double t2_ns) {
  const double zeta = free_phase(p, t1_ns, t2_ns);
  TransferStep step;
  step.kind = StepKind::kFree;
  step.t_begin_ns = t1_ns;
  step.t_end_ns = t2_ns;
  step.matrix << std::polar(1.0, -zeta), 0.0,
                 0.0, std::polar(1.0, zeta);
  return step;
}

double superadiabatic_tilt(const DriveParameters& p, double epsilon_mhz, double slope_mhz_per_ns) {
  const double d = angular_from_mhz(p.delta_mhz);
  if (d == 0.0) return 0.0;
  const double e = angular_from_mhz(epsilon_mhz);
  const double omega2 = e * e + d * d;
  const double theta_dot = -d * angular_from_mhz(slope_mhz_per_ns) / omega2;
  return std::atan(theta_dot / std::sqrt(omega2));
}

TransferStep turning_point_step(const DriveParameters& p, double t_breakpoint_ns, ImpulseModel model) {
  TransferStep step;
  step.kind = StepKind::kTurningPoint;
  step.t_begin_ns = step.t_end_ns = t_breakpoint_ns;
  if (model == ImpulseModel::kPlain) {
    step.matrix = Matrix2c::Identity();
    return step;
  }
  const double eps = epsilon_at(p, t_breakpoint_ns);
  const double before = superadiabatic_tilt(p, eps, epsilon_slope_at(p, t_breakpoint_ns));
  const double after = superadiabatic_tilt(p, eps, slope_after(p, t_breakpoint_ns));
  step.matrix = tilt_matrix(after).adjoint() * tilt_matrix(before);
  return step;
}

RotationDecomposition decompose_rotation(const Matrix2c& u) {
  Matrix2c s = u / std::sqrt(u.determinant());
  if (s.trace().real() < 0.0) s = -s;
  const double c = std::clamp(0.5 * s.trace().real(), 0.0, 1.0);
  RotationDecomposition out;
  out.angle = 2.0 * std::acos(c);
  // s = c I - i sin(angle/2) n.sigma; these are sin(angle/2) * n.
  Eigen::Vector3d n(-0.5 * (s(0, 1) + s(1, 0)).imag(),
                    0.5 * (s(1, 0) - s(0, 1)).real(),
                    0.5 * (s(1, 1) - s(0, 0)).imag());
  const double norm = n.norm();
  if (norm == 0.0) {
    out.axis = Eigen::Vector3d::UnitZ();
    return out;
  }
  n /= norm;
  if (c < 1e-14) {
    // angle = pi: n and -n describe the same rotation.
    const bool flip = n.z() < 0.0 || (n.z() == 0.0 && (n.x() < 0.0 || (n.x() == 0.0 && n.y() < 0.0)));
    if (flip) n = -n;
  }
  out.axis = n;
  return out;
}

std::vector<TransferStep> period_schedule(const DriveParameters& p, ImpulseModel model) {
  p.validate();
  const PeriodLayout lay = period_layout(p);
  const LZNode node = LZNode::from_drive(p);
  DriveParameters two = p;
  two.n_periods = 2;
  std::vector<TransferStep> steps;
  auto append_segment = [&](double ta, double tb) {
    double a = ta;
    for (double bp : breakpoints(two, ta, tb)) {
      steps.push_back(free_evolution(two, a, bp));
      if (model == ImpulseModel::kTurningPointCorrected) steps.push_back(turning_point_step(two, bp, model));
      a = bp;
    }
    steps.push_back(free_evolution(two, a, tb));
  };
  steps.push_back(mixing_matrix(node, direction_at(p, lay.c1), lay.c1));
  append_segment(lay.c1, lay.c2);
  steps.push_back(mixing_matrix(node, direction_at(p, lay.c2), lay.c2));
  append_segment(lay.c2, lay.c3);
  return steps;
}

PeriodRotation single_period_rotation(const DriveParameters& p, ImpulseModel model) {
  const PeriodLayout lay = period_layout(p);
  PeriodRotation out;
  out.g1 = Matrix2c::Identity();
  for (const auto& step : period_schedule(p, model)) out.g1 = step.matrix * out.g1;
  const auto rot = decompose_rotation(out.g1);
  out.rotation_angle = rot.angle;
  out.axis = rot.axis;
  out.anchor_ns = lay.c1;
  if (p.delta_mhz > 0.0 && p.epsilon_m_mhz / p.delta_mhz < 5.0) {
    std::ostringstream msg;
    msg << "epsilon_m/delta = " << p.epsilon_m_mhz / p.delta_mhz
        << " < 5: adiabatic-impulse model is inaccurate";
    out.warning = msg.str();
  }
  return out;
}

Trajectory stroboscopic_evolve(const DriveParameters& p, int n, const QubitState& initial,
                               ImpulseModel model) {
  if (n < 1) throw PreconditionError("stroboscopic_evolve: n must be >= 1");
  if (initial.basis() != Basis::kDiabatic) throw DomainError("initial state must be diabatic");
  const PeriodRotation rot = single_period_rotation(p, model);
  const PeriodLayout lay = period_layout(p);
  const LZNode node = LZNode::from_drive(p);
  const bool corrected = model == ImpulseModel::kTurningPointCorrected;

  DriveParameters ext = p;
  ext.n_periods = std::max(p.n_periods, n + 1);

  // Free evolution over [ta, tb] including the kicks strictly inside.
  auto segment = [&](double ta, double tb) {
    Matrix2c m = Matrix2c::Identity();
    double a = ta;
    for (double bp : breakpoints(ext, ta, tb)) {
      m = free_evolution(ext, a, bp).matrix * m;
      if (corrected) m = turning_point_step(ext, bp, model).matrix * m;
      a = bp;
    }
    return Matrix2c(free_evolution(ext, a, tb).matrix * m);
  };
  // Sample at the turning point between two crossings (midpoint if none).
  auto sample_time = [&](double ta, double tb) {
    const auto bps = breakpoints(ext, ta, tb);
    return bps.size() == 1 ? bps.front() : 0.5 * (ta + tb);
  };
  const double s1 = sample_time(lay.c1, lay.c2);
  const double s2 = sample_time(lay.c2, lay.c3);
  const Matrix2c n1 = mixing_matrix(node, direction_at(p, lay.c1)).matrix;
  const Matrix2c n2 = mixing_matrix(node, direction_at(p, lay.c2)).matrix;
  const Matrix2c to_s1 = segment(lay.c1, s1);
  const Matrix2c first_half = segment(lay.c1, lay.c2);
  const Matrix2c to_s2 = segment(lay.c2, s2);

  const double delta = p.delta_mhz;
  // slope is the branch the amplitudes refer to.
  auto frame = [&](double t, double slope) {
    const double eps = epsilon_at(ext, t);
    const double chi = corrected ? superadiabatic_tilt(ext, eps, slope) : 0.0;
    return std::pair{adiabatic_basis(eps, delta), tilt_matrix(chi)};
  };
  // Samples sit on a kink, so the branch comes from the preceding crossing,
  // not from t (rounding in t + k T can land on either side).
  const double slope1 = epsilon_slope_at(ext, lay.c1);
  const double slope2 = epsilon_slope_at(ext, lay.c2);
  auto diabatic_at = [&](double t, double slope, const Vector2c& amps) {
    const auto [basis, tilt] = frame(t, slope);
    return to_diabatic(basis, tilt * amps);
  };

  Trajectory traj;
  traj.basis = Basis::kDiabatic;
  auto record = [&](double t, const Vector2c& psi) {
    traj.times_ns.push_back(t);
    traj.states.push_back(psi);
    traj.populations.push_back({std::norm(psi(0)), std::norm(psi(1))});
  };

  const Vector2c psi0 = initial.vector();
  record(0.0, psi0);
  const auto [basis0, tilt0] = frame(0.0, slope_after(ext, 0.0));
  const Vector2c amps0 = tilt0.adjoint() * to_excited_ground(basis0, psi0);
  Vector2c anchor = segment(0.0, lay.c1) * amps0;

  for (int k = 0; k < n; ++k) {
    const double shift = k * p.period_ns;
    const Vector2c after_first = n1 * anchor;
    record(s1 + shift, diabatic_at(s1 + shift, slope1, to_s1 * after_first));
    const Vector2c after_second = n2 * (first_half * after_first);
    record(s2 + shift, diabatic_at(s2 + shift, slope2, to_s2 * after_second));
    anchor = rot.g1 * anchor;
  }
  return traj;
}

std::vector<ScanPoint> resonance_scan(const DriveParameters& base, ScanParameter which,
                                      std::span<const double> grid, int workers, ImpulseModel model) {
  if (grid.empty()) throw PreconditionError("resonance_scan: empty grid");
  std::vector<ScanPoint> out(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    DriveParameters p = base;
    if (which == ScanParameter::kPeriod) {
      p.period_ns = grid[i];
    } else {
      p.epsilon_m_mhz = grid[i];
    }
    const PeriodRotation rot = single_period_rotation(p, model);
    out[i] = ScanPoint{grid[i], rot.rotation_angle, rot.axis.z()};
  });
  return out;
}

std::size_t argmin_rotation_angle(std::span<const ScanPoint> scan) {
  if (scan.empty()) throw PreconditionError("argmin_rotation_angle: empty scan");
  const auto it = std::min_element(scan.begin(), scan.end(), [](const ScanPoint& a, const ScanPoint& b) {
    return a.rotation_angle < b.rotation_angle;
  });
  return static_cast<std::size_t>(it - scan.begin());
}

}  // namespace lzs
