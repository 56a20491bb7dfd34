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

#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

#include "lzs/errors.hpp"
#include "lzs/propagator.hpp"
#include "test_util.hpp"

using namespace lzs;
using lzs::testing::max_unitarity_defect;

namespace {

constexpr double kPi = std::numbers::pi;

DriveParameters drive(double delta, double eps_m, double period, int n = 1) {
  DriveParameters p;
  p.delta_mhz = delta;
  p.epsilon_m_mhz = eps_m;
  p.period_ns = period;
  p.n_periods = n;
  return p;
}

Matrix2c rotation(double angle, const Eigen::Vector3d& n) {
  Matrix2c sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  const Matrix2c ns = n.x() * sx + n.y() * sy + n.z() * sz;
  return std::cos(angle / 2) * Matrix2c::Identity() - Complex(0, 1) * std::sin(angle / 2) * ns;
}

// Drive with the given adiabaticity and eps_m / Delta ratio.
DriveParameters drive_for_adiabaticity(double delta_mhz, double adiabaticity, double ratio) {
  const double d_ang = 2 * kPi * 1e-3 * delta_mhz;
  const double v_ang = d_ang * d_ang / (4 * adiabaticity);
  const double v = v_ang / (2 * kPi * 1e-3);
  const double eps_m = ratio * delta_mhz;
  return drive(delta_mhz, eps_m, 4 * eps_m / v);
}

// Stokes phase read off an ODE single passage from trough to apex: the
// adiabatic-basis scattering matrix has S_ee = sqrt(1-P) exp(-i(phi + zeta_a + zeta_b)).
// The dynamical phases come from quadrature, not the closed form under test.
double ode_stokes_phase(const DriveParameters& p) {
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::kPiecewiseExact;
  cfg.steps_per_min_period = 200;
  const double t_a = 0.0;
  const double t_c = 0.25 * p.period_ns;
  const double t_b = 0.5 * p.period_ns;
  const Matrix2c u = lzs::testing::ode_propagator(p, cfg, {t_a, t_b});
  const Eigen::Matrix2d ba = adiabatic_basis(epsilon_at(p, t_a), p.delta_mhz);
  const Eigen::Matrix2d bb = adiabatic_basis(epsilon_at(p, t_b), p.delta_mhz);
  const Vector2c excited_a = ba.col(1).cast<Complex>();
  const Vector2c excited_b = bb.col(1).cast<Complex>();
  const Complex s_ee = excited_b.dot(u * excited_a);
  const double zeta = lzs::testing::quadrature_free_phase(p, t_a, t_c) + lzs::testing::quadrature_free_phase(p, t_c, t_b);
  return std::remainder(-std::arg(s_ee) - zeta, 2 * kPi);
}

// Rotation angle of the ODE one-period propagator (basis independent).
double ode_period_angle(const DriveParameters& p) {
  DriveParameters two = p;
  two.n_periods = 2;
  IntegratorConfig cfg;
  cfg.steps_per_min_period = 1000;
  return decompose_rotation(lzs::testing::ode_propagator(two, cfg, {0.0, p.period_ns})).angle;
}

}  // namespace

TEST(lz_probability, anchors) {
  EXPECT_NEAR(lz_probability(drive(5.57, 100.0, 128.0)), 0.91, 0.005);
  EXPECT_NEAR(lz_probability(drive(9.60, 50.4, 606.0)), 0.065, 0.002);
  EXPECT_NEAR(lz_probability(drive(5.84, 100.0, 592.0)), 0.61, 0.005);
  ASSERT_EQ(lz_probability(drive(0.0, 100.0, 128.0)), 1.0);
  ASSERT_THROW(lz_probability(drive(5.0, 0.0, 128.0)), DegenerateDriveError);
}

TEST(lz_probability, ordinary_frequency_form) {
  for (auto [d, e, t] : {std::tuple{5.57, 100.0, 128.0}, {9.6, 50.4, 606.0}, {1.0, 3.0, 10.0}}) {
    const double v = 4 * e / t;
    ASSERT_NEAR(lz_probability(drive(d, e, t)), std::exp(-kPi * kPi * d * d / v * 1e-3), 1e-14);
  }
}

TEST(lz_probability, monotone) {
  double prev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double period = 2000.0 * std::pow(0.95, i);  // faster sweeps
    const double p = lz_probability(drive(5.0, 100.0, period));
    ASSERT_GT(p, prev);
    prev = p;
  }
  prev = 2.0;
  for (int i = 0; i < 100; ++i) {
    const double p = lz_probability(drive(0.1 + 0.1 * i, 100.0, 300.0));
    ASSERT_LT(p, prev);
    prev = p;
  }
}

TEST(lz_node, invariants) {
  for (double period : {20.0, 128.0, 592.0, 606.0, 5000.0}) {
    const auto node = LZNode::from_drive(drive(5.57, 100.0, period));
    ASSERT_GE(node.p_lz, 0.0);
    ASSERT_LE(node.p_lz, 1.0);
    ASSERT_GT(node.adiabaticity, 0.0);
    ASSERT_GT(node.stokes_phase, 0.0);
    ASSERT_LE(node.stokes_phase, kPi / 4);
    ASSERT_NEAR(node.p_lz, std::exp(-2 * kPi * node.adiabaticity), 1e-12);
  }
}

TEST(stokes_phase, limits_and_errors) {
  ASSERT_NEAR(stokes_phase(1e-12), kPi / 4, 1e-10);
  ASSERT_THROW(stokes_phase(0.0), DomainError);
  ASSERT_THROW(stokes_phase(-1.0), DomainError);
  ASSERT_THROW(stokes_phase(NAN), DomainError);
  ASSERT_LT(std::abs(stokes_phase(5.0)), 0.02);
}

TEST(stokes_phase, matches_product_series) {
  for (double d : {0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0}) {
    const double expected = kPi / 4 + d * (std::log(d) - 1) + lzs::testing::arg_gamma_one_minus_i(d);
    ASSERT_NEAR(stokes_phase(d), expected, 1e-9) << d;
  }
}

TEST(stokes_phase, monotone_decreasing) {
  double prev = kPi / 4 + 1e-15;
  for (int i = 0; i <= 400; ++i) {
    const double d = 1e-4 * std::pow(10.0, 6.0 * i / 400);
    const double phi = stokes_phase(d);
    ASSERT_LT(phi, prev) << d;
    prev = phi;
  }
}

TEST(stokes_phase, ode_single_passage) {
  const auto mid = drive_for_adiabaticity(5.0, 0.5, 40.0);
  ASSERT_NEAR(adiabaticity(mid), 0.5, 1e-12);
  ASSERT_NEAR(ode_stokes_phase(mid), stokes_phase(0.5), 0.02);
  const auto slow = drive_for_adiabaticity(5.0, 5.0, 40.0);
  ASSERT_LT(std::abs(ode_stokes_phase(slow)), 0.02);
}

TEST(mixing_matrix, limits) {
  LZNode full{1.0, 0.3, 0.0};
  const Matrix2c n = mixing_matrix(full).matrix;
  ASSERT_EQ(n(0, 0), Complex(0.0));
  ASSERT_EQ(n(1, 1), Complex(0.0));
  ASSERT_EQ(std::abs(n(0, 1)), 1.0);
  ASSERT_EQ(std::abs(n(1, 0)), 1.0);
  LZNode none{0.0, 0.0, 1.0};
  ASSERT_EQ(mixing_matrix(none).matrix, Matrix2c::Identity());
  ASSERT_EQ(mixing_matrix(none).kind, StepKind::kMixing);
}

TEST(mixing_matrix, slow_preset_amplitudes) {
  const auto node = LZNode::from_drive(drive(9.60, 50.4, 606.0));
  const Matrix2c n = mixing_matrix(node).matrix;
  ASSERT_NEAR(std::norm(n(1, 0)), 0.065, 0.002);
  ASSERT_NEAR(std::norm(n(0, 0)), 0.935, 0.002);
  ASSERT_NEAR(std::norm(n(1, 0)), node.p_lz, 1e-15);
}

TEST(mixing_matrix, directions_and_unitarity) {
  Matrix2c sz;
  sz << 1, 0, 0, -1;
  for (double p : {0.0, 0.065, 0.5, 0.91, 1.0}) {
    for (double phi : {0.0, 0.2, kPi / 4}) {
      LZNode node{p, phi, 0.1};
      const Matrix2c up = mixing_matrix(node, SweepDirection::kUp).matrix;
      const Matrix2c down = mixing_matrix(node, SweepDirection::kDown).matrix;
      ASSERT_LE(max_unitarity_defect(up), 1e-12);
      ASSERT_LE(max_unitarity_defect(down), 1e-12);
      ASSERT_LT((down - sz * up * sz).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(free_phase, triangle_area) {
  const auto p = drive(0.0, 100.0, 128.0);
  ASSERT_NEAR(free_phase(p, 0.0, 32.0), kPi * 1e-3 * 100.0 * 128.0 / 8, 1e-12);
  ASSERT_EQ(free_phase(drive(5.0, 100.0, 128.0), 10.0, 10.0), 0.0);
  ASSERT_THROW(free_phase(p, 10.0, 5.0), DomainError);
}

TEST(free_phase, matches_quadrature) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = drive(0.5 + 10 * u(rng), 1 + 150 * u(rng), 20 + 800 * u(rng), 3);
    if (trial % 3 == 0) p.t_offset_ns = p.period_ns * u(rng);
    if (trial % 4 == 0) p.detuning_offset_mhz = 20 * (u(rng) - 0.5);
    const double a = p.duration_ns() * 0.4 * u(rng);
    const double b = a + (p.duration_ns() - a) * u(rng);
    const double closed = free_phase(p, a, b);
    const double quad = lzs::testing::quadrature_free_phase(p, a, b);
    ASSERT_NEAR(closed, quad, 1e-10 * std::abs(quad)) << trial;
  }
}

TEST(free_evolution, diagonal) {
  const auto p = drive(5.57, 100.0, 128.0);
  const auto step = free_evolution(p, 32.0, 96.0);
  const double zeta = free_phase(p, 32.0, 96.0);
  ASSERT_EQ(step.kind, StepKind::kFree);
  ASSERT_EQ(step.t_begin_ns, 32.0);
  ASSERT_EQ(step.t_end_ns, 96.0);
  ASSERT_EQ(step.matrix(0, 1), Complex(0.0));
  ASSERT_EQ(step.matrix(1, 0), Complex(0.0));
  ASSERT_LT(std::abs(step.matrix(0, 0) - std::polar(1.0, -zeta)), 1e-15);
  ASSERT_LT(std::abs(step.matrix(1, 1) - std::polar(1.0, zeta)), 1e-15);
}

TEST(decompose_rotation, known_rotations) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Vector3d n(g(rng), g(rng), g(rng));
    n.normalize();
    const double angle = kPi * (trial + 0.5) / 50;
    const Matrix2c u = std::polar(1.0, 0.37 * trial) * rotation(angle, n);
    const auto r = decompose_rotation(u);
    ASSERT_NEAR(r.angle, angle, 1e-9);
    ASSERT_NEAR(r.axis.norm(), 1.0, 1e-12);
    ASSERT_LT((r.axis - n).norm(), 1e-8) << trial;
  }
  // Angles above pi fold back with the opposite axis.
  const auto folded = decompose_rotation(rotation(1.5 * kPi, Eigen::Vector3d::UnitX()));
  ASSERT_NEAR(folded.angle, 0.5 * kPi, 1e-12);
  ASSERT_NEAR(folded.axis.x(), -1.0, 1e-12);
}

TEST(decompose_rotation, pi_tie_break) {
  auto r = decompose_rotation(rotation(kPi, -Eigen::Vector3d::UnitZ()));
  ASSERT_NEAR(r.angle, kPi, 1e-12);
  ASSERT_NEAR(r.axis.z(), 1.0, 1e-12);
  r = decompose_rotation(rotation(kPi, -Eigen::Vector3d::UnitX()));
  ASSERT_NEAR(r.axis.x(), 1.0, 1e-12);
  r = decompose_rotation(Matrix2c::Identity());
  ASSERT_EQ(r.angle, 0.0);
  ASSERT_EQ(r.axis, Eigen::Vector3d::UnitZ());
}

TEST(single_period_rotation, composition_plain) {
  const auto p = drive(5.57, 100.0, 128.0);
  const auto rot = single_period_rotation(p, ImpulseModel::kPlain);
  const auto node = LZNode::from_drive(p);
  DriveParameters two = p;
  two.n_periods = 2;
  const Matrix2c n1 = mixing_matrix(node, SweepDirection::kUp, 32.0).matrix;
  const Matrix2c n2 = mixing_matrix(node, SweepDirection::kDown, 96.0).matrix;
  const Matrix2c u1 = free_evolution(two, 32.0, 96.0).matrix;
  const Matrix2c u2 = free_evolution(two, 96.0, 160.0).matrix;
  const Matrix2c g1 = u2 * (n2 * (u1 * n1));
  ASSERT_LT((rot.g1 - g1).cwiseAbs().maxCoeff(), 1e-15);
  ASSERT_EQ(rot.anchor_ns, 32.0);
  // Symmetric triangle: both free segments carry the same phase.
  ASSERT_NEAR(free_phase(two, 32.0, 96.0), free_phase(two, 96.0, 160.0), 1e-12);
}

TEST(single_period_rotation, schedule_corrected) {
  const auto p = drive(5.57, 100.0, 128.0);
  const auto steps = period_schedule(p);
  ASSERT_EQ(steps.size(), 8u);
  const StepKind expected[] = {StepKind::kMixing, StepKind::kFree,   StepKind::kTurningPoint, StepKind::kFree,
                               StepKind::kMixing, StepKind::kFree,   StepKind::kTurningPoint, StepKind::kFree};
  Matrix2c g1 = Matrix2c::Identity();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    ASSERT_EQ(steps[i].kind, expected[i]) << i;
    ASSERT_LE(max_unitarity_defect(steps[i].matrix), 1e-12);
    if (steps[i].kind == StepKind::kFree) {
      ASSERT_EQ(steps[i].matrix(0, 1), Complex(0.0));
      ASSERT_EQ(steps[i].matrix(1, 0), Complex(0.0));
    }
    g1 = steps[i].matrix * g1;
  }
  ASSERT_EQ(single_period_rotation(p).g1, g1);
  ASSERT_EQ(steps[2].t_begin_ns, 64.0);
  ASSERT_EQ(steps[6].t_begin_ns, 128.0);
}

TEST(single_period_rotation, invariants_random) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double delta = 0.5 + 10 * u(rng);
    const auto p = drive(delta, delta * (1.5 + 60 * u(rng)), 10 + 1000 * u(rng));
    for (auto model : {ImpulseModel::kTurningPointCorrected, ImpulseModel::kPlain}) {
      const auto rot = single_period_rotation(p, model);
      ASSERT_LE(max_unitarity_defect(rot.g1), 1e-12);
      ASSERT_NEAR(std::abs(rot.g1.determinant()), 1.0, 1e-12);
      ASSERT_GE(rot.rotation_angle, 0.0);
      ASSERT_LE(rot.rotation_angle, kPi);
      ASSERT_NEAR(rot.axis.norm(), 1.0, 1e-12);
      ASSERT_EQ(rot.warning.has_value(), p.epsilon_m_mhz / p.delta_mhz < 5.0);
      for (const auto& step : period_schedule(p, model)) ASSERT_LE(max_unitarity_defect(step.matrix), 1e-12);
    }
  }
}

TEST(single_period_rotation, degenerate) {
  ASSERT_THROW(single_period_rotation(drive(5.0, 0.0, 128.0)), DegenerateDriveError);
  auto p = drive(5.0, 100.0, 128.0);
  p.detuning_offset_mhz = 200.0;
  ASSERT_THROW(single_period_rotation(p), DegenerateDriveError);
}

TEST(single_period_rotation, constructive_point) {
  const auto rot = single_period_rotation(drive(5.57, 100.0, 128.0));
  ASSERT_LT(std::abs(rot.axis.z()), std::sin(15.0 * kPi / 180.0));
  const auto traj = stroboscopic_evolve(drive(5.57, 100.0, 128.0), 20, QubitState::zero());
  double best = 0.0;
  for (const auto& pop : traj.populations) best = std::max(best, pop[1]);
  ASSERT_GT(best, 0.9);
}

TEST(single_period_rotation, angle_matches_ode_period_map) {
  // The one-period propagator is similar to G1, so their angles agree; the
  // turning-point correction removes most of the plain model's error.
  const auto p = drive(5.57, 100.0, 128.0);
  const double exact = ode_period_angle(p);
  const double corrected = single_period_rotation(p).rotation_angle;
  const double plain = single_period_rotation(p, ImpulseModel::kPlain).rotation_angle;
  ASSERT_LT(std::abs(corrected - exact), 1e-3);
  ASSERT_LT(std::abs(corrected - exact), 0.2 * std::abs(plain - exact));
}

TEST(turning_point_step, tilt) {
  const auto p = drive(5.57, 100.0, 128.0);
  const double v = sweep_rate(p);
  const double d = 2 * kPi * 1e-3 * 5.57;
  const double omega = 2 * kPi * 1e-3 * std::hypot(100.0, 5.57);
  const double chi = std::atan(d * 2 * kPi * 1e-3 * v / std::pow(omega, 3));
  ASSERT_NEAR(superadiabatic_tilt(p, 100.0, v), -chi, 1e-15);
  ASSERT_NEAR(superadiabatic_tilt(p, 100.0, -v), chi, 1e-15);
  ASSERT_EQ(superadiabatic_tilt(drive(0.0, 100.0, 128.0), 100.0, v), 0.0);
  const auto apex = turning_point_step(p, 64.0);
  ASSERT_EQ(apex.kind, StepKind::kTurningPoint);
  ASSERT_NEAR(apex.matrix(0, 0).real(), std::cos(chi), 1e-15);
  ASSERT_NEAR(apex.matrix(0, 1).imag(), std::sin(chi), 1e-15);
  ASSERT_EQ(turning_point_step(p, 64.0, ImpulseModel::kPlain).matrix, Matrix2c::Identity());
}

TEST(stroboscopic_evolve, sample_layout) {
  const auto p = drive(5.57, 100.0, 128.0);
  const auto traj = stroboscopic_evolve(p, 3, QubitState::zero());
  ASSERT_EQ(traj.times_ns, (std::vector<double>{0, 64, 128, 192, 256, 320, 384}));
  ASSERT_EQ(traj.populations.front()[0], 1.0);
  for (const auto& psi : traj.states) ASSERT_NEAR(psi.norm(), 1.0, 1e-12);
  ASSERT_THROW(stroboscopic_evolve(p, 0, QubitState::zero()), PreconditionError);
}

TEST(stroboscopic_evolve, no_coupling_is_constant) {
  const auto traj = stroboscopic_evolve(drive(0.0, 100.0, 128.0), 50, QubitState::zero());
  for (const auto& pop : traj.populations) ASSERT_NEAR(pop[0], 1.0, 1e-12);
}

TEST(stroboscopic_evolve, identity_rotation_is_constant) {
  // Tune T to the point where G1 is the identity.
  double a = 148.5;
  double b = 150.0;
  auto angle = [](double period) { return single_period_rotation(drive(5.57, 100.0, period)).rotation_angle; };
  for (int i = 0; i < 120; ++i) {
    const double m1 = a + 0.382 * (b - a);
    const double m2 = a + 0.618 * (b - a);
    (angle(m1) < angle(m2) ? b : a) = angle(m1) < angle(m2) ? m2 : m1;
  }
  const auto p = drive(5.57, 100.0, 0.5 * (a + b));
  ASSERT_LT(single_period_rotation(p).rotation_angle, 1e-6);
  const auto traj = stroboscopic_evolve(p, 100, QubitState::zero());
  for (std::size_t i = 0; i < traj.size(); i += 2) ASSERT_NEAR(traj.populations[i][0], 1.0, 1e-6);
}

TEST(stroboscopic_evolve, constructive_long_run_matches_ode) {
  const auto p = drive(5.57, 100.0, 128.0, 100);
  const auto tm = stroboscopic_evolve(p, 100, QubitState::zero());
  const auto ode = evolve(p, {}, QubitState::zero(), {0.0, p.duration_ns()}, 64.0);
  ASSERT_EQ(tm.times_ns, ode.times_ns);
  double worst = 0.0;
  for (std::size_t i = 0; i < tm.size(); ++i) worst = std::max(worst, std::abs(tm.populations[i][0] - ode.populations[i][0]));
  ASSERT_LT(worst, 0.05);
}

TEST(stroboscopic_evolve, slow_staircase_matches_ode) {
  const auto p = drive(9.60, 50.4, 606.0, 15);
  const auto tm = stroboscopic_evolve(p, 15, QubitState::zero());
  const auto ode = evolve(p, {}, QubitState::zero(), {0.0, p.duration_ns()}, 303.0);
  ASSERT_EQ(tm.times_ns, ode.times_ns);
  for (std::size_t i = 0; i < tm.size(); ++i) ASSERT_NEAR(tm.populations[i][1], ode.populations[i][1], 0.01);
  // First passage moves 1 - P_LZ of the population.
  ASSERT_NEAR(tm.populations[1][1], 1.0 - lz_probability(p), 0.01);
}

TEST(stroboscopic_evolve, oracle_equivalence_shrinks_with_ratio) {
  // Fixed P_LZ (fixed sweep rate and Delta), growing eps_m / Delta.
  const double delta = 5.57;
  const double v = 3.125;
  std::vector<double> worst;
  for (double ratio : {15.0, 30.0, 60.0}) {
    const double eps_m = ratio * delta;
    const auto p = drive(delta, eps_m, 4 * eps_m / v, 20);
    const auto tm = stroboscopic_evolve(p, 20, QubitState::zero());
    const auto ode = evolve(p, {}, QubitState::zero(), {0.0, p.duration_ns()}, p.period_ns);
    double w = 0.0;
    for (std::size_t k = 0; k < ode.size(); ++k) w = std::max(w, std::abs(ode.populations[k][0] - tm.populations[2 * k][0]));
    worst.push_back(w);
  }
  ASSERT_LT(worst[0], 0.05);
  ASSERT_LT(worst[1], worst[0]);
  ASSERT_LT(worst[2], worst[1]);
}

TEST(stroboscopic_evolve, stuckelberg_amplitude) {
  // Double passage N_down U(zeta) N_up from the ground state:
  // P(e) = 4 P (1 - P) sin^2(zeta + phi).
  for (double p : {0.065, 0.3, 0.5, 0.61, 0.91}) {
    const LZNode node{p, 0.37, 0.0};
    const Matrix2c up = mixing_matrix(node, SweepDirection::kUp).matrix;
    const Matrix2c down = mixing_matrix(node, SweepDirection::kDown).matrix;
    auto transfer = [&](double zeta) {
      Matrix2c u;
      u << std::polar(1.0, -zeta), 0, 0, std::polar(1.0, zeta);
      return std::norm((down * u * up)(0, 1));
    };
    for (double zeta : {0.0, 0.4, 1.3, 2.9}) {
      ASSERT_NEAR(transfer(zeta), 4 * p * (1 - p) * std::pow(std::sin(zeta + node.stokes_phase), 2), 1e-12);
    }
    double a = 0.0;
    double b = kPi / 2 + 0.5;
    for (int i = 0; i < 200; ++i) {
      const double m1 = a + 0.382 * (b - a);
      const double m2 = a + 0.618 * (b - a);
      if (transfer(m1) > transfer(m2)) {
        b = m2;
      } else {
        a = m1;
      }
    }
    ASSERT_NEAR(transfer(0.5 * (a + b)), 4 * p * (1 - p), 1e-9);
  }
}

TEST(resonance_scan, finds_cdt_point) {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(120.0 + 0.1 * i);
  const auto base = drive(5.57, 100.0, 128.0);
  const auto scan = resonance_scan(base, ScanParameter::kPeriod, grid);
  ASSERT_EQ(scan.size(), grid.size());
  for (std::size_t i = 0; i < scan.size(); ++i) ASSERT_EQ(scan[i].parameter, grid[i]);
  const auto best = argmin_rotation_angle(scan);
  ASSERT_NEAR(scan[best].parameter, 149.0, 2.0);
  ASSERT_LT(scan[best].rotation_angle, 0.01);
  ASSERT_LT(std::abs(scan[80].axis_z), std::sin(15.0 * kPi / 180.0));
  ASSERT_EQ(scan[80].parameter, 128.0);
}

TEST(resonance_scan, single_point_and_workers) {
  const auto base = drive(5.57, 100.0, 128.0);
  const double one[] = {133.0};
  const auto scan = resonance_scan(base, ScanParameter::kPeriod, one);
  ASSERT_EQ(scan.size(), 1u);
  const auto rot = single_period_rotation(drive(5.57, 100.0, 133.0));
  ASSERT_EQ(scan[0].rotation_angle, rot.rotation_angle);
  ASSERT_EQ(scan[0].axis_z, rot.axis.z());
  ASSERT_THROW(resonance_scan(base, ScanParameter::kPeriod, std::span<const double>{}), PreconditionError);

  std::vector<double> grid;
  for (int i = 0; i < 301; ++i) grid.push_back(60.0 + 0.5 * i);
  const auto serial = resonance_scan(base, ScanParameter::kEpsilonM, grid, 1);
  const auto threaded = resonance_scan(base, ScanParameter::kEpsilonM, grid, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ASSERT_EQ(serial[i].parameter, threaded[i].parameter);
    ASSERT_EQ(serial[i].rotation_angle, threaded[i].rotation_angle);
  }
}

TEST(cdt, suppression_at_identity_point) {
  // Near the CDT point the n-period transfer is sin^2(n theta/2)(1 - n_z^2);
  // it stays below 1e-2 for n <= 1000 once theta is small enough.
  double a = 148.5;
  double b = 150.0;
  auto angle = [](double period) { return single_period_rotation(drive(5.57, 100.0, period)).rotation_angle; };
  for (int i = 0; i < 120; ++i) {
    const double m1 = a + 0.382 * (b - a);
    const double m2 = a + 0.618 * (b - a);
    if (angle(m1) < angle(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  const auto rot = single_period_rotation(drive(5.57, 100.0, 0.5 * (a + b)));
  ASSERT_LT(rot.rotation_angle, 1e-3);
  Matrix2c g = Matrix2c::Identity();
  double worst = 0.0;
  for (int n = 1; n <= 1000; ++n) {
    g = rot.g1 * g;
    worst = std::max(worst, std::norm(g(1, 0)));
  }
  ASSERT_LT(worst, 1e-2);
}

TEST(cdt, transfer_law) {
  for (double period : {128.0, 140.0, 149.0, 149.2}) {
    const auto rot = single_period_rotation(drive(5.57, 100.0, period));
    Matrix2c g = Matrix2c::Identity();
    for (int n = 1; n <= 200; ++n) {
      g = rot.g1 * g;
      const double law = std::pow(std::sin(n * rot.rotation_angle / 2), 2) * (1 - std::pow(rot.axis.z(), 2));
      ASSERT_NEAR(std::norm(g(1, 0)), law, 1e-10);
    }
  }
}
