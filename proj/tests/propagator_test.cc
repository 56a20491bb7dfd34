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

#include "lzs/propagator.hpp"

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

#include "lzs/analysis.hpp"
#include "lzs/errors.hpp"
#include "test_util.hpp"

using namespace lzs;

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

DriveParameters fig3a(int n = 1) { return drive(5.57, 100.0, 128.0, n); }
DriveParameters fig3b(int n = 1) { return drive(9.60, 50.4, 606.0, n); }
DriveParameters fig3d(int n = 1) { return drive(5.84, 100.0, 592.0, n); }

IntegratorConfig piecewise() {
  IntegratorConfig c;
  c.method = IntegratorMethod::kPiecewiseExact;
  return c;
}

}  // namespace

TEST(evolve, resonant_rabi_matches_analytic) {
  // eps_m = 0: constant H = Delta/2 sigma_x, P1 = sin^2(pi Delta t).
  for (auto cfg : {IntegratorConfig{}, piecewise()}) {
    const auto p = drive(5.0, 0.0, 1000.0);
    const auto traj = evolve(p, cfg, QubitState::zero(), {0.0, 1000.0}, 1.0);
    ASSERT_EQ(traj.size(), 1001u);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double t = traj.times_ns[i];
      const double expected = std::pow(std::sin(kPi * 5.0 * 1e-3 * t), 2);
      ASSERT_NEAR(traj.populations[i][1], expected, 1e-6) << t;
    }
  }
}

TEST(evolve, no_coupling_preserves_populations) {
  const auto p = drive(0.0, 100.0, 128.0, 4);
  const auto rk4 = evolve(p, {}, QubitState::zero(), {0.0, 512.0}, 2.0);
  for (const auto& pop : rk4.populations) ASSERT_NEAR(pop[0], 1.0, 1e-8);
  const auto exact = evolve(p, piecewise(), QubitState::zero(), {0.0, 512.0}, 2.0);
  for (const auto& pop : exact.populations) ASSERT_NEAR(pop[0], 1.0, 1e-12);
}

TEST(evolve, sample_grid) {
  const auto p = fig3a(2);
  const auto traj = evolve(p, {}, QubitState::zero(), {10.0, 255.0}, 20.0);
  ASSERT_EQ(traj.times_ns.front(), 10.0);
  ASSERT_EQ(traj.times_ns.back(), 255.0);
  ASSERT_EQ(traj.size(), 14u);  // 10, 30, ..., 250, 255
  for (std::size_t i = 1; i < traj.size(); ++i) ASSERT_GT(traj.times_ns[i], traj.times_ns[i - 1]);
  ASSERT_TRUE(traj.has_states());
  ASSERT_EQ(traj.basis, Basis::kDiabatic);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ASSERT_NEAR(traj.populations[i][0] + traj.populations[i][1], 1.0, 1e-8);
    ASSERT_EQ(traj.populations[i][0], std::norm(traj.states[i](0)));
  }
}

TEST(evolve, invalid_spans) {
  const auto p = fig3a(1);
  const auto s = QubitState::zero();
  ASSERT_THROW(evolve(p, {}, s, {-1.0, 10.0}, 1.0), DomainError);
  ASSERT_THROW(evolve(p, {}, s, {10.0, 10.0}, 1.0), DomainError);
  ASSERT_THROW(evolve(p, {}, s, {20.0, 10.0}, 1.0), DomainError);
  ASSERT_THROW(evolve(p, {}, s, {0.0, 129.0}, 1.0), DomainError);
  ASSERT_THROW(evolve(p, {}, s, {0.0, 128.0}, 0.0), DomainError);
  ASSERT_THROW(QubitState(1.0, 1.0), DomainError);
}

TEST(evolve, norm_drift_is_an_error) {
  IntegratorConfig coarse;
  coarse.steps_per_min_period = 3;
  ASSERT_THROW(evolve(fig3a(4), coarse, QubitState::zero(), {0.0, 512.0}, 128.0), IntegrationError);
}

TEST(evolve, step_ceiling) {
  const auto p = fig3a();
  const double omega_max = 2.0 * kPi * 1e-3 * std::hypot(100.0, 5.57);
  ASSERT_NEAR(max_time_step_ns(p, {}), (2.0 * kPi / omega_max) / 400.0, 1e-15);
  IntegratorConfig capped;
  capped.max_step_ns = 0.01;
  ASSERT_EQ(max_time_step_ns(p, capped), 0.01);
  // Slow drives: the period bounds the step.
  ASSERT_NEAR(max_time_step_ns(drive(5.0, 100.0, 4.0), {}), 4.0 / 400.0, 1e-15);
}

TEST(evolve, norm_conservation_over_1e5_steps) {
  const auto p = fig3a(20);
  const double dt = max_time_step_ns(p, {});
  const double t_end = 20 * 128.0;
  ASSERT_GE(t_end / dt, 1e5);
  const auto traj = evolve(p, {}, QubitState::zero(), {0.0, t_end}, 1.0);
  for (const auto& psi : traj.states) ASSERT_LE(std::abs(psi.norm() - 1.0), 1e-8);
}

TEST(evolve, step_halving_fourth_order) {
  for (const auto& p : {fig3a(3), fig3b(2), fig3d(2)}) {
    const double t_end = p.duration_ns();
    std::vector<Vector2c> finals;
    std::vector<std::array<double, 2>> pops;
    for (int steps : {400, 800, 1600}) {
      IntegratorConfig cfg;
      cfg.steps_per_min_period = steps;
      const auto traj = evolve(p, cfg, QubitState::zero(), {0.0, t_end}, t_end);
      finals.push_back(traj.states.back());
      pops.push_back(traj.populations.back());
    }
    ASSERT_LT(std::abs(pops[0][0] - pops[1][0]), 1e-6) << p.period_ns;
    const double ratio = (finals[0] - finals[1]).norm() / (finals[1] - finals[2]).norm();
    ASSERT_NEAR(ratio, 16.0, 4.0) << p.period_ns;
  }
}

TEST(evolve, time_reversal) {
  // eps is even about the trough, so eps(t_f - s) is the same triangle
  // shifted by t_offset = -t_f mod T. H is real, hence U^dagger = K U_rev K.
  const auto p = fig3a(8);
  const double t_f = 1000.0;
  const QubitState start(std::sqrt(0.3), Complex(0.0, std::sqrt(0.7)));
  const auto fwd = evolve(p, {}, start, {0.0, t_f}, t_f);
  DriveParameters rev = p;
  rev.t_offset_ns = 1024.0 - t_f;
  for (double s : {0.0, 100.0, 333.3, 999.0}) ASSERT_NEAR(epsilon_at(rev, s), epsilon_at(p, t_f - s), 1e-12);
  const auto back = evolve(rev, {}, QubitState::from_vector(fwd.states.back().conjugate()), {0.0, t_f}, t_f);
  ASSERT_NEAR(back.populations.back()[0], 0.3, 1e-6);
  ASSERT_NEAR(back.populations.back()[1], 0.7, 1e-6);
  ASSERT_LT((back.states.back().conjugate() - start.vector()).norm(), 1e-6);
}

TEST(evolve, constant_detuning_gauge) {
  const auto p = drive(0.0, 100.0, 128.0, 3);
  const QubitState plus(1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0)));
  const auto a = evolve(p, {}, plus, {0.0, 384.0}, 3.0);
  for (double c : {-50.0, 7.5, 1000.0}) {
    DriveParameters shifted = p;
    shifted.detuning_offset_mhz = c;
    const auto b = evolve(shifted, {}, plus, {0.0, 384.0}, 3.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_NEAR(a.populations[i][0], b.populations[i][0], 1e-9);
      ASSERT_NEAR(a.populations[i][1], b.populations[i][1], 1e-9);
    }
  }
}

TEST(evolve, integrators_agree) {
  const auto p = fig3a(4);
  const auto a = evolve(p, {}, QubitState::zero(), {0.0, 512.0}, 8.0);
  const auto b = evolve(p, piecewise(), QubitState::zero(), {0.0, 512.0}, 8.0);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_LT((a.states[i] - b.states[i]).norm(), 1e-7);
}

TEST(evolve, deterministic) {
  const auto p = fig3d(2);
  const auto a = evolve(p, {}, QubitState::zero(), {0.0, p.duration_ns()}, 2.0);
  const auto b = evolve(p, {}, QubitState::zero(), {0.0, p.duration_ns()}, 2.0);
  ASSERT_EQ(a.times_ns, b.times_ns);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.states[i], b.states[i]);
}

TEST(lab_frame_toy, resonant_rabi_matches_rwa) {
  const double delta = 5.0;
  const auto p = drive(delta, 0.0, 200.0);
  const TimeSpan span{0.0, 200.0};
  const auto rwa = evolve(p, {}, QubitState::zero(), span, 1.0);
  const auto lab = evolve_lab_frame_toy(delta, 100.0 * delta, p, QubitState::zero(), span, 1.0);
  ASSERT_EQ(rwa.size(), lab.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < rwa.size(); ++i) {
    worst = std::max(worst, std::abs(rwa.populations[i][1] - lab.populations[i][1]));
  }
  ASSERT_LT(worst, 0.02);
}

TEST(lab_frame_toy, deviation_shrinks_with_ratio) {
  const double delta = 5.0;
  const auto p = drive(delta, 20.0, 100.0, 2);
  const TimeSpan span{0.0, 200.0};
  const auto rwa = evolve(p, {}, QubitState::zero(), span, 1.0);
  auto deviation = [&](double ratio) {
    const auto lab = evolve_lab_frame_toy(delta, ratio * delta, p, QubitState::zero(), span, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < rwa.size(); ++i) {
      worst = std::max(worst, std::abs(rwa.populations[i][0] - lab.populations[i][0]));
    }
    return worst;
  };
  const double d20 = deviation(20.0);
  const double d200 = deviation(200.0);
  ASSERT_LT(d200, d20);
  ASSERT_LT(d200, 0.02);
}

TEST(lab_frame_toy, no_coupling_and_preconditions) {
  const auto p = drive(0.0, 20.0, 100.0);
  const auto lab = evolve_lab_frame_toy(0.0, 100.0, p, QubitState::zero(), {0.0, 100.0}, 1.0);
  for (const auto& pop : lab.populations) ASSERT_NEAR(pop[0], 1.0, 1e-8);
  ASSERT_THROW(evolve_lab_frame_toy(5.0, 99.0, drive(5.0, 0.0, 100.0), QubitState::zero(), {0.0, 10.0}, 1.0),
               PreconditionError);
  ASSERT_NO_THROW(evolve_lab_frame_toy(5.0, 100.0, drive(5.0, 0.0, 100.0), QubitState::zero(), {0.0, 10.0}, 1.0));
}

TEST(dephasing, sigma_and_offsets) {
  ASSERT_NEAR(dephasing_sigma(6.56), std::sqrt(2.0) / 6560.0, 1e-18);
  ASSERT_EQ(dephasing_sigma(INFINITY), 0.0);
  DephasingConfig noise;
  noise.t2_star_us = 6.56;
  noise.n_samples = 4000;
  const auto offsets = dephasing_offsets_mhz(noise);
  ASSERT_EQ(offsets.size(), 4000u);
  double mean = 0.0;
  double var = 0.0;
  for (double x : offsets) mean += x;
  mean /= offsets.size();
  for (double x : offsets) var += (x - mean) * (x - mean);
  var /= offsets.size();
  const double sigma_mhz = dephasing_sigma(6.56) / (2.0 * kPi * 1e-3);
  ASSERT_LT(std::abs(mean), 0.01 * sigma_mhz);
  ASSERT_NEAR(std::sqrt(var), sigma_mhz, 0.02 * sigma_mhz);
  ASSERT_EQ(offsets, dephasing_offsets_mhz(noise));
  DephasingConfig other = noise;
  other.seed = 7;
  ASSERT_NE(offsets, dephasing_offsets_mhz(other));
}

TEST(dephasing, single_noiseless_member_equals_evolve) {
  const auto p = fig3a(2);
  DephasingConfig noise;
  noise.n_samples = 1;
  const auto a = evolve_ensemble_dephased(p, {}, noise, QubitState::zero(), {0.0, 256.0}, 2.0);
  const auto b = evolve(p, {}, QubitState::zero(), {0.0, 256.0}, 2.0);
  ASSERT_EQ(a.times_ns, b.times_ns);
  ASSERT_EQ(a.populations, b.populations);
}

TEST(dephasing, ramsey_envelope) {
  // Free evolution between two pi/2 pulses with a static detuning delta_f:
  // the Gaussian average gives P0 = (1 - exp(-(t/T2*)^2) cos(2 pi delta_f t)) / 2.
  DriveParameters p = drive(0.0, 0.0, 15000.0);
  p.detuning_offset_mhz = 0.56;
  DephasingConfig noise;
  noise.t2_star_us = 6.56;
  noise.n_samples = 2000;
  const auto initial = QubitState::from_vector(rotation_y(kPi / 2) * QubitState::zero().vector());
  const auto traj = evolve_ensemble_dephased(p, {}, noise, initial, {0.0, 15000.0}, 25.0, rotation_y(kPi / 2));
  ASSERT_FALSE(traj.has_states());
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times_ns[i];
    const double env = std::exp(-std::pow(t / 6560.0, 2));
    const double expected = 0.5 * (1.0 - env * std::cos(2.0 * kPi * 0.56e-3 * t));
    worst = std::max(worst, std::abs(traj.populations[i][0] - expected));
  }
  ASSERT_LT(worst, 0.03);
}

TEST(dephasing, workers_do_not_change_result) {
  const auto p = fig3a(2);
  DephasingConfig noise;
  noise.t2_star_us = 1.0;
  noise.n_samples = 9;
  const auto a = evolve_ensemble_dephased(p, {}, noise, QubitState::zero(), {0.0, 256.0}, 4.0);
  noise.workers = 3;
  const auto b = evolve_ensemble_dephased(p, {}, noise, QubitState::zero(), {0.0, 256.0}, 4.0);
  ASSERT_EQ(a.populations, b.populations);
}

TEST(dephasing, long_drive_keeps_oscillation) {
  const auto p = fig3a(63);
  const TimeSpan span{0.0, 8000.0};
  const auto clean = evolve(p, {}, QubitState::zero(), span, 8.0);
  DephasingConfig noise;
  noise.t2_star_us = 6.56;
  noise.n_samples = 32;
  const auto noisy = evolve_ensemble_dephased(p, {}, noise, QubitState::zero(), span, 8.0);
  const double a_clean = rabi_frequency(clean).amplitude;
  const double a_noisy = rabi_frequency(noisy).amplitude;
  ASSERT_LT(1.0 - a_noisy / a_clean, 0.10);
}

TEST(rotation_y, is_pi_half_pulse) {
  const Vector2c v = rotation_y(kPi / 2) * QubitState::zero().vector();
  ASSERT_NEAR(std::norm(v(0)), 0.5, 1e-15);
  ASSERT_NEAR(std::norm(v(1)), 0.5, 1e-15);
  ASSERT_LT(lzs::testing::max_unitarity_defect(rotation_y(0.7)), 1e-15);
}
