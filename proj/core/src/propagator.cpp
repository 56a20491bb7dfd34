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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <gsl/gsl_cdf.h>

#include "lzs/errors.hpp"
#include "lzs/parallel.hpp"
#include "lzs/units.hpp"

namespace lzs {
namespace {

using units::angular_from_mhz;
using units::kTwoPi;

constexpr Complex kI{0.0, 1.0};

// Real symmetric 2x2 Hamiltonian h = [[hz, hx], [hx, -hz]] + h0 I.
struct Ham {
  double hz;
  double hx;
};

// dpsi/dt = -i H psi
inline void apply_rhs(const Ham& h, const Complex (&psi)[2], Complex (&out)[2]) {
  out[0] = -kI * (h.hz * psi[0] + h.hx * psi[1]);
  out[1] = -kI * (h.hx * psi[0] - h.hz * psi[1]);
}

template <class HamAt>
void rk4_step(const HamAt& ham_at, double t, double h, Complex (&psi)[2]) {
  Complex k1[2], k2[2], k3[2], k4[2], tmp[2];
  apply_rhs(ham_at(t), psi, k1);
  const Ham mid = ham_at(t + 0.5 * h);
  for (int j = 0; j < 2; ++j) tmp[j] = psi[j] + 0.5 * h * k1[j];
  apply_rhs(mid, tmp, k2);
  for (int j = 0; j < 2; ++j) tmp[j] = psi[j] + 0.5 * h * k2[j];
  apply_rhs(mid, tmp, k3);
  for (int j = 0; j < 2; ++j) tmp[j] = psi[j] + h * k3[j];
  apply_rhs(ham_at(t + h), tmp, k4);
  for (int j = 0; j < 2; ++j) psi[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

// Fourth-order Magnus step. For H = h . sigma (h_y = 0 here),
// Omega = -i [ (h/2)(h1 + h2) + (sqrt(3) h^2 / 6) (h2 x h1) ] . sigma.
template <class HamAt>
void magnus4_step(const HamAt& ham_at, double t, double h, Complex (&psi)[2]) {
  constexpr double kGauss = 0.28867513459481287;  // sqrt(3)/6
  const Ham a = ham_at(t + (0.5 - kGauss) * h);
  const Ham b = ham_at(t + (0.5 + kGauss) * h);
  // h_k = (hx, 0, hz); b x a has only a y component: bz*ax - bx*az.
  const double wx = 0.5 * h * (a.hx + b.hx);
  const double wz = 0.5 * h * (a.hz + b.hz);
  const double wy = (std::sqrt(3.0) * h * h / 6.0) * (b.hz * a.hx - b.hx * a.hz);
  const double w = std::sqrt(wx * wx + wy * wy + wz * wz);
  const double c = std::cos(w);
  const double s = w > 0.0 ? std::sin(w) / w : 1.0;
  // exp(-i w.sigma) = c I - i s (w.sigma)
  const Complex u00{c, -s * wz};
  const Complex u11{c, s * wz};
  const Complex u01 = -kI * s * Complex{wx, -wy};
  const Complex u10 = -kI * s * Complex{wx, wy};
  const Complex p0 = psi[0];
  const Complex p1 = psi[1];
  psi[0] = u00 * p0 + u01 * p1;
  psi[1] = u10 * p0 + u11 * p1;
}

std::vector<double> sample_times(TimeSpan span, double every) {
  std::vector<double> out;
  const double len = span.end_ns - span.begin_ns;
  const auto n = static_cast<long long>(std::floor(len / every + 1e-9));
  out.reserve(static_cast<std::size_t>(n) + 2);
  for (long long k = 0; k <= n; ++k) {
    const double t = span.begin_ns + static_cast<double>(k) * every;
    if (t > span.end_ns) break;
    out.push_back(t);
  }
  if (span.end_ns - out.back() > 1e-9 * std::max(1.0, std::abs(span.end_ns))) {
    out.push_back(span.end_ns);
  } else {
    out.back() = span.end_ns;
  }
  return out;
}

void check_span(TimeSpan span, double every, double duration) {
  if (!std::isfinite(span.begin_ns) || !std::isfinite(span.end_ns)) {
    throw DomainError("time span must be finite");
  }
  if (span.begin_ns < 0.0) throw DomainError("time span must start at t >= 0");
  if (!(span.end_ns > span.begin_ns)) throw DomainError("time span must have end > begin");
  if (span.end_ns > duration * (1.0 + 1e-12)) {
    throw DomainError("time span ends at " + std::to_string(span.end_ns) +
                      " ns, past the drive duration " + std::to_string(duration) + " ns");
  }
  if (!(every > 0.0)) throw DomainError("sample_every must be > 0");
}

void check_norm(const Complex (&psi)[2], double t, double tol) {
  const double drift = std::norm(psi[0]) + std::norm(psi[1]) - 1.0;
  if (!(std::abs(drift) <= tol)) {
    throw IntegrationError("norm drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                           " ns exceeds tolerance " + std::to_string(tol));
  }
}

// Integrates through [t_a, t_b] with equal steps no larger than dt_max.
template <class HamAt>
void integrate_segment(const HamAt& ham_at, IntegratorMethod method, double t_a, double t_b,
                       double dt_max, Complex (&psi)[2]) {
  const double len = t_b - t_a;
  if (len <= 0.0) return;
  const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(len / dt_max - 1e-9)));
  const double h = len / static_cast<double>(steps);
  for (long long k = 0; k < steps; ++k) {
    const double t = t_a + static_cast<double>(k) * h;
    if (method == IntegratorMethod::kFixedRk4) {
      rk4_step(ham_at, t, h, psi);
    } else {
      magnus4_step(ham_at, t, h, psi);
    }
  }
}

// Generic driver: event times = samples U kinks; `ham_for_segment(a, b)`
// returns a callable t -> Ham valid on (a, b).
template <class SegmentHam>
Trajectory integrate(const SegmentHam& ham_for_segment, const std::vector<double>& kinks,
                     const IntegratorConfig& cfg, double dt_max, const QubitState& initial,
                     TimeSpan span, double every) {
  if (initial.basis() != Basis::kDiabatic) throw DomainError("initial state must be diabatic");
  const auto samples = sample_times(span, every);
  std::vector<double> events = samples;
  events.insert(events.end(), kinks.begin(), kinks.end());
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  Trajectory traj;
  traj.basis = Basis::kDiabatic;
  traj.times_ns.reserve(samples.size());
  traj.states.reserve(samples.size());
  traj.populations.reserve(samples.size());

  Complex psi[2] = {initial.amp0(), initial.amp1()};
  std::size_t next_sample = 0;
  auto record = [&](double t) {
    check_norm(psi, t, cfg.norm_drift_tolerance);
    traj.times_ns.push_back(t);
    traj.states.emplace_back(psi[0], psi[1]);
    traj.populations.push_back({std::norm(psi[0]), std::norm(psi[1])});
    ++next_sample;
  };
  record(events.front());
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const double a = events[i];
    const double b = events[i + 1];
    integrate_segment(ham_for_segment(a, b), cfg.method, a, b, dt_max, psi);
    if (next_sample < samples.size() && samples[next_sample] == b) record(b);
  }
  return traj;
}

}  // namespace

std::string_view to_string(IntegratorMethod m) {
  return m == IntegratorMethod::kFixedRk4 ? "fixed-rk4" : "piecewise-exact";
}

double max_time_step_ns(const DriveParameters& p, const IntegratorConfig& cfg) {
  if (cfg.steps_per_min_period < 1) throw DomainError("steps_per_min_period must be >= 1");
  const double eps_peak = angular_from_mhz(p.epsilon_m_mhz + std::abs(p.detuning_offset_mhz));
  const double delta = angular_from_mhz(p.delta_mhz);
  const double omega_max = std::hypot(eps_peak, delta);
  double scale = p.period_ns;
  if (omega_max > 0.0) scale = std::min(scale, kTwoPi / omega_max);
  return std::min(scale / cfg.steps_per_min_period, cfg.max_step_ns);
}

Trajectory evolve(const DriveParameters& p, const IntegratorConfig& cfg, const QubitState& initial,
                  TimeSpan span, double sample_every_ns) {
  p.validate();
  check_span(span, sample_every_ns, p.duration_ns());
  if (!(cfg.max_step_ns > 0.0)) throw DomainError("max_step_ns must be > 0");

  const double delta = angular_from_mhz(p.delta_mhz);
  auto ham_for_segment = [&p, delta](double a, double b) {
    // eps is linear on (a, b); evaluate it from the segment start and slope.
    const double mid = 0.5 * (a + b);
    const double slope = angular_from_mhz(epsilon_slope_at(p, mid));
    const double eps_mid = angular_from_mhz(epsilon_at(p, mid));
    return [slope, eps_mid, mid, delta](double t) {
      return Ham{0.5 * (eps_mid + slope * (t - mid)), 0.5 * delta};
    };
  };
  return integrate(ham_for_segment, breakpoints(p, span.begin_ns, span.end_ns), cfg,
                   max_time_step_ns(p, cfg), initial, span, sample_every_ns);
}

Trajectory evolve_lab_frame_toy(double delta_mhz, double omega0_mhz, const DriveParameters& drive,
                                const QubitState& initial, TimeSpan span, double sample_every_ns,
                                const IntegratorConfig& cfg) {
  drive.validate();
  check_span(span, sample_every_ns, drive.duration_ns());
  if (!(omega0_mhz > 0.0)) throw PreconditionError("omega0 must be > 0");
  if (delta_mhz < 0.0) throw DomainError("delta must be >= 0");
  if (delta_mhz > 0.0 && omega0_mhz / delta_mhz < 20.0) {
    throw PreconditionError("omega0/delta = " + std::to_string(omega0_mhz / delta_mhz) +
                            " is below 20; the rotating-wave comparison is meaningless");
  }
  const double omega0 = angular_from_mhz(omega0_mhz);
  const double delta = angular_from_mhz(delta_mhz);
  auto ham_for_segment = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    const double slope = angular_from_mhz(epsilon_slope_at(drive, mid));
    const double eps_a = angular_from_mhz(epsilon_at(drive, a));
    // Phase at the segment start; eps is linear inside the segment.
    const double phase_a = omega0 * a + angular_from_mhz(epsilon_integral(drive, 0.0, a));
    return [=](double t) {
      const double dt = t - a;
      const double phase = phase_a + omega0 * dt + eps_a * dt + 0.5 * slope * dt * dt;
      return Ham{-0.5 * omega0, delta * std::cos(phase)};
    };
  };
  const double omega_max =
      omega0 + angular_from_mhz(drive.epsilon_m_mhz + std::abs(drive.detuning_offset_mhz)) + 2 * delta;
  const double dt_max =
      std::min(std::min(drive.period_ns, kTwoPi / omega_max) / cfg.steps_per_min_period, cfg.max_step_ns);
  return integrate(ham_for_segment, breakpoints(drive, span.begin_ns, span.end_ns), cfg, dt_max,
                   initial, span, sample_every_ns);
}

double dephasing_sigma(double t2_star_us) {
  if (!(t2_star_us > 0.0)) throw PreconditionError("t2_star must be > 0");
  if (std::isinf(t2_star_us)) return 0.0;
  return std::sqrt(2.0) / units::ns_from_us(t2_star_us);
}

std::vector<double> dephasing_offsets_mhz(const DephasingConfig& noise) {
  if (noise.n_samples < 1) throw PreconditionError("n_samples must be >= 1");
  const double sigma_mhz = units::mhz_from_angular(dephasing_sigma(noise.t2_star_us));
  const auto n = static_cast<std::size_t>(noise.n_samples);
  std::vector<double> out(n, 0.0);
  if (sigma_mhz == 0.0) return out;
  std::mt19937_64 rng(noise.seed);
  for (std::size_t i = 0; i < n; ++i) {
    // 53-bit uniform in (0, 1), independent of the standard library's distributions.
    const double jitter = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u = (static_cast<double>(i) + jitter) / static_cast<double>(n);
    out[i] = sigma_mhz * gsl_cdf_ugaussian_Pinv(u);
  }
  return out;
}

Trajectory evolve_ensemble_dephased(const DriveParameters& p, const IntegratorConfig& cfg,
                                    const DephasingConfig& noise, const QubitState& initial,
                                    TimeSpan span, double sample_every_ns,
                                    const std::optional<Matrix2c>& readout) {
  const auto offsets = dephasing_offsets_mhz(noise);
  auto run_member = [&](double offset) {
    DriveParameters member = p;
    member.detuning_offset_mhz += offset;
    Trajectory t = evolve(member, cfg, initial, span, sample_every_ns);
    if (readout) {
      for (std::size_t k = 0; k < t.size(); ++k) {
        t.states[k] = (*readout) * t.states[k];
        t.populations[k] = {std::norm(t.states[k](0)), std::norm(t.states[k](1))};
      }
    }
    return t;
  };

  if (offsets.size() == 1) return run_member(offsets[0]);

  std::vector<std::vector<std::array<double, 2>>> members(offsets.size());
  std::vector<double> times;
  parallel_for(offsets.size(), noise.workers, [&](std::size_t i) {
    Trajectory t = run_member(offsets[i]);
    if (i == 0) times = t.times_ns;
    members[i] = std::move(t.populations);
  });

  Trajectory avg;
  avg.basis = Basis::kDiabatic;
  avg.times_ns = std::move(times);
  avg.populations.assign(avg.times_ns.size(), {0.0, 0.0});
  // Fixed summation order keeps the result independent of the worker count.
  for (const auto& m : members) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      avg.populations[k][0] += m[k][0];
      avg.populations[k][1] += m[k][1];
    }
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  for (auto& pk : avg.populations) {
    pk[0] *= inv;
    pk[1] *= inv;
  }
  return avg;
}

Matrix2c rotation_y(double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  Matrix2c r;
  r << c, -s,
       s, c;
  return r;
}

}  // namespace lzs
