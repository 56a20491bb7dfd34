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

#include "lzs/drive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lzs/errors.hpp"

namespace lzs {
namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

// Triangle wave of unit period phase u in [0, 1): -1 at u=0, +1 at u=1/2.
double unit_triangle(double tau, double period) {
  double u = tau - std::floor(tau / period) * period;
  if (u >= period) u -= period;
  const double half = 0.5 * period;
  if (u <= half) return -1.0 + 4.0 * u / period;
  return 1.0 - 4.0 * (u - half) / period;
}

double unit_slope(double tau, double period) {
  double u = tau - std::floor(tau / period) * period;
  // Left-branch closure: u == 0 belongs to the falling branch that ends there.
  if (u == 0.0 || u > 0.5 * period) return -4.0 / period;
  return 4.0 / period;
}

}  // namespace

void DriveParameters::validate() const {
  require_finite(delta_mhz, "delta_mhz");
  require_finite(epsilon_m_mhz, "epsilon_m_mhz");
  require_finite(period_ns, "period_ns");
  require_finite(t_offset_ns, "t_offset_ns");
  require_finite(detuning_offset_mhz, "detuning_offset_mhz");
  if (delta_mhz < 0.0) throw DomainError("delta_mhz must be >= 0");
  if (epsilon_m_mhz < 0.0) throw DomainError("epsilon_m_mhz must be >= 0");
  if (period_ns <= 0.0) throw DomainError("period_ns must be > 0");
  if (n_periods < 1) throw DomainError("n_periods must be >= 1");
}

double epsilon_at(const DriveParameters& p, double t_ns) {
  if (!(t_ns >= 0.0)) throw DomainError("epsilon_at: time must be >= 0");
  return p.epsilon_m_mhz * unit_triangle(t_ns + p.t_offset_ns, p.period_ns) + p.detuning_offset_mhz;
}

double epsilon_slope_at(const DriveParameters& p, double t_ns) {
  return p.epsilon_m_mhz * unit_slope(t_ns + p.t_offset_ns, p.period_ns);
}

std::vector<double> breakpoints(const DriveParameters& p, double t1_ns, double t2_ns) {
  std::vector<double> out;
  if (!(t2_ns > t1_ns)) return out;
  const double half = 0.5 * p.period_ns;
  // Apex/trough at tau = k T/2, i.e. t = k T/2 - t_offset.
  auto k = static_cast<long long>(std::floor((t1_ns + p.t_offset_ns) / half));
  for (;; ++k) {
    const double t = static_cast<double>(k) * half - p.t_offset_ns;
    if (t <= t1_ns) continue;
    if (t >= t2_ns) break;
    out.push_back(t);
  }
  return out;
}

double epsilon_integral(const DriveParameters& p, double t1_ns, double t2_ns) {
  if (t2_ns < t1_ns) return -epsilon_integral(p, t2_ns, t1_ns);
  double total = 0.0;
  double a = t1_ns;
  double ea = epsilon_at(p, a);
  auto knots = breakpoints(p, t1_ns, t2_ns);
  knots.push_back(t2_ns);
  for (double b : knots) {
    const double eb = epsilon_at(p, b);
    total += 0.5 * (ea + eb) * (b - a);
    a = b;
    ea = eb;
  }
  return total;
}

std::vector<double> crossing_times(const DriveParameters& p) {
  std::vector<double> out;
  if (p.epsilon_m_mhz == 0.0) return out;
  const double end = p.duration_ns();
  auto knots = breakpoints(p, 0.0, end);
  knots.insert(knots.begin(), 0.0);
  knots.push_back(end);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    const double ea = epsilon_at(p, a);
    const double eb = epsilon_at(p, b);
    if ((ea < 0.0 && eb > 0.0) || (ea > 0.0 && eb < 0.0)) {
      out.push_back(a + (-ea) / (eb - ea) * (b - a));
    }
  }
  return out;
}

double sweep_rate(const DriveParameters& p) {
  if (p.epsilon_m_mhz == 0.0) throw DegenerateDriveError("sweep_rate: epsilon_m is zero");
  return 4.0 * p.epsilon_m_mhz / p.period_ns;
}

void NVParameters::validate() const {
  if (i_z != 0.5 && i_z != -0.5) throw DomainError("NVParameters: i_z must be +1/2 or -1/2");
}

double nv_transition_frequency(const NVParameters& nv) {
  nv.validate();
  // E(m_s) = D m_s^2 + gamma_e B m_s + A_zz I_z m_s; E(+1) - E(0).
  return nv.d_zfs_mhz + nv.gamma_e_mhz_per_gauss * nv.b_field_gauss + nv.a_zz_mhz * nv.i_z;
}

}  // namespace lzs
