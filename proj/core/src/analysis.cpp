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

#include "lzs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "lzs/errors.hpp"

namespace lzs {
namespace {

constexpr double kPi = std::numbers::pi;

struct MixingWeights {
  double sin2;  // sin^2(theta/2)
  double cos2;  // cos^2(theta/2)
  double cos_theta;
};

MixingWeights mixing_weights(double epsilon, double delta) {
  const double theta = std::atan2(delta, epsilon);
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  return {s * s, c * c, std::cos(theta)};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

double check_uniform(std::span<const double> t) {
  if (t.size() < 8) throw PreconditionError("need at least 8 samples");
  const double dt = t[1] - t[0];
  if (!(dt > 0.0)) throw PreconditionError("sample times must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt) {
      throw PreconditionError("sampling is not uniform");
    }
  }
  return dt;
}

struct SpectralPeak {
  double frequency_mhz;
  double peak;
  double floor;
};

// Hann-windowed, zero-padded DFT with log-parabolic peak interpolation. The
// first two original bins are excluded: the window leaks the residual mean
// into them.
SpectralPeak spectral_peak(std::span<const double> x, double dt_ns) {
  const std::size_t n = x.size();
  constexpr std::size_t kPad = 8;
  const std::size_t m = next_pow2(kPad * n);
  std::vector<double> buf(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1));
    buf[k] = w * x[k];
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, buf);
  const std::size_t half = m / 2;
  std::vector<double> mag(half + 1);
  for (std::size_t k = 0; k <= half; ++k) mag[k] = std::abs(spec[k]);

  const std::size_t lo = std::max<std::size_t>(2 * m / n, 1);
  if (lo + 2 >= half) throw PreconditionError("too few samples for a spectrum");
  std::size_t best = lo;
  for (std::size_t k = lo; k < half; ++k) {
    if (mag[k] > mag[best]) best = k;
  }
  double offset = 0.0;
  if (best > lo && best + 1 <= half && mag[best - 1] > 0.0 && mag[best + 1] > 0.0) {
    const double a = std::log(mag[best - 1]);
    const double b = std::log(mag[best]);
    const double c = std::log(mag[best + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) offset = 0.5 * (a - c) / denom;
  }
  std::vector<double> sorted(mag.begin() + 1, mag.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double floor = sorted[sorted.size() / 2];
  const double f_per_ns = (static_cast<double>(best) + offset) / (static_cast<double>(m) * dt_ns);
  return {f_per_ns * 1e3, mag[best], floor};
}

struct LinearSinusoid {
  double amplitude;
  double offset;
  double residual_rms;
};

// y ~ a cos(2 pi f t) + b sin(2 pi f t) + c
LinearSinusoid fit_sinusoid(std::span<const double> t_ns, std::span<const double> y, double f_mhz) {
  const auto n = static_cast<Eigen::Index>(t_ns.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ph = 2.0 * kPi * f_mhz * 1e-3 * t_ns[static_cast<std::size_t>(i)];
    a(i, 0) = std::cos(ph);
    a(i, 1) = std::sin(ph);
    a(i, 2) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(n));
  return {std::hypot(x(0), x(1)), x(2), rms};
}

// Residuals of A exp[-(t/tau)^2] cos(2 pi f t) + c, parameters (A, tau, f, c),
// t in us, f in MHz.
struct RamseyFunctor : Eigen::DenseFunctor<double> {
  RamseyFunctor(const std::vector<double>& t_us, const std::vector<double>& y)
      : Eigen::DenseFunctor<double>(4, static_cast<int>(t_us.size())), t(t_us), data(y) {}

  int operator()(const InputType& x, ValueType& fvec) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double env = std::exp(-std::pow(t[i] / x(1), 2));
      fvec(static_cast<Eigen::Index>(i)) = x(0) * env * std::cos(2.0 * kPi * x(2) * t[i]) + x(3) - data[i];
    }
    return 0;
  }

  int df(const InputType& x, JacobianType& jac) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double u = t[i] / x(1);
      const double env = std::exp(-u * u);
      const double ph = 2.0 * kPi * x(2) * t[i];
      const double c = std::cos(ph);
      const double s = std::sin(ph);
      jac(r, 0) = env * c;
      jac(r, 1) = x(0) * env * c * 2.0 * u * u / x(1);
      jac(r, 2) = -x(0) * env * s * 2.0 * kPi * t[i];
      jac(r, 3) = 1.0;
    }
    return 0;
  }

  const std::vector<double>& t;
  const std::vector<double>& data;
};

double rms_of(const Eigen::VectorXd& r) {
  return std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
}

}  // namespace

AdiabaticMask make_adiabatic_mask(const Trajectory& traj, const DriveParameters& p,
                                  double threshold_ratio) {
  AdiabaticMask mask;
  mask.threshold_ratio = threshold_ratio;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (std::abs(epsilon_at(p, traj.times_ns[i])) > threshold_ratio * p.delta_mhz) {
      mask.kept_indices.push_back(i);
    }
  }
  return mask;
}

double basis_discrepancy(double epsilon_mhz, double delta_mhz) {
  const double cos_theta = epsilon_mhz / std::hypot(epsilon_mhz, delta_mhz);
  return 0.5 * (1.0 - std::abs(cos_theta));
}

std::array<double, 2> adiabatic_populations(std::array<double, 2> diabatic, double epsilon_mhz,
                                            double delta_mhz) {
  const auto w = mixing_weights(epsilon_mhz, delta_mhz);
  return {w.sin2 * diabatic[0] + w.cos2 * diabatic[1], w.cos2 * diabatic[0] + w.sin2 * diabatic[1]};
}

std::array<double, 2> diabatic_populations(std::array<double, 2> adiabatic, double epsilon_mhz,
                                           double delta_mhz) {
  if (epsilon_mhz == 0.0) throw DomainError("population map is singular at eps = 0");
  const auto w = mixing_weights(epsilon_mhz, delta_mhz);
  // [[s2, c2], [c2, s2]]^-1, determinant s2^2 - c2^2 = -cos(theta)
  const double det = -w.cos_theta;
  return {(w.sin2 * adiabatic[0] - w.cos2 * adiabatic[1]) / det,
          (-w.cos2 * adiabatic[0] + w.sin2 * adiabatic[1]) / det};
}

Trajectory to_adiabatic(const Trajectory& traj, const DriveParameters& p, const AdiabaticMask& mask) {
  if (traj.basis != Basis::kDiabatic) throw DomainError("to_adiabatic: trajectory is already adiabatic");
  Trajectory out;
  out.basis = Basis::kAdiabatic;
  for (std::size_t i : mask.kept_indices) {
    if (i >= traj.size()) throw DomainError("to_adiabatic: mask index out of range");
    const double t = traj.times_ns[i];
    const double eps = epsilon_at(p, t);
    out.times_ns.push_back(t);
    if (traj.has_states()) {
      const Eigen::Matrix2d b = adiabatic_basis(eps, p.delta_mhz);
      const Vector2c amps = b.transpose().cast<Complex>() * traj.states[i];
      out.states.push_back(amps);
      out.populations.push_back({std::norm(amps(0)), std::norm(amps(1))});
    } else {
      out.populations.push_back(adiabatic_populations(traj.populations[i], eps, p.delta_mhz));
    }
  }
  return out;
}

FitResult dominant_frequency(std::span<const double> times_ns, std::span<const double> signal) {
  if (times_ns.size() != signal.size()) throw PreconditionError("times and signal differ in length");
  const double dt = check_uniform(times_ns);
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(signal.size());
  std::vector<double> x(signal.size());
  double spread = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = signal[i] - mean;
    spread = std::max(spread, std::abs(x[i]));
  }
  if (spread < 1e-10) throw NoOscillationError("signal is flat");

  const SpectralPeak peak = spectral_peak(x, dt);
  if (!(peak.peak > 3.0 * peak.floor)) {
    throw NoOscillationError("no spectral peak above 3x the median floor");
  }
  const double duration_ns = times_ns.back() - times_ns.front();
  if (peak.frequency_mhz * 1e-3 * duration_ns < 3.0) {
    throw PreconditionError("window spans fewer than 3 oscillation periods");
  }
  const LinearSinusoid lin = fit_sinusoid(times_ns, signal, peak.frequency_mhz);
  FitResult out;
  out.frequency_mhz = peak.frequency_mhz;
  out.amplitude = lin.amplitude;
  out.offset = lin.offset;
  out.residual_rms = lin.residual_rms;
  return out;
}

FitResult rabi_frequency(const Trajectory& traj) {
  const auto p0 = traj.p0();
  return dominant_frequency(traj.times_ns, p0);
}

FitResult ramsey_fit(std::span<const double> times_ns, std::span<const double> signal) {
  if (times_ns.size() != signal.size()) throw PreconditionError("times and signal differ in length");
  const double dt = check_uniform(times_ns);
  const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(signal.size());
  std::vector<double> x(signal.size());
  double spread = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = signal[i] - mean;
    spread = std::max(spread, std::abs(x[i]));
  }
  if (spread < 1e-10) throw FitError("ramsey_fit: signal is flat", 0.0, 0);

  std::vector<double> t_us(times_ns.size());
  std::transform(times_ns.begin(), times_ns.end(), t_us.begin(), [](double t) { return t * 1e-3; });
  const std::vector<double> y(signal.begin(), signal.end());
  const double f0 = spectral_peak(x, dt).frequency_mhz;
  const double duration_us = t_us.back() - t_us.front();

  // Seed tau on a log grid, solving A and c linearly at each point.
  double best_ssr = std::numeric_limits<double>::infinity();
  Eigen::Vector4d start(0.0, duration_us, f0, mean);
  const auto n = static_cast<Eigen::Index>(y.size());
  for (int j = 0; j < 48; ++j) {
    const double tau = duration_us * 0.05 * std::pow(100.0, j / 47.0);
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ti = t_us[static_cast<std::size_t>(i)];
      a(i, 0) = std::exp(-std::pow(ti / tau, 2)) * std::cos(2.0 * kPi * f0 * ti);
      a(i, 1) = 1.0;
      b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    const double ssr = (a * coef - b).squaredNorm();
    if (ssr < best_ssr) {
      best_ssr = ssr;
      start = Eigen::Vector4d(coef(0), tau, f0, coef(1));
    }
  }

  RamseyFunctor functor(t_us, y);
  Eigen::LevenbergMarquardt<RamseyFunctor> lm(functor);
  lm.setMaxfev(2000);
  lm.setXtol(1e-14);
  lm.setFtol(1e-14);
  Eigen::VectorXd params = start;
  const auto status = lm.minimize(params);
  Eigen::VectorXd resid(n);
  functor(params, resid);
  const double rms = rms_of(resid);
  const int iters = static_cast<int>(lm.iterations());
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation) {
    throw FitError("ramsey_fit: did not converge (status " + std::to_string(static_cast<int>(status)) +
                       ", residual rms " + std::to_string(rms) + ")",
                   rms, iters);
  }
  if (!params.allFinite() || std::abs(params(2)) < 1e-12 || std::abs(params(1)) < 1e-12) {
    throw FitError("ramsey_fit: degenerate solution", rms, iters);
  }
  FitResult out;
  out.amplitude = params(0);
  out.decay_time_us = std::abs(params(1));
  out.frequency_mhz = std::abs(params(2));
  out.offset = params(3);
  out.residual_rms = rms;
  out.iterations = iters;
  return out;
}

FitResult ramsey_fit(const Trajectory& traj) {
  const auto p1 = traj.p1();
  return ramsey_fit(traj.times_ns, p1);
}

double interpolate_p1(const Trajectory& traj, double t_ns) {
  const auto& ts = traj.times_ns;
  if (ts.empty() || t_ns < ts.front() || t_ns > ts.back()) {
    throw DomainError("interpolate_p1: time outside the trajectory");
  }
  auto it = std::lower_bound(ts.begin(), ts.end(), t_ns);
  auto i = static_cast<std::size_t>(it - ts.begin());
  if (ts[i] == t_ns) return traj.populations[i][1];
  const double w = (t_ns - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return (1.0 - w) * traj.populations[i - 1][1] + w * traj.populations[i][1];
}

StepDetection detect_steps(const Trajectory& traj, const DriveParameters& p, double window_fraction) {
  if (traj.basis != Basis::kDiabatic) throw DomainError("detect_steps: trajectory must be diabatic");
  if (!(window_fraction > 0.0)) throw DomainError("detect_steps: window fraction must be > 0");
  StepDetection out;
  out.window_ns = window_fraction * p.period_ns;
  if (traj.size() < 2) return out;
  const double lo_bound = traj.times_ns.front();
  const double hi_bound = traj.times_ns.back();
  for (double c : crossing_times(p)) {
    if (c < lo_bound || c > hi_bound) continue;
    StepJump s;
    s.crossing_time_ns = c;
    double lo = c - 0.5 * out.window_ns;
    double hi = c + 0.5 * out.window_ns;
    if (lo < lo_bound) {
      lo = lo_bound;
      s.partial = true;
    }
    if (hi > hi_bound) {
      hi = hi_bound;
      s.partial = true;
    }
    s.jump = interpolate_p1(traj, hi) - interpolate_p1(traj, lo);
    out.partial = out.partial || s.partial;
    out.steps.push_back(s);
  }
  return out;
}

bool steps_alternate(const StepDetection& steps, double min_magnitude) {
  int last_sign = 0;
  int counted = 0;
  for (const auto& s : steps.steps) {
    if (std::abs(s.jump) < min_magnitude) continue;
    const int sign = s.jump > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign == last_sign) return false;
    last_sign = sign;
    ++counted;
  }
  return counted >= 2;
}

}  // namespace lzs
