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

#include "lzs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "lzs/errors.hpp"
#include "lzs/parallel.hpp"
#include "lzs/transfer_matrix.hpp"

namespace lzs {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TimeSpan resolve_span(const ScenarioSpec& spec) {
  if (spec.span.end_ns > spec.span.begin_ns) return spec.span;
  return {0.0, spec.drive.duration_ns()};
}

std::vector<double> epsilon_column(const DriveParameters& p, const Trajectory& t) {
  std::vector<double> out;
  out.reserve(t.size());
  for (double ti : t.times_ns) out.push_back(epsilon_at(p, ti));
  return out;
}

NamedSeries make_series(std::string name, const DriveParameters& p, Trajectory t) {
  NamedSeries s;
  s.name = std::move(name);
  s.epsilon_mhz = epsilon_column(p, t);
  s.trajectory = std::move(t);
  return s;
}

void echo_drive(std::map<std::string, std::string>& prov, const DriveParameters& p) {
  prov["delta_mhz"] = fmt_double(p.delta_mhz);
  prov["epsilon_m_mhz"] = fmt_double(p.epsilon_m_mhz);
  prov["period_ns"] = fmt_double(p.period_ns);
  prov["n_periods"] = std::to_string(p.n_periods);
  prov["t_offset_ns"] = fmt_double(p.t_offset_ns);
  prov["detuning_offset_mhz"] = fmt_double(p.detuning_offset_mhz);
}

void echo_spec(std::map<std::string, std::string>& prov, const ScenarioSpec& spec, TimeSpan span) {
  prov["scenario"] = spec.name;
  prov["method"] = std::string(to_string(spec.method));
  echo_drive(prov, spec.drive);
  prov["impulse_model"] = std::string(to_string(spec.impulse_model));
  prov["integrator"] = std::string(to_string(spec.integrator.method));
  prov["steps_per_min_period"] = std::to_string(spec.integrator.steps_per_min_period);
  prov["max_step_ns"] = fmt_double(spec.integrator.max_step_ns);
  prov["norm_drift_tolerance"] = fmt_double(spec.integrator.norm_drift_tolerance);
  prov["t_start_ns"] = fmt_double(span.begin_ns);
  prov["t_end_ns"] = fmt_double(span.end_ns);
  prov["sample_every_ns"] = fmt_double(spec.sample_every_ns);
  if (spec.adiabatic_threshold_ratio) prov["adiabatic_threshold_ratio"] = fmt_double(*spec.adiabatic_threshold_ratio);
  prov["initial_state"] = "|0>";
  prov["version"] = std::string(kVersion);
  if (spec.noise) {
    prov["t2_star_us"] = fmt_double(spec.noise->t2_star_us);
    prov["n_samples"] = std::to_string(spec.noise->n_samples);
    prov["seed"] = std::to_string(spec.noise->seed);
  }
}

void add_rotation_scalars(ExperimentResult& r, const DriveParameters& p,
                          ImpulseModel model = ImpulseModel::kTurningPointCorrected) {
  if (p.epsilon_m_mhz == 0.0) return;
  r.scalars["p_lz"] = lz_probability(p);
  try {
    const PeriodRotation rot = single_period_rotation(p, model);
    r.scalars["g1_rotation_angle"] = rot.rotation_angle;
    r.scalars["g1_axis_x"] = rot.axis.x();
    r.scalars["g1_axis_y"] = rot.axis.y();
    r.scalars["g1_axis_z"] = rot.axis.z();
    if (rot.warning) r.provenance["warning"] = *rot.warning;
  } catch (const DegenerateDriveError&) {
    // Offset drive without crossings: no period rotation to report.
  }
}

bool wants_ode(Method m) { return m != Method::kTransferMatrix; }
bool wants_tm(Method m) { return m != Method::kOde; }

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kOde:
      return "ode";
    case Method::kTransferMatrix:
      return "transfer-matrix";
    case Method::kBoth:
      return "both";
  }
  return "?";
}

std::string_view to_string(Figure f) {
  switch (f) {
    case Figure::kFig3a:
      return "fig3a";
    case Figure::kFig3b:
      return "fig3b";
    case Figure::kFig3c:
      return "fig3c";
    case Figure::kFig3d:
      return "fig3d";
  }
  return "?";
}

const NamedSeries& ExperimentResult::find_series(std::string_view series_name) const {
  for (const auto& s : series) {
    if (s.name == series_name) return s;
  }
  throw std::out_of_range("no series named " + std::string(series_name));
}

ExperimentResult run_scenario(const ScenarioSpec& spec) {
  spec.drive.validate();
  const TimeSpan span = resolve_span(spec);
  ExperimentResult r;
  r.name = spec.name;
  echo_spec(r.provenance, spec, span);
  const QubitState initial = QubitState::zero();

  if (wants_ode(spec.method)) {
    Trajectory ode;
    if (spec.noise && spec.noise->n_samples >= 1 && std::isfinite(spec.noise->t2_star_us)) {
      ode = evolve_ensemble_dephased(spec.drive, spec.integrator, *spec.noise, initial, span,
                                     spec.sample_every_ns);
    } else {
      ode = evolve(spec.drive, spec.integrator, initial, span, spec.sample_every_ns);
    }
    NamedSeries series = make_series("ode", spec.drive, std::move(ode));
    if (spec.adiabatic_threshold_ratio) {
      const AdiabaticMask mask =
          make_adiabatic_mask(series.trajectory, spec.drive, *spec.adiabatic_threshold_ratio);
      AdiabaticColumns cols;
      cols.indices = mask.kept_indices;
      cols.trajectory = to_adiabatic(series.trajectory, spec.drive, mask);
      r.scalars["adiabatic_threshold_ratio"] = mask.threshold_ratio;
      r.scalars["adiabatic_kept_samples"] = static_cast<double>(cols.indices.size());
      series.adiabatic = std::move(cols);
    }
    r.series.push_back(std::move(series));
  }

  if (wants_tm(spec.method)) {
    const int n = std::max(1, static_cast<int>(std::floor(span.end_ns / spec.drive.period_ns + 1e-9)));
    Trajectory tm = stroboscopic_evolve(spec.drive, n, initial, spec.impulse_model);
    if (spec.method == Method::kBoth) {
      // ODE at the same instants (noise-free), compared at period boundaries.
      DriveParameters d = spec.drive;
      d.n_periods = std::max(d.n_periods, n);
      const Trajectory at_boundaries =
          evolve(d, spec.integrator, initial, {0.0, n * d.period_ns}, d.period_ns);
      double worst = 0.0;
      for (std::size_t k = 0; k < at_boundaries.size(); ++k) {
        const double t = at_boundaries.times_ns[k];
        const auto it = std::find_if(tm.times_ns.begin(), tm.times_ns.end(),
                                     [t](double x) { return std::abs(x - t) < 1e-9 * std::max(1.0, t); });
        if (it == tm.times_ns.end()) continue;
        const auto j = static_cast<std::size_t>(it - tm.times_ns.begin());
        worst = std::max(worst, std::abs(tm.populations[j][0] - at_boundaries.populations[k][0]));
      }
      r.scalars["max_abs_deviation"] = worst;
    }
    r.series.push_back(make_series("transfer_matrix", spec.drive, std::move(tm)));
  }

  add_rotation_scalars(r, spec.drive, spec.impulse_model);
  return r;
}

DriveParameters double_passage_preset(PassageRegime regime) {
  DriveParameters p;
  if (regime == PassageRegime::kFast) {
    p.delta_mhz = 5.57;
    p.epsilon_m_mhz = 100.0;
    p.period_ns = 128.0;
  } else {
    p.delta_mhz = 9.60;
    p.epsilon_m_mhz = 50.4;
    p.period_ns = 606.0;
  }
  p.n_periods = 1;
  return p;
}

ExperimentResult run_double_passage(PassageRegime regime, const DriveParameters& drive) {
  drive.validate();
  if (drive.n_periods != 1) throw PreconditionError("double passage needs exactly one period");
  ExperimentResult r;
  r.name = regime == PassageRegime::kFast ? "fig2c" : "fig2d";
  ScenarioSpec spec;
  spec.name = r.name;
  spec.drive = drive;
  spec.method = drive.epsilon_m_mhz > 0.0 ? Method::kBoth : Method::kOde;
  spec.sample_every_ns = drive.period_ns / 500.0;
  echo_spec(r.provenance, spec, {0.0, drive.period_ns});
  r.provenance["parameter_class"] = regime == PassageRegime::kFast ? "fig3a" : "fig3b";

  const QubitState initial = QubitState::zero();
  Trajectory ode = evolve(drive, spec.integrator, initial, {0.0, drive.period_ns}, spec.sample_every_ns);

  constexpr double kStepWindow = 0.5;  // each window spans trough-to-apex
  const StepDetection steps = detect_steps(ode, drive, kStepWindow);
  r.scalars["step_window_ns"] = steps.window_ns;
  for (std::size_t i = 0; i < steps.steps.size(); ++i) {
    r.scalars["step_" + std::to_string(i + 1)] = steps.steps[i].jump;
  }

  // Adiabatic-following probability across the first crossing, read at the
  // apex between the two crossings.
  const auto crossings = crossing_times(drive);
  if (!crossings.empty()) {
    const double t_read = crossings.size() >= 2 ? 0.5 * (crossings[0] + crossings[1]) : drive.period_ns;
    const Trajectory upto = evolve(drive, spec.integrator, initial, {0.0, t_read}, t_read);
    const Eigen::Matrix2d b = adiabatic_basis(epsilon_at(drive, t_read), drive.delta_mhz);
    const Vector2c ground_excited = b.transpose().cast<Complex>() * upto.states.back();
    r.scalars["first_passage_transfer"] = std::norm(ground_excited(0));
  } else {
    r.scalars["first_passage_transfer"] = 0.0;
  }

  r.series.push_back(make_series("ode", drive, std::move(ode)));
  if (drive.epsilon_m_mhz > 0.0) {
    r.series.push_back(make_series("transfer_matrix", drive, stroboscopic_evolve(drive, 1, initial)));
  }
  add_rotation_scalars(r, drive);
  return r;
}

ScenarioSpec long_drive_preset(Figure figure, const DriveOverrides& overrides) {
  ScenarioSpec spec;
  spec.method = Method::kBoth;
  spec.sample_every_ns = 2.0;
  DriveParameters& p = spec.drive;
  double window_ns = 0.0;
  switch (figure) {
    case Figure::kFig3a:
      p.delta_mhz = 5.57;
      p.epsilon_m_mhz = 100.0;
      p.period_ns = 128.0;
      window_ns = 8000.0;
      break;
    case Figure::kFig3b:
    case Figure::kFig3c:
      p.delta_mhz = 9.60;
      p.epsilon_m_mhz = 50.4;
      p.period_ns = 606.0;
      p.n_periods = 15;
      break;
    case Figure::kFig3d:
      p.delta_mhz = 5.84;
      p.epsilon_m_mhz = 100.0;
      p.period_ns = 592.0;
      p.n_periods = 10;
      break;
  }

  std::string name(to_string(figure));
  if (overrides.delta_mhz) {
    p.delta_mhz = *overrides.delta_mhz;
    name += "+delta_mhz=" + fmt_double(p.delta_mhz);
  }
  if (overrides.epsilon_m_mhz) {
    p.epsilon_m_mhz = *overrides.epsilon_m_mhz;
    name += "+epsilon_m_mhz=" + fmt_double(p.epsilon_m_mhz);
  }
  if (overrides.period_ns) {
    p.period_ns = *overrides.period_ns;
    name += "+period_ns=" + fmt_double(p.period_ns);
  }
  if (overrides.n_periods) {
    p.n_periods = *overrides.n_periods;
    name += "+n_periods=" + std::to_string(p.n_periods);
    window_ns = 0.0;
  }
  if (window_ns > 0.0) {
    // Fixed observation window: enough periods to cover it.
    p.n_periods = static_cast<int>(std::ceil(window_ns / p.period_ns - 1e-9));
    spec.span = {0.0, window_ns};
  } else {
    spec.span = {0.0, p.duration_ns()};
  }
  if (figure == Figure::kFig3c) spec.adiabatic_threshold_ratio = 3.0;
  spec.name = name;
  return spec;
}

ExperimentResult run_long_drive(Figure figure, const DriveOverrides& overrides) {
  const ScenarioSpec spec = long_drive_preset(figure, overrides);
  ExperimentResult r = run_scenario(spec);
  auto& ode = r.series.front();
  switch (figure) {
    case Figure::kFig3a: {
      const FitResult fit = rabi_frequency(ode.trajectory);
      r.scalars["rabi_frequency_mhz"] = fit.frequency_mhz;
      r.scalars["rabi_amplitude"] = fit.amplitude;
      r.scalars["rabi_residual_rms"] = fit.residual_rms;
      break;
    }
    case Figure::kFig3c:
      break;
    case Figure::kFig3d: {
      const StepDetection steps = detect_steps(ode.trajectory, spec.drive);
      r.scalars["step_window_ns"] = steps.window_ns;
      r.scalars["step_count"] = static_cast<double>(steps.steps.size());
      r.scalars["steps_alternate"] = steps_alternate(steps) ? 1.0 : 0.0;
      break;
    }
    case Figure::kFig3b: {
      const StepDetection steps = detect_steps(ode.trajectory, spec.drive);
      r.scalars["step_window_ns"] = steps.window_ns;
      r.scalars["step_count"] = static_cast<double>(steps.steps.size());
      break;
    }
  }
  return r;
}

ExperimentResult run_cdt_comparison(double period_constructive_ns, double period_destructive_ns,
                                    double window_ns) {
  ExperimentResult r;
  r.name = "fig4";
  r.provenance["version"] = std::string(kVersion);
  r.provenance["window_ns"] = fmt_double(window_ns);
  r.provenance["parameter_class"] = "fig3a";
  const std::pair<const char*, double> arms[] = {{"constructive", period_constructive_ns},
                                                 {"destructive", period_destructive_ns}};
  for (const auto& [label, period] : arms) {
    ScenarioSpec spec = long_drive_preset(Figure::kFig3a);
    spec.name = label;
    spec.method = Method::kOde;
    spec.drive.period_ns = period;
    spec.drive.n_periods = static_cast<int>(std::ceil(window_ns / period - 1e-9));
    spec.span = {0.0, window_ns};
    spec.sample_every_ns = 1.0;
    ExperimentResult arm = run_scenario(spec);
    NamedSeries series = std::move(arm.series.front());
    series.name = label;
    double max_p1 = 0.0;
    for (const auto& pk : series.trajectory.populations) max_p1 = std::max(max_p1, pk[1]);
    r.scalars[std::string("max_p1_") + label] = max_p1;
    r.scalars[std::string("g1_rotation_angle_") + label] = arm.scalars.at("g1_rotation_angle");
    r.scalars[std::string("period_ns_") + label] = period;
    for (const auto& [k, v] : arm.provenance) r.provenance[std::string(label) + "." + k] = v;
    r.series.push_back(std::move(series));
  }
  return r;
}

namespace {

// 1 - exp(-pi^2 Delta^2 / v) with Delta in MHz and v in MHz/ns.
double lz_transfer_model(double delta_mhz, double rate_mhz_per_ns) {
  return 1.0 - std::exp(-kPi * kPi * delta_mhz * delta_mhz * 1e-3 / rate_mhz_per_ns);
}

struct LZFitFunctor : Eigen::DenseFunctor<double> {
  LZFitFunctor(const std::vector<double>& rates, const std::vector<double>& probs)
      : Eigen::DenseFunctor<double>(1, static_cast<int>(rates.size())), v(rates), p(probs) {}

  int operator()(const InputType& x, ValueType& f) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
      f(static_cast<Eigen::Index>(i)) = lz_transfer_model(x(0), v[i]) - p[i];
    }
    return 0;
  }

  int df(const InputType& x, JacobianType& jac) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double k = kPi * kPi * 1e-3 / v[i];
      jac(static_cast<Eigen::Index>(i), 0) = std::exp(-k * x(0) * x(0)) * 2.0 * k * x(0);
    }
    return 0;
  }

  const std::vector<double>& v;
  const std::vector<double>& p;
};

}  // namespace

LZSweepResult run_lz_probability_sweep(double delta_mhz, double epsilon_m_mhz,
                                       std::span<const double> periods_ns, int workers) {
  if (periods_ns.empty()) throw PreconditionError("lz probability sweep: empty period list");
  LZSweepResult out;
  out.points.resize(periods_ns.size());
  parallel_for(periods_ns.size(), workers, [&](std::size_t i) {
    DriveParameters p;
    p.delta_mhz = delta_mhz;
    p.epsilon_m_mhz = epsilon_m_mhz;
    p.period_ns = periods_ns[i];
    p.n_periods = 1;
    const double apex = 0.5 * p.period_ns;
    const Trajectory t = evolve(p, IntegratorConfig{}, QubitState::zero(), {0.0, apex}, apex);
    // Probability of ending in the adiabatic ground state after one passage,
    // i.e. of the diabatic transition |0> -> |1>.
    const Eigen::Matrix2d b = adiabatic_basis(epsilon_at(p, apex), p.delta_mhz);
    const Vector2c ge = b.transpose().cast<Complex>() * t.states.back();
    out.points[i] = {p.period_ns, std::norm(ge(0))};
  });

  std::vector<double> rates;
  std::vector<double> probs;
  std::vector<double> guesses;
  for (const auto& pt : out.points) {
    const double v = 4.0 * epsilon_m_mhz / pt.period_ns;
    rates.push_back(v);
    probs.push_back(pt.transfer_probability);
    if (pt.transfer_probability > 1e-6 && pt.transfer_probability < 1.0 - 1e-6) {
      guesses.push_back(std::sqrt(-std::log(1.0 - pt.transfer_probability) * v * 1e3) / kPi);
    }
  }
  if (guesses.empty()) {
    throw FitError("lz probability sweep: every point is saturated; Delta is not identifiable", 0.0, 0);
  }
  std::nth_element(guesses.begin(), guesses.begin() + guesses.size() / 2, guesses.end());
  Eigen::VectorXd x(1);
  x(0) = guesses[guesses.size() / 2];
  LZFitFunctor functor(rates, probs);
  Eigen::LevenbergMarquardt<LZFitFunctor> lm(functor);
  const auto status = lm.minimize(x);
  Eigen::VectorXd resid(static_cast<Eigen::Index>(rates.size()));
  functor(x, resid);
  out.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(resid.size()));
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !std::isfinite(x(0))) {
    throw FitError("lz probability sweep: fit did not converge", out.residual_rms,
                   static_cast<int>(lm.iterations()));
  }
  out.delta_fit_mhz = std::abs(x(0));
  return out;
}

}  // namespace lzs
