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

#include "lzs/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lzs::cli {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Typed access to a flat JSON object that remembers which keys were read, so
// whatever is left over can be rejected.
class Reader {
 public:
  explicit Reader(const std::string& text) {
    try {
      obj_ = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!obj_.is_object()) throw ConfigError("", "top level must be a JSON object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(key, "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(key, "must be finite");
    return d;
  }

  // null stands for +infinity (JSON has no literal for it).
  std::optional<double> number_or_inf(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (v->is_null()) return kInf;
    return number(key);
  }

  std::optional<long long> integer(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(key, "expected an integer");
    return v->get<long long>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(key, "expected a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(key, "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) throw ConfigError(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw ConfigError(key, "expected an array of numbers");
      out.push_back(x.get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(key, "entries must be finite");
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(key, "unknown key");
    }
  }

 private:
  json obj_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

template <typename T>
void assign(T& field, const std::optional<T>& v) {
  if (v) field = *v;
}

int to_int(const std::string& key, long long v) {
  require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(), key,
          "out of range");
  return static_cast<int>(v);
}

Method parse_method(const std::string& s) {
  if (s == "ode") return Method::kOde;
  if (s == "transfer-matrix") return Method::kTransferMatrix;
  if (s == "both") return Method::kBoth;
  throw ConfigError("method", "expected ode, transfer-matrix or both, got '" + s + "'");
}

ImpulseModel parse_impulse_model(const std::string& s) {
  if (s == "turning-point-corrected") return ImpulseModel::kTurningPointCorrected;
  if (s == "plain") return ImpulseModel::kPlain;
  throw ConfigError("impulse_model", "expected turning-point-corrected or plain, got '" + s + "'");
}

IntegratorMethod parse_integrator(const std::string& s) {
  if (s == "fixed-rk4") return IntegratorMethod::kFixedRk4;
  if (s == "piecewise-exact") return IntegratorMethod::kPiecewiseExact;
  throw ConfigError("integrator", "expected fixed-rk4 or piecewise-exact, got '" + s + "'");
}

std::optional<Figure> parse_figure(const std::string& s) {
  for (Figure f : {Figure::kFig3a, Figure::kFig3b, Figure::kFig3c, Figure::kFig3d}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

void read_output(Reader& r, OutputConfig& out) {
  assign(out.dir, r.string("output_dir"));
  if (auto f = r.string("output_format")) {
    try {
      out.format = parse_output_format(*f);
    } catch (const ConfigError& e) {
      throw ConfigError("output_format", e.what());
    }
  }
}

// Drive keys shared by both config kinds. Missing required keys are reported
// by name.
void read_drive(Reader& r, DriveParameters& p, const std::set<std::string>& required) {
  for (const auto& key : required) require(r.has(key), key, "required key missing");
  assign(p.delta_mhz, r.number("delta_mhz"));
  assign(p.epsilon_m_mhz, r.number("epsilon_m_mhz"));
  assign(p.period_ns, r.number("period_ns"));
  if (auto n = r.integer("n_periods")) p.n_periods = to_int("n_periods", *n);
  assign(p.t_offset_ns, r.number("t_offset_ns"));
  assign(p.detuning_offset_mhz, r.number("detuning_offset_mhz"));
}

void validate_drive(const DriveParameters& p, bool need_period, bool need_epsilon) {
  require(p.delta_mhz >= 0.0, "delta_mhz", "must be >= 0");
  require(p.epsilon_m_mhz >= 0.0, "epsilon_m_mhz", "must be >= 0");
  if (need_epsilon) require(p.epsilon_m_mhz > 0.0, "epsilon_m_mhz", "must be > 0");
  if (need_period) require(p.period_ns > 0.0, "period_ns", "must be > 0");
  require(p.n_periods >= 1, "n_periods", "must be >= 1");
}

json drive_json(const DriveParameters& p) {
  return json{{"delta_mhz", p.delta_mhz},
              {"epsilon_m_mhz", p.epsilon_m_mhz},
              {"period_ns", p.period_ns},
              {"n_periods", p.n_periods},
              {"t_offset_ns", p.t_offset_ns},
              {"detuning_offset_mhz", p.detuning_offset_mhz}};
}

json inf_or_number(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

std::string_view to_string(SweepKind k) {
  return k == SweepKind::kResonance ? "resonance" : "lz_probability";
}

std::string_view to_string(ScanParameter s) {
  return s == ScanParameter::kPeriod ? "period_ns" : "epsilon_m_mhz";
}

}  // namespace

std::string to_string(OutputFormat f) { return f == OutputFormat::kCsv ? "csv" : "json"; }

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw ConfigError("format", "expected csv or json, got '" + text + "'");
}

RunConfig parse_run_config(const std::string& text) {
  Reader r(text);
  RunConfig c;
  std::optional<ScenarioSpec> preset_spec;
  std::optional<Figure> figure;
  if (auto preset = r.string("preset")) {
    figure = parse_figure(*preset);
    require(figure.has_value(), "preset", "unknown preset '" + *preset + "' (fig3a, fig3b, fig3c, fig3d)");
    preset_spec = long_drive_preset(*figure);
    c.preset = *preset;
    c.name = preset_spec->name;
    c.drive = preset_spec->drive;
    c.method = preset_spec->method;
    c.sample_every_ns = preset_spec->sample_every_ns;
    c.t_start_ns = preset_spec->span.begin_ns;
    c.t_end_ns = preset_spec->span.end_ns;
    c.adiabatic_threshold_ratio = preset_spec->adiabatic_threshold_ratio;
  }
  const std::set<std::string> required =
      preset_spec ? std::set<std::string>{} : std::set<std::string>{"delta_mhz", "epsilon_m_mhz", "period_ns"};
  read_drive(r, c.drive, required);
  if (figure) {
    // Drive keys on top of a preset act as overrides: derived name, and an
    // explicit n_periods replaces the preset's observation window.
    DriveOverrides o;
    const DriveParameters& base = preset_spec->drive;
    if (c.drive.delta_mhz != base.delta_mhz) o.delta_mhz = c.drive.delta_mhz;
    if (c.drive.epsilon_m_mhz != base.epsilon_m_mhz) o.epsilon_m_mhz = c.drive.epsilon_m_mhz;
    if (c.drive.period_ns != base.period_ns) o.period_ns = c.drive.period_ns;
    if (r.has("n_periods")) o.n_periods = c.drive.n_periods;
    const ScenarioSpec spec = long_drive_preset(*figure, o);
    const DriveParameters user = c.drive;
    c.drive = spec.drive;
    c.drive.t_offset_ns = user.t_offset_ns;
    c.drive.detuning_offset_mhz = user.detuning_offset_mhz;
    c.name = spec.name;
    c.t_start_ns = spec.span.begin_ns;
    c.t_end_ns = spec.span.end_ns;
  }
  assign(c.name, r.string("name"));
  require(!c.name.empty(), "name", "must not be empty");
  if (auto m = r.string("method")) c.method = parse_method(*m);
  if (auto m = r.string("impulse_model")) c.impulse_model = parse_impulse_model(*m);
  if (auto m = r.string("integrator")) c.integrator.method = parse_integrator(*m);
  if (auto n = r.integer("steps_per_min_period")) {
    c.integrator.steps_per_min_period = to_int("steps_per_min_period", *n);
  }
  assign(c.integrator.max_step_ns, r.number_or_inf("max_step_ns"));
  assign(c.integrator.norm_drift_tolerance, r.number("norm_drift_tolerance"));
  assign(c.t_start_ns, r.number("t_start_ns"));
  assign(c.t_end_ns, r.number("t_end_ns"));
  assign(c.sample_every_ns, r.number("sample_every_ns"));
  if (const auto* v = r.get("t2_star_us"); v && !v->is_null()) c.t2_star_us = r.number("t2_star_us");
  if (auto n = r.integer("n_samples")) c.n_samples = to_int("n_samples", *n);
  if (auto s = r.integer("seed")) {
    require(*s >= 0, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(*s);
  }
  if (auto n = r.integer("workers")) c.workers = to_int("workers", *n);
  if (const auto* v = r.get("adiabatic_threshold_ratio")) {
    if (v->is_null()) {
      c.adiabatic_threshold_ratio.reset();
    } else {
      c.adiabatic_threshold_ratio = r.number("adiabatic_threshold_ratio");
    }
  }
  assign(c.rabi, r.boolean("rabi"));
  read_output(r, c.output);
  r.reject_unknown();

  validate_drive(c.drive, true, c.method != Method::kOde);
  require(c.integrator.steps_per_min_period >= 1, "steps_per_min_period", "must be >= 1");
  require(c.integrator.max_step_ns > 0.0, "max_step_ns", "must be > 0");
  require(c.integrator.norm_drift_tolerance > 0.0, "norm_drift_tolerance", "must be > 0");
  require(c.t_start_ns >= 0.0, "t_start_ns", "must be >= 0");
  require(c.t_start_ns <= c.drive.duration_ns(), "t_start_ns", "beyond the end of the drive");
  require(c.t_end_ns <= c.drive.duration_ns() * (1.0 + 1e-12), "t_end_ns",
          "beyond the end of the drive (n_periods * period_ns)");
  require(c.sample_every_ns > 0.0, "sample_every_ns", "must be > 0");
  if (c.t2_star_us) require(*c.t2_star_us > 0.0, "t2_star_us", "must be > 0");
  require(c.n_samples >= 1, "n_samples", "must be >= 1");
  require(c.workers >= 1, "workers", "must be >= 1");
  if (c.adiabatic_threshold_ratio) {
    require(*c.adiabatic_threshold_ratio > 0.0, "adiabatic_threshold_ratio", "must be > 0");
  }
  return c;
}

std::string echo(const RunConfig& c) {
  json j = drive_json(c.drive);
  j["name"] = c.name;
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["method"] = std::string(to_string(c.method));
  j["impulse_model"] = std::string(to_string(c.impulse_model));
  j["integrator"] = std::string(to_string(c.integrator.method));
  j["steps_per_min_period"] = c.integrator.steps_per_min_period;
  j["max_step_ns"] = inf_or_number(c.integrator.max_step_ns);
  j["norm_drift_tolerance"] = c.integrator.norm_drift_tolerance;
  j["t_start_ns"] = c.t_start_ns;
  j["t_end_ns"] = c.t_end_ns;
  j["sample_every_ns"] = c.sample_every_ns;
  j["t2_star_us"] = c.t2_star_us ? json(*c.t2_star_us) : json(nullptr);
  j["n_samples"] = c.n_samples;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["adiabatic_threshold_ratio"] =
      c.adiabatic_threshold_ratio ? json(*c.adiabatic_threshold_ratio) : json(nullptr);
  j["rabi"] = c.rabi;
  j["output_dir"] = c.output.dir;
  j["output_format"] = to_string(c.output.format);
  return j.dump(2);
}

ScenarioSpec to_scenario(const RunConfig& c) {
  ScenarioSpec s;
  s.name = c.name;
  s.drive = c.drive;
  s.method = c.method;
  s.impulse_model = c.impulse_model;
  s.integrator = c.integrator;
  s.span = {c.t_start_ns, c.t_end_ns};
  s.sample_every_ns = c.sample_every_ns;
  s.adiabatic_threshold_ratio = c.adiabatic_threshold_ratio;
  if (c.t2_star_us) {
    DephasingConfig noise;
    noise.t2_star_us = *c.t2_star_us;
    noise.n_samples = c.n_samples;
    noise.seed = c.seed;
    noise.workers = c.workers;
    s.noise = noise;
  }
  return s;
}

SweepConfig parse_sweep_config(const std::string& text) {
  Reader r(text);
  SweepConfig c;
  assign(c.name, r.string("name"));
  require(!c.name.empty(), "name", "must not be empty");
  if (auto k = r.string("sweep")) {
    if (*k == "resonance") {
      c.kind = SweepKind::kResonance;
    } else if (*k == "lz_probability") {
      c.kind = SweepKind::kLzProbability;
    } else {
      throw ConfigError("sweep", "expected resonance or lz_probability, got '" + *k + "'");
    }
  } else {
    throw ConfigError("sweep", "required key missing");
  }
  if (auto s = r.string("scan_parameter")) {
    if (*s == "period_ns") {
      c.parameter = ScanParameter::kPeriod;
    } else if (*s == "epsilon_m_mhz") {
      c.parameter = ScanParameter::kEpsilonM;
    } else {
      throw ConfigError("scan_parameter", "expected period_ns or epsilon_m_mhz, got '" + *s + "'");
    }
    require(c.kind == SweepKind::kResonance || c.parameter == ScanParameter::kPeriod, "scan_parameter",
            "lz_probability sweeps scan period_ns only");
  }
  std::set<std::string> required{"delta_mhz"};
  const bool scans_period = c.parameter == ScanParameter::kPeriod;
  required.insert(scans_period ? "epsilon_m_mhz" : "period_ns");
  read_drive(r, c.base, required);

  const bool has_list = r.has("grid");
  const bool has_range = r.has("grid_start") || r.has("grid_stop") || r.has("grid_count");
  require(!(has_list && has_range), "grid", "give either grid or grid_start/grid_stop/grid_count");
  if (has_list) {
    c.grid = *r.numbers("grid");
  } else if (has_range) {
    for (const char* key : {"grid_start", "grid_stop", "grid_count"}) require(r.has(key), key, "required key missing");
    const double a = *r.number("grid_start");
    const double b = *r.number("grid_stop");
    const long long n = *r.integer("grid_count");
    require(n >= 0, "grid_count", "must be >= 0");
    for (long long i = 0; i < n; ++i) {
      c.grid.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  } else {
    throw ConfigError("grid", "required key missing");
  }
  require(!c.grid.empty(), "grid", "empty grid");
  for (double g : c.grid) require(g > 0.0, "grid", "entries must be > 0");

  if (auto m = r.string("impulse_model")) c.impulse_model = parse_impulse_model(*m);
  if (auto n = r.integer("workers")) c.workers = to_int("workers", *n);
  read_output(r, c.output);
  r.reject_unknown();

  validate_drive(c.base, !scans_period, scans_period);
  require(c.workers >= 1, "workers", "must be >= 1");
  return c;
}

std::string echo(const SweepConfig& c) {
  json j = drive_json(c.base);
  j["name"] = c.name;
  j["sweep"] = std::string(to_string(c.kind));
  j["scan_parameter"] = std::string(to_string(c.parameter));
  j["grid"] = c.grid;
  j["impulse_model"] = std::string(to_string(c.impulse_model));
  j["workers"] = c.workers;
  j["output_dir"] = c.output.dir;
  j["output_format"] = to_string(c.output.format);
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lzs::cli
