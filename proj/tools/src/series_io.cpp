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

#include "lzs/cli/series_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace lzs::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double probability(double p) { return std::clamp(p, 0.0, 1.0); }

// Adiabatic populations per parent row, or nullopt for dropped rows.
std::vector<std::optional<std::array<double, 2>>> adiabatic_rows(const NamedSeries& s) {
  std::vector<std::optional<std::array<double, 2>>> rows(s.trajectory.size());
  if (!s.adiabatic) return rows;
  const auto& a = *s.adiabatic;
  for (std::size_t k = 0; k < a.indices.size(); ++k) rows[a.indices[k]] = a.trajectory.populations[k];
  return rows;
}

json provenance_json(const Provenance& prov) {
  json j = json::object();
  for (const auto& [k, v] : prov) j[k] = v;
  return j;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& cell) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("bad number '" + cell + "'");
  }
  if (used != cell.size()) throw std::runtime_error("bad number '" + cell + "'");
  return v;
}

LoadedSeries finish(LoadedSeries s, const std::map<std::string, std::vector<double>>& cols) {
  for (const char* need : {"t_ns", "P0", "P1"}) {
    if (!cols.count(need)) throw std::runtime_error(std::string("series lacks column ") + need);
  }
  const auto& t = cols.at("t_ns");
  const auto& p0 = cols.at("P0");
  const auto& p1 = cols.at("P1");
  s.trajectory.basis = Basis::kDiabatic;
  s.trajectory.times_ns = t;
  for (std::size_t i = 0; i < t.size(); ++i) s.trajectory.populations.push_back({p0[i], p1[i]});
  if (cols.count("epsilon_MHz")) s.epsilon_mhz = cols.at("epsilon_MHz");
  return s;
}

LoadedSeries parse_csv(const std::string& text) {
  LoadedSeries s;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2);
      const std::string value = line.substr(std::min(colon + 2, line.size()));
      if (key == "schema_version") s.schema_version = std::stoi(value);
      if (key == "series") s.name = value;
      if (key == "provenance") {
        const json prov = json::parse(value);
        for (const auto& [k, v] : prov.items()) s.provenance[k] = v.get<std::string>();
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (s.columns.empty()) {
      s.columns = cells;
      continue;
    }
    if (cells.size() != s.columns.size()) throw std::runtime_error("row width differs from header");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) continue;
      cols[s.columns[c]].push_back(parse_double(cells[c]));
    }
  }
  return finish(std::move(s), cols);
}

LoadedSeries parse_json(const std::string& text) {
  const json j = json::parse(text);
  LoadedSeries s;
  s.schema_version = j.at("schema_version").get<int>();
  s.name = j.at("series").get<std::string>();
  for (const auto& [k, v] : j.at("provenance").items()) s.provenance[k] = v.get<std::string>();
  s.columns = j.at("columns").get<std::vector<std::string>>();
  std::map<std::string, std::vector<double>> cols;
  for (const auto& name : s.columns) {
    for (const auto& v : j.at("data").at(name)) {
      if (!v.is_null()) cols[name].push_back(v.get<double>());
    }
  }
  return finish(std::move(s), cols);
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> series_columns(const NamedSeries& s) {
  std::vector<std::string> cols{"t_ns", "P0", "P1", "epsilon_MHz"};
  if (s.adiabatic) {
    cols.emplace_back("P_adiab_g");
    cols.emplace_back("P_adiab_e");
  }
  return cols;
}

std::string format_series_csv(const NamedSeries& s, const Provenance& prov) {
  const auto cols = series_columns(s);
  const auto adiab = adiabatic_rows(s);
  std::string out;
  out += "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
  out += "# series: " + s.name + "\n";
  out += "# columns: " + std::to_string(cols.size()) + "\n";
  out += "# provenance: " + provenance_json(prov).dump() + "\n";
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += cols[c];
  }
  out += '\n';
  const auto& t = s.trajectory;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += format_number(t.times_ns[i]);
    out += ',' + format_number(probability(t.populations[i][0]));
    out += ',' + format_number(probability(t.populations[i][1]));
    out += ',' + format_number(s.epsilon_mhz[i]);
    if (s.adiabatic) {
      if (adiab[i]) {
        out += ',' + format_number(probability((*adiab[i])[0]));
        out += ',' + format_number(probability((*adiab[i])[1]));
      } else {
        out += ",,";
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_series_json(const NamedSeries& s, const Provenance& prov) {
  const auto adiab = adiabatic_rows(s);
  const auto& t = s.trajectory;
  json data = json::object();
  json p0 = json::array();
  json p1 = json::array();
  for (const auto& p : t.populations) {
    p0.push_back(probability(p[0]));
    p1.push_back(probability(p[1]));
  }
  data["t_ns"] = t.times_ns;
  data["P0"] = std::move(p0);
  data["P1"] = std::move(p1);
  data["epsilon_MHz"] = s.epsilon_mhz;
  if (s.adiabatic) {
    json g = json::array();
    json e = json::array();
    for (const auto& row : adiab) {
      g.push_back(row ? json(probability((*row)[0])) : json(nullptr));
      e.push_back(row ? json(probability((*row)[1])) : json(nullptr));
    }
    data["P_adiab_g"] = std::move(g);
    data["P_adiab_e"] = std::move(e);
  }
  json j{{"schema_version", kSchemaVersion},
         {"series", s.name},
         {"provenance", provenance_json(prov)},
         {"columns", series_columns(s)},
         {"data", std::move(data)}};
  return j.dump(1) + "\n";
}

std::string format_series(const NamedSeries& s, const Provenance& prov, OutputFormat f) {
  return f == OutputFormat::kCsv ? format_series_csv(s, prov) : format_series_json(s, prov);
}

LoadedSeries parse_series(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  return parse_csv(text);
}

LoadedSeries load_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read series file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_series(ss.str());
  } catch (const std::exception& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

void check_series_invariants(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  std::size_t declared = 0;
  std::vector<std::string> header;
  double last_t = -std::numeric_limits<double>::infinity();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.rfind("# columns: ", 0) == 0) declared = std::stoul(line.substr(11));
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (header.empty()) {
      header = cells;
      if (header.size() != declared) throw std::runtime_error("header declares a different column count");
      continue;
    }
    ++row;
    if (cells.size() != header.size()) throw std::runtime_error("row " + std::to_string(row) + " has wrong width");
    const double t = parse_double(cells[0]);
    if (!(t > last_t)) throw std::runtime_error("times not strictly increasing at row " + std::to_string(row));
    last_t = t;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (header[c] != "P0" && header[c] != "P1" && header[c].rfind("P_adiab", 0) != 0) continue;
      if (cells[c].empty()) continue;
      const double p = parse_double(cells[c]);
      if (p < 0.0 || p > 1.0) throw std::runtime_error("probability out of range at row " + std::to_string(row));
    }
  }
  if (header.empty()) throw std::runtime_error("no column header");
}

void write_files_atomically(const std::string& dir,
                            const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory " + dir);
  const std::string suffix = ".tmp-" + std::to_string(::getpid());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& p : temps) fs::remove(p, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path tmp = fs::path(dir) / (name + suffix);
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw OutputError("cannot write " + (fs::path(dir) / name).string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], fs::path(dir) / files[i].first, ec);
    if (ec) {
      cleanup();
      throw OutputError("cannot write " + (fs::path(dir) / files[i].first).string() + ": " + ec.message());
    }
  }
}

}  // namespace lzs::cli
