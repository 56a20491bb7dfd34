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

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lzs/cli/config.hpp"
#include "lzs/experiments.hpp"

namespace lzs::cli {

/// Output location could not be prepared or written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Provenance = std::map<std::string, std::string>;

/// CSV series: '#'-prefixed header lines (schema version, series name, column
/// count, provenance as one JSON line), then a column-name row and one row per
/// sample. Columns: t_ns, P0, P1, epsilon_MHz and, when the series carries
/// adiabatic data, P_adiab_g, P_adiab_e (empty cells where the sample was
/// dropped).
std::string format_series_csv(const NamedSeries& s, const Provenance& prov);

/// Same content as a JSON object with column arrays (null for dropped cells).
std::string format_series_json(const NamedSeries& s, const Provenance& prov);

std::string format_series(const NamedSeries& s, const Provenance& prov, OutputFormat f);

std::vector<std::string> series_columns(const NamedSeries& s);

/// Series read back from either format. Only t_ns, P0, P1 and epsilon_MHz are
/// required.
struct LoadedSeries {
  int schema_version = 0;
  std::string name;
  Provenance provenance;
  std::vector<std::string> columns;
  Trajectory trajectory;
  std::vector<double> epsilon_mhz;
};

LoadedSeries parse_series(const std::string& text);
LoadedSeries load_series(const std::string& path);

/// Checks the file invariants: column counts, increasing times,
/// probabilities in [0, 1]. Throws std::runtime_error describing the first
/// violation.
void check_series_invariants(const std::string& csv_text);

/// Writes all files or none: each goes to a temporary sibling first and is
/// renamed into place once every temporary has been written. Creates `dir` if
/// needed.
void write_files_atomically(const std::string& dir,
                            const std::vector<std::pair<std::string, std::string>>& files);

std::string format_number(double v);

}  // namespace lzs::cli
