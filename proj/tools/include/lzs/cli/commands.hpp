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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lzs/cli/config.hpp"

namespace lzs::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,       ///< Bad config, arguments, input file or output path.
  kExitIntegration = 3,  ///< Norm drift beyond tolerance.
  kExitAnalysis = 4,     ///< No oscillation found or fit did not converge.
};

/// Command-line overrides. Unset fields fall back to the config file, then
/// to the defaults ($LZS_OUT_DIR or the working directory for the output).
struct CommandOptions {
  std::optional<std::string> out_dir;
  std::optional<OutputFormat> format;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

inline constexpr const char* kOutDirEnv = "LZS_OUT_DIR";

const std::vector<std::string>& figure_ids();

/// Each command prints one JSON object to `out` on success and a message to
/// `err` on failure, and returns an ExitCode.
int cmd_simulate(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_reproduce(const std::string& figure_id, const CommandOptions& opts, std::ostream& out,
                  std::ostream& err);
int cmd_sweep(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_analyze_rabi(const std::string& series_path, std::ostream& out, std::ostream& err);

}  // namespace lzs::cli
