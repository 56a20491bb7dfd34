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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lzs/cli/commands.hpp"
#include "lzs/experiments.hpp"

namespace {

struct Flags {
  std::string out_dir;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out_dir, "Output directory (default: $LZS_OUT_DIR or .)");
  cmd->add_option("--format", f.format, "Series format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "Seed for ensemble sampling");
  cmd->add_option("--workers", f.workers, "Worker thread cap")->check(CLI::PositiveNumber);
}

lzs::cli::CommandOptions to_options(const Flags& f) {
  lzs::cli::CommandOptions o;
  if (!f.out_dir.empty()) o.out_dir = f.out_dir;
  if (!f.format.empty()) o.format = lzs::cli::parse_output_format(f.format);
  o.seed = f.seed;
  o.workers = f.workers;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for periodically driven two-level systems"};
  app.set_version_flag("--version", std::string(lzs::kVersion));
  app.require_subcommand(1);

  Flags flags;
  std::string config_path;
  std::string figure_id;
  std::string series_path;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario from a JSON config");
  simulate->add_option("config", config_path, "Config file")->required();
  add_common_flags(simulate, flags);

  auto* reproduce = app.add_subcommand("reproduce", "Run a frozen figure preset");
  reproduce->add_option("figure-id", figure_id, "fig2c, fig2d, fig3a, fig3b, fig3c, fig3d or fig4")->required();
  add_common_flags(reproduce, flags);

  auto* sweep = app.add_subcommand("sweep", "Resonance or LZ-probability sweep from a JSON config");
  sweep->add_option("config", config_path, "Config file")->required();
  add_common_flags(sweep, flags);

  auto* analyze = app.add_subcommand("analyze", "Post-process a series file");
  analyze->require_subcommand(1);
  auto* rabi = analyze->add_subcommand("rabi", "Dominant oscillation frequency of P0");
  rabi->add_option("series-file", series_path, "CSV or JSON series")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lzs::cli::kExitConfig;
  }

  const auto opts = to_options(flags);
  if (*simulate) return lzs::cli::cmd_simulate(config_path, opts, std::cout, std::cerr);
  if (*reproduce) return lzs::cli::cmd_reproduce(figure_id, opts, std::cout, std::cerr);
  if (*sweep) return lzs::cli::cmd_sweep(config_path, opts, std::cout, std::cerr);
  if (*rabi) return lzs::cli::cmd_analyze_rabi(series_path, std::cout, std::cerr);
  return lzs::cli::kExitConfig;
}
