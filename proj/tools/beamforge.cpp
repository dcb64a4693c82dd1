// SPDX-License-Identifier: Apache-2.0
//
// beamforge: hybrid training-beam design for compressive mmWave channel estimation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "beamforge/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

namespace bh = beamforge::harness;

int main(int argc, char **argv) {
  CLI::App app{"beamforge: training-beam design and channel-estimation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", config_path, "key = value experiment file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
  };
  CLI::App *design = app.add_subcommand("design", "design every (scheme, bits) cell and save the matrices");
  CLI::App *sweep = app.add_subcommand("sweep", "NMSE / spectral-efficiency / beam-count sweeps");
  CLI::App *hist = app.add_subcommand("hist", "off-diagonal Gram magnitude histograms");
  CLI::App *trace = app.add_subcommand("trace", "design objective per iteration");
  for (CLI::App *sub : {design, sweep, hist, trace}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    bh::ExperimentConfig cfg = bh::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;

    if (design->parsed()) {
      const auto rows = bh::run_design(cfg);
      std::cout << "wrote " << rows.size() << " rows to " << (cfg.output_dir / "design.csv").string() << '\n';
    } else if (sweep->parsed()) {
      const auto rows = bh::run_sweep(cfg);
      std::cout << "wrote " << rows.size() << " rows to " << (cfg.output_dir / "sweep.csv").string() << '\n';
    } else if (hist->parsed()) {
      const auto rows = bh::run_histogram(cfg);
      std::cout << "wrote " << rows.size() << " rows to " << (cfg.output_dir / "histogram.csv").string() << '\n';
    } else if (trace->parsed()) {
      const auto rows = bh::run_convergence_trace(cfg);
      std::cout << "wrote " << rows.size() << " rows to " << (cfg.output_dir / "trace.csv").string() << '\n';
    }
  } catch (const beamforge::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
