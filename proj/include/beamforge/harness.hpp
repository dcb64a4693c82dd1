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

#ifndef BEAMFORGE_HARNESS_HPP
#define BEAMFORGE_HARNESS_HPP

#include "beamforge/channel.hpp"
#include "beamforge/random.hpp"
#include "beamforge/sensing.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

// Monte-Carlo experiment runner. Everything here runs in double precision.

namespace beamforge::harness {

inline constexpr const char *kSchemeProposedInf = "proposed_inf";
inline constexpr const char *kSchemeProposedLow = "proposed_low";
inline constexpr const char *kSchemeRandomLow = "random_low";
inline constexpr const char *kSchemeGaussian = "gaussian_reference";

struct ExperimentConfig {
  long n_tx = 16, n_rx = 8, n_rf = 4, n_streams = 4;
  long t_tx = 12, t_rx = 8;
  long g_tx = 20, g_rx = 12;
  long num_paths = 2;
  double spacing_ratio = 0.5;
  ChannelMode channel_mode = ChannelMode::on_grid;

  std::vector<std::string> schemes{kSchemeProposedInf, kSchemeProposedLow, kSchemeRandomLow};
  std::vector<PhaseSet> bits{PhaseSet(1), PhaseSet(2), PhaseSet(3), PhaseSet::infinite()};
  std::vector<double> pnr_db{-10, -5, 0, 5, 10, 15};
  std::vector<double> dnr_db;       // empty disables the spectral-efficiency pass
  double se_pnr_db = -10;           // estimation PNR used by the spectral-efficiency pass
  std::vector<long> beam_counts;    // T_t values for the objective-vs-beams curve (T_r = T_t / 2)
  std::size_t hist_bins = 20;
  long num_trials = 100;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";
  bool nmse_per_trial_db = false;   // also report the mean of per-trial dB values

  long tx_blocks() const { return t_tx / n_streams; }
  long rx_blocks() const { return t_rx / n_streams; }

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// key = value lines, '#' starts a comment, lists are comma separated.
ExperimentConfig parse_config(std::istream &in, const std::string &source = "<config>");
ExperimentConfig load_config(const std::filesystem::path &path);

std::string bits_label(const PhaseSet &bits);

/// One (scheme, bits) combination. Schemes without a finite alphabet
/// (proposed_inf, gaussian_reference) expand to a single "inf" cell.
struct Cell {
  std::string scheme;
  PhaseSet bits;

  std::string label() const { return scheme + "|" + bits_label(bits); }
  std::uint64_t seed(std::uint64_t base) const { return derive_seed(base, label()); }
};

std::vector<Cell> expand_cells(const ExperimentConfig &cfg);

struct Dictionaries {
  AngularDictionary<double> tx, rx;
};
Dictionaries make_dictionaries(const ExperimentConfig &cfg);

struct CellDesign {
  HybridSensingMatrix<double> tx, rx;
};

/// Designs both sides of a cell; the receive side first, then the transmit
/// side, from the same generator.
CellDesign design_cell(const Cell &cell, const Dictionaries &dicts, long tx_blocks,
                       long rx_blocks, long rf_chains, long streams, Rng &rng);

struct SweepRecord {
  std::string scheme, bits, x_name;
  double x_value = 0;
  std::string metric;
  double value = 0;
  long trials = 0;
  std::uint64_t seed = 0;
};

struct HistogramRecord {
  std::string scheme, bits;
  double bin_low = 0, bin_high = 0;
  std::uint64_t count = 0;
};

struct TraceRecord {
  std::string scheme, bits;
  long iteration = 0;
  double objective = 0;
};

std::string format_double(double v);
void write_sweep_csv(std::ostream &out, const std::vector<SweepRecord> &rows);
void write_histogram_csv(std::ostream &out, const std::vector<HistogramRecord> &rows);
void write_trace_csv(std::ostream &out, const std::vector<TraceRecord> &rows);

/// Creates `dir` if needed and checks that a file can be written there.
void ensure_writable(const std::filesystem::path &dir);

/// NMSE vs PNR, support-recovery rate, design metrics, optional spectral
/// efficiency vs DNR and objective vs beam count. Writes sweep.csv.
std::vector<SweepRecord> run_sweep(const ExperimentConfig &cfg);

/// Off-diagonal magnitude histogram of the normalized Gram of Q, summed over
/// trials with one fresh design per trial. Writes histogram.csv.
std::vector<HistogramRecord> run_histogram(const ExperimentConfig &cfg);

/// Receive-side committed objective per outer iteration / block commit for
/// every proposed_* cell. Writes trace.csv.
std::vector<TraceRecord> run_convergence_trace(const ExperimentConfig &cfg);

/// Designs every cell once; writes design.csv and the matrices under
/// matrices/. Returns the summary rows.
std::vector<SweepRecord> run_design(const ExperimentConfig &cfg);

}  // namespace beamforge::harness

#endif  // BEAMFORGE_HARNESS_HPP
