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

#include "beamforge/baselines.hpp"
#include "beamforge/designer_inf.hpp"
#include "beamforge/designer_low.hpp"
#include "beamforge/estimator.hpp"
#include "beamforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

namespace beamforge::harness {
namespace {

using Matrix = CMat<double>;

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double> &v) {
  return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// The column-normalized Gram of a Kronecker product is the Kronecker product of
// the factors' normalized Grams, so mu(Q) is the larger factor coherence.
double kron_coherence(const CellDesign &d, const Dictionaries &dicts) {
  const Matrix tx = transmit_factor<double>(d.tx.analog, d.tx.digital(), dicts.tx.matrix);
  const Matrix rx = receive_factor<double>(d.rx.analog, d.rx.digital(), dicts.rx.matrix);
  return std::max(mutual_coherence(tx), mutual_coherence(rx));
}

HybridSensingMatrix<double> design_side(const Cell &cell, const Matrix &dictionary, long blocks,
                                        long rf_chains, long streams, Rng &rng) {
  if (cell.scheme == kSchemeProposedInf)
    return design_hybrid_inf<double>(dictionary, blocks, rf_chains, streams, {}, rng);
  if (cell.scheme == kSchemeProposedLow)
    return design_hybrid_low<double>(dictionary, blocks, rf_chains, streams, cell.bits, {}, rng);
  if (cell.scheme == kSchemeRandomLow)
    return random_baseline<double>(dictionary, blocks, rf_chains, streams, cell.bits, rng);
  if (cell.scheme == kSchemeGaussian)
    return gaussian_reference<double>(dictionary, blocks, rf_chains, streams, rng);
  throw ConfigError("unknown scheme '" + cell.scheme + "'");
}

std::vector<ChannelRealization<double>> draw_channels(const ExperimentConfig &cfg,
                                                      const Dictionaries &dicts) {
  std::vector<ChannelRealization<double>> out;
  out.reserve(static_cast<std::size_t>(cfg.num_trials));
  for (long t = 0; t < cfg.num_trials; ++t) {
    Rng rng(derive_seed(cfg.seed, "channel", static_cast<std::uint64_t>(t)));
    out.push_back(sample_channel<double>(dicts.tx, dicts.rx, cfg.num_paths, cfg.channel_mode, rng));
  }
  return out;
}

std::vector<Eigen::Index> true_support(const ChannelRealization<double> &ch) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index i = 0; i < ch.angular_vector.size(); ++i)
    if (ch.angular_vector(i) != std::complex<double>(0, 0)) s.push_back(i);
  return s;
}

void write_matrix_csv(const std::filesystem::path &path, const Matrix &m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

template <typename Writer, typename Rows>
void write_file(const std::filesystem::path &path, Writer writer, const Rows &rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  writer(out, rows);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

Dictionaries make_dictionaries(const ExperimentConfig &cfg) {
  return {build_dictionary<double>(cfg.n_tx, cfg.g_tx, cfg.spacing_ratio),
          build_dictionary<double>(cfg.n_rx, cfg.g_rx, cfg.spacing_ratio)};
}

CellDesign design_cell(const Cell &cell, const Dictionaries &dicts, long tx_blocks,
                       long rx_blocks, long rf_chains, long streams, Rng &rng) {
  CellDesign d;
  d.rx = design_side(cell, dicts.rx.matrix, rx_blocks, rf_chains, streams, rng);
  d.tx = design_side(cell, dicts.tx.matrix, tx_blocks, rf_chains, streams, rng).as_side(Side::transmitter);
  return d;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream &out, const std::vector<SweepRecord> &rows) {
  out << "scheme,bits,x_name,x_value,metric,value,trials,seed\n";
  for (const auto &r : rows)
    out << r.scheme << ',' << r.bits << ',' << r.x_name << ',' << format_double(r.x_value) << ','
        << r.metric << ',' << format_double(r.value) << ',' << r.trials << ',' << r.seed << '\n';
}

void write_histogram_csv(std::ostream &out, const std::vector<HistogramRecord> &rows) {
  out << "scheme,bits,bin_low,bin_high,count\n";
  for (const auto &r : rows)
    out << r.scheme << ',' << r.bits << ',' << format_double(r.bin_low) << ','
        << format_double(r.bin_high) << ',' << r.count << '\n';
}

void write_trace_csv(std::ostream &out, const std::vector<TraceRecord> &rows) {
  out << "scheme,bits,iteration,objective\n";
  for (const auto &r : rows)
    out << r.scheme << ',' << r.bits << ',' << r.iteration << ',' << format_double(r.objective)
        << '\n';
}

void ensure_writable(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("output directory '" + dir.string() + "' cannot be created");
  const auto probe = dir / ".beamforge_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok") || !(out.flush()))
      throw std::runtime_error("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig &cfg) {
  cfg.validate();
  ensure_writable(cfg.output_dir);
  const Dictionaries dicts = make_dictionaries(cfg);
  const auto channels = draw_channels(cfg, dicts);
  const long trials = cfg.num_trials;
  std::vector<SweepRecord> rows;

  for (const Cell &cell : expand_cells(cfg)) {
    const std::uint64_t cell_seed = cell.seed(cfg.seed);
    auto add = [&](const std::string &x_name, double x, const std::string &metric, double value,
                   long n) {
      rows.push_back({cell.scheme, bits_label(cell.bits), x_name, x, metric, value, n, cfg.seed});
    };

    Rng design_rng(cell_seed);
    const CellDesign design = design_cell(cell, dicts, cfg.tx_blocks(), cfg.rx_blocks(), cfg.n_rf,
                                          cfg.n_streams, design_rng);
    const Matrix q = equivalent_dictionary(design.tx, design.rx, dicts.tx.matrix, dicts.rx.matrix);

    add("design", 0, "design_objective_rx", design.rx.design_objective, 1);
    add("design", 0, "design_objective_tx", design.tx.design_objective, 1);
    add("design", 0, "gram_objective_rx",
        gram_objective<double>(dicts.rx.matrix, design.rx.analog, design.rx.digital()), 1);
    add("design", 0, "gram_objective_tx",
        gram_objective<double>(dicts.tx.matrix, design.tx.analog, design.tx.digital()), 1);
    add("design", 0, "mutual_coherence", kron_coherence(design, dicts), 1);
    add("design", 0, "scaled_objective", scaled_identity_objective(q).value, 1);

    for (std::size_t k = 0; k < cfg.pnr_db.size(); ++k) {
      const double power = db_to_linear(cfg.pnr_db[k]);
      std::vector<double> lin, dbs;
      long exact = 0;
      for (long t = 0; t < trials; ++t) {
        const auto &ch = channels[static_cast<std::size_t>(t)];
        Rng noise_rng(derive_seed(cell_seed, "noise",
                                  static_cast<std::uint64_t>(t) * cfg.pnr_db.size() + k));
        const auto m = synthesize_measurements<double>(ch, design.tx, design.rx, q, power, 1.0, noise_rng);
        const auto est = estimate_channel<double>(m, cfg.num_paths, dicts.rx.matrix, dicts.tx.matrix);
        const auto e = nmse<double>(ch.dense, est.channel);
        lin.push_back(e.linear);
        dbs.push_back(e.db);
        if (cfg.channel_mode == ChannelMode::on_grid) {
          auto s = est.omp.support;
          std::sort(s.begin(), s.end());
          if (s == true_support(ch)) ++exact;
        }
      }
      const double x = cfg.pnr_db[k];
      add("pnr_db", x, "nmse_db", to_db(mean(lin)), trials);
      add("pnr_db", x, "nmse_median_db", to_db(median(lin)), trials);
      if (cfg.nmse_per_trial_db) add("pnr_db", x, "nmse_per_trial_db", mean(dbs), trials);
      if (cfg.channel_mode == ChannelMode::on_grid)
        add("pnr_db", x, "support_rate", double(exact) / double(trials), trials);
    }

    if (!cfg.dnr_db.empty()) {
      const double ce_power = db_to_linear(cfg.se_pnr_db);
      std::vector<Matrix> estimates;
      for (long t = 0; t < trials; ++t) {
        const auto &ch = channels[static_cast<std::size_t>(t)];
        Rng noise_rng(derive_seed(cell_seed, "se_noise", static_cast<std::uint64_t>(t)));
        const auto m = synthesize_measurements<double>(ch, design.tx, design.rx, q, ce_power, 1.0, noise_rng);
        estimates.push_back(
            estimate_channel<double>(m, cfg.num_paths, dicts.rx.matrix, dicts.tx.matrix).channel);
      }
      for (double dnr : cfg.dnr_db) {
        std::vector<double> rates;
        for (long t = 0; t < trials; ++t)
          rates.push_back(spectral_efficiency<double>(channels[static_cast<std::size_t>(t)].dense,
                                                      estimates[static_cast<std::size_t>(t)],
                                                      db_to_linear(dnr), cfg.n_streams, 1.0)
                              .bits_per_hz);
        add("dnr_db", dnr, "spectral_efficiency", mean(rates), trials);
      }
    }

    for (long beams : cfg.beam_counts) {
      Rng rng(derive_seed(cell_seed, "beams", static_cast<std::uint64_t>(beams)));
      const CellDesign d = design_cell(cell, dicts, beams / cfg.n_streams,
                                       beams / 2 / cfg.n_streams, cfg.n_rf, cfg.n_streams, rng);
      const Matrix qb = equivalent_dictionary(d.tx, d.rx, dicts.tx.matrix, dicts.rx.matrix);
      add("t_tx", double(beams), "scaled_objective", scaled_identity_objective(qb).value, 1);
    }
  }

  if (!cfg.dnr_db.empty()) {
    for (double dnr : cfg.dnr_db) {
      std::vector<double> rates;
      for (const auto &ch : channels)
        rates.push_back(
            spectral_efficiency<double>(ch.dense, ch.dense, db_to_linear(dnr), cfg.n_streams, 1.0)
                .bits_per_hz);
      rows.push_back({"perfect_csi", "inf", "dnr_db", dnr, "spectral_efficiency", mean(rates),
                      trials, cfg.seed});
    }
  }

  write_file(cfg.output_dir / "sweep.csv", write_sweep_csv, rows);
  return rows;
}

std::vector<HistogramRecord> run_histogram(const ExperimentConfig &cfg) {
  cfg.validate();
  ensure_writable(cfg.output_dir);
  const Dictionaries dicts = make_dictionaries(cfg);
  std::vector<HistogramRecord> rows;
  for (const Cell &cell : expand_cells(cfg)) {
    const std::uint64_t cell_seed = cell.seed(cfg.seed);
    std::vector<HistogramBin> total;
    for (long t = 0; t < cfg.num_trials; ++t) {
      Rng rng(derive_seed(cell_seed, "hist", static_cast<std::uint64_t>(t)));
      const CellDesign d = design_cell(cell, dicts, cfg.tx_blocks(), cfg.rx_blocks(), cfg.n_rf,
                                       cfg.n_streams, rng);
      const Matrix q = equivalent_dictionary(d.tx, d.rx, dicts.tx.matrix, dicts.rx.matrix);
      const auto bins = offdiag_histogram(q, cfg.hist_bins);
      if (total.empty()) total = bins;
      else
        for (std::size_t b = 0; b < bins.size(); ++b) total[b].count += bins[b].count;
    }
    for (const auto &b : total)
      rows.push_back({cell.scheme, bits_label(cell.bits), b.low, b.high, b.count});
  }
  write_file(cfg.output_dir / "histogram.csv", write_histogram_csv, rows);
  return rows;
}

std::vector<TraceRecord> run_convergence_trace(const ExperimentConfig &cfg) {
  cfg.validate();
  ensure_writable(cfg.output_dir);
  const Dictionaries dicts = make_dictionaries(cfg);
  std::vector<TraceRecord> rows;
  for (const Cell &cell : expand_cells(cfg)) {
    if (cell.scheme != kSchemeProposedInf && cell.scheme != kSchemeProposedLow) continue;
    // Same generator as the sweep, so the traced receive design is the one the sweep used.
    Rng rng(cell.seed(cfg.seed));
    const auto h = design_side(cell, dicts.rx.matrix, cfg.rx_blocks(), cfg.n_rf, cfg.n_streams, rng);
    for (std::size_t i = 0; i < h.objective_trace.size(); ++i)
      rows.push_back({cell.scheme, bits_label(cell.bits), long(i), h.objective_trace[i]});
  }
  write_file(cfg.output_dir / "trace.csv", write_trace_csv, rows);
  return rows;
}

std::vector<SweepRecord> run_design(const ExperimentConfig &cfg) {
  cfg.validate();
  ensure_writable(cfg.output_dir);
  const auto matrix_dir = cfg.output_dir / "matrices";
  ensure_writable(matrix_dir);
  const Dictionaries dicts = make_dictionaries(cfg);
  std::vector<SweepRecord> rows;
  for (const Cell &cell : expand_cells(cfg)) {
    Rng rng(cell.seed(cfg.seed));
    const CellDesign d = design_cell(cell, dicts, cfg.tx_blocks(), cfg.rx_blocks(), cfg.n_rf,
                                     cfg.n_streams, rng);
    const Matrix q = equivalent_dictionary(d.tx, d.rx, dicts.tx.matrix, dicts.rx.matrix);
    const std::string bits = bits_label(cell.bits);
    auto add = [&](const std::string &metric, double v) {
      rows.push_back({cell.scheme, bits, "design", 0, metric, v, 1, cfg.seed});
    };
    add("design_objective_rx", d.rx.design_objective);
    add("design_objective_tx", d.tx.design_objective);
    add("mutual_coherence", kron_coherence(d, dicts));
    add("scaled_objective", scaled_identity_objective(q).value);

    const std::string stem = cell.scheme + "_" + bits;
    write_matrix_csv(matrix_dir / (stem + "_rx_analog.csv"), d.rx.analog);
    write_matrix_csv(matrix_dir / (stem + "_rx_digital.csv"), d.rx.digital());
    write_matrix_csv(matrix_dir / (stem + "_tx_analog.csv"), d.tx.analog);
    write_matrix_csv(matrix_dir / (stem + "_tx_digital.csv"), d.tx.digital());
  }
  write_file(cfg.output_dir / "design.csv", write_sweep_csv, rows);
  return rows;
}

}  // namespace beamforge::harness
