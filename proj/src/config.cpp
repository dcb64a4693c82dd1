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

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace beamforge::harness {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string &v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string &where, const std::string &what) {
  throw ConfigError(where + ": " + what);
}

template <typename T>
T parse_number(const std::string &text, const std::string &where) {
  T value{};
  const char *first = text.data(), *last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) fail(where, "cannot parse '" + text + "' as a number");
  return value;
}

long parse_long(const std::string &v, const std::string &w) { return parse_number<long>(v, w); }

double parse_double(const std::string &v, const std::string &w) {
  const double d = parse_number<double>(v, w);
  if (!std::isfinite(d)) fail(w, "value must be finite");
  return d;
}

bool parse_bool(const std::string &v, const std::string &w) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(w, "expected true or false, got '" + v + "'");
}

PhaseSet parse_bits(const std::string &v, const std::string &w) {
  if (v == "inf" || v == "infinite") return PhaseSet::infinite();
  return PhaseSet(static_cast<int>(parse_long(v, w)));
}

}  // namespace

std::string bits_label(const PhaseSet &bits) {
  return bits.finite() ? std::to_string(*bits.bits()) : "inf";
}

void ExperimentConfig::validate() const {
  auto need = [](bool ok, const std::string &msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  need(n_tx >= 1 && n_rx >= 1, "n_tx and n_rx must be positive");
  need(n_rf >= 1 && n_streams >= 1, "n_rf and n_streams must be positive");
  need(n_streams <= n_rf, "n_streams must not exceed n_rf");
  need(t_tx >= n_streams && t_tx % n_streams == 0, "t_tx must be a positive multiple of n_streams");
  need(t_rx >= n_streams && t_rx % n_streams == 0, "t_rx must be a positive multiple of n_streams");
  need(g_tx > n_tx, "g_tx must exceed n_tx");
  need(g_rx > n_rx, "g_rx must exceed n_rx");
  need(num_paths >= 1 && num_paths <= g_tx * g_rx, "num_paths must be in [1, g_tx*g_rx]");
  need(spacing_ratio > 0, "spacing_ratio must be positive");
  need(!schemes.empty(), "schemes must not be empty");
  const std::set<std::string> known{kSchemeProposedInf, kSchemeProposedLow, kSchemeRandomLow,
                                    kSchemeGaussian};
  for (const auto &s : schemes) need(known.count(s) == 1, "unknown scheme '" + s + "'");
  need(!bits.empty(), "bits must not be empty");
  need(num_trials >= 1, "num_trials must be positive");
  need(hist_bins >= 1, "hist_bins must be positive");
  need(n_streams <= std::min(n_tx, n_rx) || dnr_db.empty(),
       "spectral efficiency needs n_streams <= min(n_tx, n_rx)");
  for (long b : beam_counts) {
    need(b >= 2 * n_streams && b % (2 * n_streams) == 0,
         "beam_counts entries must be multiples of 2*n_streams");
  }
  (void)expand_cells(*this);
}

std::vector<Cell> expand_cells(const ExperimentConfig &cfg) {
  std::vector<Cell> cells;
  for (const auto &s : cfg.schemes) {
    if (s == kSchemeProposedInf || s == kSchemeGaussian) {
      cells.push_back({s, PhaseSet::infinite()});
      continue;
    }
    for (const auto &b : cfg.bits)
      if (b.finite()) cells.push_back({s, b});
  }
  if (cells.empty()) throw ConfigError("config: no (scheme, bits) cell to run");
  return cells;
}

ExperimentConfig parse_config(std::istream &in, const std::string &source) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string &, const std::string &)>;
  auto set_long = [](long &dst) -> Setter {
    return [&dst](const std::string &v, const std::string &w) { dst = parse_long(v, w); };
  };
  const std::map<std::string, Setter> setters{
      {"n_tx", set_long(cfg.n_tx)},
      {"n_rx", set_long(cfg.n_rx)},
      {"n_rf", set_long(cfg.n_rf)},
      {"n_streams", set_long(cfg.n_streams)},
      {"t_tx", set_long(cfg.t_tx)},
      {"t_rx", set_long(cfg.t_rx)},
      {"g_tx", set_long(cfg.g_tx)},
      {"g_rx", set_long(cfg.g_rx)},
      {"num_paths", set_long(cfg.num_paths)},
      {"num_trials", set_long(cfg.num_trials)},
      {"spacing_ratio",
       [&](const std::string &v, const std::string &w) { cfg.spacing_ratio = parse_double(v, w); }},
      {"se_pnr_db",
       [&](const std::string &v, const std::string &w) { cfg.se_pnr_db = parse_double(v, w); }},
      {"channel_mode",
       [&](const std::string &v, const std::string &w) {
         if (v == "on_grid") cfg.channel_mode = ChannelMode::on_grid;
         else if (v == "off_grid") cfg.channel_mode = ChannelMode::off_grid;
         else fail(w, "channel_mode must be on_grid or off_grid");
       }},
      {"schemes", [&](const std::string &v, const std::string &) { cfg.schemes = split_list(v); }},
      {"bits",
       [&](const std::string &v, const std::string &w) {
         cfg.bits.clear();
         for (const auto &b : split_list(v)) cfg.bits.push_back(parse_bits(b, w));
       }},
      {"pnr_db",
       [&](const std::string &v, const std::string &w) {
         cfg.pnr_db.clear();
         for (const auto &x : split_list(v)) cfg.pnr_db.push_back(parse_double(x, w));
       }},
      {"dnr_db",
       [&](const std::string &v, const std::string &w) {
         cfg.dnr_db.clear();
         for (const auto &x : split_list(v)) cfg.dnr_db.push_back(parse_double(x, w));
       }},
      {"beam_counts",
       [&](const std::string &v, const std::string &w) {
         cfg.beam_counts.clear();
         for (const auto &x : split_list(v)) cfg.beam_counts.push_back(parse_long(x, w));
       }},
      {"hist_bins",
       [&](const std::string &v, const std::string &w) {
         const long n = parse_long(v, w);
         if (n < 1) fail(w, "hist_bins must be positive");
         cfg.hist_bins = static_cast<std::size_t>(n);
       }},
      {"seed",
       [&](const std::string &v, const std::string &w) {
         cfg.seed = parse_number<std::uint64_t>(v, w);
       }},
      {"output_dir", [&](const std::string &v, const std::string &) { cfg.output_dir = v; }},
      {"nmse_per_trial_db",
       [&](const std::string &v, const std::string &w) { cfg.nmse_per_trial_db = parse_bool(v, w); }},
  };

  std::set<std::string> seen;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail(where, "unknown key '" + key + "'");
    if (!seen.insert(key).second) fail(where, "duplicate key '" + key + "'");
    if (value.empty()) fail(where, "empty value for '" + key + "'");
    it->second(value, where + " (" + key + ")");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

}  // namespace beamforge::harness
