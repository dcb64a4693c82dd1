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

#ifndef BEAMFORGE_CHANNEL_HPP
#define BEAMFORGE_CHANNEL_HPP

#include "beamforge/random.hpp"
#include "beamforge/types.hpp"

#include <cmath>
#include <set>
#include <utility>
#include <vector>

namespace beamforge {

/// ULA array response with the 1/sqrt(N) prefactor; element n (0-based) is
/// exp(j*2*pi*spacing_ratio*n*cos(angle)) / sqrt(N).
template <typename Real>
CVec<Real> steering_vector(Eigen::Index num_antennas, Real angle, Real spacing_ratio = Real(0.5)) {
  if (num_antennas < 1) throw ConfigError("steering_vector: num_antennas must be >= 1");
  if (!std::isfinite(angle)) throw std::domain_error("steering_vector: non-finite angle");
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(num_antennas));
  const Real step = Real(2) * kPi<Real> * spacing_ratio * std::cos(angle);
  CVec<Real> a(num_antennas);
  for (Eigen::Index n = 0; n < num_antennas; ++n)
    a(n) = std::polar(scale, step * static_cast<Real>(n));
  return a;
}

/// Steering-vector dictionary on the uniform-cosine grid
/// cos(angle_g) = 2g/G - 1, g = 0..G-1.
template <typename Real>
struct AngularDictionary {
  Eigen::Index num_antennas = 0;
  Eigen::Index num_grids = 0;
  Real element_spacing_ratio = Real(0.5);
  std::vector<Real> grid_angles;
  CMat<Real> matrix;  // N x G
};

template <typename Real>
AngularDictionary<Real> build_dictionary(Eigen::Index num_antennas, Eigen::Index num_grids,
                                         Real spacing_ratio = Real(0.5)) {
  if (num_antennas < 1) throw ConfigError("build_dictionary: num_antennas must be >= 1");
  if (num_grids <= num_antennas)
    throw ConfigError("build_dictionary: number of grid points must exceed number of antennas");
  AngularDictionary<Real> d;
  d.num_antennas = num_antennas;
  d.num_grids = num_grids;
  d.element_spacing_ratio = spacing_ratio;
  d.grid_angles.resize(static_cast<std::size_t>(num_grids));
  d.matrix.resize(num_antennas, num_grids);
  for (Eigen::Index g = 0; g < num_grids; ++g) {
    const Real c = Real(2) * static_cast<Real>(g) / static_cast<Real>(num_grids) - Real(1);
    const Real angle = std::acos(c);
    d.grid_angles[static_cast<std::size_t>(g)] = angle;
    d.matrix.col(g) = steering_vector<Real>(num_antennas, angle, spacing_ratio);
  }
  return d;
}

enum class ChannelMode { on_grid, off_grid };

/// One propagation path. In on-grid mode the angles are the dictionary grid
/// angles at `aod_index` / `aoa_index`.
template <typename Real>
struct PathSpec {
  Complex<Real> gain;
  Eigen::Index aod_index = -1;
  Eigen::Index aoa_index = -1;
  Real aod = Real(0);
  Real aoa = Real(0);
};

template <typename Real>
struct ChannelRealization {
  Eigen::Index num_tx = 0;
  Eigen::Index num_rx = 0;
  ChannelMode mode = ChannelMode::on_grid;
  std::vector<PathSpec<Real>> paths;
  CMat<Real> dense;            // N_r x N_t
  CVec<Real> angular_vector;   // G_t*G_r, vec of the G_r x G_t angular matrix (on-grid only)

  Eigen::Index num_paths() const { return static_cast<Eigen::Index>(paths.size()); }
};

/// Index of grid pair (aod, aoa) in vec(H_a) where H_a is G_r x G_t.
inline Eigen::Index angular_index(Eigen::Index aod_index, Eigen::Index aoa_index,
                                  Eigen::Index num_rx_grids) {
  return aod_index * num_rx_grids + aoa_index;
}

/// Assembles a channel from explicit paths. On-grid paths use the dictionary
/// columns, so dense == A_R * invec(angular_vector) * A_T^H holds exactly.
template <typename Real>
ChannelRealization<Real> make_channel(const AngularDictionary<Real> &dict_tx,
                                      const AngularDictionary<Real> &dict_rx,
                                      std::vector<PathSpec<Real>> paths, ChannelMode mode) {
  if (paths.empty()) throw std::domain_error("make_channel: at least one path is required");
  ChannelRealization<Real> ch;
  ch.num_tx = dict_tx.num_antennas;
  ch.num_rx = dict_rx.num_antennas;
  ch.mode = mode;
  const Real scale = std::sqrt(static_cast<Real>(ch.num_tx * ch.num_rx) /
                               static_cast<Real>(paths.size()));
  if (mode == ChannelMode::on_grid) {
    const Eigen::Index gt = dict_tx.num_grids, gr = dict_rx.num_grids;
    ch.angular_vector = CVec<Real>::Zero(gt * gr);
    for (auto &p : paths) {
      if (p.aod_index < 0 || p.aod_index >= gt || p.aoa_index < 0 || p.aoa_index >= gr)
        throw std::out_of_range("make_channel: grid index out of range");
      p.aod = dict_tx.grid_angles[static_cast<std::size_t>(p.aod_index)];
      p.aoa = dict_rx.grid_angles[static_cast<std::size_t>(p.aoa_index)];
      ch.angular_vector(angular_index(p.aod_index, p.aoa_index, gr)) += scale * p.gain;
    }
    const CMat<Real> ha = invec(ch.angular_vector, gr, gt);
    ch.dense = dict_rx.matrix * ha * dict_tx.matrix.adjoint();
  } else {
    ch.dense = CMat<Real>::Zero(ch.num_rx, ch.num_tx);
    for (const auto &p : paths) {
      const CVec<Real> ar = steering_vector<Real>(ch.num_rx, p.aoa, dict_rx.element_spacing_ratio);
      const CVec<Real> at = steering_vector<Real>(ch.num_tx, p.aod, dict_tx.element_spacing_ratio);
      ch.dense.noalias() += (scale * p.gain) * ar * at.adjoint();
    }
  }
  ch.paths = std::move(paths);
  return ch;
}

/// Saleh-Valenzuela draw: L paths, gains CN(0, 1/L). On-grid mode picks L
/// distinct (AoD, AoA) grid pairs uniformly (rejection sampling); off-grid
/// mode draws cos(angle) uniformly on [-1, 1].
template <typename Real>
ChannelRealization<Real> sample_channel(const AngularDictionary<Real> &dict_tx,
                                        const AngularDictionary<Real> &dict_rx,
                                        Eigen::Index num_paths, ChannelMode mode, Rng &rng) {
  if (num_paths <= 0) throw std::domain_error("sample_channel: num_paths must be positive");
  if (num_paths > std::min(dict_tx.num_grids, dict_rx.num_grids))
    throw ConfigError("sample_channel: num_paths exceeds grid size");
  const Real variance = Real(1) / static_cast<Real>(num_paths);
  std::vector<PathSpec<Real>> paths;
  paths.reserve(static_cast<std::size_t>(num_paths));
  if (mode == ChannelMode::on_grid) {
    std::uniform_int_distribution<Eigen::Index> pick_t(0, dict_tx.num_grids - 1);
    std::uniform_int_distribution<Eigen::Index> pick_r(0, dict_rx.num_grids - 1);
    std::set<std::pair<Eigen::Index, Eigen::Index>> used;
    while (static_cast<Eigen::Index>(paths.size()) < num_paths) {
      const Eigen::Index t = pick_t(rng);
      const Eigen::Index r = pick_r(rng);
      if (!used.insert({t, r}).second) continue;
      PathSpec<Real> p;
      p.aod_index = t;
      p.aoa_index = r;
      paths.push_back(p);
    }
    for (auto &p : paths) p.gain = complex_normal<Real>(rng, variance);
  } else {
    std::uniform_real_distribution<Real> u(Real(-1), Real(1));
    for (Eigen::Index l = 0; l < num_paths; ++l) {
      PathSpec<Real> p;
      p.aod = std::acos(u(rng));
      p.aoa = std::acos(u(rng));
      p.gain = complex_normal<Real>(rng, variance);
      paths.push_back(p);
    }
  }
  return make_channel(dict_tx, dict_rx, std::move(paths), mode);
}

}  // namespace beamforge

#endif  // BEAMFORGE_CHANNEL_HPP
