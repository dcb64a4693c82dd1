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

#ifndef BEAMFORGE_BASELINES_HPP
#define BEAMFORGE_BASELINES_HPP

#include "beamforge/designer_low.hpp"
#include "beamforge/random.hpp"
#include "beamforge/sensing.hpp"

#include <random>

namespace beamforge {

/// Analog entries i.i.d. uniform over the alphabet; each digital block is one
/// gradient-descent fit (from a Gaussian start) against the random analog
/// part, visiting the blocks once in order.
template <typename Real>
HybridSensingMatrix<Real> random_baseline(const CMat<Real> &dictionary, Eigen::Index num_blocks,
                                          Eigen::Index rf_chains, Eigen::Index streams,
                                          const PhaseSet &phase_set, Rng &rng,
                                          const GdOptions<Real> &gd = {}) {
  if (!phase_set.finite()) throw ConfigError("random_baseline: requires a finite phase set");
  if (num_blocks < 1 || rf_chains < 1 || streams < 1 || streams > rf_chains)
    throw ConfigError("random_baseline: invalid dimensions");
  HybridSensingMatrix<Real> h;
  h.phase_set = phase_set;
  const auto alphabet = phase_set.alphabet<Real>();
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  h.analog.resize(dictionary.rows(), rf_chains * num_blocks);
  for (Eigen::Index j = 0; j < h.analog.cols(); ++j)
    for (Eigen::Index i = 0; i < h.analog.rows(); ++i) h.analog(i, j) = alphabet[pick(rng)];
  for (Eigen::Index q = 0; q < num_blocks; ++q)
    h.digital_blocks.push_back(complex_normal_matrix<Real>(rng, rf_chains, streams));
  for (Eigen::Index q = 0; q < num_blocks; ++q) {
    const CMat<Real> target = residual_target(dictionary, h, q);
    const CMat<Real> a_e = h.analog_block(q).adjoint() * dictionary;
    auto &block = h.digital_blocks[static_cast<std::size_t>(q)];
    block = gd_digital_block(block, a_e, target, gd).w;
  }
  h.design_objective = blockwise_objective(dictionary, h);
  h.objective_trace.push_back(h.design_objective);
  normalize_power(h);
  return h;
}

/// Unconstrained reference: analog entries i.i.d. CN(0, 1), digital blocks
/// [I_{N_s}; 0]. Not constant-modulus.
template <typename Real>
HybridSensingMatrix<Real> gaussian_reference(const CMat<Real> &dictionary, Eigen::Index num_blocks,
                                             Eigen::Index rf_chains, Eigen::Index streams,
                                             Rng &rng) {
  if (num_blocks < 1 || rf_chains < 1 || streams < 1 || streams > rf_chains)
    throw ConfigError("gaussian_reference: invalid dimensions");
  HybridSensingMatrix<Real> h;
  h.constant_modulus = false;
  h.analog = complex_normal_matrix<Real>(rng, dictionary.rows(), rf_chains * num_blocks);
  for (Eigen::Index q = 0; q < num_blocks; ++q)
    h.digital_blocks.push_back(CMat<Real>::Identity(rf_chains, streams));
  normalize_power(h);
  // No optimized scale exists here, so the objective is taken after normalization.
  h.design_objective = blockwise_objective(dictionary, h);
  h.objective_trace.push_back(h.design_objective);
  return h;
}

}  // namespace beamforge

#endif  // BEAMFORGE_BASELINES_HPP
