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

#ifndef BEAMFORGE_RANDOM_HPP
#define BEAMFORGE_RANDOM_HPP

#include "beamforge/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace beamforge {

using Rng = std::mt19937_64;

// Circularly symmetric complex Gaussian CN(0, variance).
template <typename Real>
Complex<Real> complex_normal(Rng &rng, Real variance = Real(1)) {
  std::normal_distribution<Real> n(Real(0), std::sqrt(variance / Real(2)));
  const Real re = n(rng);
  const Real im = n(rng);
  return {re, im};
}

template <typename Real>
CMat<Real> complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols,
                                 Real variance = Real(1)) {
  CMat<Real> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal<Real>(rng, variance);
  return m;
}

// Entries exp(j*theta) with theta uniform on [0, 2*pi).
template <typename Real>
CMat<Real> random_phase_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<Real> u(Real(0), Real(2) * kPi<Real>);
  CMat<Real> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = std::polar(Real(1), u(rng));
  return m;
}

/// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over a label, folded into the parent seed with mix64. Streams for
/// different labels are independent, so adding a label never perturbs another.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                    std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ mix64(h) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace beamforge

#endif  // BEAMFORGE_RANDOM_HPP
