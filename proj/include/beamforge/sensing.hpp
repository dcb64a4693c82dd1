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

#ifndef BEAMFORGE_SENSING_HPP
#define BEAMFORGE_SENSING_HPP

#include "beamforge/types.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace beamforge {

/// Phase-shifter alphabet: the 2^B roots of unity exp(j*2*pi*b/2^B),
/// b = 1..2^B, or the whole unit circle when `bits` is empty.
class PhaseSet {
 public:
  PhaseSet() = default;
  explicit PhaseSet(int bits) : bits_(bits) {
    if (bits < 1 || bits > 30) throw ConfigError("PhaseSet: bits must be in [1, 30]");
  }
  static PhaseSet infinite() { return PhaseSet(); }

  bool finite() const { return bits_.has_value(); }
  const std::optional<int> &bits() const { return bits_; }
  long long size() const { return finite() ? (1LL << *bits_) : 0; }

  template <typename Real>
  std::vector<Complex<Real>> alphabet() const {
    std::vector<Complex<Real>> out;
    const long long n = size();
    for (long long b = 1; b <= n; ++b)
      out.push_back(std::polar(Real(1), Real(2) * kPi<Real> * static_cast<Real>(b) /
                                            static_cast<Real>(n)));
    return out;
  }

  /// Nearest alphabet point; ties go to the candidate whose phase in
  /// [0, 2*pi) is smaller. Identity for the infinite set.
  template <typename Real>
  Complex<Real> quantize(Complex<Real> z) const {
    if (!finite()) return z;
    const long long n = size();
    const Real bin = Real(2) * kPi<Real> / static_cast<Real>(n);
    Real phase = std::arg(z);
    if (phase < 0) phase += Real(2) * kPi<Real>;
    long long lo = static_cast<long long>(std::floor(phase / bin));
    lo = ((lo % n) + n) % n;
    const long long hi = (lo + 1) % n;
    const Complex<Real> c_lo = std::polar(Real(1), bin * static_cast<Real>(lo));
    const Complex<Real> c_hi = std::polar(Real(1), bin * static_cast<Real>(hi));
    const Real d_lo = std::abs(z - c_lo), d_hi = std::abs(z - c_hi);
    if (d_lo < d_hi) return c_lo;
    if (d_hi < d_lo) return c_hi;
    return hi < lo ? c_hi : c_lo;  // tie: smaller phase in [0, 2*pi)
  }

  template <typename Real>
  bool contains(Complex<Real> z, Real tol = Real(1e-12)) const {
    if (!finite()) return std::abs(std::abs(z) - Real(1)) <= tol;
    return std::abs(z - quantize(z)) <= tol;
  }

 private:
  std::optional<int> bits_;
};

template <typename Real>
CMat<Real> quantize_phases(const CMat<Real> &m, const PhaseSet &set) {
  if (!set.finite()) return m;
  return m.unaryExpr([&set](const Complex<Real> &z) { return set.template quantize<Real>(z); });
}

enum class Side { transmitter, receiver };

/// Analog matrix N x (N_RF * blocks) and block-diagonal digital part with
/// `num_blocks` blocks of N_RF x N_s.
template <typename Real>
struct HybridSensingMatrix {
  CMat<Real> analog;
  std::vector<CMat<Real>> digital_blocks;
  PhaseSet phase_set;              // resolution of the analog entries
  bool constant_modulus = true;    // false only for the unconstrained Gaussian reference
  Side side = Side::receiver;
  Real design_objective = 0;       // design objective before power normalization
  std::vector<Real> objective_trace;

  Eigen::Index num_blocks() const { return static_cast<Eigen::Index>(digital_blocks.size()); }
  Eigen::Index rf_chains() const { return digital_blocks.empty() ? 0 : digital_blocks[0].rows(); }
  Eigen::Index streams() const { return digital_blocks.empty() ? 0 : digital_blocks[0].cols(); }
  Eigen::Index num_beams() const { return streams() * num_blocks(); }

  CMat<Real> digital() const { return block_diagonal(digital_blocks); }

  auto analog_block(Eigen::Index q) const {
    return analog.middleCols(q * rf_chains(), rf_chains());
  }
  auto analog_block(Eigen::Index q) { return analog.middleCols(q * rf_chains(), rf_chains()); }

  /// Transmit-side orientation: the receive-side design W becomes F = W, which
  /// makes F_BB^T F_RF^T A^* the complex conjugate of W_BB^H W_RF^H A.
  HybridSensingMatrix as_side(Side s) const {
    HybridSensingMatrix out = *this;
    out.side = s;
    return out;
  }
};

/// Rescales the digital part so that ||W_RF W_BB||_F^2 = T.
template <typename Real>
void normalize_power(HybridSensingMatrix<Real> &h) {
  const Real power = (h.analog * h.digital()).squaredNorm();
  if (!(power > 0)) return;
  const Real scale = std::sqrt(static_cast<Real>(h.num_beams()) / power);
  for (auto &b : h.digital_blocks) b *= scale;
}

/// Sum over blocks of A^H W_RF,q W_BB,q W_BB,q^H W_RF,q^H A, minus I.
template <typename Real>
Real blockwise_objective(const CMat<Real> &dictionary, const HybridSensingMatrix<Real> &h) {
  const Eigen::Index g = dictionary.cols();
  CMat<Real> acc = -CMat<Real>::Identity(g, g);
  for (Eigen::Index q = 0; q < h.num_blocks(); ++q) {
    const CMat<Real> s = h.digital_blocks[static_cast<std::size_t>(q)].adjoint() *
                         (h.analog_block(q).adjoint() * dictionary);
    acc.noalias() += s.adjoint() * s;
  }
  return acc.squaredNorm();
}

}  // namespace beamforge

#endif  // BEAMFORGE_SENSING_HPP
