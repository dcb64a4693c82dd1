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

#ifndef BEAMFORGE_METRICS_HPP
#define BEAMFORGE_METRICS_HPP

#include "beamforge/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace beamforge {

/// Columns scaled to unit Euclidean norm. Throws on an all-zero column.
template <typename Derived>
auto normalize_columns(const Eigen::MatrixBase<Derived> &d) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = d;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const auto n = out.col(j).norm();
    if (!(n > 0)) throw std::domain_error("normalize_columns: zero column");
    out.col(j) /= n;
  }
  return out;
}

/// Gram matrix of the column-normalized dictionary.
template <typename Derived>
auto normalized_gram(const Eigen::MatrixBase<Derived> &d) {
  const auto q = normalize_columns(d);
  using Mat = std::decay_t<decltype(q)>;
  Mat g = Mat::Zero(q.cols(), q.cols());
  g.template selfadjointView<Eigen::Lower>().rankUpdate(q.adjoint());
  g = g.template selfadjointView<Eigen::Lower>();
  return g;
}

/// max_{m != n} |q_m^H q_n| / (|q_m| |q_n|)
template <typename Derived>
auto mutual_coherence(const Eigen::MatrixBase<Derived> &d) {
  if (d.cols() < 2) throw ShapeError("mutual_coherence: need at least two columns");
  auto g = normalized_gram(d);
  g.diagonal().setZero();
  return g.cwiseAbs().maxCoeff();
}

/// ||A^H W_RF W_BB W_BB^H W_RF^H A - I_G||_F^2
template <typename Real>
Real gram_objective(const CMat<Real> &dictionary, const CMat<Real> &analog,
                    const CMat<Real> &digital) {
  require_shape(dictionary.rows() == analog.rows(), "gram_objective: A and W_RF row mismatch");
  require_shape(analog.cols() == digital.rows(), "gram_objective: W_RF/W_BB inner mismatch");
  const CMat<Real> sensed = digital.adjoint() * (analog.adjoint() * dictionary);  // T x G
  CMat<Real> gram = sensed.adjoint() * sensed;
  gram.diagonal().array() -= Real(1);
  return gram.squaredNorm();
}

/// Q = (F_BB^T F_RF^T A_T^*) (x) (W_BB^H W_RF^H A_R)
template <typename Real>
CMat<Real> transmit_factor(const CMat<Real> &f_rf, const CMat<Real> &f_bb,
                           const CMat<Real> &a_t) {
  require_shape(a_t.rows() == f_rf.rows(), "transmit_factor: A_T and F_RF row mismatch");
  require_shape(f_rf.cols() == f_bb.rows(), "transmit_factor: F_RF/F_BB inner mismatch");
  return f_bb.transpose() * (f_rf.transpose() * a_t.conjugate());
}

template <typename Real>
CMat<Real> receive_factor(const CMat<Real> &w_rf, const CMat<Real> &w_bb,
                          const CMat<Real> &a_r) {
  require_shape(a_r.rows() == w_rf.rows(), "receive_factor: A_R and W_RF row mismatch");
  require_shape(w_rf.cols() == w_bb.rows(), "receive_factor: W_RF/W_BB inner mismatch");
  return w_bb.adjoint() * (w_rf.adjoint() * a_r);
}

template <typename Real>
CMat<Real> equivalent_dictionary(const CMat<Real> &f_rf, const CMat<Real> &f_bb,
                                 const CMat<Real> &w_rf, const CMat<Real> &w_bb,
                                 const CMat<Real> &a_t, const CMat<Real> &a_r) {
  return kron(transmit_factor(f_rf, f_bb, a_t), receive_factor(w_rf, w_bb, a_r));
}

template <typename Real>
struct ScaledObjective {
  Real zeta;
  Real value;
};

/// ||s Q^H Q - I||_F^2 = s^2 Tr{(Q^H Q)^2} - 2 s Tr{Q^H Q} + G
template <typename Real>
Real scaled_identity_value(const CMat<Real> &q, Real s, Real tr, Real tr2) {
  return std::max(Real(0), s * s * tr2 - Real(2) * s * tr + static_cast<Real>(q.cols()));
}

template <typename Real>
Real scaled_identity_value(const CMat<Real> &q, Real s) {
  const CMat<Real> small = (q.rows() <= q.cols()) ? CMat<Real>(q * q.adjoint())
                                                  : CMat<Real>(q.adjoint() * q);
  return scaled_identity_value(q, s, q.squaredNorm(), small.squaredNorm());
}

/// zeta = Tr{Q^H Q} / Tr{(Q^H Q)^2} and ||zeta Q^H Q - I||_F^2.
/// Evaluated through the smaller Q Q^H, using Tr{(Q^H Q)^2} = ||Q Q^H||_F^2.
template <typename Real>
ScaledObjective<Real> scaled_identity_objective(const CMat<Real> &q) {
  const Real tr = q.squaredNorm();
  if (!(tr > 0)) throw std::domain_error("scaled_identity_objective: zero matrix");
  const CMat<Real> small = (q.rows() <= q.cols()) ? CMat<Real>(q * q.adjoint())
                                                  : CMat<Real>(q.adjoint() * q);
  const Real tr2 = small.squaredNorm();
  const Real zeta = tr / tr2;
  return {zeta, scaled_identity_value(q, zeta, tr, tr2)};
}

template <typename Real>
struct GramSummary {
  Real max_offdiag_coherence = 0;
  std::vector<Real> offdiag_magnitudes;  // row-major over m != n
  Real objective_value = 0;              // ||D^H D - I||_F^2, unnormalized
  Eigen::Index dimension = 0;
};

template <typename Real>
GramSummary<Real> summarize_gram(const CMat<Real> &d) {
  GramSummary<Real> s;
  s.dimension = d.cols();
  CMat<Real> raw = d.adjoint() * d;
  raw.diagonal().array() -= Real(1);
  s.objective_value = raw.squaredNorm();
  const CMat<Real> g = normalized_gram(d);
  s.offdiag_magnitudes.reserve(static_cast<std::size_t>(d.cols() * (d.cols() - 1)));
  for (Eigen::Index m = 0; m < g.rows(); ++m)
    for (Eigen::Index n = 0; n < g.cols(); ++n)
      if (m != n) {
        const Real v = std::min(Real(1), std::abs(g(m, n)));
        s.offdiag_magnitudes.push_back(v);
        s.max_offdiag_coherence = std::max(s.max_offdiag_coherence, v);
      }
  return s;
}

struct HistogramBin {
  double low;
  double high;
  std::uint64_t count;
};

/// Uniform bins on [0, 1]; half-open [lo, hi) except the last, which is closed.
template <typename Real>
std::vector<HistogramBin> bin_magnitudes(const std::vector<Real> &values, std::size_t num_bins) {
  if (num_bins == 0) throw ConfigError("histogram: num_bins must be positive");
  std::vector<HistogramBin> bins(num_bins);
  for (std::size_t b = 0; b < num_bins; ++b) {
    bins[b].low = static_cast<double>(b) / static_cast<double>(num_bins);
    bins[b].high = static_cast<double>(b + 1) / static_cast<double>(num_bins);
    bins[b].count = 0;
  }
  for (Real v : values) {
    const double x = std::clamp(static_cast<double>(v), 0.0, 1.0);
    auto b = static_cast<std::size_t>(x * static_cast<double>(num_bins));
    if (b >= num_bins) b = num_bins - 1;
    ++bins[b].count;
  }
  return bins;
}

template <typename Real>
std::vector<HistogramBin> offdiag_histogram(const CMat<Real> &d, std::size_t num_bins) {
  if (num_bins == 0) throw ConfigError("histogram: num_bins must be positive");
  return bin_magnitudes(summarize_gram(d).offdiag_magnitudes, num_bins);
}

}  // namespace beamforge

#endif  // BEAMFORGE_METRICS_HPP
