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

#ifndef BEAMFORGE_ESTIMATOR_HPP
#define BEAMFORGE_ESTIMATOR_HPP

#include "beamforge/channel.hpp"
#include "beamforge/metrics.hpp"
#include "beamforge/random.hpp"
#include "beamforge/sensing.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace beamforge {

template <typename Real>
struct MeasurementSet {
  CVec<Real> observations;            // T_t*T_r, vec of the T_r x T_t received block
  CMat<Real> equivalent_dictionary;   // T_t*T_r x G_t*G_r
  Real pilot_power = 1;
  Real noise_variance = 0;

  Real pnr_db() const {
    return Real(10) * std::log10(pilot_power / noise_variance);
  }
};

/// Q for a transmit design F (used as F_RF = W_RF, F_BB = W_BB of `tx`) and a
/// receive design W.
template <typename Real>
CMat<Real> equivalent_dictionary(const HybridSensingMatrix<Real> &tx,
                                 const HybridSensingMatrix<Real> &rx, const CMat<Real> &a_t,
                                 const CMat<Real> &a_r) {
  return equivalent_dictionary<Real>(tx.analog, tx.digital(), rx.analog, rx.digital(), a_t, a_r);
}

/// y = sqrt(P) vec(W^H H F) + n~. Block (q, p) of the noise is W_q^H N_{q,p}
/// with a fresh N_r x N_s matrix N_{q,p} ~ CN(0, sigma2) per receive block q
/// and transmit block p. `q_matrix` is stored as-is; pass the Q that belongs
/// to (tx, rx) so the set is self-consistent.
template <typename Real>
MeasurementSet<Real> synthesize_measurements(const ChannelRealization<Real> &channel,
                                             const HybridSensingMatrix<Real> &tx,
                                             const HybridSensingMatrix<Real> &rx,
                                             const CMat<Real> &q_matrix, Real pilot_power,
                                             Real noise_variance, Rng &rng) {
  if (pilot_power < 0 || !std::isfinite(pilot_power))
    throw std::domain_error("synthesize_measurements: pilot power must be non-negative");
  if (noise_variance < 0 || !std::isfinite(noise_variance))
    throw std::domain_error("synthesize_measurements: noise variance must be non-negative");
  const CMat<Real> f = tx.analog * tx.digital();  // N_t x T_t
  const CMat<Real> w = rx.analog * rx.digital();  // N_r x T_r
  require_shape(channel.dense.rows() == w.rows() && channel.dense.cols() == f.rows(),
                "synthesize_measurements: channel does not match the sensing matrices");
  require_shape(q_matrix.rows() == f.cols() * w.cols(),
                "synthesize_measurements: Q row count must be T_t*T_r");

  CMat<Real> received = std::sqrt(pilot_power) * (w.adjoint() * channel.dense * f);
  if (noise_variance > 0) {
    const Eigen::Index nr = w.rows();
    const Eigen::Index s_rx = rx.streams(), s_tx = tx.streams();
    for (Eigen::Index p = 0; p < tx.num_blocks(); ++p) {
      for (Eigen::Index q = 0; q < rx.num_blocks(); ++q) {
        const CMat<Real> noise = complex_normal_matrix<Real>(rng, nr, s_tx, noise_variance);
        received.block(q * s_rx, p * s_tx, s_rx, s_tx) +=
            w.middleCols(q * s_rx, s_rx).adjoint() * noise;
      }
    }
  }

  MeasurementSet<Real> m;
  m.observations = vec(received);
  m.equivalent_dictionary = q_matrix;
  m.pilot_power = pilot_power;
  m.noise_variance = noise_variance;
  return m;
}

template <typename Real>
MeasurementSet<Real> synthesize_measurements(const ChannelRealization<Real> &channel,
                                             const HybridSensingMatrix<Real> &tx,
                                             const HybridSensingMatrix<Real> &rx,
                                             const AngularDictionary<Real> &dict_tx,
                                             const AngularDictionary<Real> &dict_rx,
                                             Real pilot_power, Real noise_variance, Rng &rng) {
  return synthesize_measurements(channel, tx, rx,
                                 equivalent_dictionary(tx, rx, dict_tx.matrix, dict_rx.matrix),
                                 pilot_power, noise_variance, rng);
}

// ---------------------------------------------------------------------------
// Orthogonal matching pursuit

template <typename Real>
struct OmpResult {
  CVec<Real> coefficients;              // on the original (unnormalized) columns
  std::vector<Eigen::Index> support;    // in selection order
  std::vector<Real> residual_norms;     // ||r|| before the first and after every iteration
  bool singular = false;                // stopped on a rank-deficient support
};

template <typename Real>
OmpResult<Real> omp_recover(const CMat<Real> &q, const CVec<Real> &y, Eigen::Index sparsity,
                            Real residual_tolerance = Real(1e-6)) {
  if (sparsity < 1) throw ConfigError("omp_recover: sparsity must be >= 1");
  require_shape(q.rows() == y.size(), "omp_recover: Q rows must match y");

  OmpResult<Real> out;
  out.coefficients = CVec<Real>::Zero(q.cols());
  const Real y_norm = y.norm();
  CVec<Real> residual = y;
  out.residual_norms.push_back(y_norm);
  if (!(y_norm > 0)) return out;

  const RVec<Real> col_norms = q.colwise().norm().transpose();
  std::vector<bool> taken(static_cast<std::size_t>(q.cols()), false);
  CVec<Real> fitted;
  const Eigen::Index max_iter = std::min<Eigen::Index>(sparsity, std::min(q.rows(), q.cols()));

  for (Eigen::Index it = 0; it < max_iter; ++it) {
    if (residual.norm() <= residual_tolerance * y_norm) break;
    const CVec<Real> corr = q.adjoint() * residual;
    Eigen::Index best = -1;
    Real best_score = -1;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (taken[static_cast<std::size_t>(j)] || !(col_norms(j) > 0)) continue;
      const Real score = std::abs(corr(j)) / col_norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;

    std::vector<Eigen::Index> trial = out.support;
    trial.push_back(best);
    CMat<Real> qs(q.rows(), static_cast<Eigen::Index>(trial.size()));
    for (std::size_t k = 0; k < trial.size(); ++k) qs.col(static_cast<Eigen::Index>(k)) = q.col(trial[k]);
    Eigen::ColPivHouseholderQR<CMat<Real>> qr(qs);
    qr.setThreshold(Real(1e-10));
    if (qr.rank() < qs.cols()) {
      out.singular = true;
      break;
    }
    fitted = qr.solve(y);
    out.support = std::move(trial);
    taken[static_cast<std::size_t>(best)] = true;
    residual = y - qs * fitted;
    out.residual_norms.push_back(residual.norm());
  }
  for (std::size_t k = 0; k < out.support.size(); ++k)
    out.coefficients(out.support[k]) = fitted(static_cast<Eigen::Index>(k));
  return out;
}

/// H^ = A_R invec(h^) A_T^H
template <typename Real>
CMat<Real> reconstruct_channel(const CVec<Real> &angular, const CMat<Real> &a_r,
                               const CMat<Real> &a_t) {
  require_shape(angular.size() == a_r.cols() * a_t.cols(),
                "reconstruct_channel: estimate length must be G_r*G_t");
  return a_r * invec(angular, a_r.cols(), a_t.cols()) * a_t.adjoint();
}

template <typename Real>
struct ChannelEstimate {
  CMat<Real> channel;
  OmpResult<Real> omp;
};

/// OMP on y / sqrt(P), so the recovered gains are on the scale of H.
template <typename Real>
ChannelEstimate<Real> estimate_channel(const MeasurementSet<Real> &m, Eigen::Index sparsity,
                                       const CMat<Real> &a_r, const CMat<Real> &a_t,
                                       Real tol = Real(1e-6)) {
  if (!(m.pilot_power > 0)) throw std::domain_error("estimate_channel: pilot power must be positive");
  const CVec<Real> y = m.observations / std::sqrt(m.pilot_power);
  ChannelEstimate<Real> est;
  est.omp = omp_recover<Real>(m.equivalent_dictionary, y, sparsity, tol);
  est.channel = reconstruct_channel<Real>(est.omp.coefficients, a_r, a_t);
  return est;
}

template <typename Real>
struct Nmse {
  Real linear;
  Real db;  // -inf for an exact estimate
};

template <typename Real>
Real to_db(Real linear) {
  return linear > 0 ? Real(10) * std::log10(linear) : -std::numeric_limits<Real>::infinity();
}

template <typename Real>
Nmse<Real> nmse(const CMat<Real> &h_true, const CMat<Real> &h_est) {
  require_shape(h_true.rows() == h_est.rows() && h_true.cols() == h_est.cols(),
                "nmse: shape mismatch");
  const Real denom = h_true.squaredNorm();
  if (!(denom > 0)) throw std::domain_error("nmse: true channel is zero");
  const Real lin = (h_true - h_est).squaredNorm() / denom;
  return {lin, to_db(lin)};
}

template <typename Real>
struct SpectralEfficiency {
  Real bits_per_hz;
  bool regularized;  // W^H W needed the ridge
};

/// log2 det(I + P/(N_s sigma2) (W^H W)^-1 W^H H F F^H H^H W) with F, W the
/// top-N_s right/left singular vectors of the estimate.
template <typename Real>
SpectralEfficiency<Real> spectral_efficiency(const CMat<Real> &h_true, const CMat<Real> &h_est,
                                             Real power, Eigen::Index streams, Real noise_variance) {
  require_shape(h_true.rows() == h_est.rows() && h_true.cols() == h_est.cols(),
                "spectral_efficiency: shape mismatch");
  if (streams < 1 || streams > std::min(h_est.rows(), h_est.cols()))
    throw ConfigError("spectral_efficiency: N_s must be in [1, min(N_r, N_t)]");
  if (!(noise_variance > 0)) throw std::domain_error("spectral_efficiency: noise variance must be positive");

  Eigen::JacobiSVD<CMat<Real>> svd(h_est, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CMat<Real> f = svd.matrixV().leftCols(streams);
  const CMat<Real> w = svd.matrixU().leftCols(streams);

  SpectralEfficiency<Real> out{0, false};
  CMat<Real> wtw = w.adjoint() * w;
  Eigen::LLT<CMat<Real>> llt(wtw);
  const Real ridge = Real(1e-12);
  if (llt.info() != Eigen::Success ||
      llt.matrixL().toDenseMatrix().diagonal().cwiseAbs().minCoeff() < std::sqrt(ridge)) {
    wtw += ridge * CMat<Real>::Identity(streams, streams);
    llt.compute(wtw);
    out.regularized = true;
  }
  const CMat<Real> e = w.adjoint() * h_true * f;  // N_s x N_s
  const CMat<Real> m = CMat<Real>::Identity(streams, streams) +
                       (power / (static_cast<Real>(streams) * noise_variance)) *
                           llt.solve(CMat<Real>(e * e.adjoint()));
  Eigen::PartialPivLU<CMat<Real>> lu(m);
  const CMat<Real> u = lu.matrixLU().template triangularView<Eigen::Upper>();
  Real log_det = 0;
  for (Eigen::Index i = 0; i < streams; ++i) log_det += std::log2(std::abs(u(i, i)));
  out.bits_per_hz = log_det;
  return out;
}

}  // namespace beamforge

#endif  // BEAMFORGE_ESTIMATOR_HPP
