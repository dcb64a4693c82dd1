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

#ifndef BEAMFORGE_DESIGNER_INF_HPP
#define BEAMFORGE_DESIGNER_INF_HPP

#include "beamforge/channel.hpp"
#include "beamforge/manifold.hpp"
#include "beamforge/random.hpp"
#include "beamforge/sensing.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

// Alternating hybrid design with unconstrained (infinite-resolution) phases:
// PSD-lifted digital step, eigen-extraction, and manifold CG for the analog part.

namespace beamforge {

// ---------------------------------------------------------------------------
// Analog cost ||A^H X K X^H A - E||_F^2 and its Euclidean gradient
// 4 A (A^H X K X^H A - E) A^H X K, with K = W_BB W_BB^H. Shared by the
// full-matrix design (E = I) and the block-wise design (E = E_q).

template <typename Real>
Real analog_cost(const CMat<Real> &dictionary, const CMat<Real> &analog, const CMat<Real> &k,
                 const CMat<Real> &target) {
  const CMat<Real> y = dictionary.adjoint() * analog;  // G x M
  CMat<Real> r = y * k * y.adjoint();
  r -= target;
  return r.squaredNorm();
}

template <typename Real>
CMat<Real> analog_egrad(const CMat<Real> &dictionary, const CMat<Real> &analog,
                        const CMat<Real> &k, const CMat<Real> &target) {
  const CMat<Real> y = dictionary.adjoint() * analog;
  const CMat<Real> yk = y * k;
  CMat<Real> r = yk * y.adjoint();
  r -= target;
  return Real(4) * (dictionary * (r * yk));
}

/// Flattened-gradient form used by the manifold optimizer, target I.
template <typename Real>
CVec<Real> egrad_analog_inf(const CVec<Real> &x, const CMat<Real> &digital,
                            const CMat<Real> &dictionary) {
  const Eigen::Index n = dictionary.rows();
  require_shape(x.size() == n * digital.rows(), "egrad_analog_inf: x does not match N x M");
  const CMat<Real> k = digital * digital.adjoint();
  const Eigen::Index g = dictionary.cols();
  return vec(analog_egrad(dictionary, invec(x, n, digital.rows()), k,
                          CMat<Real>(CMat<Real>::Identity(g, g))));
}

// ---------------------------------------------------------------------------
// Digital subproblem on the PSD cone.

template <typename Real>
struct PsdOptions {
  int max_iterations = 20000;
  // Stop when the projected-gradient residual falls below
  // relative_kkt_tolerance * (gradient norm at X = 0).
  Real relative_kkt_tolerance = Real(1e-7);
};

template <typename Real>
struct PsdBlockVariable {
  std::vector<CMat<Real>> blocks;
  Real objective = 0;
  Real kkt_residual = 0;
  Real reference_gradient_norm = 0;
  int iterations = 0;
  bool converged = false;

  CMat<Real> assembled() const { return block_diagonal(blocks); }
};

/// Quadratic ||B^H X B - E||_F^2 over block-diagonal X, in the M x M form
/// tr(XPXP) - 2 Re tr(XC) + ||E||^2 with P = B B^H, C = B E B^H.
template <typename Real>
class BlockPsdProblem {
 public:
  BlockPsdProblem(const CMat<Real> &dictionary, const CMat<Real> &analog, Eigen::Index num_blocks,
                  const CMat<Real> &target)
      : num_blocks_(num_blocks) {
    require_shape(dictionary.rows() == analog.rows(), "PSD subproblem: A and W_RF row mismatch");
    require_shape(num_blocks > 0 && analog.cols() % num_blocks == 0,
                  "PSD subproblem: analog columns not divisible by the number of blocks");
    require_shape(target.rows() == dictionary.cols() && target.cols() == dictionary.cols(),
                  "PSD subproblem: target must be G x G");
    block_size_ = analog.cols() / num_blocks;
    const CMat<Real> b = analog.adjoint() * dictionary;  // M x G
    p_ = b * b.adjoint();
    c_ = b * target * b.adjoint();
    target_sq_ = target.squaredNorm();
  }

  Eigen::Index num_blocks() const { return num_blocks_; }
  Eigen::Index block_size() const { return block_size_; }
  const CMat<Real> &p() const { return p_; }

  Real objective(const CMat<Real> &x) const {
    const CMat<Real> xp = x * p_;
    const Real quad = (xp.cwiseProduct(xp.transpose())).sum().real();
    const Real lin = (x.cwiseProduct(c_.transpose())).sum().real();
    return std::max(Real(0), quad - Real(2) * lin + target_sq_);
  }

  /// 2 (P X P - C), restricted to the diagonal blocks.
  CMat<Real> gradient(const CMat<Real> &x) const {
    CMat<Real> g = Real(2) * (p_ * x * p_ - c_);
    return restrict_to_blocks(g);
  }

  CMat<Real> restrict_to_blocks(const CMat<Real> &m) const {
    CMat<Real> out = CMat<Real>::Zero(m.rows(), m.cols());
    for (Eigen::Index q = 0; q < num_blocks_; ++q) {
      const Eigen::Index o = q * block_size_;
      out.block(o, o, block_size_, block_size_) = m.block(o, o, block_size_, block_size_);
    }
    return out;
  }

  CMat<Real> project(const CMat<Real> &m) const {
    CMat<Real> out = CMat<Real>::Zero(m.rows(), m.cols());
    for (Eigen::Index q = 0; q < num_blocks_; ++q) {
      const Eigen::Index o = q * block_size_;
      out.block(o, o, block_size_, block_size_) =
          project_psd(CMat<Real>(m.block(o, o, block_size_, block_size_)));
    }
    return out;
  }

  Real lipschitz() const {
    Eigen::SelfAdjointEigenSolver<CMat<Real>> es(p_, Eigen::EigenvaluesOnly);
    const Real lmax = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : Real(0);
    return Real(2) * lmax * lmax;
  }

  std::vector<CMat<Real>> split(const CMat<Real> &x) const {
    std::vector<CMat<Real>> out;
    for (Eigen::Index q = 0; q < num_blocks_; ++q) {
      const Eigen::Index o = q * block_size_;
      out.emplace_back(x.block(o, o, block_size_, block_size_));
    }
    return out;
  }

  static CMat<Real> project_psd(const CMat<Real> &m) {
    const CMat<Real> h = (m + m.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<CMat<Real>> es(h);
    const RVec<Real> clipped = es.eigenvalues().cwiseMax(Real(0));
    return es.eigenvectors() * clipped.template cast<Complex<Real>>().asDiagonal() *
           es.eigenvectors().adjoint();
  }

 private:
  Eigen::Index num_blocks_;
  Eigen::Index block_size_ = 0;
  CMat<Real> p_, c_;
  Real target_sq_ = 0;
};

/// Accelerated projected gradient (FISTA with function-value restart) on the
/// PSD cone. The start is the best of: warm start, X = 0, and the optimal
/// scaled identity; the returned iterate is never worse than any of them.
template <typename Real>
PsdBlockVariable<Real> solve_digital_psd(const CMat<Real> &dictionary, const CMat<Real> &analog,
                                         Eigen::Index num_blocks,
                                         const std::optional<CMat<Real>> &warm_start = std::nullopt,
                                         const PsdOptions<Real> &opts = {},
                                         const std::optional<CMat<Real>> &target = std::nullopt) {
  const Eigen::Index g = dictionary.cols();
  const CMat<Real> e = target ? *target : CMat<Real>(CMat<Real>::Identity(g, g));
  const BlockPsdProblem<Real> prob(dictionary, analog, num_blocks, e);
  const Eigen::Index m = analog.cols();

  PsdBlockVariable<Real> out;
  const CMat<Real> zero = CMat<Real>::Zero(m, m);
  out.reference_gradient_norm = prob.gradient(zero).norm();

  CMat<Real> x = zero;
  Real fx = prob.objective(x);
  {
    // f(sI) is quadratic in s; fit it from f(-1), f(0), f(1).
    const CMat<Real> eye = CMat<Real>::Identity(m, m);
    const Real a2 = prob.objective(eye) + prob.objective(-eye) - Real(2) * fx;  // 2 * quad coeff
    const Real a1 = (prob.objective(eye) - prob.objective(-eye)) / Real(2);     // linear coeff
    if (a2 > 0) {
      const Real s = std::max(Real(0), -a1 / a2);
      const CMat<Real> cand = s * eye;
      const Real fc = prob.objective(cand);
      if (fc < fx) {
        x = cand;
        fx = fc;
      }
    }
  }
  if (warm_start) {
    require_shape(warm_start->rows() == m && warm_start->cols() == m,
                  "solve_digital_psd: warm start has the wrong size");
    const CMat<Real> cand = prob.project(*warm_start);
    const Real fc = prob.objective(cand);
    if (fc < fx) {
      x = cand;
      fx = fc;
    }
  }

  const Real lip = prob.lipschitz();
  const Real tol = opts.relative_kkt_tolerance * out.reference_gradient_norm;
  auto kkt = [&](const CMat<Real> &pt) {
    if (!(lip > 0)) return Real(0);
    return lip * (pt - prob.project(pt - prob.gradient(pt) / lip)).norm();
  };

  CMat<Real> best = x;
  Real f_best = fx;
  if (!(lip > 0) || out.reference_gradient_norm == Real(0)) {
    // Objective does not depend on X (e.g. zero analog matrix).
    out.blocks = prob.split(best);
    out.objective = f_best;
    out.converged = true;
    return out;
  }

  CMat<Real> y = x, x_prev = x;
  Real t = 1;
  int it = 0;
  Real residual = kkt(x);
  for (; it < opts.max_iterations && residual > tol; ++it) {
    const CMat<Real> x_next = prob.project(y - prob.gradient(y) / lip);
    const Real f_next = prob.objective(x_next);
    if (f_next > fx) {
      // restart momentum from the last iterate
      t = 1;
      y = x;
      continue;
    }
    const Real t_next = (Real(1) + std::sqrt(Real(1) + Real(4) * t * t)) / Real(2);
    y = x_next + ((t - Real(1)) / t_next) * (x_next - x);
    x_prev = x;
    x = x_next;
    fx = f_next;
    t = t_next;
    if (fx < f_best) {
      f_best = fx;
      best = x;
    }
    if (it % 10 == 0) residual = kkt(x);
  }
  out.kkt_residual = kkt(best);
  out.iterations = it;
  out.converged = out.kkt_residual <= tol;
  out.blocks = prob.split(best);
  out.objective = f_best;
  return out;
}

/// W = V_s Sigma_s^{1/2} from the N_s strongest eigenpairs of a PSD block.
template <typename Real>
CMat<Real> extract_digital(const CMat<Real> &block, Eigen::Index num_streams) {
  require_shape(block.rows() == block.cols(), "extract_digital: block must be square");
  require_shape(num_streams >= 1 && num_streams <= block.rows(),
                "extract_digital: need 1 <= N_s <= N_RF");
  const CMat<Real> h = (block + block.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<CMat<Real>> es(h);
  const auto &vals = es.eigenvalues();  // ascending
  const Real scale = std::max(Real(1), vals.cwiseAbs().maxCoeff());
  if (vals.size() && vals.minCoeff() < -Real(1e-8) * scale)
    throw ContractError("extract_digital: block is not positive semidefinite");
  const Eigen::Index n = h.rows();
  CMat<Real> w(n, num_streams);
  for (Eigen::Index s = 0; s < num_streams; ++s) {
    const Eigen::Index idx = n - 1 - s;
    w.col(s) = es.eigenvectors().col(idx) * std::sqrt(std::max(Real(0), vals(idx)));
  }
  return w;
}

// ---------------------------------------------------------------------------

template <typename Real>
struct InfDesignOptions {
  int max_outer_iterations = 50;
  Real outer_relative_tolerance = Real(1e-6);
  CgOptions<Real> cg{};
  PsdOptions<Real> psd{};
};

/// Alternating design: digital step (PSD solve + eigen-extraction) then
/// analog step (manifold CG), from a random-phase analog start, followed by
/// power normalization. `objective_trace[0]` is the objective after the first
/// digital step; later entries follow each committed alternation.
template <typename Real>
HybridSensingMatrix<Real> design_hybrid_inf(const CMat<Real> &dictionary, Eigen::Index num_blocks,
                                            Eigen::Index rf_chains, Eigen::Index streams,
                                            const InfDesignOptions<Real> &opts, Rng &rng) {
  if (num_blocks < 1 || rf_chains < 1 || streams < 1)
    throw ConfigError("design_hybrid_inf: dimensions must be positive");
  if (streams > rf_chains) throw ConfigError("design_hybrid_inf: requires N_s <= N_RF");
  const Eigen::Index n = dictionary.rows();
  const Eigen::Index g = dictionary.cols();
  const Eigen::Index m = rf_chains * num_blocks;
  const CMat<Real> eye = CMat<Real>::Identity(g, g);

  HybridSensingMatrix<Real> h;
  h.phase_set = PhaseSet::infinite();
  h.analog = random_phase_matrix<Real>(rng, n, m);

  std::optional<CMat<Real>> warm;
  CMat<Real> committed_digital;
  for (int outer = 0; outer < opts.max_outer_iterations; ++outer) {
    const auto psd = solve_digital_psd<Real>(dictionary, h.analog, num_blocks, warm, opts.psd);
    std::vector<CMat<Real>> blocks;
    for (const auto &xb : psd.blocks) blocks.push_back(extract_digital(xb, streams));
    const CMat<Real> digital = block_diagonal(blocks);
    const CMat<Real> k = digital * digital.adjoint();

    if (outer == 0) {
      h.digital_blocks = blocks;
      h.objective_trace.push_back(analog_cost(dictionary, h.analog, k, eye));
    }

    const CostFn<Real> cost = [&](const CVec<Real> &x) {
      return analog_cost(dictionary, invec(x, n, m), k, eye);
    };
    const GradFn<Real> grad = [&](const CVec<Real> &x) {
      return vec(analog_egrad(dictionary, invec(x, n, m), k, eye));
    };
    const auto cg = cg_minimize<Real>(cost, grad, vec(h.analog), opts.cg);
    const Real value = cg.cost_trace.back();

    const Real prev = h.objective_trace.back();
    if (outer > 0 && value > prev) break;  // truncation loss not recovered; keep last state
    h.analog = invec(cg.x, n, m);
    h.digital_blocks = std::move(blocks);
    h.objective_trace.push_back(value);
    warm = k;
    if (outer > 0 && (prev - value) <= opts.outer_relative_tolerance * prev) break;
  }
  h.design_objective = h.objective_trace.back();
  normalize_power(h);
  return h;
}

}  // namespace beamforge

#endif  // BEAMFORGE_DESIGNER_INF_HPP
