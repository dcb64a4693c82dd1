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

#ifndef BEAMFORGE_DESIGNER_LOW_HPP
#define BEAMFORGE_DESIGNER_LOW_HPP

#include "beamforge/designer_inf.hpp"
#include "beamforge/manifold.hpp"
#include "beamforge/random.hpp"
#include "beamforge/sensing.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

// Block-wise alternating design for low-resolution phase shifters.
//
// Block q sees the residual target E_q = I - sum_{t != q} A^H W_RF,t K_t W_RF,t^H A
// (K_t = W_BB,t W_BB,t^H), so the block cost ||A^H W_RF,q K_q W_RF,q^H A - E_q||^2
// equals the global objective with the other blocks frozen.

namespace beamforge {

template <typename Real>
CMat<Real> residual_target(const CMat<Real> &dictionary, const HybridSensingMatrix<Real> &h,
                           Eigen::Index skip_block) {
  if (skip_block < 0 || skip_block >= h.num_blocks())
    throw std::out_of_range("residual_target: block index out of range");
  require_shape(dictionary.rows() == h.analog.rows(), "residual_target: A and W_RF row mismatch");
  const Eigen::Index g = dictionary.cols();
  CMat<Real> e = CMat<Real>::Identity(g, g);
  for (Eigen::Index t = 0; t < h.num_blocks(); ++t) {
    if (t == skip_block) continue;
    const CMat<Real> s = h.digital_blocks[static_cast<std::size_t>(t)].adjoint() *
                         (h.analog_block(t).adjoint() * dictionary);
    e.noalias() -= s.adjoint() * s;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Digital sub-block: J(W) = ||A_E^H W W^H A_E - E||_F^2 with A_E = W_RF,q^H A.

template <typename Real>
Real digital_objective(const CMat<Real> &w, const CMat<Real> &a_e, const CMat<Real> &target) {
  const CMat<Real> s = w.adjoint() * a_e;
  CMat<Real> r = s.adjoint() * s;
  r -= target;
  return r.squaredNorm();
}

/// Intermediates for the step-size derivative at the current W. With
/// K = W W^H:
///   gamma1 = A_E (A_E^H K A_E - E) A_E^H      (N_RF x N_RF, Hermitian)
///   gamma2 = A_E^H gamma1 K gamma1 A_E        (G x G, Hermitian)
///   gamma3 = gamma1 K + K gamma1              (N_RF x N_RF, Hermitian)
///   gamma4 = A_E^H gamma1 K A_E               (G x G)
template <typename Real>
struct GammaWorkspace {
  CMat<Real> gamma1, gamma2, gamma3, gamma4;
  CMat<Real> gram;     // A_E^H K A_E
  CMat<Real> target;   // E
  CMat<Real> sweep;    // A_E^H gamma3 A_E = gamma4 + gamma4^H
};

template <typename Real>
GammaWorkspace<Real> make_gamma_workspace(const CMat<Real> &w, const CMat<Real> &a_e,
                                          const CMat<Real> &target) {
  require_shape(w.rows() == a_e.rows(), "gamma workspace: W and A_E row mismatch");
  require_shape(target.rows() == a_e.cols() && target.cols() == a_e.cols(),
                "gamma workspace: E must be G x G");
  GammaWorkspace<Real> ws;
  const CMat<Real> k = w * w.adjoint();
  ws.gram = a_e.adjoint() * k * a_e;
  ws.target = target;
  ws.gamma1 = a_e * (ws.gram - target) * a_e.adjoint();
  const CMat<Real> g1k = ws.gamma1 * k;
  ws.gamma2 = a_e.adjoint() * g1k * ws.gamma1 * a_e;
  ws.gamma3 = g1k + k * ws.gamma1;
  ws.gamma4 = a_e.adjoint() * g1k * a_e;
  ws.sweep = ws.gamma4 + ws.gamma4.adjoint();
  return ws;
}

/// 4 A_E (A_E^H W W^H A_E - E) A_E^H W
template <typename Real>
CMat<Real> digital_gradient(const CMat<Real> &w, const CMat<Real> &a_e, const CMat<Real> &target) {
  require_shape(w.rows() == a_e.rows(), "digital_gradient: W and A_E row mismatch");
  require_shape(target.rows() == a_e.cols() && target.cols() == a_e.cols(),
                "digital_gradient: E must be G x G");
  const CMat<Real> s = w.adjoint() * a_e;  // N_s x G
  CMat<Real> r = s.adjoint() * s;
  r -= target;
  return Real(4) * (a_e * (r * s.adjoint()));
}

/// d/d(eta) of J(W - eta * gamma1 W), a cubic in eta:
///   4 eta^3 Tr{G2 G2} - 3 eta^2 Tr{G2 U + U G2}
///   + 4 eta (Tr{G4^H G4} + Re Tr{G4 G4} + Tr{G2 S} - Tr{G2 E}) + 2 Tr{U E - U S}
/// with U = A_E^H gamma3 A_E and S = A_E^H W W^H A_E.
template <typename Real>
Real stepsize_derivative(Real eta, const GammaWorkspace<Real> &ws) {
  auto tr_prod = [](const CMat<Real> &a, const CMat<Real> &b) {
    return a.cwiseProduct(b.transpose()).sum();
  };
  const Real c3 = Real(4) * tr_prod(ws.gamma2, ws.gamma2).real();
  const Real c2 = -Real(3) * (tr_prod(ws.gamma2, ws.sweep) + tr_prod(ws.sweep, ws.gamma2)).real();
  const Real c1 = Real(4) * (ws.gamma4.squaredNorm() + tr_prod(ws.gamma4, ws.gamma4).real() +
                             tr_prod(ws.gamma2, ws.gram).real() -
                             tr_prod(ws.gamma2, ws.target).real());
  const Real c0 = Real(2) * (tr_prod(ws.sweep, ws.target) - tr_prod(ws.sweep, ws.gram)).real();
  return ((c3 * eta + c2) * eta + c1) * eta + c0;
}

template <typename Real>
Real stepsize_derivative(Real eta, const CMat<Real> &w, const CMat<Real> &a_e,
                         const CMat<Real> &target) {
  return stepsize_derivative(eta, make_gamma_workspace(w, a_e, target));
}

template <typename Real>
struct GdOptions {
  int max_iterations = 300;
  Real relative_tolerance = Real(1e-8);
  Real gamma = Real(1e-3);  // meta step on eta
  Real initial_step = 0;    // 0 selects 1 / (2 sigma_max(A_E)^4 ||W||_2^2)
  int max_halvings = 60;
};

template <typename Real>
struct GdResult {
  CMat<Real> w;
  std::vector<Real> trace;  // J after each accepted iteration, trace[0] = J(W0)
  int iterations = 0;
};

/// W <- W - eta * gamma1 W with the adaptive rule eta <- eta - gamma * dJ/d(eta).
/// A trial step that would increase J is retried with eta halved, so the
/// trace never increases. The adapted eta is kept within [eta/2, 2 eta].
template <typename Real>
GdResult<Real> gd_digital_block(const CMat<Real> &w0, const CMat<Real> &a_e,
                                const CMat<Real> &target, const GdOptions<Real> &opts = {}) {
  GdResult<Real> res;
  res.w = w0;
  Real j = digital_objective(res.w, a_e, target);
  res.trace.push_back(j);

  Real eta = opts.initial_step;
  if (!(eta > 0)) {
    const Real sa = a_e.size() ? Eigen::JacobiSVD<CMat<Real>>(a_e).singularValues()(0) : Real(0);
    const Real sw = w0.size() ? Eigen::JacobiSVD<CMat<Real>>(w0).singularValues()(0) : Real(0);
    const Real denom = Real(2) * sa * sa * sa * sa * std::max(sw * sw, Real(1e-12));
    eta = denom > 0 ? Real(1) / denom : Real(1);
  }

  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto ws = make_gamma_workspace(res.w, a_e, target);
    const CMat<Real> dir = ws.gamma1 * res.w;
    if (!(dir.norm() > std::numeric_limits<Real>::min())) break;

    bool accepted = false;
    CMat<Real> w_new;
    Real j_new = j;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      w_new = res.w - eta * dir;
      j_new = digital_objective(w_new, a_e, target);
      if (j_new <= j) {
        accepted = true;
        break;
      }
      eta /= Real(2);
    }
    if (!accepted) break;

    const Real slope = stepsize_derivative(eta, ws);
    const Real adapted = eta - opts.gamma * slope;
    const Real eta_next = std::clamp(std::isfinite(adapted) ? adapted : eta, eta / Real(2),
                                     Real(2) * eta);

    const Real rel = (j - j_new) / std::max(j, std::numeric_limits<Real>::min());
    res.w = std::move(w_new);
    j = j_new;
    res.trace.push_back(j);
    res.iterations = it + 1;
    eta = eta_next;
    if (rel < opts.relative_tolerance) break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Analog sub-block (continuous phases): cost ||A^H X K X^H A - E_q||^2.

/// 4 vec[A (A^H X K X^H A - E_q) A^H X K], X = invec(x) of size N x N_RF.
template <typename Real>
CVec<Real> egrad_analog_block(const CVec<Real> &x, const CMat<Real> &digital_block,
                              const CMat<Real> &dictionary, const CMat<Real> &target) {
  const Eigen::Index n = dictionary.rows();
  require_shape(x.size() == n * digital_block.rows(),
                "egrad_analog_block: x does not match N x N_RF");
  require_shape(target.rows() == dictionary.cols() && target.cols() == dictionary.cols(),
                "egrad_analog_block: E must be G x G");
  const CMat<Real> k = digital_block * digital_block.adjoint();
  return vec(analog_egrad(dictionary, invec(x, n, digital_block.rows()), k, target));
}

template <typename Real>
struct LowDesignOptions {
  int max_inner_iterations = 30;
  Real inner_relative_tolerance = Real(1e-6);
  int max_block_visits = 200;
  CgOptions<Real> cg{};
  GdOptions<Real> gd{};
};

/// One committed block update, for convergence traces.
template <typename Real>
struct BlockCommit {
  int visit;
  Eigen::Index block;
  Real objective;
};

template <typename Real>
struct LowDesignResult {
  HybridSensingMatrix<Real> matrix;
  std::vector<BlockCommit<Real>> commits;
  int block_visits = 0;
};

/// Round-robin block loop. Each visit alternates the digital gradient descent
/// and continuous-phase manifold CG until the block cost stalls, quantizes the
/// analog block, refits the digital block, and commits only on a strict
/// decrease of the global objective. Stops after `num_blocks` consecutive
/// rejected visits (or the visit cap), then normalizes power.
template <typename Real>
LowDesignResult<Real> design_hybrid_low_detailed(const CMat<Real> &dictionary,
                                                 Eigen::Index num_blocks, Eigen::Index rf_chains,
                                                 Eigen::Index streams, const PhaseSet &phase_set,
                                                 const LowDesignOptions<Real> &opts, Rng &rng) {
  if (!phase_set.finite()) throw ConfigError("design_hybrid_low: requires a finite phase set");
  if (num_blocks < 1 || rf_chains < 1 || streams < 1)
    throw ConfigError("design_hybrid_low: dimensions must be positive");
  if (streams > rf_chains) throw ConfigError("design_hybrid_low: requires N_s <= N_RF");
  const Eigen::Index n = dictionary.rows();

  LowDesignResult<Real> out;
  HybridSensingMatrix<Real> &h = out.matrix;
  h.phase_set = phase_set;
  h.analog.resize(n, rf_chains * num_blocks);
  {
    // Initial phases uniform over the alphabet.
    const auto alphabet = phase_set.alphabet<Real>();
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (Eigen::Index j = 0; j < h.analog.cols(); ++j)
      for (Eigen::Index i = 0; i < n; ++i) h.analog(i, j) = alphabet[pick(rng)];
  }
  for (Eigen::Index q = 0; q < num_blocks; ++q)
    h.digital_blocks.push_back(complex_normal_matrix<Real>(rng, rf_chains, streams));

  Real current = blockwise_objective(dictionary, h);
  h.objective_trace.push_back(current);

  int failures = 0;
  Eigen::Index q = 0;
  for (int visit = 0; visit < opts.max_block_visits && failures < num_blocks; ++visit) {
    out.block_visits = visit + 1;
    const CMat<Real> target = residual_target(dictionary, h, q);
    CMat<Real> analog = h.analog_block(q);
    CMat<Real> digital = h.digital_blocks[static_cast<std::size_t>(q)];

    Real block_value = analog_cost(dictionary, analog, CMat<Real>(digital * digital.adjoint()), target);
    for (int inner = 0; inner < opts.max_inner_iterations; ++inner) {
      const CMat<Real> a_e = analog.adjoint() * dictionary;
      digital = gd_digital_block(digital, a_e, target, opts.gd).w;
      const CMat<Real> k = digital * digital.adjoint();
      const CostFn<Real> cost = [&](const CVec<Real> &x) {
        return analog_cost(dictionary, invec(x, n, rf_chains), k, target);
      };
      const GradFn<Real> grad = [&](const CVec<Real> &x) {
        return vec(analog_egrad(dictionary, invec(x, n, rf_chains), k, target));
      };
      const auto cg = cg_minimize<Real>(cost, grad, vec(analog), opts.cg);
      analog = invec(cg.x, n, rf_chains);
      const Real value = cg.cost_trace.back();
      const Real rel = (block_value - value) / std::max(block_value, std::numeric_limits<Real>::min());
      block_value = value;
      if (rel < opts.inner_relative_tolerance) break;
    }

    const CMat<Real> quantized = quantize_phases(analog, phase_set);
    const CMat<Real> refit =
        gd_digital_block(digital, CMat<Real>(quantized.adjoint() * dictionary), target, opts.gd).w;
    const Real candidate =
        analog_cost(dictionary, quantized, CMat<Real>(refit * refit.adjoint()), target);

    if (candidate < current) {
      h.analog_block(q) = quantized;
      h.digital_blocks[static_cast<std::size_t>(q)] = refit;
      current = candidate;
      h.objective_trace.push_back(current);
      out.commits.push_back({visit, q, current});
      failures = 0;
    } else {
      ++failures;
    }
    q = (q + 1) % num_blocks;
  }
  h.design_objective = current;
  normalize_power(h);
  return out;
}

template <typename Real>
HybridSensingMatrix<Real> design_hybrid_low(const CMat<Real> &dictionary, Eigen::Index num_blocks,
                                            Eigen::Index rf_chains, Eigen::Index streams,
                                            const PhaseSet &phase_set,
                                            const LowDesignOptions<Real> &opts, Rng &rng) {
  return design_hybrid_low_detailed(dictionary, num_blocks, rf_chains, streams, phase_set, opts, rng)
      .matrix;
}

}  // namespace beamforge

#endif  // BEAMFORGE_DESIGNER_LOW_HPP
