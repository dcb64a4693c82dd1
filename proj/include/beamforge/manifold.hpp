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

#ifndef BEAMFORGE_MANIFOLD_HPP
#define BEAMFORGE_MANIFOLD_HPP

#include "beamforge/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

// Product-of-complex-circles manifold {x in C^D : |x_i| = 1} and a
// Polak-Ribiere (PR+) nonlinear conjugate-gradient minimizer on it.
//
// Euclidean gradients follow the convention egrad = df/dRe(x) + j df/dIm(x),
// so the first-order change of f along z is Re{egrad^H z}.

namespace beamforge {

template <typename Real>
inline constexpr Real kUnitModulusTolerance =
    std::max(Real(1e-12), Real(100) * std::numeric_limits<Real>::epsilon());

template <typename Real>
Real max_modulus_deviation(const CVec<Real> &x) {
  return x.size() == 0 ? Real(0) : (x.cwiseAbs().array() - Real(1)).abs().maxCoeff();
}

/// Orthogonal projection onto the tangent space at x: g - Re{g o x*} o x.
template <typename Real>
CVec<Real> project_tangent(const CVec<Real> &x, const CVec<Real> &g) {
  require_shape(x.size() == g.size(), "project_tangent: size mismatch");
  if (max_modulus_deviation(x) > kUnitModulusTolerance<Real>)
    throw ContractError("project_tangent: point is not on the complex circle manifold");
  const RVec<Real> radial = g.cwiseProduct(x.conjugate()).real();
  return g - radial.template cast<Complex<Real>>().cwiseProduct(x);
}

/// Entry-wise normalization of x + step*d.
template <typename Real>
CVec<Real> retract(const CVec<Real> &x, const CVec<Real> &d, Real step) {
  require_shape(x.size() == d.size(), "retract: size mismatch");
  CVec<Real> y = x + step * d;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Real m = std::abs(y(i));
    if (!(m > 0) || !std::isfinite(m)) throw NumericError("retract: entry collapsed to zero");
    y(i) /= m;
  }
  return y;
}

/// Vector transport by projection onto the tangent space at x_next.
template <typename Real>
CVec<Real> transport(const CVec<Real> &d, const CVec<Real> &x_next) {
  require_shape(d.size() == x_next.size(), "transport: size mismatch");
  const RVec<Real> radial = d.cwiseProduct(x_next.conjugate()).real();
  return d - radial.template cast<Complex<Real>>().cwiseProduct(x_next);
}

/// PR+ coefficient max(0, Re<g1, g1 - g0> / <g0, g0>); 0 when g0 vanishes.
template <typename Real>
Real polak_ribiere(const CVec<Real> &grad_next, const CVec<Real> &grad_prev) {
  require_shape(grad_next.size() == grad_prev.size(), "polak_ribiere: size mismatch");
  const Real denom = grad_prev.squaredNorm();
  if (!(denom > std::numeric_limits<Real>::min())) return Real(0);
  const Real beta = real_inner(grad_next, CVec<Real>(grad_next - grad_prev)) / denom;
  return std::max(Real(0), beta);
}

template <typename Real>
struct CgOptions {
  int max_iterations = 500;
  // Stop when ||grad|| < gradient_norm_tolerance * sqrt(D).
  Real gradient_norm_tolerance = Real(1e-6);
  Real relative_cost_tolerance = Real(1e-8);
  Real armijo_sufficient_decrease = Real(1e-4);
  Real armijo_contraction = Real(0.5);
  Real initial_step = Real(1);
  Real max_step = Real(1);
  int max_backtracks = 50;

  void validate() const {
    if (max_iterations < 0 || !(gradient_norm_tolerance > 0) || !(relative_cost_tolerance > 0) ||
        !(initial_step > 0) || !(max_step > 0))
      throw ConfigError("CgOptions: tolerances and steps must be positive");
    if (!(armijo_sufficient_decrease > 0 && armijo_sufficient_decrease < 1) ||
        !(armijo_contraction > 0 && armijo_contraction < 1))
      throw ConfigError("CgOptions: Armijo constants must lie in (0, 1)");
  }
};

enum class CgStop { gradient_norm, relative_cost, max_iterations, line_search_failed };

/// Record of one accepted step, kept for checking the Armijo contract.
template <typename Real>
struct CgStep {
  Real step;
  Real cost_before;
  Real cost_after;
  Real grad_norm_sq;
};

template <typename Real>
struct CgResult {
  CVec<Real> x;
  std::vector<Real> cost_trace;  // cost_trace[0] = cost(x0)
  std::vector<CgStep<Real>> steps;
  CgStop stop = CgStop::max_iterations;
  Real final_grad_norm = 0;
};

template <typename Real>
using CostFn = std::function<Real(const CVec<Real> &)>;
template <typename Real>
using GradFn = std::function<CVec<Real>(const CVec<Real> &)>;

/// Riemannian conjugate gradient with Armijo backtracking.
///
/// An accepted step of length a along d satisfies
///   f(R_x(a d)) <= f(x) - c * a * max(-Re<grad, d>, ||grad||^2),
/// which for the steepest-descent direction is the textbook Armijo rule and in
/// general also implies f(x_next) <= f(x) - c a ||grad||^2. When the conjugate
/// direction cannot satisfy it the search restarts along -grad; if that fails
/// too the current iterate is returned.
template <typename Real>
CgResult<Real> cg_minimize(const CostFn<Real> &cost, const GradFn<Real> &egrad,
                           const CVec<Real> &x0, const CgOptions<Real> &opts = {}) {
  opts.validate();
  if (max_modulus_deviation(x0) > Real(1e-8))
    throw ContractError("cg_minimize: initial point is not unit modulus");

  CgResult<Real> res;
  CVec<Real> x = x0;
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) /= std::abs(x(i));

  Real f = cost(x);
  res.cost_trace.push_back(f);
  CVec<Real> grad = project_tangent(x, egrad(x));
  const Real grad_tol =
      opts.gradient_norm_tolerance * std::sqrt(static_cast<Real>(std::max<Eigen::Index>(1, x.size())));
  CVec<Real> dir = -grad;
  Real step0 = std::min(opts.initial_step, opts.max_step);

  res.stop = CgStop::max_iterations;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Real gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) < grad_tol) {
      res.stop = CgStop::gradient_norm;
      break;
    }

    bool accepted = false;
    Real step = step0, f_new = f, slope_used = 0, required_used = 0;
    CVec<Real> x_new;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Real slope = real_inner(grad, dir);
      if (attempt == 1 || !(slope < 0)) {
        if (attempt == 1 && dir.isApprox(-grad)) break;  // already steepest
        dir = -grad;
        slope = -gnorm2;
      }
      const Real required = std::max(-slope, gnorm2);
      required_used = required;
      step = step0;
      for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
        try {
          x_new = retract(x, dir, step);
          f_new = cost(x_new);
          if (f_new <= f - opts.armijo_sufficient_decrease * step * required) {
            accepted = true;
            slope_used = slope;
            break;
          }
        } catch (const NumericError &) {
          // x + step*d hit zero in some entry; shrink and retry.
        }
        step *= opts.armijo_contraction;
      }
    }
    if (!accepted) {
      res.stop = CgStop::line_search_failed;
      break;
    }

    // A step that overshoots the 1-D minimum can still pass Armijo (e.g. a
    // coordinate jumping to the mirror angle). Try the minimizer of the
    // quadratic through f, the slope and f_new, and keep it if it is better
    // and also satisfies the Armijo condition.
    {
      const Real curvature = f_new - f - slope_used * step;
      if (curvature > 0) {
        const Real step_q = -slope_used * step * step / (Real(2) * curvature);
        if (step_q > 0 && step_q < Real(0.9) * step) {
          try {
            CVec<Real> x_q = retract(x, dir, step_q);
            const Real f_q = cost(x_q);
            if (f_q < f_new && f_q <= f - opts.armijo_sufficient_decrease * step_q * required_used) {
              x_new = std::move(x_q);
              f_new = f_q;
              step = step_q;
            }
          } catch (const NumericError &) {
          }
        }
      }
    }

    res.steps.push_back({step, f, f_new, gnorm2});
    const CVec<Real> grad_new = project_tangent(x_new, egrad(x_new));
    const Real beta = polak_ribiere(grad_new, grad);
    dir = -grad_new + beta * transport(dir, x_new);
    const Real rel = (f - f_new) / std::max(std::abs(f), std::numeric_limits<Real>::min());

    x = std::move(x_new);
    f = f_new;
    grad = grad_new;
    res.cost_trace.push_back(f);
    step0 = std::min(opts.max_step, Real(2) * step);

    if (rel < opts.relative_cost_tolerance) {
      res.stop = CgStop::relative_cost;
      break;
    }
  }
  res.x = std::move(x);
  res.final_grad_norm = grad.norm();
  return res;
}

}  // namespace beamforge

#endif  // BEAMFORGE_MANIFOLD_HPP
