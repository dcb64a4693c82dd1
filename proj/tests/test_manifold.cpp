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

#include "beamforge/channel.hpp"
#include "beamforge/designer_inf.hpp"
#include "beamforge/manifold.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace beamforge;
using beamforge::testing::Mat;
using beamforge::testing::Vec;

namespace {

Vec random_point(Rng &rng, Eigen::Index n) { return vec(random_phase_matrix<double>(rng, n, 1)); }

double max_radial(const Vec &x, const Vec &z) {
  return z.cwiseProduct(x.conjugate()).real().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(ProjectTangent, Examples) {
  Rng rng(1);
  const Vec x = random_point(rng, 7);
  EXPECT_LT(project_tangent(x, x).norm(), 1e-15);
  const Vec jx = std::complex<double>(0, 1) * x;
  EXPECT_LT((project_tangent(x, jx) - jx).norm(), 1e-15);
  const Vec g = complex_normal_matrix<double>(rng, 7, 1);
  EXPECT_LT(max_radial(x, project_tangent(x, g)), 1e-12);
}

TEST(ProjectTangent, RejectsOffManifoldPoint) {
  Vec x = Vec::Ones(3);
  x(1) = 1.1;
  EXPECT_THROW(project_tangent(x, Vec(Vec::Ones(3))), ContractError);
  EXPECT_THROW(project_tangent(Vec(Vec::Ones(3)), Vec(Vec::Ones(2))), ShapeError);
}

TEST(Retract, Examples) {
  Rng rng(2);
  const Vec x = random_point(rng, 5);
  const Vec d = complex_normal_matrix<double>(rng, 5, 1);
  EXPECT_LT((retract(x, d, 0.0) - x).norm(), 1e-15);

  Vec one(1), j(1);
  one << 1.0;
  j << std::complex<double>(0, 1);
  const Vec r = retract(one, j, 1.0);
  EXPECT_LT(std::abs(r(0) - std::complex<double>(1, 1) / std::sqrt(2.0)), 1e-15);

  EXPECT_LT(max_modulus_deviation(retract(x, d, 3.7)), 1e-15);
  EXPECT_THROW(retract(one, Vec(-one), 1.0), NumericError);
}

TEST(Transport, Examples) {
  Rng rng(3);
  const Vec x = random_point(rng, 6);
  const Vec tangent = project_tangent(x, Vec(complex_normal_matrix<double>(rng, 6, 1)));
  EXPECT_LT((transport(tangent, x) - tangent).norm(), 1e-14);
  EXPECT_LT(transport(x, x).norm(), 1e-15);
  EXPECT_LT(max_radial(x, transport(Vec(complex_normal_matrix<double>(rng, 6, 1)), x)), 1e-12);
}

TEST(PolakRibiere, Examples) {
  Rng rng(4);
  const Vec g = complex_normal_matrix<double>(rng, 5, 1);
  EXPECT_EQ(polak_ribiere(g, g), 0.0);
  EXPECT_EQ(polak_ribiere(Vec(Vec::Zero(5)), g), 0.0);
  EXPECT_EQ(polak_ribiere(g, Vec(Vec::Zero(5))), 0.0);
  // Orthogonal in the real inner product: g1 = j * g0 gives Re<g1, g0> = 0.
  const Vec g1 = 2.0 * std::complex<double>(0, 1) * g;
  EXPECT_NEAR(polak_ribiere(g1, g), g1.squaredNorm() / g.squaredNorm(), 1e-12);
}

TEST(ManifoldInvariants, RandomPairs) {
  Rng rng(5);
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec x = random_point(rng, 12);
    const Vec g = complex_normal_matrix<double>(rng, 12, 1);
    const Vec xi = project_tangent(x, g);
    EXPECT_LE(max_radial(x, xi), 1e-10);
    const Vec y = retract(x, xi, step(rng));
    EXPECT_LE(max_modulus_deviation(y), 1e-12);
    EXPECT_LE(max_radial(y, transport(xi, y)), 1e-10);
  }
}

TEST(CgMinimize, StationaryStartReturnsImmediately) {
  Rng rng(6);
  const Vec t = random_point(rng, 8);
  const CostFn<double> cost = [&](const Vec &x) { return (x - t).squaredNorm(); };
  const GradFn<double> grad = [&](const Vec &x) { return Vec(2.0 * (x - t)); };
  const auto res = cg_minimize<double>(cost, grad, t);
  EXPECT_EQ(res.cost_trace.size(), 1u);
  EXPECT_EQ(res.x, t);
  EXPECT_EQ(res.stop, CgStop::gradient_norm);
}

TEST(CgMinimize, ConvergesToPhaseAlignedTarget) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec t = random_point(rng, 20);
    Vec x0 = random_point(rng, 20);
    // Keep every coordinate away from the antipodal saddle.
    for (Eigen::Index i = 0; i < x0.size(); ++i)
      if (std::real(x0(i) * std::conj(t(i))) < -0.9) x0(i) = -x0(i);
    const CostFn<double> cost = [&](const Vec &x) { return (x - t).squaredNorm(); };
    const GradFn<double> grad = [&](const Vec &x) { return Vec(2.0 * (x - t)); };
    CgOptions<double> opts;
    opts.relative_cost_tolerance = 1e-14;
    const auto res = cg_minimize<double>(cost, grad, x0, opts);
    EXPECT_LT((res.x - t).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(CgMinimize, MonotoneArmijoOnAnalogCost) {
  const auto dict = build_dictionary<double>(8, 12, 0.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Mat x0 = random_phase_matrix<double>(rng, 8, 8);
    const Mat wbb = complex_normal_matrix<double>(rng, 8, 8, 0.1);
    const Mat k = wbb * wbb.adjoint();
    const Mat e = Mat::Identity(12, 12);
    const CostFn<double> cost = [&](const Vec &x) { return analog_cost(dict.matrix, invec(x, 8, 8), k, e); };
    const GradFn<double> grad = [&](const Vec &x) {
      return vec(analog_egrad(dict.matrix, invec(x, 8, 8), k, e));
    };
    const CgOptions<double> opts;
    const auto res = cg_minimize<double>(cost, grad, vec(x0), opts);
    ASSERT_FALSE(res.cost_trace.empty());
    for (std::size_t i = 1; i < res.cost_trace.size(); ++i)
      EXPECT_LE(res.cost_trace[i], res.cost_trace[i - 1]);
    for (const auto &s : res.steps)
      EXPECT_LE(s.cost_after, s.cost_before - opts.armijo_sufficient_decrease * s.step * s.grad_norm_sq);
    EXPECT_LE(max_modulus_deviation(res.x), 1e-12);
    EXPECT_LT(res.cost_trace.back(), res.cost_trace.front());
  }
}

TEST(CgMinimize, RiemannianGradientIsTangent) {
  const auto dict = build_dictionary<double>(6, 9, 0.5);
  Rng rng(8);
  const Mat wbb = complex_normal_matrix<double>(rng, 4, 3);
  const Mat k = wbb * wbb.adjoint();
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_point(rng, 24);
    const Vec rg = project_tangent(x, vec(analog_egrad(dict.matrix, invec(x, 6, 4), k, Mat(Mat::Identity(9, 9)))));
    EXPECT_LE(max_radial(x, rg), 1e-10);
  }
}

TEST(CgMinimize, RejectsBadInput) {
  const CostFn<double> cost = [](const Vec &x) { return x.squaredNorm(); };
  const GradFn<double> grad = [](const Vec &x) { return Vec(2.0 * x); };
  EXPECT_THROW(cg_minimize<double>(cost, grad, Vec(2.0 * Vec::Ones(3))), ContractError);
  CgOptions<double> bad;
  bad.armijo_contraction = 1.5;
  EXPECT_THROW(cg_minimize<double>(cost, grad, Vec(Vec::Ones(3)), bad), ConfigError);
}
