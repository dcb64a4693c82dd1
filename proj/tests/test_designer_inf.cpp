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

#include "beamforge/baselines.hpp"
#include "beamforge/channel.hpp"
#include "beamforge/designer_inf.hpp"
#include "beamforge/metrics.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

using namespace beamforge;
using beamforge::testing::Mat;
using beamforge::testing::Vec;
using beamforge::testing::finite_difference_gradient;
using beamforge::testing::relative_error;

namespace {

Mat dft_columns(Eigen::Index n, Eigen::Index cols) {
  Mat f(n, cols);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      f(i, j) = std::polar(1.0, 2 * kPi<double> * double(i * j) / double(n));
  return f;
}

// Projected gradient with a small fixed step, run for a long time.
double slow_psd_oracle(const BlockPsdProblem<double> &prob, Eigen::Index m, int iterations) {
  const double step = 0.5 / prob.lipschitz();
  Mat x = Mat::Zero(m, m);
  for (int i = 0; i < iterations; ++i) x = prob.project(x - step * prob.gradient(x));
  return prob.objective(x);
}

}  // namespace

TEST(EgradAnalogInf, ZeroDigitalGivesZero) {
  Rng rng(1);
  const auto d = build_dictionary<double>(8, 12, 0.5);
  const Vec x = vec(random_phase_matrix<double>(rng, 8, 4));
  EXPECT_EQ(egrad_analog_inf<double>(x, Mat::Zero(4, 4), d.matrix).norm(), 0.0);
}

TEST(EgradAnalogInf, MatchesFiniteDifferences) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Vec x = vec(random_phase_matrix<double>(rng, 8, 4));
    const Mat digital = complex_normal_matrix<double>(rng, 4, 4, 0.1);
    const Mat k = digital * digital.adjoint();
    const auto f = [&](const Vec &v) {
      return analog_cost(d.matrix, invec(v, 8, 4), k, Mat(Mat::Identity(12, 12)));
    };
    const Vec fd = finite_difference_gradient(f, x);
    EXPECT_LE(relative_error(egrad_analog_inf<double>(x, digital, d.matrix), fd), 1e-5);
  }
}

TEST(EgradAnalogInf, TinyRetractionAlongNegativeGradientDescends) {
  Rng rng(2);
  const auto d = build_dictionary<double>(8, 12, 0.5);
  const Vec x = vec(random_phase_matrix<double>(rng, 8, 4));
  const Mat digital = complex_normal_matrix<double>(rng, 4, 4, 0.1);
  const Mat k = digital * digital.adjoint();
  const Mat eye = Mat::Identity(12, 12);
  const Vec rg = project_tangent(x, egrad_analog_inf<double>(x, digital, d.matrix));
  const double before = analog_cost(d.matrix, invec(x, 8, 4), k, eye);
  const double after = analog_cost(d.matrix, invec(retract(x, Vec(-rg), 1e-6), 8, 4), k, eye);
  EXPECT_GE(before - after, 0.0);
}

TEST(EgradAnalogInf, ShapeError) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  EXPECT_THROW(egrad_analog_inf<double>(Vec::Ones(10), Mat::Ones(4, 4), d.matrix), ShapeError);
}

TEST(SolveDigitalPsd, OrthogonalAnalogClosedForm) {
  for (Eigen::Index n : {4, 8}) {
    const Mat a = Mat::Identity(n, n);
    const Mat analog = dft_columns(n, n / 2);
    const auto sol = solve_digital_psd<double>(a, analog, 1);
    const Mat expect = Mat::Identity(n / 2, n / 2) / double(n);
    const BlockPsdProblem<double> prob(a, analog, 1, Mat::Identity(n, n));
    const double f_opt = prob.objective(expect);
    EXPECT_LE((sol.objective - f_opt) / f_opt, 1e-6);
    EXPECT_LT((sol.blocks[0] - expect).norm(), 1e-6 * expect.norm());
  }
}

TEST(SolveDigitalPsd, ZeroAnalogReturnsZero) {
  const auto d = build_dictionary<double>(4, 6, 0.5);
  const auto sol = solve_digital_psd<double>(d.matrix, Mat::Zero(4, 4), 2);
  EXPECT_NEAR(sol.objective, 6.0, 1e-12);
  for (const auto &b : sol.blocks) EXPECT_EQ(b.norm(), 0.0);
}

TEST(SolveDigitalPsd, MatchesSlowProjectedGradientOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    const auto d = build_dictionary<double>(4, 6, 0.5);
    const Mat analog = random_phase_matrix<double>(rng, 4, 4);
    const BlockPsdProblem<double> prob(d.matrix, analog, 2, Mat::Identity(6, 6));
    const double oracle = slow_psd_oracle(prob, 4, 100000);
    const auto sol = solve_digital_psd<double>(d.matrix, analog, 2);
    EXPECT_LE(std::abs(sol.objective - oracle) / std::max(oracle, 1e-12), 1e-4)
        << "seed " << seed << " solver " << sol.objective << " oracle " << oracle;
  }
}

TEST(SolveDigitalPsd, ContractOnRandomInstances) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Mat analog = random_phase_matrix<double>(rng, 8, 8);
    const BlockPsdProblem<double> prob(d.matrix, analog, 2, Mat::Identity(12, 12));
    Mat start = Mat::Zero(8, 8);
    start.topLeftCorner(4, 4) = complex_normal_matrix<double>(rng, 4, 4, 0.01);
    start = prob.project(Mat(start * start.adjoint()));
    const auto sol = solve_digital_psd<double>(d.matrix, analog, 2, start);
    EXPECT_LE(sol.objective, prob.objective(Mat::Zero(8, 8)));
    EXPECT_LE(sol.objective, prob.objective(start));
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(sol.kkt_residual, 1e-5 * sol.reference_gradient_norm);
    for (const auto &b : sol.blocks) {
      EXPECT_LT(beamforge::testing::hermitian_defect(b), 1e-10);
      Eigen::SelfAdjointEigenSolver<Mat> es(b);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(ExtractDigital, Examples) {
  const Mat eye = Mat::Identity(4, 4);
  const Mat w = extract_digital<double>(eye, 4);
  EXPECT_LT((w * w.adjoint() - eye).norm(), 1e-12);

  Rng rng(3);
  const Vec v = complex_normal_matrix<double>(rng, 4, 1);
  const Mat vv = v * v.adjoint();
  const Mat w1 = extract_digital<double>(vv, 1);
  EXPECT_LT((w1 * w1.adjoint() - vv).norm(), 1e-12 * vv.norm());

  Mat diag = Mat::Zero(4, 4);
  diag.diagonal() << 4, 1, 0, 0;
  const Mat w2 = extract_digital<double>(diag, 2);
  EXPECT_LT((w2 * w2.adjoint() - diag).norm(), 1e-12);

  Mat neg = Mat::Identity(3, 3);
  neg(2, 2) = -0.5;
  EXPECT_THROW(extract_digital<double>(neg, 2), ContractError);
}

TEST(ExtractDigital, BestRankApproximationAndLossless) {
  Rng rng(4);
  const Mat g = complex_normal_matrix<double>(rng, 5, 5);
  const Mat x = g * g.adjoint();
  const Mat full = extract_digital<double>(x, 5);
  EXPECT_LE((full * full.adjoint() - x).norm(), 1e-10 * x.norm());

  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  const Mat w = extract_digital<double>(x, 2);
  const double err = (w * w.adjoint() - x).norm();
  const double expect = es.eigenvalues().head(3).norm();  // discarded eigenvalues
  EXPECT_NEAR(err, expect, 1e-10 * x.norm());
}

TEST(DesignHybridInf, Invariants) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto h = design_hybrid_inf<double>(d.matrix, 2, 4, 4, {}, rng);
    EXPECT_EQ(h.analog.rows(), 8);
    EXPECT_EQ(h.analog.cols(), 8);
    EXPECT_EQ(h.num_blocks(), 2);
    EXPECT_LE((h.analog.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-12);
    const Mat digital = h.digital();
    EXPECT_EQ(digital.block(0, 4, 4, 4).norm(), 0.0);
    EXPECT_EQ(digital.block(4, 0, 4, 4).norm(), 0.0);
    EXPECT_NEAR((h.analog * digital).squaredNorm(), 8.0, 1e-10 * 8.0);
    ASSERT_GE(h.objective_trace.size(), 1u);
    for (std::size_t i = 1; i < h.objective_trace.size(); ++i)
      EXPECT_LE(h.objective_trace[i], h.objective_trace[i - 1]);
    EXPECT_EQ(h.design_objective, h.objective_trace.back());
  }
}

TEST(DesignHybridInf, ImprovesOnRandomStart) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed), replay(seed);
    const auto h = design_hybrid_inf<double>(d.matrix, 2, 4, 4, {}, rng);
    // Same generator state gives the same random analog start.
    const Mat start = random_phase_matrix<double>(replay, 8, 8);
    const auto psd = solve_digital_psd<double>(d.matrix, start, 2);
    EXPECT_LE(h.design_objective, psd.objective + 1e-9);
    EXPECT_LE(h.design_objective, gram_objective<double>(d.matrix, start, Mat(Mat::Zero(8, 8))));
  }
}

TEST(DesignHybridInf, BeatsRandomBaselineMedian) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  std::vector<double> designed, random;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    designed.push_back(design_hybrid_inf<double>(d.matrix, 2, 4, 4, {}, rng).design_objective);
    random.push_back(random_baseline<double>(d.matrix, 2, 4, 4, PhaseSet(3), rng).design_objective);
  }
  EXPECT_LT(beamforge::testing::median(designed), beamforge::testing::median(random));
}

TEST(DesignHybridInf, RescalingKeepsCoherence) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  Rng rng(9);
  const auto h = design_hybrid_inf<double>(d.matrix, 2, 4, 4, {}, rng);
  const double mu = mutual_coherence(Mat(receive_factor<double>(h.analog, h.digital(), d.matrix)));
  auto scaled = h;
  for (auto &b : scaled.digital_blocks) b *= 3.7;
  const double mu_scaled =
      mutual_coherence(Mat(receive_factor<double>(scaled.analog, scaled.digital(), d.matrix)));
  EXPECT_NEAR(mu, mu_scaled, 1e-12);
}

TEST(DesignHybridInf, RejectsBadDimensions) {
  const auto d = build_dictionary<double>(8, 12, 0.5);
  Rng rng(1);
  EXPECT_THROW(design_hybrid_inf<double>(d.matrix, 2, 2, 4, {}, rng), ConfigError);
  EXPECT_THROW(design_hybrid_inf<double>(d.matrix, 0, 4, 4, {}, rng), ConfigError);
}
