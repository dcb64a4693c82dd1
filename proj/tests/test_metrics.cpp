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

#include "beamforge/metrics.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <gtest/gtest.h>

#include <numeric>

using namespace beamforge;
using beamforge::testing::Mat;
using beamforge::testing::Vec;

TEST(MutualCoherence, Examples) {
  EXPECT_NEAR(mutual_coherence(Mat(Mat::Identity(3, 3))), 0.0, 1e-15);
  Mat dup(3, 2);
  dup << 1, 1, std::complex<double>(0, 2), std::complex<double>(0, 2), 3, 3;
  EXPECT_NEAR(mutual_coherence(dup), 1.0, 1e-14);
  Mat third(3, 2);
  third << 1, 1, 1, -1, 1, 1;
  EXPECT_NEAR(mutual_coherence(third), 1.0 / 3.0, 1e-15);
}

TEST(MutualCoherence, Errors) {
  Mat z = Mat::Ones(3, 3);
  z.col(1).setZero();
  EXPECT_THROW(mutual_coherence(z), std::domain_error);
  EXPECT_THROW(mutual_coherence(Mat(Mat::Ones(3, 1))), ShapeError);
}

TEST(MutualCoherence, PairwiseOracleAndScaleInvariance) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat d = complex_normal_matrix<double>(rng, 5, 9);
    double oracle = 0;
    for (Eigen::Index m = 0; m < 9; ++m)
      for (Eigen::Index n = m + 1; n < 9; ++n)
        oracle = std::max(oracle, std::abs(d.col(m).dot(d.col(n))) / (d.col(m).norm() * d.col(n).norm()));
    EXPECT_NEAR(mutual_coherence(d), oracle, 1e-12);

    std::uniform_real_distribution<double> u(0.1, 10.0);
    Mat scaled = d;
    for (Eigen::Index j = 0; j < 9; ++j) scaled.col(j) *= u(rng);
    EXPECT_NEAR(mutual_coherence(scaled), mutual_coherence(d), 1e-12);
  }
}

TEST(GramObjective, Examples) {
  Rng rng(12);
  // A = I, W_RF W_BB unitary.
  Eigen::HouseholderQR<Mat> qr(complex_normal_matrix<double>(rng, 4, 4));
  const Mat u = qr.householderQ();
  EXPECT_NEAR(gram_objective<double>(Mat::Identity(4, 4), u, Mat::Identity(4, 4)), 0.0, 1e-24);
  const Mat a = complex_normal_matrix<double>(rng, 4, 7);
  EXPECT_NEAR(gram_objective<double>(a, complex_normal_matrix<double>(rng, 4, 3), Mat::Zero(3, 2)),
              7.0, 1e-12);
}

TEST(GramObjective, DoubleLoopOracle) {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat a = complex_normal_matrix<double>(rng, 5, 8);
    const Mat w_rf = random_phase_matrix<double>(rng, 5, 3);
    const Mat w_bb = complex_normal_matrix<double>(rng, 3, 2);
    const Mat s = w_bb.adjoint() * w_rf.adjoint() * a;
    double oracle = 0;
    for (Eigen::Index m = 0; m < 8; ++m)
      for (Eigen::Index n = 0; n < 8; ++n) {
        std::complex<double> g = 0;
        for (Eigen::Index k = 0; k < s.rows(); ++k) g += std::conj(s(k, m)) * s(k, n);
        oracle += std::norm(g - (m == n ? 1.0 : 0.0));
      }
    EXPECT_NEAR(gram_objective<double>(a, w_rf, w_bb), oracle, 1e-10 * oracle);
  }
}

TEST(GramObjective, ShapeErrors) {
  EXPECT_THROW(gram_objective<double>(Mat::Ones(4, 6), Mat::Ones(3, 2), Mat::Ones(2, 2)), ShapeError);
  EXPECT_THROW(gram_objective<double>(Mat::Ones(4, 6), Mat::Ones(4, 2), Mat::Ones(3, 2)), ShapeError);
}

TEST(GramMatrix, HermitianPsd) {
  Rng rng(14);
  const Mat d = complex_normal_matrix<double>(rng, 6, 10);
  const Mat g = d.adjoint() * d;
  EXPECT_LT(beamforge::testing::hermitian_defect(g), 1e-10);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
  const Mat gn = normalized_gram(d);
  EXPECT_LT(beamforge::testing::hermitian_defect(gn), 1e-10);
}

TEST(EquivalentDictionary, Scalars) {
  const Mat one = Mat::Ones(1, 1);
  Mat at(1, 1), ar(1, 1);
  at << std::complex<double>(0.3, -0.4);
  ar << std::complex<double>(1.5, 2.0);
  const Mat q = equivalent_dictionary<double>(one, one, one, one, at, ar);
  EXPECT_NEAR(std::abs(q(0, 0) - std::conj(at(0, 0)) * ar(0, 0)), 0.0, 1e-15);
}

TEST(EquivalentDictionary, QuadrupleLoopOracle) {
  Rng rng(15);
  const Mat a_t = complex_normal_matrix<double>(rng, 4, 5), a_r = complex_normal_matrix<double>(rng, 3, 4);
  const Mat f_rf = random_phase_matrix<double>(rng, 4, 2), f_bb = complex_normal_matrix<double>(rng, 2, 2);
  const Mat w_rf = random_phase_matrix<double>(rng, 3, 2), w_bb = complex_normal_matrix<double>(rng, 2, 2);
  const Mat q = equivalent_dictionary<double>(f_rf, f_bb, w_rf, w_bb, a_t, a_r);
  const Mat tx = f_bb.transpose() * f_rf.transpose() * a_t.conjugate();
  const Mat rx = w_bb.adjoint() * w_rf.adjoint() * a_r;
  ASSERT_EQ(q.rows(), tx.rows() * rx.rows());
  ASSERT_EQ(q.cols(), tx.cols() * rx.cols());
  for (Eigen::Index i = 0; i < tx.rows(); ++i)
    for (Eigen::Index j = 0; j < tx.cols(); ++j)
      for (Eigen::Index k = 0; k < rx.rows(); ++k)
        for (Eigen::Index l = 0; l < rx.cols(); ++l)
          EXPECT_NEAR(std::abs(q(i * rx.rows() + k, j * rx.cols() + l) - tx(i, j) * rx(k, l)), 0.0, 1e-12);
  EXPECT_NEAR(mutual_coherence(q), std::max(mutual_coherence(tx), mutual_coherence(rx)), 1e-12);
}

TEST(EquivalentDictionary, KroneckerCoherenceRandom) {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat tx = complex_normal_matrix<double>(rng, 3, 5), rx = complex_normal_matrix<double>(rng, 2, 4);
    EXPECT_NEAR(mutual_coherence(kron(tx, rx)), std::max(mutual_coherence(tx), mutual_coherence(rx)), 1e-12);
  }
}

TEST(ScaledIdentity, Examples) {
  // Q^H Q = c I
  Rng rng(17);
  Eigen::HouseholderQR<Mat> qr(complex_normal_matrix<double>(rng, 6, 6));
  const Mat u = Mat(qr.householderQ()).leftCols(4);
  const auto s = scaled_identity_objective<double>(Mat(std::sqrt(3.0) * u));
  EXPECT_NEAR(s.zeta, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.value, 0.0, 1e-12);

  const Mat q = complex_normal_matrix<double>(rng, 5, 9);
  const auto a = scaled_identity_objective(q);
  const auto b = scaled_identity_objective(Mat(2.0 * q));
  EXPECT_NEAR(b.zeta, a.zeta / 4, 1e-12 * a.zeta);
  EXPECT_NEAR(b.value, a.value, 1e-10 * a.value);
  EXPECT_THROW(scaled_identity_objective(Mat(Mat::Zero(3, 3))), std::domain_error);
}

TEST(ScaledIdentity, ClosedFormMatchesDirect) {
  Rng rng(18);
  for (auto [m, g] : {std::pair{5, 9}, {9, 5}}) {
    const Mat q = complex_normal_matrix<double>(rng, m, g);
    const auto s = scaled_identity_objective(q);
    const Mat direct = s.zeta * q.adjoint() * q - Mat::Identity(g, g);
    EXPECT_NEAR(s.value, direct.squaredNorm(), 1e-10 * direct.squaredNorm());
    EXPECT_NEAR(s.zeta, (q.adjoint() * q).trace().real() / (q.adjoint() * q * q.adjoint() * q).trace().real(), 1e-14);
  }
}

TEST(ScaledIdentity, ScanOracle) {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat q = complex_normal_matrix<double>(rng, 6, 11);
    const auto best = scaled_identity_objective(q);
    for (int i = 0; i <= 200; ++i) {
      const double s = best.zeta * (0.5 + i / 200.0);
      const double v = (s * q.adjoint() * q - Mat::Identity(11, 11)).squaredNorm();
      EXPECT_LE(best.value, v + 1e-12 * v);
    }
  }
}

TEST(Histogram, Examples) {
  const auto id = offdiag_histogram<double>(Mat::Identity(4, 4), 10);
  EXPECT_EQ(id[0].count, 12u);
  for (std::size_t b = 1; b < id.size(); ++b) EXPECT_EQ(id[b].count, 0u);

  Mat third(3, 2);
  third << 1, 1, 1, -1, 1, 1;
  const auto h = offdiag_histogram<double>(third, 10);
  EXPECT_EQ(h[3].count, 2u);
  EXPECT_LE(h[3].low, 1.0 / 3.0);
  EXPECT_GT(h[3].high, 1.0 / 3.0);

  Rng rng(20);
  const auto r = offdiag_histogram<double>(complex_normal_matrix<double>(rng, 4, 9), 7);
  const auto total = std::accumulate(r.begin(), r.end(), std::uint64_t{0},
                                     [](std::uint64_t acc, const HistogramBin &b) { return acc + b.count; });
  EXPECT_EQ(total, 72u);
  EXPECT_THROW(offdiag_histogram<double>(Mat::Identity(2, 2), 0), ConfigError);
}

TEST(Histogram, CoherenceOneLandsInLastBin) {
  Mat dup = Mat::Ones(3, 2);
  const auto h = offdiag_histogram<double>(dup, 4);
  EXPECT_EQ(h[3].count, 2u);
  EXPECT_EQ(h[3].high, 1.0);
}

TEST(GramSummary, Consistent) {
  Rng rng(21);
  const Mat d = complex_normal_matrix<double>(rng, 4, 6);
  const auto s = summarize_gram(d);
  EXPECT_EQ(s.dimension, 6);
  EXPECT_EQ(s.offdiag_magnitudes.size(), 30u);
  EXPECT_EQ(s.max_offdiag_coherence, *std::max_element(s.offdiag_magnitudes.begin(), s.offdiag_magnitudes.end()));
  EXPECT_NEAR(s.max_offdiag_coherence, mutual_coherence(d), 1e-15);
  for (double v : s.offdiag_magnitudes) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  Mat raw = d.adjoint() * d - Mat::Identity(6, 6);
  EXPECT_NEAR(s.objective_value, raw.squaredNorm(), 1e-12 * raw.squaredNorm());
}
