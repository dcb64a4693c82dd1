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

#ifndef BEAMFORGE_TYPES_HPP
#define BEAMFORGE_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamforge {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
inline constexpr Real kPi = std::numbers::pi_v<Real>;

// Error taxonomy. Everything derives from a std exception so callers can
// catch broadly.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A documented precondition on an input value was violated (e.g. a point that
// is supposed to lie on the manifold does not).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_shape(bool ok, const std::string &what) {
  if (!ok) throw ShapeError(what);
}

// Column-major vectorization, consistent with vec(ABC) = (C^T (x) A) vec(B).
template <typename Derived>
auto vec(const Eigen::MatrixBase<Derived> &m) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(m.size());
  Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(v.data(), m.rows(),
                                                                    m.cols()) = m;
  return v;
}

template <typename Derived>
auto invec(const Eigen::MatrixBase<Derived> &v, Eigen::Index rows, Eigen::Index cols) {
  using Scalar = typename Derived::Scalar;
  require_shape(v.size() == rows * cols, "invec: size does not match rows*cols");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tmp = v;
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(
      Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(tmp.data(), rows,
                                                                              cols));
}

template <typename DA, typename DB>
auto kron(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b) {
  using Scalar = typename DA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Real inner product Re{a^H b} on C^n viewed as R^{2n}.
template <typename DA, typename DB>
auto real_inner(const Eigen::MatrixBase<DA> &a, const Eigen::MatrixBase<DB> &b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

// Block-diagonal assembly of equally sized blocks.
template <typename Real>
CMat<Real> block_diagonal(const std::vector<CMat<Real>> &blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto &b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  CMat<Real> out = CMat<Real>::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto &b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace beamforge

#endif  // BEAMFORGE_TYPES_HPP
