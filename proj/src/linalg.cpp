/**
 * Copyright 2026 The photherm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "photherm/linalg.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "photherm/errors.hpp"
#include "photherm/random.hpp"

namespace photherm {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  require_square(m, "HermitianMatrix");
  if (!m.allFinite()) throw DomainError("HermitianMatrix: non-finite entry");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream os;
    os << "HermitianMatrix: |H - H^dagger|_max = " << asym << " exceeds " << tol;
    throw DomainError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  if (dim < 1) throw DimensionError("HermitianMatrix::zero: dim must be >= 1");
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

double unitarity_residual(const ComplexMatrix& m) {
  require_square(m, "is_unitary");
  const auto n = m.rows();
  return (m.adjoint() * m - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return unitarity_residual(m) <= tol;
}

ComplexMatrix expm(const HermitianMatrix& h, double t) {
  if (!std::isfinite(t)) throw DomainError("expm: non-finite time");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h.matrix());
  if (eig.info() != Eigen::Success) throw DomainError("expm: eigendecomposition failed");
  const ComplexVector phases =
      (eig.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  const ComplexMatrix& vecs = eig.eigenvectors();
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

HermitianMatrix logm_unitary(const ComplexMatrix& v) {
  require_square(v, "logm_unitary");
  const double res = unitarity_residual(v);
  if (res > kUnitaryTol) {
    std::ostringstream os;
    os << "logm_unitary: input not unitary (residual " << res << ")";
    throw DomainError(os.str());
  }
  // A unitary is normal, so its Schur form is diagonal up to rounding and the
  // Schur vectors are an orthonormal eigenbasis even for degenerate phases.
  Eigen::ComplexSchur<ComplexMatrix> schur(v);
  if (schur.info() != Eigen::Success) throw DomainError("logm_unitary: Schur decomposition failed");
  const ComplexMatrix& q = schur.matrixU();
  const ComplexMatrix& tri = schur.matrixT();
  Eigen::VectorXd energies(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    double phase = std::arg(tri(i, i));
    if (phase <= -std::numbers::pi) phase = std::numbers::pi;
    energies(i) = -phase;  // e^{-iE} = e^{i phase}
  }
  const ComplexMatrix h = q * energies.cast<Complex>().asDiagonal() * q.adjoint();
  return HermitianMatrix(0.5 * (h + h.adjoint()));
}

ComplexMatrix haar_random(int m, std::uint64_t seed) {
  if (m < 1) throw DimensionError("haar_random: m must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  ComplexMatrix z(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

ComplexMatrix fourier(int n, int m) {
  if (n < 1 || m < 1) throw DimensionError("fourier: n and m must be >= 1");
  if (n > m) throw DimensionError("fourier: n must not exceed m");
  ComplexMatrix f = ComplexMatrix::Identity(m, m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // reduce the exponent mod n first so large n keeps full phase accuracy
      const int e = (j * k) % n;
      const double angle = 2.0 * std::numbers::pi * e / n;
      f(j, k) = norm * Complex(std::cos(angle), std::sin(angle));
    }
  }
  return f;
}

double amplitude_fidelity(const ComplexMatrix& u_set, const ComplexMatrix& u_get) {
  require_square(u_set, "amplitude_fidelity");
  if (u_get.rows() != u_set.rows() || u_get.cols() != u_set.cols()) {
    throw DimensionError("amplitude_fidelity: dimension mismatch");
  }
  // Tr(|U_set^dagger| |U_get|) = sum_{jk} |U_set(k,j)| |U_get(k,j)|
  const double trace = (u_set.cwiseAbs().array() * u_get.cwiseAbs().array()).sum();
  return trace / static_cast<double>(u_set.rows());
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: dimension mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

}  // namespace photherm
