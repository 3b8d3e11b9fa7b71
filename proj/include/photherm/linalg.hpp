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

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace photherm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-8;

/// A complex square matrix that equals its adjoint to within kHermitianTol
/// (max-norm). Construction validates and symmetrizes.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const ComplexMatrix& m, double tol = kHermitianTol);

  static HermitianMatrix zero(int dim);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  ComplexMatrix m_;
};

/// max_{ij} |(M^dagger M - I)_{ij}|. Throws DimensionError for non-square input.
double unitarity_residual(const ComplexMatrix& m);
bool is_unitary(const ComplexMatrix& m, double tol = kUnitaryTol);

/// e^{-iHt} from the eigendecomposition of H.
ComplexMatrix expm(const HermitianMatrix& h, double t);

/// Hermitian H with e^{-iH} = V, eigenphases on the principal branch (-pi, pi].
HermitianMatrix logm_unitary(const ComplexMatrix& v);

/// Haar-distributed m x m unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal absorbed into Q. Deterministic in seed.
ComplexMatrix haar_random(int m, std::uint64_t seed);

/// m x m unitary: n-point DFT (1/sqrt n) e^{2 pi i jk/n} on the first n modes,
/// identity on the remaining m - n.
ComplexMatrix fourier(int n, int m);

/// (1/N) Tr(|U_set^dagger| |U_get|) with element-wise moduli.
double amplitude_fidelity(const ComplexMatrix& u_set, const ComplexMatrix& u_get);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Singular values in decreasing order (Schmidt coefficients of a bipartite
/// amplitude matrix).
Eigen::VectorXd singular_values(const ComplexMatrix& m);

}  // namespace photherm
