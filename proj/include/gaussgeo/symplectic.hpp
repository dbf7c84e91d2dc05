// Copyright 2026 The gaussgeo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Real symplectic linear algebra for n-mode bosonic Gaussian states.
//
// Quadratures are ordered (q_1, ..., q_n, p_1, ..., p_n) everywhere, so the
// symplectic form is [[0, I_n], [-I_n, 0]] and every matrix is 2n x 2n.

#include <complex>

#include <Eigen/Dense>

#include "gaussgeo/errors.hpp"

namespace gaussgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

namespace tol {
inline constexpr double kSym = 1e-10;       // input symmetry
inline constexpr double kSymp = 1e-9;       // S Omega S^T = Omega
inline constexpr double kRecon = 1e-9;      // reconstruction residuals
inline constexpr double kFaithful = 1e-8;   // guard band above nu = 1/2
inline constexpr double kImag = 1e-10;      // discarded imaginary residue
inline constexpr double kCondMax = 1e8;     // eigenvector condition limit
}  // namespace tol

/// Number of bosonic modes; always >= 1.
class ModeCount {
 public:
  explicit ModeCount(int n);

  int value() const noexcept { return n_; }
  int dim() const noexcept { return 2 * n_; }

  /// Infers n from a 2n-dimensional vector or matrix size.
  static ModeCount from_dim(Eigen::Index dim);

 private:
  int n_;
};

/// Which one-parameter group generated by H is meant by S(t).
///   kOmegaH:      S(t) = exp(Omega H t)    (Heisenberg action on quadratures)
///   kMinusHOmega: S(t) = exp(-H Omega t)   (its transpose)
enum class Convention { kOmegaH, kMinusHOmega };

/// How matrix functions of Omega H / V Omega are evaluated.
enum class FunctionMethod {
  kAuto,        // spectral, falling back to the Williamson route when ill-conditioned
  kSpectral,    // spectral only; throws IllConditioned
  kWilliamson,  // Williamson normal form only
};

Matrix omega(ModeCount n);

struct WilliamsonDecomposition {
  Matrix s;  // symplectic
  Vector d;  // symplectic eigenvalues, descending
};

/// Eigendecomposition of the generator A = Omega H (or -H Omega) of a PD
/// Hamiltonian matrix. Eigenvalues are purely imaginary, A u_a = i w_a u_a.
///
/// Built from the Hermitian matrix i H^{1/2} Omega H^{1/2}, which is similar
/// to i A; the eigenvector basis is H^{-1/2} W (or H^{1/2} W), so its
/// condition number is sqrt(cond(H)) even for degenerate spectra.
struct SpectralDecomposition {
  Convention convention = Convention::kOmegaH;
  Vector angular;      // w_a, length 2n
  Vector freqs;        // the n positive frequencies d_k, descending
  CMatrix basis;       // columns u_a
  CMatrix basis_inv;   // rows are the dual vectors
  double cond = 1.0;

  Eigen::Index size() const { return angular.size(); }

  /// Rank-one spectral projector u_a (u^a)^T.
  CMatrix projector(Eigen::Index a) const;

  /// Re[ U diag(f(w_a)) U^{-1} ]. The discarded imaginary part is returned
  /// through `imag_residue` when non-null.
  template <class F>
  Matrix apply(F&& f, double* imag_residue = nullptr) const {
    CVector values(size());
    for (Eigen::Index a = 0; a < size(); ++a) values(a) = Complex(f(angular(a)));
    CMatrix out = basis * values.asDiagonal() * basis_inv;
    if (imag_residue != nullptr) *imag_residue = out.imag().cwiseAbs().maxCoeff();
    return out.real();
  }
};

SpectralDecomposition decompose_generator(const Matrix& h, Convention convention);

/// V = coth(i Omega H / 2) i Omega / 2.
Matrix cov_from_ham(const Matrix& h, FunctionMethod method = FunctionMethod::kAuto,
                    double cond_max = tol::kCondMax);

/// H = 2 i Omega arcoth(2 i V Omega); requires every nu_k > 1/2.
Matrix ham_from_cov(const Matrix& v, FunctionMethod method = FunctionMethod::kAuto,
                    double cond_max = tol::kCondMax);

/// H = -2 Omega S [arcoth(2D)]^{(+)2} S^T Omega.
Matrix ham_from_williamson(const Matrix& s, const Vector& d);

/// V = S (D (+) D) S^T with S symplectic. Only the reconstruction is unique;
/// S carries an orthosymplectic gauge on degenerate eigenvalues.
WilliamsonDecomposition williamson(const Matrix& v);

/// Symplectic eigenvalues of a symmetric PD matrix, descending.
Vector symplectic_eigenvalues(const Matrix& v);

/// log sqrt(det(V + i Omega / 2)); the state must be faithful.
double log_partition_from_cov(const Matrix& v);

/// Z(mu, H) = sqrt(det(V + i Omega / 2)). Independent of mu.
double partition_function(const Vector& mu, const Matrix& h);
double log_partition_function(const Vector& mu, const Matrix& h);

/// Dense matrix exponential of the chosen generator times t.
Matrix symplectic_evolution(const Matrix& h, double t, Convention convention);

bool is_symplectic(const Matrix& s, double tolerance = tol::kSymp);

/// Throws NotSymmetric / DimensionMismatch.
void require_symmetric(const Matrix& m, const char* name, double tolerance = tol::kSym);

/// Throws NotPositiveDefinite; returns the smallest eigenvalue.
double require_positive_definite(const Matrix& m, const char* name);

class GaussianThermalState {
 public:
  static GaussianThermalState from_hamiltonian(const Vector& mu, const Matrix& h);
  static GaussianThermalState from_covariance(const Vector& mu, const Matrix& v);

  ModeCount modes() const { return ModeCount::from_dim(mu_.size()); }
  int dim() const { return static_cast<int>(mu_.size()); }
  const Vector& mu() const { return mu_; }
  const Matrix& ham() const { return ham_; }
  const Matrix& cov() const { return cov_; }
  const WilliamsonDecomposition& williamson() const { return will_; }
  const Vector& symplectic_eigenvalues() const { return will_.d; }
  double log_partition() const { return log_z_; }

 private:
  GaussianThermalState(Vector mu, Matrix ham, Matrix cov);

  Vector mu_;
  Matrix ham_;
  Matrix cov_;
  WilliamsonDecomposition will_;
  double log_z_ = 0.0;
};

/// Equivalent to the two factory functions; `matrix` is read as H or V.
enum class MatrixKind { kHamiltonian, kCovariance };
GaussianThermalState validate_state(const Vector& mu, const Matrix& matrix, MatrixKind kind);

}  // namespace gaussgeo
