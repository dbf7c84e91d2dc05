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

// Truncated Fock-space instantiation of the thermal family, used to check the
// closed forms against brute-force linear algebra at one or two modes.
//
// Mode k occupies tensor factor k (mode 0 leftmost); each factor keeps levels
// 0..N-1. Quadratic forms are built from operators at N+1 levels and then
// compressed, so their matrix elements inside the truncated space are exact.

#include <vector>

#include "gaussgeo/info_geometry.hpp"
#include "gaussgeo/kernels.hpp"
#include "gaussgeo/observables.hpp"
#include "gaussgeo/symplectic.hpp"

namespace gaussgeo::fock {

inline constexpr double kFockTol = 1e-8;
inline constexpr double kEigFloor = 1e-12;
inline constexpr int kEdgeLevels = 2;  // top levels excluded from operator identities

/// Basis of matrices passed to and returned from the spectral routines:
/// kFock is the number basis, kEigen the eigenbasis of the state.
enum class Basis { kFock, kEigen };

class FockRep {
 public:
  FockRep(ModeCount n, int cutoff);

  int modes() const { return n_; }
  int cutoff() const { return cutoff_; }
  int size() const { return size_; }
  int phase_dim() const { return 2 * n_; }

  /// x_j: q_k for j = k < n and p_k for j = n + k.
  const CMatrix& quadrature(int j) const { return quads_[j]; }

  /// {x_i, x_j} / 2 with exact matrix elements.
  CMatrix sym_product(int i, int j) const;

  /// c + sum lin_j x^c_j + sum quad_ij {x^c_i, x^c_j} / 2 with x^c = x - mu.
  CMatrix materialize(const QuadraticObservable& obs, const Vector& mu) const;

  /// G = (x - mu)^T H (x - mu) / 2 symmetrized; only the symmetric part of h enters.
  CMatrix generator(const Vector& mu, const Matrix& h) const;

  /// Basis indices whose every mode level is below cutoff - kEdgeLevels.
  std::vector<int> retained() const;

  /// Single-mode commutator [q, p] - i restricted to the retained block.
  double commutator_defect() const;

 private:
  CMatrix embed(const CMatrix& single, int mode) const;
  int mode_of(int j) const { return j % n_; }

  int n_;
  int cutoff_;
  int size_;
  std::vector<CMatrix> quads_;
  std::vector<CMatrix> single_quads_;  // truncated q, p
  std::vector<CMatrix> single_sym_;  // [a * 2 + b] for a, b in {q, p}, compressed
};

/// rho = exp(-G) / Tr exp(-G), kept in the eigenbasis of G in log form so that
/// powers and logarithms of rho are exact up to the eigensolver.
class OracleState {
 public:
  static OracleState from_generator(const CMatrix& g);

  int size() const { return static_cast<int>(g_.size()); }
  const Vector& generator_eigenvalues() const { return g_; }
  const Vector& eigenvalues() const { return lambda_; }
  const CMatrix& eigenvectors() const { return q_; }
  double log_trace() const { return log_z_; }  // log Tr exp(-G)

  CMatrix rho() const;
  CMatrix sqrt_rho() const;
  CMatrix log_rho() const;

  CMatrix to_eigenbasis(const CMatrix& x) const { return q_.adjoint() * x * q_; }
  CMatrix from_eigenbasis(const CMatrix& x) const { return q_ * x * q_.adjoint(); }

  /// Re Tr[rho X].
  double expectation(const CMatrix& x) const;

 private:
  Vector g_;
  Vector lambda_;
  CMatrix q_;
  double log_z_ = 0.0;
};

struct FockGaussianState {
  OracleState state;
  double trace_deficit = 0.0;  // 1 - Tr exp(-G_N) / Z
};

/// h is symmetrized first since only its symmetric part enters G. Throws
/// CutoffTooSmall when |trace_deficit| exceeds fock_tol.
FockGaussianState build_state(const FockRep& rep, const Vector& mu, const Matrix& h,
                              double fock_tol = kFockTol);

/// \int w(t) e^{iGt} X e^{-iGt} dt; entry (k, l) in the eigenbasis of G is
/// scaled by kernel_ft(g_k - g_l).
CMatrix channel_apply(const OracleState& state, const CMatrix& x, KernelKind kind);
CMatrix channel_apply(const CMatrix& g_op, const CMatrix& x, KernelKind kind);

/// -{Phi(dG), rho} / 2 + rho <dG>.
CMatrix thermal_derivative_channel(const OracleState& state, const CMatrix& dg);

/// d/ds exp(-(G + s dG)) / Tr at s = 0 from divided differences of exp.
CMatrix thermal_derivative_exact(const OracleState& state, const CMatrix& dg,
                                 Basis basis = Basis::kFock);

/// sum 2 / (l_k + l_l) <k|d_i rho|l><l|d_j rho|k>. Pairs with l_k + l_l below
/// eig_floor are dropped; `dropped` receives the number of dropped pairs that
/// carried a nonzero derivative entry.
Matrix fb_from_eig(const OracleState& state, const std::vector<CMatrix>& drho,
                   double eig_floor = kEigFloor, int* dropped = nullptr,
                   Basis basis = Basis::kFock);

/// Same with c(x, y) = (ln x - ln y) / (x - y), which diverges as x, y -> 0.
Matrix km_from_eig(const OracleState& state, const std::vector<CMatrix>& drho,
                   double eig_floor = kEigFloor, int* dropped = nullptr,
                   Basis basis = Basis::kFock);

/// {Phi(dG_i), Phi(dG_j)} / 2 - <dG_i><dG_j> averaged over rho.
Matrix fb_from_channels(const OracleState& state, const std::vector<CMatrix>& dg,
                        Basis basis = Basis::kFock);
/// {dG_i, Phi(dG_j)} / 2 - <dG_i><dG_j>.
Matrix km_from_channels(const OracleState& state, const std::vector<CMatrix>& dg,
                        Basis basis = Basis::kFock);
/// {dG_i, Psi(dG_j)} / 2 - <dG_i><dG_j> with Psi the q-weighted channel.
Matrix fb_from_q_channel(const OracleState& state, const std::vector<CMatrix>& dg,
                         Basis basis = Basis::kFock);

/// sum 2 / (l_k + l_l) |k><k| d rho |l><l|.
CMatrix sld_from_eig(const OracleState& state, const CMatrix& drho, double eig_floor = kEigFloor);

/// ||sqrt(rho) sqrt(sigma)||_1^2.
double fidelity(const OracleState& rho, const OracleState& sigma);

/// Tr[rho (ln rho - ln(sigma + eps))].
double relative_entropy(const OracleState& rho, const OracleState& sigma, double eps = kEigFloor);

/// Tr[rho (ln rho - ln sigma)] from the exact logarithms.
double relative_entropy_exact(const OracleState& rho, const OracleState& sigma);

/// Central difference (rho(theta + step e) - rho(theta - step e)) / (2 step).
/// Ham(k, l) perturbs the single entry h_kl.
CMatrix finite_difference_drho(const FockRep& rep, const Vector& mu, const Matrix& h,
                               const ParameterIndex& param, double step,
                               double fock_tol = kFockTol);

/// The coordinate-perturbed (mu, h).
void perturb(Vector& mu, Matrix& h, const ParameterIndex& param, double step);

/// Sum of singular values of a Hermitian matrix.
double trace_norm(const CMatrix& a);

/// Max-abs entry of a restricted to rows/cols in `keep`.
double max_abs_on(const CMatrix& a, const std::vector<int>& keep);

/// Max-abs entry of a in the eigenbasis of rho, restricted to eigenvectors
/// with eigenvalue >= lambda_floor. Spectral formulas divide by eigenvalues,
/// so entries outside this block carry roundoff amplified by 1 / lambda.
double max_abs_on_populated(const OracleState& state, const CMatrix& a, double lambda_floor);

}  // namespace gaussgeo::fock
