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

#include "gaussgeo/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace gaussgeo {

namespace {

double arcoth(double x) { return std::atanh(1.0 / x); }

std::string dims(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_square_even(const Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " must be 2n x 2n, got " + dims(m));
  }
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " has non-finite entries");
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

struct SqrtPair {
  Matrix root;
  Matrix inv_root;
  double cond;
};

SqrtPair sqrt_pd(const Matrix& m, const char* name) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kIllConditioned, std::string("eigensolver failed on ") + name);
  }
  const Vector& lam = es.eigenvalues();
  if (!(lam(0) > 0.0)) {
    std::ostringstream os;
    os << name << " is not positive definite (smallest eigenvalue " << lam(0) << ")";
    throw Error(ErrorCode::kNotPositiveDefinite, os.str());
  }
  const Matrix& q = es.eigenvectors();
  SqrtPair out;
  out.root = q * lam.cwiseSqrt().asDiagonal() * q.transpose();
  out.inv_root = q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
  out.cond = lam(lam.size() - 1) / lam(0);
  return out;
}

void require_faithful(const Vector& d, const char* name) {
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (!(d(k) > 0.5 + tol::kFaithful)) {
      std::ostringstream os;
      os.precision(17);
      os << name << " has symplectic eigenvalue " << d(k) << " <= 1/2";
      throw Error(ErrorCode::kNotFaithful, os.str());
    }
  }
}

Matrix cov_via_williamson(const Matrix& h) {
  // H = S_H (D (+) D) S_H^T; in the coordinates S_H^T x the state is a product
  // of thermal modes with nu_k = coth(d_k / 2) / 2.
  WilliamsonDecomposition wh = williamson(h);
  const int n = static_cast<int>(wh.d.size());
  Vector nu2(2 * n);
  for (int k = 0; k < n; ++k) {
    nu2(k) = nu2(k + n) = 0.5 / std::tanh(0.5 * wh.d(k));
  }
  const Matrix om = omega(ModeCount(n));
  const Matrix s_inv_t = -om * wh.s * om;  // S^{-T} for symplectic S
  return symmetrized(s_inv_t * nu2.asDiagonal() * s_inv_t.transpose());
}

}  // namespace

ModeCount::ModeCount(int n) : n_(n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "mode count must be >= 1");
}

ModeCount ModeCount::from_dim(Eigen::Index dim) {
  if (dim < 2 || dim % 2 != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension " + std::to_string(dim) + " is not 2n for n >= 1");
  }
  return ModeCount(static_cast<int>(dim / 2));
}

Matrix omega(ModeCount n) {
  const int m = n.value();
  Matrix om = Matrix::Zero(2 * m, 2 * m);
  om.topRightCorner(m, m).setIdentity();
  om.bottomLeftCorner(m, m) = -Matrix::Identity(m, m);
  return om;
}

CMatrix SpectralDecomposition::projector(Eigen::Index a) const {
  return basis.col(a) * basis_inv.row(a);
}

SpectralDecomposition decompose_generator(const Matrix& h, Convention convention) {
  require_square_even(h, "H");
  require_finite(h, "H");
  const SqrtPair sq = sqrt_pd(h, "H");
  const Matrix om = omega(ModeCount::from_dim(h.rows()));
  const Matrix k = sq.root * om * sq.root;
  const CMatrix ik = Complex(0.0, 1.0) * k.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (ik + ik.adjoint()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kIllConditioned, "eigensolver failed on the generator");
  }
  const CMatrix& w = es.eigenvectors();
  const Vector& mu = es.eigenvalues();

  SpectralDecomposition out;
  out.convention = convention;
  if (convention == Convention::kOmegaH) {
    // Omega H = H^{-1/2} K H^{1/2} and K = W diag(-i mu) W^dagger.
    out.angular = -mu;
    out.basis = sq.inv_root.cast<Complex>() * w;
    out.basis_inv = w.adjoint() * sq.root.cast<Complex>();
  } else {
    // -H Omega = H^{1/2} (-K) H^{-1/2}.
    out.angular = mu;
    out.basis = sq.root.cast<Complex>() * w;
    out.basis_inv = w.adjoint() * sq.inv_root.cast<Complex>();
  }
  const Eigen::Index n = mu.size() / 2;
  out.freqs = mu.tail(n).reverse();
  out.cond = std::sqrt(sq.cond);
  return out;
}

Matrix cov_from_ham(const Matrix& h, FunctionMethod method, double cond_max) {
  require_symmetric(h, "H");
  require_positive_definite(h, "H");
  if (method != FunctionMethod::kWilliamson) {
    const SpectralDecomposition sd = decompose_generator(h, Convention::kOmegaH);
    if (sd.cond <= cond_max) {
      // i Omega H has eigenvalue -w_a on u_a.
      const CMatrix coth_part =
          sd.basis *
          sd.angular.unaryExpr([](double w) { return 1.0 / std::tanh(-0.5 * w); })
              .cast<Complex>()
              .asDiagonal() *
          sd.basis_inv;
      const Matrix om = omega(ModeCount::from_dim(h.rows()));
      const CMatrix v = coth_part * (Complex(0.0, 0.5) * om.cast<Complex>());
      return symmetrized(v.real());
    }
    if (method == FunctionMethod::kSpectral) {
      std::ostringstream os;
      os << "eigenvector condition number " << sd.cond << " exceeds " << cond_max;
      throw Error(ErrorCode::kIllConditioned, os.str());
    }
  }
  return cov_via_williamson(h);
}

Matrix ham_from_cov(const Matrix& v, FunctionMethod method, double cond_max) {
  require_symmetric(v, "V");
  require_positive_definite(v, "V");
  const WilliamsonDecomposition wv = williamson(v);
  require_faithful(wv.d, "V");
  if (method != FunctionMethod::kWilliamson) {
    // V Omega = -(-V Omega) has eigenvalue -i w_a, so 2 i V Omega has 2 w_a.
    const SpectralDecomposition sd = decompose_generator(v, Convention::kMinusHOmega);
    if (sd.cond <= cond_max) {
      const CMatrix acoth_part =
          sd.basis *
          sd.angular.unaryExpr([](double w) { return arcoth(2.0 * w); })
              .cast<Complex>()
              .asDiagonal() *
          sd.basis_inv;
      const Matrix om = omega(ModeCount::from_dim(v.rows()));
      const CMatrix h = Complex(0.0, 2.0) * om.cast<Complex>() * acoth_part;
      return symmetrized(h.real());
    }
    if (method == FunctionMethod::kSpectral) {
      std::ostringstream os;
      os << "eigenvector condition number " << sd.cond << " exceeds " << cond_max;
      throw Error(ErrorCode::kIllConditioned, os.str());
    }
  }
  return ham_from_williamson(wv.s, wv.d);
}

Matrix ham_from_williamson(const Matrix& s, const Vector& d) {
  require_square_even(s, "S");
  require_finite(s, "S");
  if (s.rows() != 2 * d.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "S is " + dims(s) + " but D has " + std::to_string(d.size()) + " entries");
  }
  if (!is_symplectic(s)) throw Error(ErrorCode::kNotSymplectic, "S is not symplectic");
  require_faithful(d, "D");
  const Eigen::Index n = d.size();
  Vector a(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) a(k) = a(k + n) = arcoth(2.0 * d(k));
  const Matrix om = omega(ModeCount(static_cast<int>(n)));
  return symmetrized(-2.0 * om * s * a.asDiagonal() * s.transpose() * om);
}

WilliamsonDecomposition williamson(const Matrix& v) {
  require_square_even(v, "V");
  require_finite(v, "V");
  const SqrtPair sq = sqrt_pd(v, "V");
  const Eigen::Index dim = v.rows();
  const Eigen::Index n = dim / 2;
  const Matrix om = omega(ModeCount::from_dim(dim));
  const Matrix m = sq.root * om * sq.root;
  const CMatrix im = Complex(0.0, 1.0) * m.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (im + im.adjoint()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kIllConditioned, "eigensolver failed in williamson");
  }

  // Ascending order puts -nu_1 <= ... <= -nu_n first, i.e. nu descending.
  // Each such eigenvector w = (u + i v) / sqrt(2) has M u = -nu v, M v = nu u.
  Matrix o(dim, dim);
  WilliamsonDecomposition out;
  out.d.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    CVector w = es.eigenvectors().col(k);
    Eigen::Index big = 0;
    w.cwiseAbs().maxCoeff(&big);
    w *= std::conj(w(big)) / std::abs(w(big));
    o.col(k) = std::sqrt(2.0) * w.real();
    o.col(k + n) = std::sqrt(2.0) * w.imag();
    out.d(k) = -es.eigenvalues()(k);
  }
  Vector d2(dim);
  d2 << out.d, out.d;
  out.s = sq.root * o * d2.cwiseSqrt().cwiseInverse().asDiagonal();
  return out;
}

Vector symplectic_eigenvalues(const Matrix& v) {
  require_square_even(v, "V");
  const SqrtPair sq = sqrt_pd(v, "V");
  const Matrix om = omega(ModeCount::from_dim(v.rows()));
  const Matrix m = sq.root * om * sq.root;
  const CMatrix im = Complex(0.0, 1.0) * m.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (im + im.adjoint()), Eigen::EigenvaluesOnly);
  const Eigen::Index n = v.rows() / 2;
  return -es.eigenvalues().head(n);
}

double log_partition_from_cov(const Matrix& v) {
  require_square_even(v, "V");
  const Matrix om = omega(ModeCount::from_dim(v.rows()));
  const CMatrix a = v.cast<Complex>() + Complex(0.0, 0.5) * om.cast<Complex>();
  Eigen::LLT<CMatrix> llt(0.5 * (a + a.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotFaithful, "V + i Omega / 2 is not positive definite");
  }
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i).real());
  return 0.5 * log_det;
}

double log_partition_function(const Vector& mu, const Matrix& h) {
  if (mu.size() != h.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "mean length does not match H");
  }
  const Matrix v = cov_from_ham(h);
  require_faithful(symplectic_eigenvalues(v), "V(H)");
  return log_partition_from_cov(v);
}

double partition_function(const Vector& mu, const Matrix& h) {
  return std::exp(log_partition_function(mu, h));
}

Matrix symplectic_evolution(const Matrix& h, double t, Convention convention) {
  require_square_even(h, "H");
  const Matrix om = omega(ModeCount::from_dim(h.rows()));
  const Matrix gen = convention == Convention::kOmegaH ? Matrix(om * h) : Matrix(-h * om);
  return Matrix(gen * t).exp();
}

bool is_symplectic(const Matrix& s, double tolerance) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() == 0) return false;
  const Matrix om = omega(ModeCount::from_dim(s.rows()));
  return (s * om * s.transpose() - om).cwiseAbs().maxCoeff() <= tolerance;
}

void require_symmetric(const Matrix& m, const char* name, double tolerance) {
  require_square_even(m, name);
  require_finite(m, name);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tolerance) {
    std::ostringstream os;
    os << name << " is not symmetric (max |m - m^T| = " << asym << ")";
    throw Error(ErrorCode::kNotSymmetric, os.str());
  }
}

double require_positive_definite(const Matrix& m, const char* name) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << name << " is not positive definite (smallest eigenvalue " << lo << ")";
    throw Error(ErrorCode::kNotPositiveDefinite, os.str());
  }
  return lo;
}

GaussianThermalState::GaussianThermalState(Vector mu, Matrix ham, Matrix cov)
    : mu_(std::move(mu)), ham_(std::move(ham)), cov_(std::move(cov)) {
  will_ = gaussgeo::williamson(cov_);
  require_faithful(will_.d, "state");
  log_z_ = log_partition_from_cov(cov_);
}

namespace {
void require_mean(const Vector& mu, const Matrix& m) {
  if (!mu.allFinite()) throw Error(ErrorCode::kInvalidArgument, "mean has non-finite entries");
  if (mu.size() != m.rows() || m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "mean has length " + std::to_string(mu.size()) +
                                                   " but the matrix is " + dims(m));
  }
}
}  // namespace

GaussianThermalState GaussianThermalState::from_hamiltonian(const Vector& mu, const Matrix& h) {
  require_mean(mu, h);
  require_symmetric(h, "H");
  const Matrix hs = symmetrized(h);
  return GaussianThermalState(mu, hs, cov_from_ham(hs));
}

GaussianThermalState GaussianThermalState::from_covariance(const Vector& mu, const Matrix& v) {
  require_mean(mu, v);
  require_symmetric(v, "V");
  const Matrix vs = symmetrized(v);
  return GaussianThermalState(mu, ham_from_cov(vs), vs);
}

GaussianThermalState validate_state(const Vector& mu, const Matrix& matrix, MatrixKind kind) {
  return kind == MatrixKind::kHamiltonian ? GaussianThermalState::from_hamiltonian(mu, matrix)
                                          : GaussianThermalState::from_covariance(mu, matrix);
}

}  // namespace gaussgeo
