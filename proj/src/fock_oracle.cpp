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

#include "gaussgeo/fock_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace gaussgeo::fock {

namespace {

constexpr int kMaxSize = 4096;

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Tensor product over modes; unset factors are identities.
CMatrix kron_all(const std::vector<const CMatrix*>& factors, int cutoff) {
  const CMatrix eye = CMatrix::Identity(cutoff, cutoff);
  CMatrix out = factors[0] != nullptr ? *factors[0] : eye;
  for (std::size_t k = 1; k < factors.size(); ++k) {
    out = kron(out, factors[k] != nullptr ? *factors[k] : eye);
  }
  return out;
}

int int_pow(int base, int e) {
  long long out = 1;
  for (int i = 0; i < e; ++i) {
    out *= base;
    if (out > kMaxSize) return kMaxSize + 1;
  }
  return static_cast<int>(out);
}

// Re sum_kl w_kl a_kl conj(b_kl).
double weighted_inner(const Matrix& w, const CMatrix& a, const CMatrix& b) {
  return (w.array() * (a.array() * b.array().conjugate()).real()).sum();
}

Matrix kernel_matrix(const OracleState& s, KernelKind kind) {
  const Vector& g = s.generator_eigenvalues();
  const int d = s.size();
  Matrix f(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) f(k, l) = kernel_ft(kind, g(k) - g(l));
  }
  return f;
}

Matrix pair_sums(const OracleState& s) {
  const Vector& lam = s.eigenvalues();
  return lam.replicate(1, lam.size()) + lam.transpose().replicate(lam.size(), 1);
}

double diag_average(const OracleState& s, const CMatrix& y) {
  return (s.eigenvalues().array() * y.diagonal().real().array()).sum();
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix channel_gram(const OracleState& s, const std::vector<CMatrix>& dg, KernelKind left,
                    bool apply_left, KernelKind right, Basis basis) {
  const std::size_t count = dg.size();
  const Matrix sums = pair_sums(s);
  std::vector<CMatrix> y(count);
  std::vector<double> avg(count);
  for (std::size_t i = 0; i < count; ++i) {
    y[i] = basis == Basis::kEigen ? dg[i] : s.to_eigenbasis(dg[i]);
    avg[i] = diag_average(s, y[i]);
  }
  const Matrix fl = kernel_matrix(s, left);
  const Matrix fr = kernel_matrix(s, right);
  Matrix out(count, count);
  for (std::size_t i = 0; i < count; ++i) {
    const CMatrix a = apply_left ? CMatrix(y[i].cwiseProduct(fl.cast<Complex>())) : y[i];
    for (std::size_t j = 0; j < count; ++j) {
      const CMatrix b = y[j].cwiseProduct(fr.cast<Complex>());
      out(i, j) = 0.5 * weighted_inner(sums, a, b) - avg[i] * avg[j];
    }
  }
  return symmetrized(out);
}

Matrix eig_gram(const OracleState& s, const std::vector<CMatrix>& drho, double eig_floor,
                int* dropped, bool kubo_mori, Basis basis) {
  const Vector& lam = s.eigenvalues();
  const Vector& g = s.generator_eigenvalues();
  const int d = s.size();
  Matrix w(d, d);
  std::vector<std::pair<int, int>> skipped;
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const double x = lam(k), y = lam(l), sum = x + y;
      if (sum < eig_floor) {
        w(k, l) = 0.0;
        skipped.emplace_back(k, l);
        continue;
      }
      if (!kubo_mori) {
        w(k, l) = 2.0 / sum;
      } else {
        // Near the diagonal use the series of 2 atanh(z) / (z (x + y)); elsewhere
        // take ln x - ln y = g_l - g_k from the generator, which never underflows.
        const double z = (x - y) / sum;
        w(k, l) = std::abs(z) < 1e-5 ? 2.0 / sum * (1.0 + z * z / 3.0 + z * z * z * z / 5.0)
                                     : (g(l) - g(k)) / (x - y);
      }
    }
  }
  std::vector<CMatrix> y(drho.size());
  for (std::size_t i = 0; i < drho.size(); ++i) {
    y[i] = basis == Basis::kEigen ? drho[i] : s.to_eigenbasis(drho[i]);
  }
  if (dropped != nullptr) {
    *dropped = 0;
    for (const auto& [k, l] : skipped) {
      for (const auto& yi : y) {
        if (std::abs(yi(k, l)) > 0.0) {
          ++*dropped;
          break;
        }
      }
    }
  }
  Matrix out(drho.size(), drho.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) out(i, j) = weighted_inner(w, y[i], y[j]);
  }
  return symmetrized(out);
}

}  // namespace

FockRep::FockRep(ModeCount n, int cutoff) : n_(n.value()), cutoff_(cutoff) {
  if (cutoff < kEdgeLevels + 1) {
    throw Error(ErrorCode::kCutoffTooSmall, "cutoff must exceed " + std::to_string(kEdgeLevels));
  }
  size_ = int_pow(cutoff, n_);
  if (size_ > kMaxSize) {
    throw Error(ErrorCode::kInvalidArgument,
                "Fock dimension exceeds " + std::to_string(kMaxSize));
  }
  const int big = cutoff + 1;
  CMatrix a = CMatrix::Zero(big, big);
  for (int m = 0; m + 1 < big; ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  const double r = 1.0 / std::sqrt(2.0);
  const CMatrix q = r * (a + a.adjoint());
  const CMatrix p = Complex(0.0, -r) * (a - a.adjoint());
  const CMatrix* ops[2] = {&q, &p};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const CMatrix prod = 0.5 * (*ops[x] * *ops[y] + *ops[y] * *ops[x]);
      single_sym_.push_back(prod.topLeftCorner(cutoff, cutoff));
    }
  }
  single_quads_ = {q.topLeftCorner(cutoff, cutoff), p.topLeftCorner(cutoff, cutoff)};
  quads_.resize(2 * n_);
  for (int k = 0; k < n_; ++k) {
    quads_[k] = embed(single_quads_[0], k);
    quads_[n_ + k] = embed(single_quads_[1], k);
  }
}

CMatrix FockRep::embed(const CMatrix& single, int mode) const {
  std::vector<const CMatrix*> factors(n_, nullptr);
  factors[mode] = &single;
  return kron_all(factors, cutoff_);
}

CMatrix FockRep::sym_product(int i, int j) const {
  const int mi = mode_of(i), mj = mode_of(j);
  const int ai = i < n_ ? 0 : 1, aj = j < n_ ? 0 : 1;
  if (mi == mj) return embed(single_sym_[ai * 2 + aj], mi);
  // Different modes commute, so the product of the truncated factors is exact.
  std::vector<const CMatrix*> factors(n_, nullptr);
  factors[mi] = &single_quads_[ai];
  factors[mj] = &single_quads_[aj];
  return kron_all(factors, cutoff_);
}

CMatrix FockRep::materialize(const QuadraticObservable& obs, const Vector& mu) const {
  const int d = phase_dim();
  if (obs.dim() != d || mu.size() != d || obs.quad.rows() != d || obs.quad.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "observable does not match the Fock space");
  }
  // {x_i - mu_i, x_j - mu_j} / 2 = {x_i, x_j} / 2 - mu_j x_i - mu_i x_j + mu_i mu_j.
  double c = obs.c;
  Vector lin = obs.lin;
  for (int i = 0; i < d; ++i) {
    c -= obs.lin(i) * mu(i);
    for (int j = 0; j < d; ++j) {
      lin(i) -= obs.quad(i, j) * mu(j);
      lin(j) -= obs.quad(i, j) * mu(i);
      c += obs.quad(i, j) * mu(i) * mu(j);
    }
  }
  CMatrix out = c * CMatrix::Identity(size_, size_);
  for (int i = 0; i < d; ++i) {
    if (lin(i) != 0.0) out += lin(i) * quads_[i];
    for (int j = i; j < d; ++j) {
      const double coef = i == j ? obs.quad(i, i) : obs.quad(i, j) + obs.quad(j, i);
      if (coef != 0.0) out += coef * sym_product(i, j);
    }
  }
  return out;
}

CMatrix FockRep::generator(const Vector& mu, const Matrix& h) const {
  QuadraticObservable obs = QuadraticObservable::zero(phase_dim());
  obs.quad = 0.25 * (h + h.transpose());
  return materialize(obs, mu);
}

std::vector<int> FockRep::retained() const {
  std::vector<int> out;
  for (int idx = 0; idx < size_; ++idx) {
    int rest = idx;
    bool keep = true;
    for (int k = 0; k < n_; ++k) {
      keep = keep && (rest % cutoff_) < cutoff_ - kEdgeLevels;
      rest /= cutoff_;
    }
    if (keep) out.push_back(idx);
  }
  return out;
}

double FockRep::commutator_defect() const {
  const CMatrix& q = quads_[0];
  const CMatrix& p = quads_[n_];
  const CMatrix c = q * p - p * q - Complex(0.0, 1.0) * CMatrix::Identity(size_, size_);
  return max_abs_on(c, retained());
}

OracleState OracleState::from_generator(const CMatrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "generator must be square");
  }
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "generator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kIllConditioned, "eigensolver failed on the generator");
  }
  OracleState s;
  s.g_ = es.eigenvalues();
  s.q_ = es.eigenvectors();
  const double g0 = s.g_.minCoeff();
  s.log_z_ = -g0 + std::log((-(s.g_.array() - g0)).exp().sum());
  s.lambda_ = (-(s.g_.array() + s.log_z_)).exp();
  return s;
}

CMatrix OracleState::rho() const {
  return q_ * lambda_.cast<Complex>().asDiagonal() * q_.adjoint();
}

CMatrix OracleState::sqrt_rho() const {
  const Vector r = (-0.5 * (g_.array() + log_z_)).exp();
  return q_ * r.cast<Complex>().asDiagonal() * q_.adjoint();
}

CMatrix OracleState::log_rho() const {
  const Vector r = -(g_.array() + log_z_);
  return q_ * r.cast<Complex>().asDiagonal() * q_.adjoint();
}

double OracleState::expectation(const CMatrix& x) const {
  const CMatrix y = x * q_;
  double out = 0.0;
  for (int k = 0; k < size(); ++k) out += lambda_(k) * q_.col(k).dot(y.col(k)).real();
  return out;
}

FockGaussianState build_state(const FockRep& rep, const Vector& mu, const Matrix& h,
                              double fock_tol) {
  if (mu.size() != rep.phase_dim() || h.rows() != rep.phase_dim() || h.cols() != rep.phase_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not match the Fock space");
  }
  const Matrix hs = 0.5 * (h + h.transpose());
  const GaussianThermalState analytic = GaussianThermalState::from_hamiltonian(mu, hs);
  FockGaussianState out{OracleState::from_generator(rep.generator(mu, hs)), 0.0};
  out.trace_deficit = -std::expm1(out.state.log_trace() - analytic.log_partition());
  if (!(std::abs(out.trace_deficit) <= fock_tol)) {
    throw Error(ErrorCode::kCutoffTooSmall,
                "trace deficit " + std::to_string(out.trace_deficit) + " at cutoff " +
                    std::to_string(rep.cutoff()));
  }
  return out;
}

CMatrix channel_apply(const OracleState& state, const CMatrix& x, KernelKind kind) {
  const CMatrix y = state.to_eigenbasis(x).cwiseProduct(kernel_matrix(state, kind).cast<Complex>());
  return state.from_eigenbasis(y);
}

CMatrix channel_apply(const CMatrix& g_op, const CMatrix& x, KernelKind kind) {
  return channel_apply(OracleState::from_generator(g_op), x, kind);
}

CMatrix thermal_derivative_channel(const OracleState& state, const CMatrix& dg) {
  const CMatrix y = state.to_eigenbasis(dg);
  const double avg = diag_average(state, y);
  CMatrix r = -0.5 * y.cwiseProduct(kernel_matrix(state, KernelKind::kP).cast<Complex>())
                         .cwiseProduct(pair_sums(state).cast<Complex>());
  r.diagonal() += (avg * state.eigenvalues()).cast<Complex>();
  return state.from_eigenbasis(r);
}

CMatrix thermal_derivative_exact(const OracleState& state, const CMatrix& dg, Basis basis) {
  const Vector& g = state.generator_eigenvalues();
  const Vector& lam = state.eigenvalues();
  const int d = state.size();
  CMatrix y = basis == Basis::kEigen ? dg : state.to_eigenbasis(dg);
  const double avg = diag_average(state, y);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      // (e^{-g_k} - e^{-g_l}) / (g_k - g_l) / Z.
      const double delta = std::abs(g(k) - g(l));
      const double lo = g(k) <= g(l) ? lam(k) : lam(l);
      const double dd = delta == 0.0 ? -lam(k) : lo * std::expm1(-delta) / delta;
      y(k, l) *= dd;
    }
  }
  y.diagonal() += (avg * lam).cast<Complex>();
  return basis == Basis::kEigen ? y : state.from_eigenbasis(y);
}

Matrix fb_from_eig(const OracleState& state, const std::vector<CMatrix>& drho, double eig_floor,
                   int* dropped, Basis basis) {
  return eig_gram(state, drho, eig_floor, dropped, false, basis);
}

Matrix km_from_eig(const OracleState& state, const std::vector<CMatrix>& drho, double eig_floor,
                   int* dropped, Basis basis) {
  return eig_gram(state, drho, eig_floor, dropped, true, basis);
}

Matrix fb_from_channels(const OracleState& state, const std::vector<CMatrix>& dg, Basis basis) {
  return channel_gram(state, dg, KernelKind::kP, true, KernelKind::kP, basis);
}

Matrix km_from_channels(const OracleState& state, const std::vector<CMatrix>& dg, Basis basis) {
  return channel_gram(state, dg, KernelKind::kP, false, KernelKind::kP, basis);
}

Matrix fb_from_q_channel(const OracleState& state, const std::vector<CMatrix>& dg, Basis basis) {
  return channel_gram(state, dg, KernelKind::kQ, false, KernelKind::kQ, basis);
}

CMatrix sld_from_eig(const OracleState& state, const CMatrix& drho, double eig_floor) {
  const Matrix sums = pair_sums(state);
  CMatrix y = state.to_eigenbasis(drho);
  for (Eigen::Index k = 0; k < y.rows(); ++k) {
    for (Eigen::Index l = 0; l < y.cols(); ++l) {
      y(k, l) = sums(k, l) < eig_floor ? Complex(0.0) : y(k, l) * (2.0 / sums(k, l));
    }
  }
  return state.from_eigenbasis(y);
}

double fidelity(const OracleState& rho, const OracleState& sigma) {
  if (rho.size() != sigma.size()) throw Error(ErrorCode::kDimensionMismatch, "state sizes differ");
  const CMatrix a = rho.sqrt_rho() * sigma.sqrt_rho();
  Eigen::BDCSVD<CMatrix> svd(a);
  const double norm = svd.singularValues().sum();
  return norm * norm;
}

namespace {
// <sigma_k| rho |sigma_k> for each eigenvector of sigma.
Vector populations(const OracleState& rho, const OracleState& sigma) {
  const CMatrix o = sigma.eigenvectors().adjoint() * rho.eigenvectors();
  return o.cwiseAbs2() * rho.eigenvalues();
}

double neg_entropy(const OracleState& rho) {
  const Vector log_l = -(rho.generator_eigenvalues().array() + rho.log_trace());
  return (rho.eigenvalues().array() * log_l.array()).sum();
}
}  // namespace

double relative_entropy(const OracleState& rho, const OracleState& sigma, double eps) {
  if (rho.size() != sigma.size()) throw Error(ErrorCode::kDimensionMismatch, "state sizes differ");
  const Vector pop = populations(rho, sigma);
  const Vector log_s = (sigma.eigenvalues().array() + eps).log();
  return neg_entropy(rho) - pop.dot(log_s);
}

double relative_entropy_exact(const OracleState& rho, const OracleState& sigma) {
  if (rho.size() != sigma.size()) throw Error(ErrorCode::kDimensionMismatch, "state sizes differ");
  const Vector pop = populations(rho, sigma);
  const Vector log_s = -(sigma.generator_eigenvalues().array() + sigma.log_trace());
  return neg_entropy(rho) - pop.dot(log_s);
}

void perturb(Vector& mu, Matrix& h, const ParameterIndex& param, double step) {
  if (param.type == ParameterIndex::Type::kMean) {
    mu(param.m) += step;
  } else {
    h(param.k, param.l) += step;
  }
}

CMatrix finite_difference_drho(const FockRep& rep, const Vector& mu, const Matrix& h,
                               const ParameterIndex& param, double step, double fock_tol) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  Vector mu_p = mu, mu_m = mu;
  Matrix h_p = h, h_m = h;
  perturb(mu_p, h_p, param, step);
  perturb(mu_m, h_m, param, -step);
  const CMatrix rp = build_state(rep, mu_p, h_p, fock_tol).state.rho();
  const CMatrix rm = build_state(rep, mu_m, h_m, fock_tol).state.rho();
  return (rp - rm) / (2.0 * step);
}

double trace_norm(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double max_abs_on_populated(const OracleState& state, const CMatrix& a, double lambda_floor) {
  const CMatrix y = state.to_eigenbasis(a);
  std::vector<int> keep;
  for (int k = 0; k < state.size(); ++k) {
    if (state.eigenvalues()(k) >= lambda_floor) keep.push_back(k);
  }
  return max_abs_on(y, keep);
}

double max_abs_on(const CMatrix& a, const std::vector<int>& keep) {
  double m = 0.0;
  for (int i : keep) {
    for (int j : keep) m = std::max(m, std::abs(a(i, j)));
  }
  return m;
}

}  // namespace gaussgeo::fock
