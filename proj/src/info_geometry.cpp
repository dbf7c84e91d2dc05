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

#include "gaussgeo/info_geometry.hpp"

#include <cmath>
#include <regex>
#include <sstream>

namespace gaussgeo {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void require_dtheta(const InfoMatrix& info, const Vector& dtheta) {
  if (dtheta.size() != info.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dtheta has length " + std::to_string(dtheta.size()) + ", expected " +
                    std::to_string(info.size()));
  }
}

}  // namespace

ParameterIndex ParameterIndex::parse(const std::string& text, int dim) {
  static const std::regex mean_re(R"(\s*mu\s*:\s*(\d+)\s*)");
  static const std::regex ham_re(R"(\s*h\s*:\s*(\d+)\s*,\s*(\d+)\s*)");
  std::smatch match;
  auto in_range = [dim](long v) { return v >= 1 && v <= dim; };
  if (std::regex_match(text, match, mean_re)) {
    const long m = std::stol(match[1]);
    if (in_range(m)) return mean(static_cast<int>(m - 1));
  } else if (std::regex_match(text, match, ham_re)) {
    const long k = std::stol(match[1]);
    const long l = std::stol(match[2]);
    if (in_range(k) && in_range(l)) return ham(static_cast<int>(k - 1), static_cast<int>(l - 1));
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "parameter '" + text + "' is not of the form mu:m or h:k,l");
  }
  throw Error(ErrorCode::kInvalidArgument,
              "parameter '" + text + "' out of range 1.." + std::to_string(dim));
}

std::string ParameterIndex::label() const {
  if (type == Type::kMean) return "mu_" + std::to_string(m + 1);
  return "h_" + std::to_string(k + 1) + "_" + std::to_string(l + 1);
}

const char* to_string(InfoKind kind) {
  return kind == InfoKind::kFisherBures ? "FisherBures" : "KuboMori";
}

const char* to_string(IndexMode mode) {
  return mode == IndexMode::kFullRedundant ? "FullRedundant" : "SymmetricReduced";
}

KernelKind kernel_for(InfoKind kind) {
  return kind == InfoKind::kFisherBures ? KernelKind::kQ : KernelKind::kP;
}

std::vector<ParameterIndex> index_map(ModeCount n, IndexMode mode) {
  const int d = n.dim();
  std::vector<ParameterIndex> out;
  for (int m = 0; m < d; ++m) out.push_back(ParameterIndex::mean(m));
  for (int l = 0; l < d; ++l) {
    const int k_end = mode == IndexMode::kFullRedundant ? d : l + 1;
    for (int k = 0; k < k_end; ++k) out.push_back(ParameterIndex::ham(k, l));
  }
  return out;
}

Matrix duplication_jacobian(ModeCount n) {
  const auto full = index_map(n, IndexMode::kFullRedundant);
  const auto reduced = index_map(n, IndexMode::kSymmetricReduced);
  Matrix j = Matrix::Zero(static_cast<Eigen::Index>(full.size()),
                          static_cast<Eigen::Index>(reduced.size()));
  for (std::size_t r = 0; r < full.size(); ++r) {
    ParameterIndex p = full[r];
    if (p.type == ParameterIndex::Type::kHam && p.k > p.l) std::swap(p.k, p.l);
    for (std::size_t c = 0; c < reduced.size(); ++c) {
      if (reduced[c] == p) j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0;
    }
  }
  return j;
}

int InfoMatrix::dim() const {
  int mean_count = 0;
  for (const auto& p : index) mean_count += p.type == ParameterIndex::Type::kMean;
  return mean_count;
}

Matrix InfoMatrix::mean_block() const {
  const int d = dim();
  return data.topLeftCorner(d, d);
}

double InfoMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(data), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

InfoMatrix information_matrix(InfoKind kind, const GaussianThermalState& state, IndexMode mode,
                              const InfoOptions& options) {
  if (!(options.prefactor > 0.0) || !std::isfinite(options.prefactor)) {
    throw Error(ErrorCode::kInvalidArgument, "mean-block prefactor must be positive");
  }
  const KernelKind w = kernel_for(kind);
  const Matrix& h = state.ham();
  const Matrix& v = state.cov();
  const int d = state.dim();
  const ModeCount n = state.modes();

  // Mean block: prefactor * H V K_w H with K_w = \int w(t) exp(-H Omega t) dt.
  const Matrix k_w =
      weighted_evolution_integral(w, h, Convention::kMinusHOmega, options.path, options.quadrature);
  const Matrix mean = symmetrized(options.prefactor * h * v * k_w * h);

  const Tensor4 fourth = weighted_fourth_moment_integral(w, h, v, options.path, options.quadrature);
  const double c4 = 0.25 * options.prefactor;

  const int full_size = d + d * d;
  Matrix full = Matrix::Zero(full_size, full_size);
  full.topLeftCorner(d, d) = mean;
  for (int l1 = 0; l1 < d; ++l1) {
    for (int k1 = 0; k1 < d; ++k1) {
      const int r = d + l1 * d + k1;
      for (int l2 = 0; l2 < d; ++l2) {
        for (int k2 = 0; k2 < d; ++k2) {
          const int c = d + l2 * d + k2;
          full(r, c) = c4 * fourth(k1, l1, k2, l2) - 0.25 * v(k1, l1) * v(k2, l2);
        }
      }
    }
  }
  full.bottomRightCorner(d * d, d * d) = symmetrized(full.bottomRightCorner(d * d, d * d));

  InfoMatrix out;
  out.kind = kind;
  out.index_mode = mode;
  out.prefactor = options.prefactor;
  out.index = index_map(n, mode);
  if (mode == IndexMode::kFullRedundant) {
    out.data = std::move(full);
  } else {
    const Matrix j = duplication_jacobian(n);
    out.data = symmetrized(j.transpose() * full * j);
    // The Jacobian never mixes mean and Hamiltonian coordinates.
    const Eigen::Index rest = out.data.rows() - d;
    out.data.topRightCorner(d, rest).setZero();
    out.data.bottomLeftCorner(rest, d).setZero();
  }
  return out;
}

InfoMatrix fisher_bures(const GaussianThermalState& state, IndexMode mode,
                        const InfoOptions& options) {
  return information_matrix(InfoKind::kFisherBures, state, mode, options);
}

InfoMatrix kubo_mori(const GaussianThermalState& state, IndexMode mode,
                     const InfoOptions& options) {
  return information_matrix(InfoKind::kKuboMori, state, mode, options);
}

double bures_line_element(const InfoMatrix& info, const Vector& dtheta) {
  if (info.kind != InfoKind::kFisherBures) {
    throw Error(ErrorCode::kInvalidArgument, "Bures line element needs a Fisher-Bures matrix");
  }
  require_dtheta(info, dtheta);
  return kBuresLineCoefficient * dtheta.dot(info.data * dtheta);
}

double km_line_element(const InfoMatrix& info, const Vector& dtheta) {
  if (info.kind != InfoKind::kKuboMori) {
    throw Error(ErrorCode::kInvalidArgument, "relative-entropy line element needs a Kubo-Mori matrix");
  }
  require_dtheta(info, dtheta);
  return kRelativeEntropyLineCoefficient * dtheta.dot(info.data * dtheta);
}

CrbResult crb_scalar(const InfoMatrix& info, const Matrix& weight, int n_copies,
                     bool pseudo_inverse) {
  if (n_copies < 1) throw Error(ErrorCode::kInvalidArgument, "n_copies must be >= 1");
  if (weight.rows() != info.size() || weight.cols() != info.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weight must be " + std::to_string(info.size()) + " x " +
                    std::to_string(info.size()));
  }
  if (!weight.allFinite()) throw Error(ErrorCode::kInvalidArgument, "weight has non-finite entries");
  if ((weight - weight.transpose()).cwiseAbs().maxCoeff() > tol::kSym) {
    throw Error(ErrorCode::kNotSymmetric, "weight is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> ws(symmetrized(weight), Eigen::EigenvaluesOnly);
  if (ws.eigenvalues().size() > 0 &&
      ws.eigenvalues()(0) < -1e-12 * std::max(1.0, ws.eigenvalues().cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kInvalidArgument, "weight is not positive semidefinite");
  }
  if (info.index_mode == IndexMode::kFullRedundant && !pseudo_inverse) {
    throw Error(ErrorCode::kSingularMatrix,
                "FullRedundant metric has duplicated coordinates; use SymmetricReduced or a "
                "pseudo-inverse");
  }

  const Matrix a = symmetrized(info.data);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const Vector& lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  const double cutoff = top * 1e-12 * static_cast<double>(a.rows());
  CrbResult out;
  out.pseudo_inverse = pseudo_inverse;
  out.rank = static_cast<int>((lam.array() > cutoff).count());
  out.condition = lam(0) > 0.0 ? top / lam(0) : HUGE_VAL;

  if (!pseudo_inverse) {
    Eigen::LDLT<Matrix> ldlt(a);
    if (ldlt.info() != Eigen::Success || out.rank < a.rows() || !ldlt.isPositive()) {
      throw Error(ErrorCode::kSingularMatrix, "information matrix is singular");
    }
    out.bound = ldlt.solve(weight).trace() / n_copies;
    return out;
  }
  const Matrix& q = es.eigenvectors();
  Vector inv = Vector::Zero(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) inv(i) = 1.0 / lam(i);
  }
  out.bound = (q * inv.asDiagonal() * q.transpose() * weight).trace() / n_copies;
  return out;
}

}  // namespace gaussgeo
