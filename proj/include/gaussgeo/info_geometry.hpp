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

// Fisher-Bures and Kubo-Mori information matrices of the thermal family
// rho(mu, H) in the coordinates (mu_1..mu_2n, h_11, h_21, ..., h_2n,2n).

#include <string>
#include <vector>

#include "gaussgeo/kernels.hpp"
#include "gaussgeo/symplectic.hpp"

namespace gaussgeo {

/// One coordinate of the parameter vector. Indices are 0-based internally;
/// labels and parsing use 1-based indices ("mu_1", "h_1_2", "mu:1", "h:1,2").
struct ParameterIndex {
  enum class Type { kMean, kHam };
  Type type = Type::kMean;
  int m = 0;
  int k = 0;
  int l = 0;

  static ParameterIndex mean(int m) { return {Type::kMean, m, 0, 0}; }
  static ParameterIndex ham(int k, int l) { return {Type::kHam, 0, k, l}; }

  /// Parses "mu:m" or "h:k,l" against a 2n-dimensional phase space.
  static ParameterIndex parse(const std::string& text, int dim);

  std::string label() const;
  bool operator==(const ParameterIndex&) const = default;
};

enum class InfoKind { kFisherBures, kKuboMori };
enum class IndexMode { kFullRedundant, kSymmetricReduced };

const char* to_string(InfoKind kind);
const char* to_string(IndexMode mode);
KernelKind kernel_for(InfoKind kind);

/// Mean indices first; Ham indices column-major (l outer, k inner), with
/// k <= l only in reduced mode.
std::vector<ParameterIndex> index_map(ModeCount n, IndexMode mode);

/// J with theta_full = J theta_reduced, so M_reduced = J^T M_full J.
Matrix duplication_jacobian(ModeCount n);

/// The two candidate normalizations of the mean block. The Hamiltonian-block
/// fourth-moment term carries the same factor, divided by 4.
inline constexpr double kPrefactorAssembled = 2.0;
inline constexpr double kPrefactorAnticommutator = 1.0;

struct InfoOptions {
  double prefactor = kPrefactorAnticommutator;
  EvalPath path = EvalPath::kAuto;
  QuadratureConfig quadrature;
};

struct InfoMatrix {
  InfoKind kind = InfoKind::kFisherBures;
  IndexMode index_mode = IndexMode::kFullRedundant;
  double prefactor = kPrefactorAnticommutator;
  Matrix data;
  std::vector<ParameterIndex> index;

  Eigen::Index size() const { return data.rows(); }
  int dim() const;  // phase-space dimension 2n
  Matrix mean_block() const;
  double min_eigenvalue() const;
};

InfoMatrix information_matrix(InfoKind kind, const GaussianThermalState& state, IndexMode mode,
                              const InfoOptions& options = {});
InfoMatrix fisher_bures(const GaussianThermalState& state, IndexMode mode,
                        const InfoOptions& options = {});
InfoMatrix kubo_mori(const GaussianThermalState& state, IndexMode mode,
                     const InfoOptions& options = {});

inline constexpr double kBuresLineCoefficient = 0.25;
inline constexpr double kRelativeEntropyLineCoefficient = 0.5;

/// (1/4) dtheta^T I dtheta, the squared Bures distance to second order.
double bures_line_element(const InfoMatrix& info, const Vector& dtheta);

/// (1/2) dtheta^T I dtheta, the relative entropy D(rho(theta) || rho(theta + dtheta))
/// to second order.
double km_line_element(const InfoMatrix& info, const Vector& dtheta);

struct CrbResult {
  double bound = 0.0;
  double condition = 0.0;  // 2-norm condition number of the information matrix
  int rank = 0;
  bool pseudo_inverse = false;
};

/// (1 / n_copies) Tr[weight I^{-1}]. FullRedundant metrics are singular by
/// construction and need `pseudo_inverse`, which bounds only the identifiable
/// directions.
CrbResult crb_scalar(const InfoMatrix& info, const Matrix& weight, int n_copies,
                     bool pseudo_inverse = false);

}  // namespace gaussgeo
