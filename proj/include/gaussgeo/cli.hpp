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

// Command-line front end. All I/O is JSON; see README for the formats.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "gaussgeo/info_geometry.hpp"
#include "gaussgeo/quadrature.hpp"
#include "gaussgeo/symplectic.hpp"

namespace gaussgeo::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitSingular = 4,
  kExitOracle = 5,
};

int exit_code_for(ErrorCode code);

enum class PrefactorChoice { kPaperTheorem1, kProposition3, kOracleDefault };

struct StateSpec {
  int n_modes = 0;
  Vector mean;
  Matrix matrix;
  MatrixKind matrix_kind = MatrixKind::kHamiltonian;

  /// Accepts {"n_modes", "mean", "matrix", "matrix_kind"} or exactly one of
  /// "hamiltonian" / "covariance" in place of matrix and matrix_kind.
  static StateSpec from_json(const nlohmann::json& j);
  GaussianThermalState load() const;
};

struct RunConfig {
  QuadratureConfig quadrature;
  IndexMode index_mode = IndexMode::kSymmetricReduced;
  PrefactorChoice mean_block_prefactor = PrefactorChoice::kOracleDefault;
  int fock_cutoff = 60;
  double fock_tol = 1e-8;
  int output_precision = 17;
  std::optional<std::filesystem::path> data_dir;  // defaults to gaussgeo_data next to the binary

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Resolved numeric prefactor. OracleDefault reads the persisted record and
/// throws InvalidArgument when none exists.
double resolve_prefactor(const RunConfig& config);

/// Parses argv, runs one subcommand, writes JSON to `out` (or --output) and
/// returns the exit code. Errors are reported as {"error": {...}}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const char* name);

}  // namespace gaussgeo::cli
