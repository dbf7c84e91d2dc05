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

// Identity checks of the closed forms against the Fock oracle, the
// mean-block normalization experiment, and persistence of its outcome.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaussgeo/fock_oracle.hpp"
#include "gaussgeo/info_geometry.hpp"

namespace gaussgeo {

/// residual <= bound, or residual >= bound when `at_least` (observed orders).
struct OracleCheck {
  std::string name;
  double residual = 0.0;
  double bound = 0.0;
  bool passed = false;
  bool at_least = false;
};

OracleCheck make_check(std::string name, double residual, double bound, bool at_least = false);

/// One (mu, H) instance together with its Fock cutoff.
struct ReferenceState {
  std::string label;
  Vector mu;
  Matrix h;
  int cutoff = 60;
};

/// Single mode: thermal nu in {0.8, 1, 2} and one anisotropic H, all displaced.
/// Optionally one two-mode state at `cutoff_two_mode`.
std::vector<ReferenceState> reference_states(int cutoff, bool two_mode = false,
                                             int cutoff_two_mode = 24);

/// Everything the checks share for one reference state.
class OracleContext {
 public:
  OracleContext(const ReferenceState& ref, double fock_tol = fock::kFockTol);

  const ReferenceState& ref() const { return ref_; }
  const GaussianThermalState& analytic() const { return analytic_; }
  const fock::FockRep& rep() const { return rep_; }
  const fock::FockGaussianState& fock_state() const { return fock_; }
  const fock::OracleState& state() const { return fock_.state; }
  double fock_tol() const { return fock_tol_; }

  /// FullRedundant coordinates and, in the eigenbasis of rho, dG and exact d rho.
  const std::vector<ParameterIndex>& params() const { return params_; }
  const std::vector<CMatrix>& dg_eigen() const { return dg_eigen_; }
  const std::vector<CMatrix>& drho_eigen() const { return drho_eigen_; }

 private:
  ReferenceState ref_;
  double fock_tol_;
  GaussianThermalState analytic_;
  fock::FockRep rep_;
  fock::FockGaussianState fock_;
  std::vector<ParameterIndex> params_;
  std::vector<CMatrix> dg_eigen_;
  std::vector<CMatrix> drho_eigen_;
};

std::vector<OracleCheck> check_state_construction(const OracleContext& ctx);
std::vector<OracleCheck> check_moments(const OracleContext& ctx);
std::vector<OracleCheck> check_information_matrices(const OracleContext& ctx, double prefactor,
                                                    double tolerance = 2e-4);
std::vector<OracleCheck> check_derivative_routes(const OracleContext& ctx);
std::vector<OracleCheck> check_state_derivatives(const OracleContext& ctx,
                                                 bool finite_differences = true,
                                                 double step = 1e-4);
std::vector<OracleCheck> check_sld(const OracleContext& ctx);
std::vector<OracleCheck> check_heisenberg_evolution(const OracleContext& ctx);
std::vector<OracleCheck> check_channels(const OracleContext& ctx);

/// Raw second-order data along one fixed direction in the reduced coordinates.
struct LineElementSample {
  double scale = 0.0;
  double bures = 0.0;        // 2 (1 - sqrt F)
  double rel_entropy = 0.0;  // D(rho(theta) || rho(theta + dtheta))
  double fb_form = 0.0;      // dtheta^T I_FB dtheta
  double km_form = 0.0;      // dtheta^T I_KM dtheta
};
std::vector<LineElementSample> line_element_scan(const ReferenceState& ref, double prefactor,
                                                 const std::vector<double>& scales,
                                                 double fock_tol = fock::kFockTol);

/// Relative error at the largest scale <= rel_tol and observed order of the
/// residual |lhs - coefficient * form| >= min_order between successive scales.
std::vector<OracleCheck> check_line_element(const std::string& name,
                                            const std::vector<LineElementSample>& scan,
                                            bool kubo_mori, double coefficient,
                                            double rel_tol = 1e-2, double min_order = 2.8);

/// Relative entropy at two regularizations against the exact logarithm.
std::vector<OracleCheck> check_relative_entropy_regularization(const ReferenceState& ref,
                                                               double fock_tol = fock::kFockTol);

/// Route identities on random non-Gaussian generators G(theta) = G0 + sum theta_i G_i.
std::vector<OracleCheck> check_generic_identities(std::uint64_t seed, int cases = 4,
                                                    int levels = 6);

struct PrefactorTrial {
  double prefactor = 0.0;
  double fb_residual = 0.0;
  double km_residual = 0.0;
  bool passed = false;
};

struct PrefactorDecision {
  std::vector<PrefactorTrial> trials;
  double oracle_residual = 0.0;  // oracle against the closed forms
  std::optional<double> resolved;
};

/// Closed-form mean blocks at one prefactor against the displaced thermal values.
PrefactorTrial displacement_trial(double prefactor, const std::vector<double>& nus);

/// Displaced thermal states H = beta I: the mean blocks must equal
/// 2 tanh(beta / 2) I = I / nu (Fisher-Bures) and beta I (Kubo-Mori).
PrefactorDecision discriminate_prefactor(const std::vector<double>& nus = {0.8, 1.0, 2.0},
                                         int cutoff = 60, double tolerance = 1e-6);

std::filesystem::path default_data_dir();
std::filesystem::path prefactor_record_path(const std::filesystem::path& data_dir);
void save_prefactor_record(const std::filesystem::path& data_dir, const PrefactorDecision& d);
std::optional<double> load_prefactor_record(const std::filesystem::path& data_dir);

struct OracleSuiteOptions {
  bool quick = false;
  int cutoff = 60;
  int cutoff_quick = 40;
  int cutoff_two_mode = 24;
  double fock_tol = fock::kFockTol;
  std::optional<double> prefactor;  // forced; otherwise the discriminated value
  std::uint64_t seed = 20260;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  PrefactorDecision decision;
  double prefactor_used = 0.0;

  bool passed() const;
  double max_residual() const;
  const OracleCheck* first_failure() const;
};

OracleReport run_oracle_suite(const OracleSuiteOptions& options);

nlohmann::json to_json(const OracleCheck& c);
nlohmann::json to_json(const PrefactorDecision& d);
nlohmann::json to_json(const OracleReport& r);

}  // namespace gaussgeo
