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

// Acceptance suite: one PASS/FAIL line per criterion.
//   gaussgeo_acceptance [--criterion K]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "gaussgeo/errors.hpp"
#include "gaussgeo/fock_oracle.hpp"
#include "gaussgeo/info_geometry.hpp"
#include "gaussgeo/kernels.hpp"
#include "gaussgeo/oracle_suite.hpp"
#include "test_util.hpp"

namespace gaussgeo {
namespace {

using testing::max_abs;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records one residual against its bound.
  void bound(const std::string& what, double residual, double limit) {
    const bool ok = std::isfinite(residual) && residual <= limit;
    pass = pass && ok;
    detail << " " << what << "=" << fmt(residual) << (ok ? "<=" : ">") << fmt(limit);
  }
  void require(const std::string& what, bool ok) {
    pass = pass && ok;
    detail << " " << what << "=" << (ok ? "yes" : "no");
  }
  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<ReferenceState> single_mode_states() { return reference_states(60); }

PrefactorDecision& decision() {
  static PrefactorDecision d = discriminate_prefactor();
  return d;
}

double resolved_prefactor() {
  return decision().resolved.value_or(std::numeric_limits<double>::quiet_NaN());
}

void conversions(Outcome& out) {
  Timer timer;
  std::mt19937_64 rng(20260101);
  double round = 0.0, recon = 0.0, symp = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const Matrix h = testing::random_hamiltonian(rng, n);
    const Matrix v = cov_from_ham(h);
    round = std::max(round, max_abs(ham_from_cov(v) - h));
    const WilliamsonDecomposition w = williamson(v);
    Vector dd(2 * n);
    dd << w.d, w.d;
    recon = std::max(recon, max_abs(w.s * dd.asDiagonal() * w.s.transpose() - v));
    const Matrix om = omega(ModeCount(n));
    symp = std::max(symp, max_abs(w.s * om * w.s.transpose() - om));
  }
  out.bound("round_trip", round, 1e-9);
  out.bound("williamson", recon, 1e-9);
  out.bound("symplectic", symp, 1e-9);
  out.bound("seconds", timer.seconds(), 10.0);
}

void kernel_identities(Outcome& out) {
  const QuadratureConfig cfg;
  for (KernelKind kind : {KernelKind::kP, KernelKind::kQ}) {
    const auto mass = integrate_weighted(kind, [](double) { return Eigen::VectorXd::Ones(1); }, cfg);
    out.bound(std::string("mass_") + to_string(kind), std::abs(mass.value(0) - 1.0), 1e-9);
    double ft = 0.0;
    for (double w : {0.1, 1.0, 5.0, 20.0}) {
      const auto r = integrate_weighted(
          kind, [w](double t) { return Eigen::VectorXd::Constant(1, std::cos(w * t)); }, cfg);
      ft = std::max(ft, std::abs(r.value(0) - kernel_ft(kind, w)));
    }
    out.bound(std::string("fourier_") + to_string(kind), ft, 1e-7);
  }
}

void dual_path(Outcome& out) {
  Timer timer;
  std::mt19937_64 rng(20260102);
  double evo = 0.0, fourth = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    const Matrix h = testing::random_hamiltonian(rng, n);
    const Matrix v = cov_from_ham(h);
    for (KernelKind kind : {KernelKind::kP, KernelKind::kQ}) {
      for (Convention c : {Convention::kOmegaH, Convention::kMinusHOmega}) {
        evo = std::max(evo, max_abs(weighted_evolution_integral(kind, h, c, EvalPath::kSpectral) -
                                    weighted_evolution_integral(kind, h, c, EvalPath::kQuadrature)));
      }
      fourth = std::max(fourth, weighted_fourth_moment_integral(kind, h, v, EvalPath::kSpectral)
                                    .max_abs_diff(weighted_fourth_moment_integral(
                                        kind, h, v, EvalPath::kQuadrature)));
    }
  }
  out.bound("evolution", evo, 1e-8);
  out.bound("fourth_moment", fourth, 1e-8);
  out.bound("seconds", timer.seconds(), 120.0);
}

void information_vs_oracle(Outcome& out) {
  Timer timer;
  const double prefactor = resolved_prefactor();
  out.detail << " prefactor=" << prefactor;
  double fb = 0.0, km = 0.0, cross_oracle = 0.0, cross_exact = 0.0;
  for (const ReferenceState& ref : single_mode_states()) {
    const OracleContext ctx(ref);
    for (const OracleCheck& c : check_information_matrices(ctx, prefactor)) {
      if (c.name.rfind("fb_matrix", 0) == 0) fb = std::max(fb, c.residual);
      if (c.name.rfind("km_matrix", 0) == 0) km = std::max(km, c.residual);
      if (c.name.find("cross_block_oracle") != std::string::npos) {
        cross_oracle = std::max(cross_oracle, c.residual);
      }
      if (c.name.rfind("cross_block_analytic", 0) == 0) cross_exact = std::max(cross_exact, c.residual);
    }
  }
  out.bound("fb", fb, 2e-4);
  out.bound("km", km, 2e-4);
  out.bound("cross_oracle", cross_oracle, 1e-8);
  out.bound("cross_analytic", cross_exact, 0.0);
  out.bound("seconds", timer.seconds(), 180.0);
}

void prefactor_discrimination(Outcome& out) {
  const PrefactorDecision& d = decision();
  int passing = 0;
  for (const auto& t : d.trials) {
    passing += t.passed;
    out.detail << " c=" << t.prefactor << ":" << (t.passed ? "pass" : "fail") << "(fb "
               << Outcome::fmt(t.fb_residual) << ", km " << Outcome::fmt(t.km_residual) << ")";
  }
  out.bound("oracle_vs_closed_form", d.oracle_residual, 1e-6);
  out.require("exactly_one", passing == 1 && d.resolved.has_value());
  const auto dir = default_data_dir();
  save_prefactor_record(dir, d);
  const auto loaded = load_prefactor_record(dir);
  out.require("recorded", loaded.has_value() && d.resolved && *loaded == *d.resolved);
  if (d.resolved) out.detail << " resolved=" << *d.resolved;
}

void derivatives_vs_fd(Outcome& out) {
  double fd = 0.0;
  for (const ReferenceState& ref : single_mode_states()) {
    if (ref.label != "thermal_nu=1.0" && ref.label != "anisotropic") continue;
    const OracleContext ctx(ref);
    for (const OracleCheck& c : check_state_derivatives(ctx, true, 1e-4)) {
      if (c.name.rfind("derivative_vs_finite_difference", 0) == 0) fd = std::max(fd, c.residual);
    }
  }
  out.bound("trace_norm", fd, 1e-5);
}

void sld_consistency(Outcome& out) {
  double relation = 0.0, coeff = 0.0;
  for (const ReferenceState& ref : single_mode_states()) {
    const OracleContext ctx(ref);
    for (const OracleCheck& c : check_sld(ctx)) {
      if (c.name.rfind("sld_relation_retained", 0) == 0) relation = std::max(relation, c.residual);
      if (c.name.rfind("sld_coefficients", 0) == 0) coeff = std::max(coeff, c.residual);
    }
  }
  out.bound("relation", relation, 1e-8);
  out.bound("coefficients", coeff, 1e-10);
}

void line_elements(Outcome& out) {
  // Both second-order expansions are tested against the coefficient 1/4.
  constexpr double kQuarter = 0.25;
  double rel_b = 0.0, rel_k = 0.0, ord_b = 1e300, ord_k = 1e300, ratio = 0.0;
  for (const ReferenceState& ref : single_mode_states()) {
    const auto scan = line_element_scan(ref, resolved_prefactor(), {1e-2, 5e-3, 2.5e-3});
    for (const auto& c : check_line_element("bures", scan, false, kQuarter)) {
      if (c.at_least) {
        ord_b = std::min(ord_b, c.residual);
      } else {
        rel_b = std::max(rel_b, c.residual);
      }
    }
    for (const auto& c : check_line_element("km", scan, true, kQuarter)) {
      if (c.at_least) {
        ord_k = std::min(ord_k, c.residual);
      } else {
        rel_k = std::max(rel_k, c.residual);
      }
    }
    ratio = std::max(ratio, scan.back().rel_entropy / scan.back().km_form);
  }
  out.bound("bures_rel_err", rel_b, 1e-2);
  out.require("bures_order>=2.8", ord_b >= 2.8);
  out.detail << "(" << Outcome::fmt(ord_b) << ")";
  out.bound("km_rel_err", rel_k, 1e-2);
  out.require("km_order>=2.8", ord_k >= 2.8);
  out.detail << "(" << Outcome::fmt(ord_k) << ") D/(dtheta^T I_KM dtheta)=" << Outcome::fmt(ratio);
}

void derivative_routes(Outcome& out) {
  double fb = 0.0, km = 0.0, q = 0.0;
  for (const ReferenceState& ref : single_mode_states()) {
    const OracleContext ctx(ref);
    for (const OracleCheck& c : check_derivative_routes(ctx)) {
      if (c.name.rfind("fb_channel_vs_eigen", 0) == 0) fb = std::max(fb, c.residual);
      if (c.name.rfind("km_channel_vs_eigen", 0) == 0) km = std::max(km, c.residual);
      if (c.name.rfind("fb_q_channel_vs_channel", 0) == 0) q = std::max(q, c.residual);
    }
  }
  out.bound("fb_channel_vs_eigen", fb, 1e-8);
  out.bound("km_channel_vs_eigen", km, 1e-8);
  out.bound("q_channel_vs_channel", q, 1e-8);
  for (const OracleCheck& c : check_generic_identities(20260103)) {
    if (c.name == "generic_channel_derivative_vs_finite_difference" || c.name == "generic_fb_channel_vs_eigen" ||
        c.name == "generic_km_channel_vs_eigen" || c.name == "generic_fb_q_channel_vs_channel") {
      out.bound(c.name, c.residual, 1e-8);
    }
  }
}

void cramer_rao(Outcome& out) {
  std::mt19937_64 rng(20260104);
  double rel = 0.0;
  bool scaling = true;
  for (int n : {1, 2}) {
    const auto s = GaussianThermalState::from_hamiltonian(testing::random_mean(rng, n),
                                                          testing::random_hamiltonian(rng, n));
    InfoOptions options;
    options.prefactor = resolved_prefactor();
    const InfoMatrix info = fisher_bures(s, IndexMode::kSymmetricReduced, options);
    const Matrix a = testing::random_matrix(rng, info.size(), info.size());
    const Matrix w = a * a.transpose();
    const double direct = (w * info.data.inverse()).trace();
    const double one = crb_scalar(info, w, 1).bound;
    for (int copies : {1, 2, 3, 10}) {
      const double b = crb_scalar(info, w, copies).bound;
      rel = std::max(rel, std::abs(b - direct / copies) / std::abs(direct / copies));
      scaling = scaling && b == one / copies;
    }
    const InfoMatrix full = fisher_bures(s, IndexMode::kFullRedundant, options);
    bool singular = false;
    try {
      crb_scalar(full, Matrix::Identity(full.size(), full.size()), 1);
    } catch (const Error& e) {
      singular = e.code() == ErrorCode::kSingularMatrix;
    }
    out.require("full_redundant_singular_n" + std::to_string(n), singular);
  }
  out.bound("vs_dense_inverse", rel, 1e-10);
  out.require("exact_1/n", scaling);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "conversion round trips", conversions},
      {2, "kernel identities", kernel_identities},
      {3, "dual-path agreement", dual_path},
      {4, "information matrices vs Fock oracle", information_vs_oracle},
      {5, "mean-block prefactor discrimination", prefactor_discrimination},
      {6, "state derivatives vs finite differences", derivatives_vs_fd},
      {7, "SLD relation and coefficients", sld_consistency},
      {8, "line elements at coefficient 1/4", line_elements},
      {9, "derivative routes", derivative_routes},
      {10, "Cramer-Rao plumbing", cramer_rao},
  };
  return all;
}

bool run_one(const Criterion& c) {
  Outcome out;
  try {
    c.run(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " exception: " << e.what();
  }
  std::cout << "criterion " << c.id << ": " << (out.pass ? "PASS" : "FAIL") << " " << c.title << ";"
            << out.detail.str() << std::endl;
  return out.pass;
}

}  // namespace
}  // namespace gaussgeo

int main(int argc, char** argv) {
  CLI::App app{"gaussgeo acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  bool ok = true;
  for (const auto& c : gaussgeo::criteria()) {
    if (only == 0 || only == c.id) ok = gaussgeo::run_one(c) && ok;
  }
  return ok ? 0 : 1;
}
