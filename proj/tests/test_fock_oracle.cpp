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

#include <gtest/gtest.h>

#include <cmath>

#include "gaussgeo/errors.hpp"
#include "gaussgeo/fock_oracle.hpp"
#include "test_util.hpp"

namespace gaussgeo::fock {
namespace {

using gaussgeo::testing::thermal_beta;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

TEST(FockOracle, GeometricThermalSpectrum) {
  const FockRep rep(ModeCount(1), 60);
  const OracleState s =
      build_state(rep, Vector::Zero(2), std::log(3.0) * Matrix::Identity(2, 2)).state;
  Vector lam = s.eigenvalues();
  std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
  for (int m = 0; m < 5; ++m) EXPECT_NEAR(lam(m), (2.0 / 3.0) * std::pow(1.0 / 3.0, m), 1e-8);
  EXPECT_NEAR(s.eigenvalues().sum(), 1.0, 1e-12);
}

TEST(FockOracle, CommutatorOnRetainedLevels) {
  const FockRep rep(ModeCount(1), 30);
  EXPECT_LT(rep.commutator_defect(), 1e-12);
  EXPECT_EQ(rep.retained().size(), 28u);
  const FockRep two(ModeCount(2), 6);
  EXPECT_EQ(two.size(), 36);
  EXPECT_EQ(two.retained().size(), 16u);
}

TEST(FockOracle, CutoffTooSmall) {
  const FockRep rep(ModeCount(1), 8);
  try {
    build_state(rep, Vector::Zero(2), thermal_beta(2.0) * Matrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCutoffTooSmall);
  }
}

TEST(FockOracle, MomentsMatchCovariance) {
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  Vector mu(2);
  mu << 0.3, -0.2;
  const FockRep rep(ModeCount(1), 50);
  const OracleState s = build_state(rep, mu, h).state;
  const Matrix v = cov_from_ham(h);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(s.expectation(rep.quadrature(j)), mu(j), 1e-8);
    for (int k = 0; k < 2; ++k) {
      const double second = s.expectation(rep.sym_product(j, k)) - mu(j) * mu(k);
      EXPECT_NEAR(second, v(j, k), 1e-8);
    }
  }
}

TEST(FockOracle, ChannelIdentities) {
  const FockRep rep(ModeCount(1), 30);
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  const CMatrix g = rep.generator(Vector::Zero(2), h);
  const OracleState s = OracleState::from_generator(g);
  const CMatrix x = rep.quadrature(0) * rep.quadrature(1);
  // Functions of G are fixed.
  EXPECT_LT(max_abs(channel_apply(s, g * g, KernelKind::kP) - g * g), 1e-9);
  EXPECT_LT(max_abs(channel_apply(s, x, KernelKind::kQ) -
                    channel_apply(s, channel_apply(s, x, KernelKind::kP), KernelKind::kP)),
            1e-11);
  EXPECT_NEAR(s.expectation(channel_apply(s, x, KernelKind::kP)), s.expectation(x), 1e-12);
  EXPECT_LT(max_abs(channel_apply(g, x, KernelKind::kP) - channel_apply(s, x, KernelKind::kP)), 1e-10);
}

TEST(FockOracle, ChannelDerivative) {
  const FockRep rep(ModeCount(1), 30);
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  const CMatrix g = rep.generator(Vector::Zero(2), h);
  const OracleState s = OracleState::from_generator(g);
  const CMatrix eye = CMatrix::Identity(rep.size(), rep.size());
  EXPECT_LT(max_abs(thermal_derivative_channel(s, eye)), 1e-13);
  const CMatrix dg = rep.sym_product(0, 1);
  EXPECT_LT(std::abs(thermal_derivative_channel(s, dg).trace()), 1e-12);
  EXPECT_LT(max_abs(thermal_derivative_channel(s, dg) - thermal_derivative_exact(s, dg)), 1e-12);
  const double eps = 1e-5;
  const CMatrix fd = (OracleState::from_generator((1 + eps) * g).rho() -
                      OracleState::from_generator((1 - eps) * g).rho()) /
                     (2 * eps);
  EXPECT_LT(max_abs(thermal_derivative_channel(s, g) - fd), 1e-6);
}

TEST(FockOracle, DisplacedThermalInformation) {
  for (double nu : {0.8, 1.0, 2.0}) {
    const double beta = thermal_beta(nu);
    const FockRep rep(ModeCount(1), 60);
    const OracleState s = build_state(rep, Vector::Zero(2), beta * Matrix::Identity(2, 2)).state;
    const CMatrix rho = s.rho();
    const CMatrix drho = Complex(0.0, -1.0) * commutator(rep.quadrature(1), rho);
    EXPECT_NEAR(fb_from_eig(s, {drho})(0, 0), 1.0 / nu, 1e-7);
    EXPECT_NEAR(km_from_eig(s, {drho})(0, 0), beta, 1e-7);
  }
}

TEST(FockOracle, InformationEdgeCases) {
  const FockRep rep(ModeCount(1), 20);
  const OracleState s = build_state(rep, Vector::Zero(2), Matrix::Identity(2, 2)).state;
  const CMatrix zero = CMatrix::Zero(rep.size(), rep.size());
  EXPECT_EQ(fb_from_eig(s, {zero}).cwiseAbs().maxCoeff(), 0.0);
  // Maximally mixed state with commuting derivatives: both kernels are 1/lambda.
  const OracleState flat = OracleState::from_generator(CMatrix::Zero(4, 4));
  CMatrix d = CMatrix::Zero(4, 4);
  d.diagonal() << 0.1, -0.1, 0.05, -0.05;
  EXPECT_NEAR(fb_from_eig(flat, {d})(0, 0), km_from_eig(flat, {d})(0, 0), 1e-14);
  EXPECT_NEAR(fb_from_eig(flat, {d})(0, 0), 4.0 * 0.025, 1e-14);
}

TEST(FockOracle, FidelityAndRelativeEntropy) {
  const FockRep rep(ModeCount(1), 30);
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  const OracleState s = build_state(rep, Vector::Zero(2), h).state;
  EXPECT_NEAR(fidelity(s, s), 1.0, 1e-10);
  EXPECT_NEAR(relative_entropy_exact(s, s), 0.0, 1e-12);
  const OracleState t = build_state(rep, Vector::Zero(2), 1.1 * h).state;
  EXPECT_LT(fidelity(s, t), 1.0);
  EXPECT_GT(relative_entropy_exact(s, t), 0.0);
  EXPECT_NEAR(relative_entropy(s, t), relative_entropy_exact(s, t), 1e-9);
}

TEST(FockOracle, SldFromEigenvalues) {
  const FockRep rep(ModeCount(1), 40);
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  const OracleState s = build_state(rep, Vector::Zero(2), h).state;
  const CMatrix drho = thermal_derivative_exact(s, rep.sym_product(0, 0));
  const CMatrix l = sld_from_eig(s, drho);
  const CMatrix rho = s.rho();
  EXPECT_LT(max_abs(0.5 * (l * rho + rho * l) - drho), 1e-10);
  EXPECT_NEAR(s.expectation(l), 0.0, 1e-10);
}

TEST(FockOracle, FiniteDifferenceSymmetry) {
  const FockRep rep(ModeCount(1), 30);
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  const Vector mu = Vector::Constant(2, 0.1);
  const CMatrix a = finite_difference_drho(rep, mu, h, ParameterIndex::ham(0, 1), 1e-4);
  const CMatrix b = finite_difference_drho(rep, mu, h, ParameterIndex::ham(1, 0), 1e-4);
  EXPECT_LT(max_abs(a - b), 1e-9);
  const CMatrix m = finite_difference_drho(rep, mu, h, ParameterIndex::mean(0), 1e-4);
  EXPECT_LT(std::abs(m.trace()), 1e-10);
}

TEST(FockOracle, RejectsOversizedSpaces) {
  EXPECT_THROW(FockRep(ModeCount(2), 80), Error);
  EXPECT_THROW(FockRep(ModeCount(1), 2), Error);
}

}  // namespace
}  // namespace gaussgeo::fock
