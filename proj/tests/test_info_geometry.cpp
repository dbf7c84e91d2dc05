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
#include "gaussgeo/info_geometry.hpp"
#include "test_util.hpp"

namespace gaussgeo {
namespace {

using testing::max_abs;

GaussianThermalState thermal(double nu) {
  Vector mu(2);
  mu << 0.3, -0.2;
  return GaussianThermalState::from_hamiltonian(mu, testing::thermal_beta(nu) * Matrix::Identity(2, 2));
}

GaussianThermalState anisotropic() {
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  Vector mu(2);
  mu << 0.3, -0.2;
  return GaussianThermalState::from_hamiltonian(mu, h);
}

TEST(InfoGeometry, IndexMapOrdering) {
  std::vector<std::string> full, reduced;
  for (const auto& p : index_map(ModeCount(1), IndexMode::kFullRedundant)) full.push_back(p.label());
  for (const auto& p : index_map(ModeCount(1), IndexMode::kSymmetricReduced)) {
    reduced.push_back(p.label());
  }
  EXPECT_EQ(full, (std::vector<std::string>{"mu_1", "mu_2", "h_1_1", "h_2_1", "h_1_2", "h_2_2"}));
  EXPECT_EQ(reduced, (std::vector<std::string>{"mu_1", "mu_2", "h_1_1", "h_1_2", "h_2_2"}));
  EXPECT_EQ(index_map(ModeCount(2), IndexMode::kFullRedundant).size(), 20u);
  EXPECT_EQ(index_map(ModeCount(2), IndexMode::kSymmetricReduced).size(), 14u);
}

TEST(InfoGeometry, ParameterParsing) {
  EXPECT_EQ(ParameterIndex::parse("mu:1", 2), ParameterIndex::mean(0));
  EXPECT_EQ(ParameterIndex::parse("h:1,2", 2), ParameterIndex::ham(0, 1));
  EXPECT_EQ(ParameterIndex::parse("h:4,3", 4), ParameterIndex::ham(3, 2));
  for (const char* bad : {"h:0,1", "mu:0", "mu:3", "h:1", "x:1", "h:1,2,3", "mu:", "h:a,b", "mu:1x"}) {
    EXPECT_THROW(ParameterIndex::parse(bad, 2), Error) << bad;
  }
}

TEST(InfoGeometry, ThermalMeanBlocks) {
  for (double nu : {0.8, 1.0, 2.0}) {
    const auto s = thermal(nu);
    const Matrix fb = fisher_bures(s, IndexMode::kSymmetricReduced).mean_block();
    const Matrix km = kubo_mori(s, IndexMode::kSymmetricReduced).mean_block();
    EXPECT_LT(max_abs(fb - Matrix::Identity(2, 2) / nu), 1e-12);
    EXPECT_LT(max_abs(km - testing::thermal_beta(nu) * Matrix::Identity(2, 2)), 1e-12);
  }
}

TEST(InfoGeometry, PrefactorScalesBothBlocks) {
  const auto s = anisotropic();
  InfoOptions one, two;
  two.prefactor = kPrefactorAssembled;
  const InfoMatrix a = fisher_bures(s, IndexMode::kFullRedundant, one);
  const InfoMatrix b = fisher_bures(s, IndexMode::kFullRedundant, two);
  EXPECT_EQ(a.prefactor, 1.0);
  EXPECT_EQ(b.prefactor, 2.0);
  EXPECT_LT(max_abs(b.mean_block() - 2.0 * a.mean_block()), 1e-13);
}

TEST(InfoGeometry, CrossBlocksAreExactZeros) {
  for (InfoKind kind : {InfoKind::kFisherBures, InfoKind::kKuboMori}) {
    const InfoMatrix info = information_matrix(kind, anisotropic(), IndexMode::kFullRedundant);
    EXPECT_EQ(info.data.topRightCorner(2, 4).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(info.data.bottomLeftCorner(4, 2).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(InfoGeometry, ReducedIsCongruenceOfFull) {
  std::mt19937_64 rng(31);
  for (int n : {1, 2}) {
    const auto s = GaussianThermalState::from_hamiltonian(testing::random_mean(rng, n),
                                                          testing::random_hamiltonian(rng, n));
    const Matrix j = duplication_jacobian(ModeCount(n));
    for (InfoKind kind : {InfoKind::kFisherBures, InfoKind::kKuboMori}) {
      const InfoMatrix full = information_matrix(kind, s, IndexMode::kFullRedundant);
      const InfoMatrix red = information_matrix(kind, s, IndexMode::kSymmetricReduced);
      EXPECT_LT(max_abs(j.transpose() * full.data * j - red.data), 1e-12);
      EXPECT_LT(max_abs(red.data - red.data.transpose()), 1e-14);
      EXPECT_GT(red.min_eigenvalue(), 0.0);
    }
  }
}

TEST(InfoGeometry, KuboMoriDominatesFisherBures) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 1 + trial % 2;
    const auto s = GaussianThermalState::from_hamiltonian(testing::random_mean(rng, n),
                                                          testing::random_hamiltonian(rng, n));
    const Matrix diff = kubo_mori(s, IndexMode::kSymmetricReduced).data -
                        fisher_bures(s, IndexMode::kSymmetricReduced).data;
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(diff).eigenvalues()(0), -1e-10);
  }
}

TEST(InfoGeometry, EvaluationPathsAgree) {
  const auto s = anisotropic();
  InfoOptions spectral, quadrature;
  spectral.path = EvalPath::kSpectral;
  quadrature.path = EvalPath::kQuadrature;
  for (InfoKind kind : {InfoKind::kFisherBures, InfoKind::kKuboMori}) {
    EXPECT_LT(max_abs(information_matrix(kind, s, IndexMode::kFullRedundant, spectral).data -
                      information_matrix(kind, s, IndexMode::kFullRedundant, quadrature).data),
              1e-9);
  }
}

TEST(InfoGeometry, CrbThermalMean) {
  const InfoMatrix info = fisher_bures(thermal(1.0), IndexMode::kSymmetricReduced);
  Matrix w = Matrix::Zero(info.size(), info.size());
  w(0, 0) = w(1, 1) = 1.0;
  EXPECT_NEAR(crb_scalar(info, w, 1).bound, 2.0, 1e-12);
  EXPECT_NEAR(crb_scalar(info, w, 4).bound, 0.5, 1e-12);
}

TEST(InfoGeometry, CrbAgainstDenseInverse) {
  std::mt19937_64 rng(33);
  const auto s = GaussianThermalState::from_hamiltonian(testing::random_mean(rng, 2),
                                                        testing::random_hamiltonian(rng, 2));
  const InfoMatrix info = fisher_bures(s, IndexMode::kSymmetricReduced);
  const Matrix a = testing::random_matrix(rng, info.size(), info.size());
  const Matrix w = a * a.transpose();
  const double direct = (w * info.data.inverse()).trace();
  for (int n : {1, 2, 7}) {
    const CrbResult r = crb_scalar(info, w, n);
    EXPECT_NEAR(r.bound, direct / n, 1e-10 * std::abs(direct));
    EXPECT_EQ(r.rank, info.size());
  }
  EXPECT_EQ(crb_scalar(info, w, 3).bound * 3, crb_scalar(info, w, 1).bound);
}

TEST(InfoGeometry, CrbFullRedundant) {
  const InfoMatrix full = fisher_bures(anisotropic(), IndexMode::kFullRedundant);
  const Matrix w = Matrix::Identity(full.size(), full.size());
  try {
    crb_scalar(full, w, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularMatrix);
  }
  const CrbResult r = crb_scalar(full, w, 1, true);
  EXPECT_TRUE(r.pseudo_inverse);
  EXPECT_EQ(r.rank, 5);
  EXPECT_TRUE(std::isfinite(r.bound));
}

TEST(InfoGeometry, CrbRejectsBadWeights) {
  const InfoMatrix info = fisher_bures(thermal(1.0), IndexMode::kSymmetricReduced);
  EXPECT_THROW(crb_scalar(info, Matrix::Identity(2, 2), 1), Error);
  EXPECT_THROW(crb_scalar(info, -Matrix::Identity(5, 5), 1), Error);
  EXPECT_THROW(crb_scalar(info, Matrix::Identity(5, 5), 0), Error);
}

TEST(InfoGeometry, LineElements) {
  const InfoMatrix info = fisher_bures(thermal(1.0), IndexMode::kSymmetricReduced);
  Vector d = Vector::Zero(5);
  d(0) = 0.1;
  EXPECT_NEAR(bures_line_element(info, d), 0.25 * 0.01, 1e-15);
  const InfoMatrix km = kubo_mori(thermal(1.0), IndexMode::kSymmetricReduced);
  EXPECT_NEAR(km_line_element(km, d), 0.5 * std::log(3.0) * 0.01, 1e-12);
  EXPECT_THROW(km_line_element(info, d), Error);
}

}  // namespace
}  // namespace gaussgeo
