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
#include "gaussgeo/observables.hpp"
#include "test_util.hpp"

namespace gaussgeo {
namespace {

using testing::max_abs;

GaussianThermalState anisotropic() {
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  Vector mu(2);
  mu << 0.3, -0.2;
  return GaussianThermalState::from_hamiltonian(mu, h);
}

// Symmetrized covariance <{X, Y}/2> - <X><Y> of two centered quadratic observables.
double gaussian_covariance(const QuadraticObservable& x, const QuadraticObservable& y,
                           const GaussianThermalState& s) {
  const Matrix& v = s.cov();
  const Matrix om = omega(s.modes());
  return x.lin.dot(v * y.lin) + 2.0 * (x.quad * v * y.quad * v).trace() +
         0.5 * (x.quad * om * y.quad * om).trace();
}

TEST(Observables, MeanDerivativeIsLinear) {
  const StateDerivative d = state_derivative(anisotropic(), ParameterIndex::parse("mu:1", 2));
  EXPECT_EQ(d.a_op.lin.size(), 2);
  EXPECT_EQ(d.a_op.quad.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(d.a_op.c, 0.0);
  EXPECT_EQ(d.scalar_term, 0.0);
}

TEST(Observables, HamiltonianSldConstant) {
  const auto s = anisotropic();
  const QuadraticObservable l = sld(s, ParameterIndex::parse("h:1,2", 2));
  EXPECT_NEAR(l.c, 0.5 * s.cov()(0, 1), 1e-15);
  const StateDerivative d = state_derivative(s, ParameterIndex::parse("h:2,2", 2));
  EXPECT_NEAR(d.scalar_term, 0.5 * s.cov()(1, 1), 1e-15);
}

TEST(Observables, ThermalMeanSld) {
  for (double nu : {0.8, 1.0, 2.0}) {
    const auto s = GaussianThermalState::from_hamiltonian(
        Vector::Zero(2), testing::thermal_beta(nu) * Matrix::Identity(2, 2));
    const QuadraticObservable l = sld(s, ParameterIndex::mean(1));
    EXPECT_NEAR(l.lin(0), 0.0, 1e-14);
    EXPECT_NEAR(l.lin(1), 1.0 / nu, 1e-13);
  }
}

TEST(Observables, SldHasZeroMean) {
  std::mt19937_64 rng(41);
  for (int n : {1, 2}) {
    const auto s = GaussianThermalState::from_hamiltonian(testing::random_mean(rng, n),
                                                          testing::random_hamiltonian(rng, n));
    for (const auto& p : index_map(s.modes(), IndexMode::kFullRedundant)) {
      EXPECT_NEAR(gaussian_expectation(sld(s, p), s), 0.0, 1e-12) << p.label();
      const StateDerivative d = state_derivative(s, p);
      EXPECT_LT(sld(s, p).max_abs_diff(QuadraticObservable::identity(s.dim()) * d.scalar_term - d.a_op),
                1e-15);
    }
  }
}

TEST(Observables, SldCovarianceIsFisherBures) {
  std::mt19937_64 rng(42);
  for (int n : {1, 2}) {
    const auto s = GaussianThermalState::from_hamiltonian(testing::random_mean(rng, n),
                                                          testing::random_hamiltonian(rng, n));
    const InfoMatrix fb = fisher_bures(s, IndexMode::kFullRedundant);
    std::vector<QuadraticObservable> l;
    for (const auto& p : fb.index) l.push_back(sld(s, p));
    for (std::size_t i = 0; i < l.size(); ++i) {
      for (std::size_t j = 0; j < l.size(); ++j) {
        EXPECT_NEAR(gaussian_covariance(l[i], l[j], s),
                    fb.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 1e-10)
            << fb.index[i].label() << " " << fb.index[j].label();
      }
    }
  }
}

TEST(Observables, KuboMoriPairsSldWithGeneratorDerivative) {
  const auto s = anisotropic();
  const InfoMatrix km = kubo_mori(s, IndexMode::kFullRedundant);
  for (std::size_t i = 0; i < km.index.size(); ++i) {
    const QuadraticObservable a = state_derivative(s, km.index[i]).a_op;
    for (std::size_t j = 0; j < km.index.size(); ++j) {
      const QuadraticObservable g = generator_derivative(s, km.index[j]);
      EXPECT_NEAR(gaussian_covariance(a, g, s),
                  km.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 1e-10);
    }
  }
}

TEST(Observables, EvaluationPathsAgree) {
  const auto s = anisotropic();
  ObservableOptions quad;
  quad.path = EvalPath::kQuadrature;
  for (const auto& p : index_map(s.modes(), IndexMode::kSymmetricReduced)) {
    EXPECT_LT(sld(s, p).max_abs_diff(sld(s, p, quad)), 1e-10);
  }
}

TEST(Observables, RejectsOutOfRangeParameters) {
  EXPECT_THROW(sld(anisotropic(), ParameterIndex::mean(2)), Error);
  EXPECT_THROW(sld(anisotropic(), ParameterIndex::ham(0, 5)), Error);
  QuadraticObservable o = QuadraticObservable::zero(4);
  EXPECT_THROW(gaussian_expectation(o, anisotropic()), Error);
}

}  // namespace
}  // namespace gaussgeo
