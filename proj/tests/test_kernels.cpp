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
#include <numbers>

#include "gaussgeo/errors.hpp"
#include "gaussgeo/kernels.hpp"
#include "test_util.hpp"

namespace gaussgeo {
namespace {

using testing::max_abs;

TEST(Kernels, FrozenDensityValues) {
  EXPECT_NEAR(p_density(1.0), 0.0550559579825, 1e-12);
  EXPECT_NEAR(p_density(-1.0), p_density(1.0), 0.0);
  EXPECT_NEAR(q_density(0.0), 1.0855090288817, 1e-11);
  // Small-argument branch against the closed form.
  const double t = 0.01;
  EXPECT_NEAR(p_density(t), 2.0 / std::numbers::pi * std::log(1.0 / std::tanh(std::numbers::pi * t / 2)),
              1e-13);
}

TEST(Kernels, DensityAtZero) {
  EXPECT_THROW(p_density(0.0), Error);
  EXPECT_TRUE(std::isfinite(q_density(0.0)));
  EXPECT_NEAR(kernel_density(KernelKind::kQ, 0.0), q_density(0.0), 1e-11);
}

TEST(Kernels, CachedQMatchesDirect) {
  for (double t : {0.0, 0.013, 0.25, 0.5, 1.7, 3.3, 12.0, 39.9, 45.0}) {
    const double direct = q_density(t);
    EXPECT_NEAR(q_density_cached(t), direct, 1e-10 * std::max(1.0, direct)) << "t = " << t;
    EXPECT_NEAR(q_density_cached(-t), q_density_cached(t), 0.0);
  }
}

TEST(Kernels, FourierTransforms) {
  EXPECT_EQ(kernel_ft(KernelKind::kP, 0.0), 1.0);
  EXPECT_NEAR(kernel_ft(KernelKind::kP, 1.0), 0.9242343145200195, 1e-15);
  EXPECT_NEAR(kernel_ft(KernelKind::kQ, 1.0), 0.9242343145200195 * 0.9242343145200195, 1e-15);
  // Continuity across the series branch.
  const double w = 1e-4;
  EXPECT_NEAR(kernel_ft(KernelKind::kP, w * (1 - 1e-9)), kernel_ft(KernelKind::kP, w * (1 + 1e-9)),
              1e-15);
  EXPECT_NEAR(kernel_ft(KernelKind::kP, 200.0), 0.01, 1e-15);
}

TEST(Kernels, QuadratureMatchesFourierTransform) {
  const QuadratureConfig cfg;
  for (KernelKind kind : {KernelKind::kP, KernelKind::kQ}) {
    const auto mass = integrate_weighted(
        kind, [](double) { return Eigen::VectorXd::Ones(1); }, cfg);
    EXPECT_NEAR(mass.value(0), 1.0, 1e-10);
    for (double w : {0.1, 1.0, 5.0, 20.0}) {
      const auto r = integrate_weighted(
          kind, [w](double t) { return Eigen::VectorXd::Constant(1, std::cos(w * t)); }, cfg);
      EXPECT_NEAR(r.value(0), kernel_ft(kind, w), 1e-9) << to_string(kind) << " w = " << w;
    }
  }
}

TEST(Kernels, QuadratureConfigValidation) {
  QuadratureConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.t_max = 2.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = QuadratureConfig{};
  cfg.rel_tol = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_LT(QuadratureConfig{}.tail_bound(), 1e-50);
}

TEST(Kernels, ThermalEvolutionIntegral) {
  const double beta = 1.7;
  const Matrix h = beta * Matrix::Identity(2, 2);
  for (KernelKind kind : {KernelKind::kP, KernelKind::kQ}) {
    for (EvalPath path : {EvalPath::kSpectral, EvalPath::kQuadrature}) {
      const Matrix k = weighted_evolution_integral(kind, h, Convention::kOmegaH, path);
      EXPECT_LT(max_abs(k - kernel_ft(kind, beta) * Matrix::Identity(2, 2)), 1e-10);
    }
  }
}

TEST(Kernels, SpectralAndQuadraturePathsAgree) {
  std::mt19937_64 rng(21);
  for (int n : {1, 2}) {
    const Matrix h = testing::random_hamiltonian(rng, n);
    const Matrix v = cov_from_ham(h);
    Matrix m = testing::random_matrix(rng, 2 * n, 2 * n);
    m = 0.5 * (m + m.transpose());
    for (KernelKind kind : {KernelKind::kP, KernelKind::kQ}) {
      for (Convention c : {Convention::kOmegaH, Convention::kMinusHOmega}) {
        EXPECT_LT(max_abs(weighted_evolution_integral(kind, h, c, EvalPath::kSpectral) -
                          weighted_evolution_integral(kind, h, c, EvalPath::kQuadrature)),
                  1e-9);
        EXPECT_LT(max_abs(weighted_congruence_integral(kind, h, c, m, EvalPath::kSpectral) -
                          weighted_congruence_integral(kind, h, c, m, EvalPath::kQuadrature)),
                  1e-9);
      }
      const Tensor4 a = weighted_fourth_moment_integral(kind, h, v, EvalPath::kSpectral);
      const Tensor4 b = weighted_fourth_moment_integral(kind, h, v, EvalPath::kQuadrature);
      EXPECT_LT(a.max_abs_diff(b), 1e-9);
    }
  }
}

TEST(Kernels, FourthMomentIntegrandAtZero) {
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  const Matrix v = cov_from_ham(h);
  const Matrix om = omega(ModeCount(1));
  const Tensor4 w = fourth_moment_integrand(Matrix::Identity(2, 2), v);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          const double expected = v(a, b) * v(c, d) + v(a, c) * v(b, d) + v(a, d) * v(b, c) -
                                  0.25 * (om(a, c) * om(b, d) + om(a, d) * om(b, c));
          EXPECT_NEAR(w(a, b, c, d), expected, 1e-14);
        }
      }
    }
  }
}

TEST(Kernels, Tensor4Layout) {
  Tensor4 t(2);
  t(1, 0, 1, 1) = 3.0;
  EXPECT_EQ(t.data()[11], 3.0);
  Tensor4 u(2);
  EXPECT_EQ(t.max_abs_diff(u), 3.0);
}

}  // namespace
}  // namespace gaussgeo
