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

// Quadratic observables c + sum_j lin_j x_j + sum_{k,l} quad_{kl} {x_k, x_l} / 2
// in centered quadratures x = x_hat - mu, and the closed forms of the state
// derivatives and symmetric logarithmic derivatives of rho(mu, H).

#include "gaussgeo/info_geometry.hpp"
#include "gaussgeo/kernels.hpp"
#include "gaussgeo/symplectic.hpp"

namespace gaussgeo {

/// quad is symmetric and summed over ordered pairs, so {x_k, x_l} / 4 for
/// k != l is quad_kl = quad_lk = 1/4.
struct QuadraticObservable {
  double c = 0.0;
  Vector lin;
  Matrix quad;

  static QuadraticObservable zero(int dim);
  static QuadraticObservable identity(int dim);

  int dim() const { return static_cast<int>(lin.size()); }
  QuadraticObservable operator+(const QuadraticObservable& o) const;
  QuadraticObservable operator-(const QuadraticObservable& o) const;
  QuadraticObservable operator*(double s) const;

  /// Largest coefficient-wise absolute difference.
  double max_abs_diff(const QuadraticObservable& o) const;
};

/// d rho = -{A, rho} / 2 + scalar_term rho.
struct StateDerivative {
  ParameterIndex param;
  QuadraticObservable a_op;
  double scalar_term = 0.0;
};

struct ObservableOptions {
  EvalPath path = EvalPath::kAuto;
  QuadratureConfig quadrature;
};

/// c + Tr[quad V]; the linear part has zero mean in centered quadratures.
double gaussian_expectation(const QuadraticObservable& obs, const GaussianThermalState& state);

/// Derivative of G = (x - mu)^T H (x - mu) / 2 with respect to one coordinate:
/// -(H x)_m for mu_m and {x_k, x_l} / 4 for h_kl.
QuadraticObservable generator_derivative(const GaussianThermalState& state,
                                         const ParameterIndex& param);

/// A = \int p(t) e^{iGt} dG e^{-iGt} dt, using e^{iGt} x e^{-iGt} = S(t) x with
/// S(t) = exp(Omega H t).
StateDerivative state_derivative(const GaussianThermalState& state, const ParameterIndex& param,
                                 const ObservableOptions& options = {});

/// L = -A + scalar_term, so that d rho = {L, rho} / 2.
QuadraticObservable sld(const GaussianThermalState& state, const ParameterIndex& param,
                        const ObservableOptions& options = {});

}  // namespace gaussgeo
