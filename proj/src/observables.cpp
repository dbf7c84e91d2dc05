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

#include "gaussgeo/observables.hpp"

#include <algorithm>
#include <cmath>

namespace gaussgeo {

namespace {

void require_param(const ParameterIndex& p, int dim) {
  const bool ok = p.type == ParameterIndex::Type::kMean
                      ? (p.m >= 0 && p.m < dim)
                      : (p.k >= 0 && p.k < dim && p.l >= 0 && p.l < dim);
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
}

}  // namespace

QuadraticObservable QuadraticObservable::zero(int dim) {
  return QuadraticObservable{0.0, Vector::Zero(dim), Matrix::Zero(dim, dim)};
}

QuadraticObservable QuadraticObservable::identity(int dim) {
  QuadraticObservable out = zero(dim);
  out.c = 1.0;
  return out;
}

QuadraticObservable QuadraticObservable::operator+(const QuadraticObservable& o) const {
  return QuadraticObservable{c + o.c, lin + o.lin, quad + o.quad};
}

QuadraticObservable QuadraticObservable::operator-(const QuadraticObservable& o) const {
  return QuadraticObservable{c - o.c, lin - o.lin, quad - o.quad};
}

QuadraticObservable QuadraticObservable::operator*(double s) const {
  return QuadraticObservable{c * s, lin * s, quad * s};
}

double QuadraticObservable::max_abs_diff(const QuadraticObservable& o) const {
  if (o.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "observable sizes differ");
  double m = std::abs(c - o.c);
  if (dim() > 0) {
    m = std::max(m, (lin - o.lin).cwiseAbs().maxCoeff());
    m = std::max(m, (quad - o.quad).cwiseAbs().maxCoeff());
  }
  return m;
}

double gaussian_expectation(const QuadraticObservable& obs, const GaussianThermalState& state) {
  if (obs.dim() != state.dim() || obs.quad.rows() != state.dim() ||
      obs.quad.cols() != state.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "observable does not match the state dimension");
  }
  return obs.c + (obs.quad.cwiseProduct(state.cov())).sum();
}

QuadraticObservable generator_derivative(const GaussianThermalState& state,
                                         const ParameterIndex& param) {
  const int d = state.dim();
  require_param(param, d);
  QuadraticObservable out = QuadraticObservable::zero(d);
  if (param.type == ParameterIndex::Type::kMean) {
    out.lin = -state.ham().row(param.m).transpose();
  } else {
    out.quad(param.k, param.l) += 0.25;
    out.quad(param.l, param.k) += 0.25;
  }
  return out;
}

StateDerivative state_derivative(const GaussianThermalState& state, const ParameterIndex& param,
                                 const ObservableOptions& options) {
  const QuadraticObservable dg = generator_derivative(state, param);
  StateDerivative out;
  out.param = param;
  out.a_op = QuadraticObservable::zero(state.dim());
  if (param.type == ParameterIndex::Type::kMean) {
    const Matrix k_p = weighted_evolution_integral(KernelKind::kP, state.ham(), Convention::kOmegaH,
                                                   options.path, options.quadrature);
    out.a_op.lin = k_p.transpose() * dg.lin;
    out.scalar_term = 0.0;
  } else {
    out.a_op.quad = weighted_congruence_integral(KernelKind::kP, state.ham(), Convention::kOmegaH,
                                                 dg.quad, options.path, options.quadrature);
    out.scalar_term = gaussian_expectation(dg, state);
  }
  return out;
}

QuadraticObservable sld(const GaussianThermalState& state, const ParameterIndex& param,
                        const ObservableOptions& options) {
  const StateDerivative der = state_derivative(state, param, options);
  return QuadraticObservable::identity(state.dim()) * der.scalar_term - der.a_op;
}

}  // namespace gaussgeo
