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

// The tent density p(t) = (2/pi) ln coth(pi |t| / 2), its self-convolution
// q = p * p, their Fourier transforms, and integrals of the form
// \int w(t) f(S(t)) dt over the one-parameter symplectic group S(t).

#include <vector>

#include "gaussgeo/quadrature.hpp"
#include "gaussgeo/symplectic.hpp"

namespace gaussgeo {

/// kP weights the Kubo-Mori quantities, kQ = p * p the Fisher-Bures ones.
enum class KernelKind { kP, kQ };

const char* to_string(KernelKind kind);

/// Throws SingularPoint at t == 0.
double p_density(double t);

/// q(t) by nested adaptive quadrature. Finite at 0 where it equals \int p^2.
double q_density(double t);

/// q(t) from a piecewise Chebyshev table built once on first use.
double q_density_cached(double t);

/// w(t) for either kind; the P branch throws at t == 0.
double kernel_density(KernelKind kind, double t);

/// \int w(t) e^{-i w t} dt: tanh(w/2)/(w/2) for P and its square for Q.
double kernel_ft(KernelKind kind, double omega);

/// \int w(t) f(t) dt over the real line for a vector-valued f, evaluated as
/// \int_0^{t_max} w(t) [f(t) + f(-t)] dt.
template <class F>
QuadratureResult integrate_weighted(KernelKind kind, F&& f, const QuadratureConfig& cfg) {
  auto g = [&](double t) -> Eigen::VectorXd {
    Eigen::VectorXd v = f(t);
    v += f(-t);
    return (kind == KernelKind::kP ? p_density(t) : q_density_cached(t)) * v;
  };
  return integrate_half_line(g, cfg);
}

enum class EvalPath {
  kAuto,        // spectral, quadrature when the eigenbasis is ill-conditioned
  kSpectral,
  kQuadrature,
};

/// Rank-4 array indexed (k1, l1, k2, l2), 0-based, row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim) {}

  int dim() const { return dim_; }
  double& operator()(int k1, int l1, int k2, int l2) { return data_[offset(k1, l1, k2, l2)]; }
  double operator()(int k1, int l1, int k2, int l2) const { return data_[offset(k1, l1, k2, l2)]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double max_abs_diff(const Tensor4& other) const;

 private:
  std::size_t offset(int k1, int l1, int k2, int l2) const {
    return ((static_cast<std::size_t>(k1) * dim_ + l1) * dim_ + k2) * dim_ + l2;
  }
  int dim_ = 0;
  std::vector<double> data_;
};

/// K_w = \int w(t) S(t) dt with S(t) generated per `convention`.
Matrix weighted_evolution_integral(KernelKind kind, const Matrix& h, Convention convention,
                                   EvalPath path = EvalPath::kAuto,
                                   const QuadratureConfig& cfg = {});

/// \int w(t) S(t)^T M S(t) dt for a symmetric M.
Matrix weighted_congruence_integral(KernelKind kind, const Matrix& h, Convention convention,
                                    const Matrix& m, EvalPath path = EvalPath::kAuto,
                                    const QuadratureConfig& cfg = {});

/// \int w(t) W(t) dt where, with S(t) = exp(-H Omega t),
///   W_{k1 l1 k2 l2} = V_{k1 l1} [S^T V S]_{k2 l2}
///                   + [V S]_{k1 k2} [V S]_{l1 l2} + [V S]_{k1 l2} [V S]_{l1 k2}
///                   - 1/4 [Omega S]_{k1 k2} [Omega S]_{l1 l2}
///                   - 1/4 [Omega S]_{k1 l2} [Omega S]_{l1 k2}.
Tensor4 weighted_fourth_moment_integral(KernelKind kind, const Matrix& h, const Matrix& v,
                                        EvalPath path = EvalPath::kAuto,
                                        const QuadratureConfig& cfg = {});

/// The integrand above at a single t; exposed for tests and the quadrature path.
Tensor4 fourth_moment_integrand(const Matrix& s, const Matrix& v);

}  // namespace gaussgeo
