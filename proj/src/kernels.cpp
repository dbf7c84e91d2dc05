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

#include "gaussgeo/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace gaussgeo {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd scalar(double x) { return Eigen::VectorXd::Constant(1, x); }

// Settings for the nested convolution integrals inside q.
QuadratureConfig convolution_config() {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-13;
  cfg.t_max = 40.0;
  cfg.singular_split = 0.1;
  return cfg;
}

// Piecewise Chebyshev interpolant of q on [0, kTableEnd].
class QTable {
 public:
  static constexpr double kWidth = 0.5;
  static constexpr double kTableEnd = 40.0;
  static constexpr int kNodes = 24;

  QTable() {
    const int panels = static_cast<int>(kTableEnd / kWidth);
    coeffs_.resize(panels);
    std::array<double, kNodes> values{};
    for (int p = 0; p < panels; ++p) {
      const double a = p * kWidth;
      for (int j = 0; j < kNodes; ++j) {
        const double x = std::cos(kPi * (j + 0.5) / kNodes);
        values[j] = q_density(a + 0.5 * kWidth * (x + 1.0));
      }
      for (int k = 0; k < kNodes; ++k) {
        double c = 0.0;
        for (int j = 0; j < kNodes; ++j) c += values[j] * std::cos(kPi * k * (j + 0.5) / kNodes);
        coeffs_[p][k] = (k == 0 ? 1.0 : 2.0) * c / kNodes;
      }
    }
  }

  double operator()(double t) const {
    const double a = std::abs(t);
    if (a >= kTableEnd) return q_density(a);
    const int p = std::min(static_cast<int>(a / kWidth), static_cast<int>(coeffs_.size()) - 1);
    const double x = 2.0 * (a - p * kWidth) / kWidth - 1.0;
    const auto& c = coeffs_[p];
    double b1 = 0.0, b2 = 0.0;
    for (int k = kNodes - 1; k >= 1; --k) {
      const double b0 = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }

 private:
  std::vector<std::array<double, kNodes>> coeffs_;
};

Matrix generator(const Matrix& h, Convention convention) {
  const Matrix om = omega(ModeCount::from_dim(h.rows()));
  return convention == Convention::kOmegaH ? Matrix(om * h) : Matrix(-h * om);
}

// F(w_a + w_b) for all pairs.
CMatrix pair_weights(KernelKind kind, const SpectralDecomposition& sd) {
  const Eigen::Index d = sd.size();
  CMatrix f(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) f(a, b) = kernel_ft(kind, sd.angular(a) + sd.angular(b));
  }
  return f;
}

bool use_spectral(EvalPath path, const SpectralDecomposition& sd) {
  if (path == EvalPath::kQuadrature) return false;
  if (sd.cond <= tol::kCondMax) return true;
  if (path == EvalPath::kSpectral) {
    throw Error(ErrorCode::kIllConditioned,
                "eigenvector condition number " + std::to_string(sd.cond) + " exceeds limit");
  }
  return false;
}

Matrix unvec(const Eigen::VectorXd& v, Eigen::Index d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// \int w S^T M S from the eigenmode expansion S = sum_a e^{i w_a t} u_a r_a.
Matrix spectral_congruence(KernelKind kind, const SpectralDecomposition& sd, const Matrix& m) {
  const CMatrix& u = sd.basis;
  const CMatrix& r = sd.basis_inv;
  const CMatrix g = pair_weights(kind, sd).cwiseProduct(u.transpose() * m.cast<Complex>() * u);
  return symmetrized((r.transpose() * g * r).real());
}

}  // namespace

const char* to_string(KernelKind kind) { return kind == KernelKind::kP ? "P" : "Q"; }

double p_density(double t) {
  if (t == 0.0) throw Error(ErrorCode::kSingularPoint, "p(t) is singular at t = 0");
  const double a = kPi * std::abs(t);
  if (a < 0.5) {
    // atanh(z) with z = e^{-a} close to 1; 1 - z is computed without cancellation.
    const double z = std::exp(-a);
    return (2.0 / kPi) * (std::log1p(z) - std::log(-std::expm1(-a)));
  }
  return (4.0 / kPi) * std::atanh(std::exp(-a));
}

double q_density(double t) {
  const double a = std::abs(t);
  const QuadratureConfig cfg = convolution_config();
  // q(a) = 2 \int_0^inf p(s) p(a + s) ds + 2 \int_0^{a/2} p(s) p(a - s) ds.
  auto outer = [a](double s) { return scalar(p_density(s) * p_density(a + s)); };
  double total = integrate_half_line(outer, cfg).value(0);
  if (a > 0.0) {
    auto inner = [a](double s) { return scalar(p_density(s) * p_density(a - s)); };
    const double half = 0.5 * a;
    const double split = std::min(half, cfg.singular_split);
    total += integrate_log_panel(inner, split, 0.5 * cfg.abs_tol, cfg.rel_tol, cfg.max_intervals)
                 .value(0);
    if (half > split) {
      total += integrate_adaptive(inner, split, half, 0.5 * cfg.abs_tol, cfg.rel_tol,
                                  cfg.max_intervals)
                   .value(0);
    }
  }
  return 2.0 * total;
}

double q_density_cached(double t) {
  static const QTable table;
  return table(t);
}

double kernel_density(KernelKind kind, double t) {
  return kind == KernelKind::kP ? p_density(t) : q_density_cached(t);
}

double kernel_ft(KernelKind kind, double omega) {
  double fp;
  if (std::abs(omega) < 1e-4) {
    const double w2 = omega * omega;
    fp = 1.0 - w2 / 12.0 + w2 * w2 / 120.0 - 17.0 * w2 * w2 * w2 / 20160.0;
  } else {
    const double x = 0.5 * omega;
    fp = std::tanh(x) / x;
  }
  return kind == KernelKind::kP ? fp : fp * fp;
}

double QuadratureConfig::tail_bound() const {
  return 8.0 / (kPi * kPi) * std::exp(-kPi * t_max);
}

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol >= 0.0) || !(singular_split > 0.0) ||
      !(t_max > singular_split) || max_intervals < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid quadrature configuration");
  }
  if (tail_bound() > abs_tol) {
    throw Error(ErrorCode::kInvalidArgument,
                "t_max too small: tail bound " + std::to_string(tail_bound()) + " exceeds abs_tol");
  }
}

double Tensor4::max_abs_diff(const Tensor4& other) const {
  if (other.dim_ != dim_) throw Error(ErrorCode::kDimensionMismatch, "tensor sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

Matrix weighted_evolution_integral(KernelKind kind, const Matrix& h, Convention convention,
                                   EvalPath path, const QuadratureConfig& cfg) {
  require_symmetric(h, "H");
  const SpectralDecomposition sd = decompose_generator(h, convention);
  if (use_spectral(path, sd)) {
    double residue = 0.0;
    Matrix k = sd.apply([kind](double w) { return kernel_ft(kind, w); }, &residue);
    if (residue > 1e-8 * std::max(1.0, k.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::kIllConditioned, "spectral evolution integral is not real");
    }
    return k;
  }
  cfg.validate();
  const Matrix gen = generator(h, convention);
  const Eigen::Index d = h.rows();
  auto f = [&](double t) -> Eigen::VectorXd {
    const Matrix s = (gen * t).exp();
    return Eigen::Map<const Eigen::VectorXd>(s.data(), d * d);
  };
  return unvec(integrate_weighted(kind, f, cfg).value, d);
}

Matrix weighted_congruence_integral(KernelKind kind, const Matrix& h, Convention convention,
                                    const Matrix& m, EvalPath path, const QuadratureConfig& cfg) {
  require_symmetric(h, "H");
  if (m.rows() != h.rows() || m.cols() != h.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "M and H differ in size");
  }
  const SpectralDecomposition sd = decompose_generator(h, convention);
  if (use_spectral(path, sd)) return spectral_congruence(kind, sd, m);
  cfg.validate();
  const Matrix gen = generator(h, convention);
  const Eigen::Index d = h.rows();
  auto f = [&](double t) -> Eigen::VectorXd {
    const Matrix s = (gen * t).exp();
    const Matrix c = s.transpose() * m * s;
    return Eigen::Map<const Eigen::VectorXd>(c.data(), d * d);
  };
  return symmetrized(unvec(integrate_weighted(kind, f, cfg).value, d));
}

Tensor4 fourth_moment_integrand(const Matrix& s, const Matrix& v) {
  const int d = static_cast<int>(v.rows());
  const Matrix om = omega(ModeCount::from_dim(d));
  const Matrix svs = s.transpose() * v * s;
  const Matrix vs = v * s;
  const Matrix os = om * s;
  Tensor4 out(d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int l1 = 0; l1 < d; ++l1) {
      for (int k2 = 0; k2 < d; ++k2) {
        for (int l2 = 0; l2 < d; ++l2) {
          out(k1, l1, k2, l2) = v(k1, l1) * svs(k2, l2) + vs(k1, k2) * vs(l1, l2) +
                                vs(k1, l2) * vs(l1, k2) - 0.25 * os(k1, k2) * os(l1, l2) -
                                0.25 * os(k1, l2) * os(l1, k2);
        }
      }
    }
  }
  return out;
}

Tensor4 weighted_fourth_moment_integral(KernelKind kind, const Matrix& h, const Matrix& v,
                                        EvalPath path, const QuadratureConfig& cfg) {
  require_symmetric(h, "H");
  require_symmetric(v, "V");
  if (v.rows() != h.rows()) throw Error(ErrorCode::kDimensionMismatch, "V and H differ in size");
  const int d = static_cast<int>(h.rows());
  const SpectralDecomposition sd = decompose_generator(h, Convention::kMinusHOmega);

  if (use_spectral(path, sd)) {
    const CMatrix f = pair_weights(kind, sd);
    const Matrix c_v = spectral_congruence(kind, sd, v);
    const Matrix om = omega(ModeCount::from_dim(d));
    // Column a holds vec(L u_a r_a) with row-major (i, j) -> i * d + j.
    auto modes = [&](const Matrix& left) {
      const CMatrix lu = left.cast<Complex>() * sd.basis;
      CMatrix out(d * d, d);
      for (int a = 0; a < d; ++a) {
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) out(i * d + j, a) = lu(i, a) * sd.basis_inv(a, j);
        }
      }
      return out;
    };
    const CMatrix ay = modes(v);
    const CMatrix az = modes(om);
    const Matrix gy = (ay * f * ay.transpose()).real();
    const Matrix gz = (az * f * az.transpose()).real();
    Tensor4 out(d);
    for (int k1 = 0; k1 < d; ++k1) {
      for (int l1 = 0; l1 < d; ++l1) {
        for (int k2 = 0; k2 < d; ++k2) {
          for (int l2 = 0; l2 < d; ++l2) {
            out(k1, l1, k2, l2) = v(k1, l1) * c_v(k2, l2) + gy(k1 * d + k2, l1 * d + l2) +
                                  gy(k1 * d + l2, l1 * d + k2) -
                                  0.25 * gz(k1 * d + k2, l1 * d + l2) -
                                  0.25 * gz(k1 * d + l2, l1 * d + k2);
          }
        }
      }
    }
    return out;
  }

  cfg.validate();
  const Matrix gen = generator(h, Convention::kMinusHOmega);
  const std::size_t size = static_cast<std::size_t>(d) * d * d * d;
  auto fn = [&](double t) -> Eigen::VectorXd {
    const Tensor4 w = fourth_moment_integrand((gen * t).exp(), v);
    return Eigen::Map<const Eigen::VectorXd>(w.data().data(), static_cast<Eigen::Index>(size));
  };
  const Eigen::VectorXd flat = integrate_weighted(kind, fn, cfg).value;
  Tensor4 out(d);
  std::copy(flat.data(), flat.data() + size, out.data().begin());
  return out;
}

}  // namespace gaussgeo
