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

// Vector-valued adaptive Gauss-Kronrod quadrature and the even-line integrals
// used by the kernel module.

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gaussgeo/errors.hpp"

namespace gaussgeo {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  double t_max = 40.0;
  double singular_split = 0.1;
  int max_intervals = 4000;

  /// Upper bound on the p-mass beyond t_max, (8 / pi^2) exp(-pi t_max).
  double tail_bound() const;

  /// Throws InvalidArgument on nonsensical values or a tail above abs_tol.
  void validate() const;
};

struct QuadratureResult {
  Eigen::VectorXd value;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

template <class F>
void gk21(F& f, double a, double b, Eigen::VectorXd& kronrod, Eigen::VectorXd& gauss) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Eigen::VectorXd fc = f(c);
  kronrod = wk[0] * fc;
  gauss = Eigen::VectorXd::Zero(fc.size());
  for (std::size_t i = 1; i < x.size(); ++i) {
    Eigen::VectorXd sum = f(c + h * x[i]);
    sum += f(c - h * x[i]);
    kronrod += wk[i] * sum;
    if (i % 2 == 1) gauss += wg[i / 2] * sum;
  }
  kronrod *= h;
  gauss *= h;
}

}  // namespace detail

/// Globally adaptive G10/K21 quadrature of a vector-valued integrand on [a, b].
/// Bisects the interval with the largest error until the summed max-norm error
/// is below max(abs_tol, rel_tol * |result|_inf).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                                    int max_intervals) {
  struct Piece {
    double a, b, err;
    Eigen::VectorXd value;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  auto eval = [&](double lo, double hi) {
    Eigen::VectorXd k, g;
    detail::gk21(f, lo, hi, k, g);
    const double err = (k - g).cwiseAbs().maxCoeff();
    return Piece{lo, hi, std::isfinite(err) ? err : HUGE_VAL, std::move(k)};
  };

  std::priority_queue<Piece> heap;
  Piece first = eval(a, b);
  Eigen::VectorXd total = first.value;
  double err = first.err;
  heap.push(std::move(first));
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * total.cwiseAbs().maxCoeff())) {
    if (count >= max_intervals) {
      throw Error(ErrorCode::kIllConditioned,
                  "adaptive quadrature did not converge (error " + std::to_string(err) + ")");
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Piece left = eval(worst.a, mid);
    Piece right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++count;
    if (count % 64 == 0) {
      // Re-sum to shed accumulated cancellation in the running totals.
      std::vector<Piece> all;
      all.reserve(heap.size());
      total.setZero();
      err = 0.0;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (auto& p : all) {
        total += p.value;
        err += p.err;
        heap.push(std::move(p));
      }
    }
  }
  return QuadratureResult{std::move(total), err, count};
}

/// Integral over [0, s] of an integrand with an integrable endpoint
/// singularity at 0, via t = s exp(-u) on u in [0, u_max].
template <class F>
QuadratureResult integrate_log_panel(F&& f, double s, double abs_tol, double rel_tol,
                                     int max_intervals, double u_max = 50.0) {
  auto g = [&](double u) -> Eigen::VectorXd {
    const double t = s * std::exp(-u);
    return t * f(t);
  };
  return integrate_adaptive(g, 0.0, u_max, abs_tol, rel_tol, max_intervals);
}

/// Integral over [0, t_max] of f, splitting off the log panel [0, split].
template <class F>
QuadratureResult integrate_half_line(F&& f, const QuadratureConfig& cfg) {
  QuadratureResult near =
      integrate_log_panel(f, cfg.singular_split, 0.5 * cfg.abs_tol, cfg.rel_tol, cfg.max_intervals);
  QuadratureResult far = integrate_adaptive(f, cfg.singular_split, cfg.t_max, 0.5 * cfg.abs_tol,
                                            cfg.rel_tol, cfg.max_intervals);
  near.value += far.value;
  near.error += far.error;
  near.intervals += far.intervals;
  return near;
}

}  // namespace gaussgeo
