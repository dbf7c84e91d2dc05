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

#include "gaussgeo/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "gaussgeo/observables.hpp"

namespace gaussgeo {

namespace {

using fock::Basis;

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

std::string tagged(const std::string& name, const std::string& label) {
  return name + "[" + label + "]";
}

Vector displaced_mean(int dim) {
  Vector mu(dim);
  const double pattern[] = {0.3, -0.2, 0.15, 0.05};
  for (int i = 0; i < dim; ++i) mu(i) = pattern[i % 4];
  return mu;
}

double thermal_beta(double nu) { return 2.0 * std::atanh(1.0 / (2.0 * nu)); }

// {x_i - mu_i, x_j - mu_j} / 2.
CMatrix centered_sym(const fock::FockRep& rep, const Vector& mu, int i, int j) {
  QuadraticObservable obs = QuadraticObservable::zero(rep.phase_dim());
  obs.quad(i, j) += 0.5;
  obs.quad(j, i) += 0.5;
  return rep.materialize(obs, mu);
}

CMatrix centered_quad(const fock::FockRep& rep, const Vector& mu, int j) {
  QuadraticObservable obs = QuadraticObservable::zero(rep.phase_dim());
  obs.lin(j) = 1.0;
  return rep.materialize(obs, mu);
}

// Re Tr[rho A B] from precomputed rho A.
double trace_product(const CMatrix& rho_a, const CMatrix& b) {
  return (rho_a.array() * b.transpose().array()).sum().real();
}

CMatrix anticommutator_half(const CMatrix& a, const CMatrix& rho) { return 0.5 * (a * rho + rho * a); }

Vector unit_direction(Eigen::Index size) {
  Vector u(size);
  for (Eigen::Index i = 0; i < size; ++i) u(i) = std::cos(1.3 * static_cast<double>(i) + 0.4);
  return u.normalized();
}

void apply_reduced(Vector& mu, Matrix& h, const std::vector<ParameterIndex>& index,
                   const Vector& dtheta) {
  for (std::size_t i = 0; i < index.size(); ++i) {
    const ParameterIndex& p = index[i];
    const double step = dtheta(static_cast<Eigen::Index>(i));
    if (p.type == ParameterIndex::Type::kMean) {
      mu(p.m) += step;
    } else {
      h(p.k, p.l) += step;
      if (p.k != p.l) h(p.l, p.k) += step;
    }
  }
}

CMatrix random_hermitian(std::mt19937_64& rng, int levels, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix a(levels, levels);
  for (int i = 0; i < levels; ++i) {
    for (int j = 0; j < levels; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  return scale * 0.5 * (a + a.adjoint());
}

}  // namespace

OracleCheck make_check(std::string name, double residual, double bound, bool at_least) {
  OracleCheck c;
  c.name = std::move(name);
  c.residual = residual;
  c.bound = bound;
  c.at_least = at_least;
  c.passed = std::isfinite(residual) && (at_least ? residual >= bound : residual <= bound);
  return c;
}

std::vector<ReferenceState> reference_states(int cutoff, bool two_mode, int cutoff_two_mode) {
  std::vector<ReferenceState> out;
  for (double nu : {0.8, 1.0, 2.0}) {
    std::string label = "thermal_nu=" + std::to_string(nu).substr(0, 3);
    out.push_back({label, displaced_mean(2), thermal_beta(nu) * Matrix::Identity(2, 2), cutoff});
  }
  Matrix h(2, 2);
  h << 0.9, 0.15, 0.15, 1.3;
  out.push_back({"anisotropic", displaced_mean(2), h, cutoff});
  if (two_mode) {
    Matrix h2(4, 4);
    h2 << 2.2, 0.2, 0.1, 0.0,  //
        0.2, 2.6, 0.0, 0.16,   //
        0.1, 0.0, 2.4, 0.2,    //
        0.0, 0.16, 0.2, 1.8;
    out.push_back({"two_mode", displaced_mean(4), h2, cutoff_two_mode});
  }
  return out;
}

OracleContext::OracleContext(const ReferenceState& ref, double fock_tol)
    : ref_(ref),
      fock_tol_(fock_tol),
      analytic_(GaussianThermalState::from_hamiltonian(ref.mu, ref.h)),
      rep_(ModeCount::from_dim(ref.mu.size()), ref.cutoff),
      fock_(fock::build_state(rep_, ref.mu, ref.h, fock_tol)),
      params_(index_map(analytic_.modes(), IndexMode::kFullRedundant)) {
  for (const ParameterIndex& p : params_) {
    const CMatrix dg = rep_.materialize(generator_derivative(analytic_, p), ref_.mu);
    dg_eigen_.push_back(fock_.state.to_eigenbasis(dg));
    drho_eigen_.push_back(fock::thermal_derivative_exact(fock_.state, dg_eigen_.back(), Basis::kEigen));
  }
}

std::vector<OracleCheck> check_state_construction(const OracleContext& ctx) {
  const std::string& label = ctx.ref().label;
  const fock::OracleState& s = ctx.state();
  std::vector<OracleCheck> out;
  out.push_back(make_check(tagged("trace_deficit", label), std::abs(ctx.fock_state().trace_deficit),
                           ctx.fock_tol()));
  out.push_back(make_check(tagged("unit_trace", label), std::abs(s.eigenvalues().sum() - 1.0), 1e-12));
  out.push_back(make_check(tagged("positive_spectrum", label),
                           std::max(0.0, -s.eigenvalues().minCoeff()), 1e-12));
  out.push_back(make_check(tagged("commutator_retained", label), ctx.rep().commutator_defect(), 1e-10));
  return out;
}

std::vector<OracleCheck> check_moments(const OracleContext& ctx) {
  const std::string& label = ctx.ref().label;
  const fock::FockRep& rep = ctx.rep();
  const Vector& mu = ctx.ref().mu;
  const Matrix& v = ctx.analytic().cov();
  const Matrix om = omega(ctx.analytic().modes());
  const int d = rep.phase_dim();
  const CMatrix rho = ctx.state().rho();

  double first = 0.0;
  std::vector<CMatrix> xc(d), rho_xc(d);
  for (int j = 0; j < d; ++j) {
    first = std::max(first, std::abs(ctx.state().expectation(rep.quadrature(j)) - mu(j)));
    xc[j] = centered_quad(rep, mu, j);
    rho_xc[j] = rho * xc[j];
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) pairs.emplace_back(i, j);
  }
  std::vector<CMatrix> sym(pairs.size()), rho_sym(pairs.size());
  double second = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    sym[p] = centered_sym(rep, mu, i, j);
    rho_sym[p] = rho * sym[p];
    second = std::max(second, std::abs(ctx.state().expectation(sym[p]) - v(i, j)));
  }
  double third = 0.0;
  for (int a = 0; a < d; ++a) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      third = std::max(third, std::abs(trace_product(rho_xc[a], sym[p])));
    }
  }
  double fourth = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [a, b] = pairs[p];
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      const auto [c, e] = pairs[r];
      const double closed = v(a, b) * v(c, e) + v(a, c) * v(b, e) + v(a, e) * v(b, c) -
                            0.25 * (om(a, c) * om(b, e) + om(a, e) * om(b, c));
      fourth = std::max(fourth, std::abs(trace_product(rho_sym[p], sym[r]) - closed));
    }
  }
  return {make_check(tagged("first_moments", label), first, 1e-6),
          make_check(tagged("second_moments", label), second, 1e-6),
          make_check(tagged("third_moments", label), third, 1e-8),
          make_check(tagged("fourth_moments", label), fourth, 1e-6)};
}

std::vector<OracleCheck> check_information_matrices(const OracleContext& ctx, double prefactor,
                                                    double tolerance) {
  const std::string& label = ctx.ref().label;
  const int d = ctx.analytic().dim();
  const Matrix fb_o = fock::fb_from_eig(ctx.state(), ctx.drho_eigen(), fock::kEigFloor, nullptr,
                                        Basis::kEigen);
  const Matrix km_o = fock::km_from_eig(ctx.state(), ctx.drho_eigen(), fock::kEigFloor, nullptr,
                                        Basis::kEigen);
  std::vector<OracleCheck> out;
  InfoOptions options;
  options.prefactor = prefactor;
  std::optional<InfoMatrix> fb_a, km_a;
  if (std::isfinite(prefactor) && prefactor > 0.0) {
    fb_a = fisher_bures(ctx.analytic(), IndexMode::kFullRedundant, options);
    km_a = kubo_mori(ctx.analytic(), IndexMode::kFullRedundant, options);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.push_back(make_check(tagged("fb_matrix", label), fb_a ? max_abs(fb_a->data - fb_o) : nan, tolerance));
  out.push_back(make_check(tagged("km_matrix", label), km_a ? max_abs(km_a->data - km_o) : nan, tolerance));
  const Eigen::Index rest = fb_o.rows() - d;
  out.push_back(make_check(tagged("fb_cross_block_oracle", label),
                           max_abs(Matrix(fb_o.topRightCorner(d, rest))), 1e-8));
  out.push_back(make_check(tagged("km_cross_block_oracle", label),
                           max_abs(Matrix(km_o.topRightCorner(d, rest))), 1e-8));
  if (fb_a && km_a) {
    const double exact = std::max(max_abs(Matrix(fb_a->data.topRightCorner(d, rest))),
                                  max_abs(Matrix(km_a->data.topRightCorner(d, rest))));
    out.push_back(make_check(tagged("cross_block_analytic", label), exact, 0.0));
    out.push_back(make_check(tagged("km_minus_fb_psd", label),
                             std::max(0.0, -Eigen::SelfAdjointEigenSolver<Matrix>(
                                                km_a->data - fb_a->data, Eigen::EigenvaluesOnly)
                                                .eigenvalues()(0)),
                             1e-9));
  }
  return out;
}

std::vector<OracleCheck> check_derivative_routes(const OracleContext& ctx) {
  const std::string& label = ctx.ref().label;
  const auto& s = ctx.state();
  const Matrix fb_eig = fock::fb_from_eig(s, ctx.drho_eigen(), fock::kEigFloor, nullptr, Basis::kEigen);
  const Matrix km_eig = fock::km_from_eig(s, ctx.drho_eigen(), fock::kEigFloor, nullptr, Basis::kEigen);
  const Matrix fb_ch = fock::fb_from_channels(s, ctx.dg_eigen(), Basis::kEigen);
  const Matrix km_ch = fock::km_from_channels(s, ctx.dg_eigen(), Basis::kEigen);
  const Matrix fb_q = fock::fb_from_q_channel(s, ctx.dg_eigen(), Basis::kEigen);
  double channel_route = 0.0;
  for (std::size_t i = 0; i < ctx.params().size(); ++i) {
    const CMatrix via_channel = s.to_eigenbasis(fock::thermal_derivative_channel(s, s.from_eigenbasis(ctx.dg_eigen()[i])));
    channel_route = std::max(channel_route, max_abs(via_channel - ctx.drho_eigen()[i]));
  }
  return {make_check(tagged("channel_derivative_vs_exact", label), channel_route, 1e-10),
          make_check(tagged("fb_channel_vs_eigen", label), max_abs(fb_ch - fb_eig), 1e-8),
          make_check(tagged("km_channel_vs_eigen", label), max_abs(km_ch - km_eig), 1e-8),
          make_check(tagged("fb_q_channel_vs_channel", label), max_abs(fb_q - fb_ch), 1e-8)};
}

std::vector<OracleCheck> check_state_derivatives(const OracleContext& ctx, bool finite_differences,
                                                 double step) {
  const std::string& label = ctx.ref().label;
  const auto& s = ctx.state();
  const CMatrix rho = s.rho();
  double exact = 0.0, fd = 0.0, trace = 0.0, scalar = 0.0;
  for (std::size_t i = 0; i < ctx.params().size(); ++i) {
    const ParameterIndex& p = ctx.params()[i];
    const StateDerivative der = state_derivative(ctx.analytic(), p);
    const CMatrix a = ctx.rep().materialize(der.a_op, ctx.ref().mu);
    const CMatrix drho = -anticommutator_half(a, rho) + der.scalar_term * rho;
    exact = std::max(exact, fock::trace_norm(drho - s.from_eigenbasis(ctx.drho_eigen()[i])));
    trace = std::max(trace, std::abs(drho.trace()));
    const double expected =
        p.type == ParameterIndex::Type::kMean ? 0.0 : 0.5 * ctx.analytic().cov()(p.k, p.l);
    scalar = std::max(scalar, std::abs(der.scalar_term - expected));
    if (finite_differences) {
      const CMatrix num = fock::finite_difference_drho(ctx.rep(), ctx.ref().mu, ctx.ref().h, p,
                                                       step, ctx.fock_tol());
      fd = std::max(fd, fock::trace_norm(drho - num));
    }
  }
  std::vector<OracleCheck> out = {
      make_check(tagged("derivative_vs_exact", label), exact, 1e-8),
      make_check(tagged("derivative_traceless", label), trace, 1e-10),
      make_check(tagged("derivative_scalar_term", label), scalar, 1e-14)};
  if (finite_differences) {
    out.push_back(make_check(tagged("derivative_vs_finite_difference", label), fd, 1e-5));
  }
  return out;
}

std::vector<OracleCheck> check_sld(const OracleContext& ctx) {
  const std::string& label = ctx.ref().label;
  const auto& s = ctx.state();
  const CMatrix rho = s.rho();
  const std::vector<int> keep = ctx.rep().retained();
  double relation = 0.0, coefficients = 0.0, eigen_formula = 0.0, mean_a = 0.0, mean_o = 0.0;
  for (std::size_t i = 0; i < ctx.params().size(); ++i) {
    const ParameterIndex& p = ctx.params()[i];
    const QuadraticObservable l = sld(ctx.analytic(), p);
    const StateDerivative der = state_derivative(ctx.analytic(), p);
    coefficients = std::max(
        coefficients,
        l.max_abs_diff(QuadraticObservable::identity(l.dim()) * der.scalar_term - der.a_op));
    mean_a = std::max(mean_a, std::abs(gaussian_expectation(l, ctx.analytic())));
    const CMatrix lf = ctx.rep().materialize(l, ctx.ref().mu);
    mean_o = std::max(mean_o, std::abs(s.expectation(lf)));
    const CMatrix drho = s.from_eigenbasis(ctx.drho_eigen()[i]);
    relation = std::max(relation, fock::max_abs_on(anticommutator_half(lf, rho) - drho, keep));
    const CMatrix le_fock = fock::sld_from_eig(s, drho);
    eigen_formula = std::max(eigen_formula, fock::max_abs_on_populated(s, lf - le_fock, 1e-6));
  }
  return {make_check(tagged("sld_relation_retained", label), relation, 1e-8),
          make_check(tagged("sld_coefficients", label), coefficients, 1e-10),
          make_check(tagged("sld_vs_eigen_formula", label), eigen_formula, 1e-5),
          make_check(tagged("sld_zero_mean_analytic", label), mean_a, 1e-10),
          make_check(tagged("sld_zero_mean_oracle", label), mean_o, 1e-8)};
}

namespace {

// e^{iGt} from the eigendecomposition of G.
CMatrix unitary(const fock::OracleState& s, double t) {
  CVector phase(s.size());
  for (int k = 0; k < s.size(); ++k) phase(k) = std::exp(Complex(0.0, s.generator_eigenvalues()(k) * t));
  return s.eigenvectors() * phase.asDiagonal() * s.eigenvectors().adjoint();
}

// Index in a cutoff-`to` space of the basis state with index `idx` at cutoff `from`.
int reindex(int idx, int modes, int from, int to) {
  int out = 0, place = 1;
  for (int k = 0; k < modes; ++k) {
    out += (idx % from) * place;
    idx /= from;
    place *= to;
  }
  return out;
}

}  // namespace

std::vector<OracleCheck> check_heisenberg_evolution(const OracleContext& ctx) {
  const std::string& label = ctx.ref().label;
  const auto& s = ctx.state();
  const fock::FockRep& rep = ctx.rep();
  const int d = rep.phase_dim();
  const int modes = rep.modes();
  const Vector& mu = ctx.ref().mu;

  // exp(i G_N t) is not the compression of exp(i G t): boundary errors travel
  // inward with t. The retained-block check propagates in a larger space and
  // compresses afterwards. Mode coupling moves excitations between modes, so
  // the block is a simplex in total excitation: N - edge for one mode (the
  // usual level cut), N / 2 for two, where the enlarged space is only 3N / 2.
  const int big_cutoff = modes == 1 ? 2 * rep.cutoff() : rep.cutoff() + rep.cutoff() / 2;
  const int max_total = modes == 1 ? rep.cutoff() - fock::kEdgeLevels : rep.cutoff() / 2;
  const fock::FockRep big(ModeCount(modes), big_cutoff);
  const fock::OracleState big_state = fock::OracleState::from_generator(big.generator(mu, ctx.ref().h));
  std::vector<int> keep, keep_big;
  for (int i = 0; i < rep.size(); ++i) {
    int total = 0;
    for (int rest = i, k = 0; k < modes; ++k, rest /= rep.cutoff()) total += rest % rep.cutoff();
    if (total < max_total) {
      keep.push_back(i);
      keep_big.push_back(reindex(i, modes, rep.cutoff(), big_cutoff));
    }
  }
  const auto nk = static_cast<Eigen::Index>(keep.size());
  CMatrix q_rows(nk, big.size());
  for (Eigen::Index a = 0; a < nk; ++a) q_rows.row(a) = big_state.eigenvectors().row(keep_big[a]);

  std::vector<CMatrix> xc(d), xc_big_eig(d);
  for (int j = 0; j < d; ++j) {
    xc[j] = centered_quad(rep, mu, j);
    xc_big_eig[j] = big_state.to_eigenbasis(centered_quad(big, mu, j));
  }
  double retained = 0.0, populated = 0.0;
  for (double t : {0.3, 1.0}) {
    const Matrix sl = symplectic_evolution(ctx.ref().h, t, Convention::kOmegaH);
    const CMatrix u = unitary(s, t);
    CVector phase(big.size());
    for (int k = 0; k < big.size(); ++k) {
      phase(k) = std::exp(Complex(0.0, big_state.generator_eigenvalues()(k) * t));
    }
    const CMatrix a_rows = q_rows * phase.asDiagonal();
    for (int k = 0; k < d; ++k) {
      CMatrix rhs = CMatrix::Zero(rep.size(), rep.size());
      for (int l = 0; l < d; ++l) rhs += sl(k, l) * xc[l];
      const CMatrix lhs = u * xc[k] * u.adjoint();
      populated = std::max(populated, fock::max_abs_on_populated(s, lhs - rhs, 1e-6));
      const CMatrix lhs_block = a_rows * xc_big_eig[k] * a_rows.adjoint();
      for (Eigen::Index a = 0; a < nk; ++a) {
        for (Eigen::Index b = 0; b < nk; ++b) {
          retained = std::max(retained, std::abs(lhs_block(a, b) - rhs(keep[a], keep[b])));
        }
      }
    }
  }
  return {make_check(tagged("heisenberg_retained", label), retained, 1e-6),
          make_check(tagged("heisenberg_populated", label), populated, 1e-6)};
}

std::vector<OracleCheck> check_channels(const OracleContext& ctx) {
  const std::string& label = ctx.ref().label;
  const auto& s = ctx.state();
  const CMatrix rho = s.rho();
  const CMatrix x = s.from_eigenbasis(ctx.dg_eigen().back());
  const CMatrix phi = fock::channel_apply(s, x, KernelKind::kP);
  const CMatrix psi = fock::channel_apply(s, x, KernelKind::kQ);
  const CMatrix phi2 = fock::channel_apply(s, phi, KernelKind::kP);
  const double scale = std::max(1.0, max_abs(x));
  const CMatrix eye = CMatrix::Identity(s.size(), s.size());
  return {
      make_check(tagged("q_channel_is_p_squared", label), max_abs(psi - phi2) / scale, 1e-10),
      make_check(tagged("channel_fixes_commutant", label),
                 max_abs(fock::channel_apply(s, rho, KernelKind::kP) - rho), 1e-12),
      make_check(tagged("channel_preserves_mean", label),
                 std::abs(s.expectation(phi) - s.expectation(x)) / scale, 1e-10),
      make_check(tagged("channel_derivative_constant_shift", label),
                 max_abs(fock::thermal_derivative_channel(s, eye)), 1e-12)};
}

std::vector<LineElementSample> line_element_scan(const ReferenceState& ref, double prefactor,
                                                 const std::vector<double>& scales,
                                                 double fock_tol) {
  const GaussianThermalState base = GaussianThermalState::from_hamiltonian(ref.mu, ref.h);
  InfoOptions options;
  options.prefactor = prefactor;
  const InfoMatrix fb = fisher_bures(base, IndexMode::kSymmetricReduced, options);
  const InfoMatrix km = kubo_mori(base, IndexMode::kSymmetricReduced, options);
  const fock::FockRep rep(base.modes(), ref.cutoff);
  const fock::OracleState rho = fock::build_state(rep, ref.mu, ref.h, fock_tol).state;
  const Vector u = unit_direction(fb.size());
  std::vector<LineElementSample> out;
  for (double scale : scales) {
    const Vector dtheta = scale * u;
    Vector mu = ref.mu;
    Matrix h = ref.h;
    apply_reduced(mu, h, fb.index, dtheta);
    const fock::OracleState sigma = fock::build_state(rep, mu, h, fock_tol).state;
    LineElementSample sample;
    sample.scale = scale;
    sample.bures = 2.0 * (1.0 - std::sqrt(fock::fidelity(rho, sigma)));
    sample.rel_entropy = fock::relative_entropy(rho, sigma);
    sample.fb_form = dtheta.dot(fb.data * dtheta);
    sample.km_form = dtheta.dot(km.data * dtheta);
    out.push_back(sample);
  }
  return out;
}

std::vector<OracleCheck> check_line_element(const std::string& name,
                                            const std::vector<LineElementSample>& scan,
                                            bool kubo_mori, double coefficient, double rel_tol,
                                            double min_order) {
  std::vector<double> residual;
  for (const auto& s : scan) {
    const double lhs = kubo_mori ? s.rel_entropy : s.bures;
    const double pred = coefficient * (kubo_mori ? s.km_form : s.fb_form);
    residual.push_back(std::abs(lhs - pred));
  }
  const auto& first = scan.front();
  const double rel = residual.front() / (coefficient * (kubo_mori ? first.km_form : first.fb_form));
  double order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
    order = std::min(order, std::log(residual[i] / residual[i + 1]) /
                                std::log(scan[i].scale / scan[i + 1].scale));
  }
  return {make_check(name + "_relative_error", rel, rel_tol),
          make_check(name + "_residual_order", order, min_order, true)};
}

std::vector<OracleCheck> check_relative_entropy_regularization(const ReferenceState& ref,
                                                               double fock_tol) {
  const fock::FockRep rep(ModeCount::from_dim(ref.mu.size()), ref.cutoff);
  const fock::OracleState rho = fock::build_state(rep, ref.mu, ref.h, fock_tol).state;
  Vector mu = ref.mu;
  Matrix h = ref.h;
  const auto index = index_map(ModeCount::from_dim(ref.mu.size()), IndexMode::kSymmetricReduced);
  apply_reduced(mu, h, index, 1e-2 * unit_direction(static_cast<Eigen::Index>(index.size())));
  const fock::OracleState sigma = fock::build_state(rep, mu, h, fock_tol).state;
  const double exact = fock::relative_entropy_exact(rho, sigma);
  const double fine = std::abs(fock::relative_entropy(rho, sigma, 1e-12) - exact) / exact;
  const double coarse = std::abs(fock::relative_entropy(rho, sigma, 1e-10) - exact) / exact;
  return {make_check(tagged("relative_entropy_regularized", ref.label), fine, 1e-6),
          make_check(tagged("relative_entropy_eps_convergence", ref.label),
                     std::max(0.0, fine - coarse), 0.0)};
}

std::vector<OracleCheck> check_generic_identities(std::uint64_t seed, int cases, int levels) {
  std::mt19937_64 rng(seed);
  double channel_fd = 0.0, channel_exact = 0.0, fb = 0.0, km = 0.0, q = 0.0, sld4 = 0.0, psi = 0.0;
  double self = 0.0, shift = 0.0, trace = 0.0;
  const double h = 1e-3;
  for (int c = 0; c < cases; ++c) {
    const CMatrix g0 = random_hermitian(rng, levels, 1.0);
    const std::vector<CMatrix> dg = {random_hermitian(rng, levels, 1.0),
                                     random_hermitian(rng, levels, 1.0)};
    const fock::OracleState s = fock::OracleState::from_generator(g0);
    std::vector<CMatrix> drho;
    for (const CMatrix& gi : dg) {
      auto rho_at = [&](double t) { return fock::OracleState::from_generator(g0 + t * gi).rho(); };
      const CMatrix fd = (-rho_at(2 * h) + 8.0 * rho_at(h) - 8.0 * rho_at(-h) + rho_at(-2 * h)) / (12.0 * h);
      const CMatrix p1 = fock::thermal_derivative_channel(s, gi);
      channel_fd = std::max(channel_fd, max_abs(p1 - fd));
      channel_exact = std::max(channel_exact, max_abs(p1 - fock::thermal_derivative_exact(s, gi)));
      trace = std::max(trace, std::abs(p1.trace()));
      // SLD of the eigen formula against -Phi(dG) + <dG>.
      const CMatrix l = fock::sld_from_eig(s, p1);
      const CMatrix l4 = -fock::channel_apply(s, gi, KernelKind::kP) +
                         s.expectation(gi) * CMatrix::Identity(levels, levels);
      sld4 = std::max(sld4, max_abs(l - l4));
      psi = std::max(psi, max_abs(fock::channel_apply(s, gi, KernelKind::kQ) -
                                  fock::channel_apply(s, fock::channel_apply(s, gi, KernelKind::kP),
                                                      KernelKind::kP)));
      drho.push_back(p1);
    }
    const Matrix fb_eig = fock::fb_from_eig(s, drho);
    const Matrix km_eig = fock::km_from_eig(s, drho);
    const Matrix fb_ch = fock::fb_from_channels(s, dg);
    fb = std::max(fb, max_abs(fb_ch - fb_eig));
    km = std::max(km, max_abs(fock::km_from_channels(s, dg) - km_eig));
    q = std::max(q, max_abs(fock::fb_from_q_channel(s, dg) - fb_ch));

    // dG = G: d/de exp(-(1 + e) G) / Z(e).
    const double e = 1e-5;
    const CMatrix fd_self = (fock::OracleState::from_generator((1 + e) * g0).rho() -
                             fock::OracleState::from_generator((1 - e) * g0).rho()) /
                            (2 * e);
    self = std::max(self, max_abs(fock::thermal_derivative_channel(s, g0) - fd_self));
    shift = std::max(shift, max_abs(fock::thermal_derivative_channel(
                                s, CMatrix::Identity(levels, levels))));
  }
  return {make_check("generic_channel_derivative_vs_finite_difference", channel_fd, 1e-8),
          make_check("generic_channel_derivative_vs_exact", channel_exact, 1e-10),
          make_check("generic_channel_derivative_traceless", trace, 1e-12),
          make_check("generic_channel_derivative_self_direction", self, 1e-6),
          make_check("generic_channel_derivative_constant_shift", shift, 1e-12),
          make_check("generic_fb_channel_vs_eigen", fb, 1e-8),
          make_check("generic_km_channel_vs_eigen", km, 1e-8),
          make_check("generic_fb_q_channel_vs_channel", q, 1e-8),
          make_check("generic_sld_vs_channel_form", sld4, 1e-8),
          make_check("generic_q_channel_is_p_squared", psi, 1e-12)};
}

namespace {

// 2 tanh(beta / 2) = 1 / nu for the displacement of a thermal mode.
Matrix fb_displacement(double beta) { return 2.0 * std::tanh(0.5 * beta) * Matrix::Identity(2, 2); }
Matrix km_displacement(double beta) { return beta * Matrix::Identity(2, 2); }

}  // namespace

PrefactorTrial displacement_trial(double prefactor, const std::vector<double>& nus) {
  PrefactorTrial trial{prefactor, 0.0, 0.0, false};
  InfoOptions options;
  options.prefactor = prefactor;
  for (double nu : nus) {
    const double beta = thermal_beta(nu);
    const auto state = GaussianThermalState::from_hamiltonian(displaced_mean(2), beta * Matrix::Identity(2, 2));
    const Matrix fb = fisher_bures(state, IndexMode::kFullRedundant, options).mean_block();
    const Matrix km = kubo_mori(state, IndexMode::kFullRedundant, options).mean_block();
    trial.fb_residual = std::max(trial.fb_residual, max_abs(fb - fb_displacement(beta)));
    trial.km_residual = std::max(trial.km_residual, max_abs(km - km_displacement(beta)));
  }
  return trial;
}

PrefactorDecision discriminate_prefactor(const std::vector<double>& nus, int cutoff,
                                         double tolerance) {
  PrefactorDecision out;
  for (double nu : nus) {
    const double beta = thermal_beta(nu);
    const ReferenceState ref{"displacement", displaced_mean(2), beta * Matrix::Identity(2, 2), cutoff};
    const OracleContext ctx(ref);
    const std::vector<CMatrix> mean_drho(ctx.drho_eigen().begin(), ctx.drho_eigen().begin() + 2);
    const Matrix fb_o = fock::fb_from_eig(ctx.state(), mean_drho, fock::kEigFloor, nullptr, Basis::kEigen);
    const Matrix km_o = fock::km_from_eig(ctx.state(), mean_drho, fock::kEigFloor, nullptr, Basis::kEigen);
    out.oracle_residual = std::max({out.oracle_residual, max_abs(fb_o - fb_displacement(beta)),
                                    max_abs(km_o - km_displacement(beta))});
  }
  int passing = 0;
  for (double c : {kPrefactorAssembled, kPrefactorAnticommutator}) {
    PrefactorTrial trial = displacement_trial(c, nus);
    trial.passed = trial.fb_residual <= tolerance && trial.km_residual <= tolerance;
    passing += trial.passed;
    out.trials.push_back(trial);
  }
  if (passing == 1 && out.oracle_residual <= tolerance) {
    for (const auto& trial : out.trials) {
      if (trial.passed) out.resolved = trial.prefactor;
    }
  }
  return out;
}

std::filesystem::path default_data_dir() {
  std::error_code ec;
  const std::filesystem::path exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  const std::filesystem::path base = ec ? std::filesystem::current_path() : exe.parent_path();
  return base / "gaussgeo_data";
}

std::filesystem::path prefactor_record_path(const std::filesystem::path& data_dir) {
  return data_dir / "prefactor.json";
}

void save_prefactor_record(const std::filesystem::path& data_dir, const PrefactorDecision& d) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir, ec);
  std::ofstream out(prefactor_record_path(data_dir));
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot write " + prefactor_record_path(data_dir).string());
  }
  out << to_json(d).dump(2) << "\n";
}

std::optional<double> load_prefactor_record(const std::filesystem::path& data_dir) {
  std::ifstream in(prefactor_record_path(data_dir));
  if (!in) return std::nullopt;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    const auto& v = j.at("mean_block_prefactor");
    if (!v.is_number()) return std::nullopt;
    const double p = v.get<double>();
    if (!(p > 0.0) || !std::isfinite(p)) return std::nullopt;
    return p;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

bool OracleReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

double OracleReport::max_residual() const {
  double m = 0.0;
  for (const auto& c : checks) {
    if (!c.at_least) m = std::max(m, c.residual);
  }
  return m;
}

const OracleCheck* OracleReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

OracleReport run_oracle_suite(const OracleSuiteOptions& options) {
  const int cutoff = options.quick ? options.cutoff_quick : options.cutoff;
  OracleReport report;
  report.decision = discriminate_prefactor({0.8, 1.0, 2.0}, cutoff);
  report.prefactor_used = options.prefactor.value_or(
      report.decision.resolved.value_or(std::numeric_limits<double>::quiet_NaN()));

  auto add = [&report](std::vector<OracleCheck> checks) {
    for (auto& c : checks) report.checks.push_back(std::move(c));
  };
  add({make_check("closed_form_vs_oracle", report.decision.oracle_residual, 1e-6)});
  {
    PrefactorTrial used{report.prefactor_used, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(), false};
    if (std::isfinite(report.prefactor_used)) used = displacement_trial(report.prefactor_used, {0.8, 1.0, 2.0});
    add({make_check("mean_block_displacement_fb", used.fb_residual, 1e-6),
         make_check("mean_block_displacement_km", used.km_residual, 1e-6)});
  }

  auto refs = reference_states(cutoff, !options.quick, options.cutoff_two_mode);
  if (options.quick) {
    // nu = 2 needs the full cutoff for the 1e-8 moment bounds.
    std::erase_if(refs, [](const ReferenceState& r) { return r.label == "thermal_nu=2.0"; });
  }
  for (const ReferenceState& ref : refs) {
    const OracleContext ctx(ref, options.fock_tol);
    const bool single_mode = ref.mu.size() == 2;
    add(check_state_construction(ctx));
    add(check_moments(ctx));
    add(check_information_matrices(ctx, report.prefactor_used));
    add(check_derivative_routes(ctx));
    add(check_state_derivatives(ctx, single_mode));
    add(check_sld(ctx));
    add(check_heisenberg_evolution(ctx));
    add(check_channels(ctx));
    if (single_mode && std::isfinite(report.prefactor_used)) {
      const auto scan = line_element_scan(ref, report.prefactor_used, {1e-2, 5e-3, 2.5e-3},
                                          options.fock_tol);
      add(check_line_element(tagged("bures_line_element", ref.label), scan, false,
                             kBuresLineCoefficient));
      add(check_line_element(tagged("relative_entropy_line_element", ref.label), scan, true,
                             kRelativeEntropyLineCoefficient));
    }
  }
  const auto aniso = std::find_if(refs.begin(), refs.end(),
                                  [](const ReferenceState& r) { return r.label == "anisotropic"; });
  add(check_relative_entropy_regularization(*aniso, options.fock_tol));
  add(check_generic_identities(options.seed));
  return report;
}

nlohmann::json to_json(const OracleCheck& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["residual"] = std::isfinite(c.residual) ? nlohmann::json(c.residual) : nlohmann::json(nullptr);
  j["bound"] = c.bound;
  j["relation"] = c.at_least ? ">=" : "<=";
  j["passed"] = c.passed;
  return j;
}

nlohmann::json to_json(const PrefactorDecision& d) {
  nlohmann::json j;
  j["mean_block_prefactor"] = d.resolved ? nlohmann::json(*d.resolved) : nlohmann::json(nullptr);
  j["closed_form_oracle_residual"] = d.oracle_residual;
  j["trials"] = nlohmann::json::array();
  for (const auto& t : d.trials) {
    j["trials"].push_back({{"prefactor", t.prefactor},
                           {"fb_residual", t.fb_residual},
                           {"km_residual", t.km_residual},
                           {"passed", t.passed}});
  }
  return j;
}

nlohmann::json to_json(const OracleReport& r) {
  nlohmann::json j;
  j["passed"] = r.passed();
  j["max_residual"] = r.max_residual();
  j["prefactor_used"] =
      std::isfinite(r.prefactor_used) ? nlohmann::json(r.prefactor_used) : nlohmann::json(nullptr);
  j["prefactor_decision"] = to_json(r.decision);
  if (const OracleCheck* f = r.first_failure()) j["first_failure"] = f->name;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  return j;
}

}  // namespace gaussgeo
