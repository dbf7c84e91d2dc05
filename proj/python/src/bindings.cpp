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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gaussgeo/errors.hpp"
#include "gaussgeo/info_geometry.hpp"
#include "gaussgeo/kernels.hpp"
#include "gaussgeo/observables.hpp"
#include "gaussgeo/oracle_suite.hpp"
#include "gaussgeo/symplectic.hpp"

namespace py = pybind11;
using namespace gaussgeo;

namespace {

IndexMode index_mode(const std::string& s) {
  if (s == "full") return IndexMode::kFullRedundant;
  if (s == "reduced") return IndexMode::kSymmetricReduced;
  throw Error(ErrorCode::kInvalidArgument, "index_mode must be 'full' or 'reduced'");
}

KernelKind kernel(const std::string& s) {
  if (s == "p") return KernelKind::kP;
  if (s == "q") return KernelKind::kQ;
  throw Error(ErrorCode::kInvalidArgument, "kernel must be 'p' or 'q'");
}

py::dict info_dict(const InfoMatrix& info) {
  py::dict d;
  py::list labels;
  for (const auto& p : info.index) labels.append(p.label());
  d["kind"] = to_string(info.kind);
  d["index_mode"] = to_string(info.index_mode);
  d["prefactor"] = info.prefactor;
  d["index_map"] = labels;
  d["data"] = Matrix(0.5 * (info.data + info.data.transpose()));
  return d;
}

py::dict observable_dict(const QuadraticObservable& o) {
  py::dict d;
  d["c"] = o.c;
  d["lin"] = o.lin;
  d["quad"] = o.quad;
  return d;
}

GaussianThermalState state(const Vector& mu, const Matrix& h) {
  return GaussianThermalState::from_hamiltonian(mu, h);
}

}  // namespace

PYBIND11_MODULE(_gaussgeo, m) {
  m.doc() = "Information geometry of bosonic Gaussian thermal states.";

  static py::exception<Error> exc(m, "GaussgeoError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc(e.what());
    }
  });

  m.def("cov_from_ham", [](const Matrix& h) { return cov_from_ham(h); }, py::arg("h"));
  m.def("ham_from_cov", [](const Matrix& v) { return ham_from_cov(v); }, py::arg("v"));
  m.def("symplectic_eigenvalues", &symplectic_eigenvalues, py::arg("v"));
  m.def("williamson", [](const Matrix& v) {
    const auto w = williamson(v);
    return py::make_tuple(w.s, w.d);
  }, py::arg("v"), "Returns (S, nu) with V = S diag(nu, nu) S^T.");
  m.def("log_partition_function", &log_partition_function, py::arg("mu"), py::arg("h"));
  m.def("omega", [](int n) { return omega(ModeCount(n)); }, py::arg("n_modes"));

  m.def("p_density", &p_density, py::arg("t"));
  m.def("q_density", &q_density_cached, py::arg("t"));
  m.def("kernel_ft", [](const std::string& k, double w) { return kernel_ft(kernel(k), w); },
        py::arg("kernel"), py::arg("omega"));

  m.def("fisher_bures", [](const Vector& mu, const Matrix& h, const std::string& mode, double prefactor) {
    InfoOptions o;
    o.prefactor = prefactor;
    return info_dict(fisher_bures(state(mu, h), index_mode(mode), o));
  }, py::arg("mu"), py::arg("h"), py::arg("index_mode") = "reduced",
        py::arg("prefactor") = kPrefactorAnticommutator);
  m.def("kubo_mori", [](const Vector& mu, const Matrix& h, const std::string& mode, double prefactor) {
    InfoOptions o;
    o.prefactor = prefactor;
    return info_dict(kubo_mori(state(mu, h), index_mode(mode), o));
  }, py::arg("mu"), py::arg("h"), py::arg("index_mode") = "reduced",
        py::arg("prefactor") = kPrefactorAnticommutator);

  m.def("sld", [](const Vector& mu, const Matrix& h, const std::string& param) {
    return observable_dict(sld(state(mu, h), ParameterIndex::parse(param, static_cast<int>(mu.size()))));
  }, py::arg("mu"), py::arg("h"), py::arg("param"));
  m.def("state_derivative", [](const Vector& mu, const Matrix& h, const std::string& param) {
    const auto d = state_derivative(state(mu, h), ParameterIndex::parse(param, static_cast<int>(mu.size())));
    py::dict out = observable_dict(d.a_op);
    out["scalar_term"] = d.scalar_term;
    return out;
  }, py::arg("mu"), py::arg("h"), py::arg("param"));

  m.def("crb", [](const Vector& mu, const Matrix& h, const Matrix& weight, int n_copies,
                  bool pseudo_inverse, double prefactor) {
    InfoOptions o;
    o.prefactor = prefactor;
    const auto mode = pseudo_inverse ? IndexMode::kFullRedundant : IndexMode::kSymmetricReduced;
    const CrbResult r = crb_scalar(fisher_bures(state(mu, h), mode, o), weight, n_copies, pseudo_inverse);
    py::dict d;
    d["bound"] = r.bound;
    d["condition"] = r.condition;
    d["rank"] = r.rank;
    return d;
  }, py::arg("mu"), py::arg("h"), py::arg("weight"), py::arg("n_copies") = 1,
        py::arg("pseudo_inverse") = false, py::arg("prefactor") = kPrefactorAnticommutator);

  m.def("discriminate_prefactor", [](int cutoff) {
    return to_json(discriminate_prefactor({0.8, 1.0, 2.0}, cutoff)).dump();
  }, py::arg("cutoff") = 60, "JSON text of the displaced-thermal prefactor experiment.");
  m.def("oracle_check", [](bool quick) {
    OracleSuiteOptions o;
    o.quick = quick;
    return to_json(run_oracle_suite(o)).dump();
  }, py::arg("quick") = true, "JSON text of the Fock-oracle identity report.");
}
