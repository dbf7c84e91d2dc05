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

#include "gaussgeo/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "gaussgeo/errors.hpp"
#include "gaussgeo/observables.hpp"
#include "gaussgeo/oracle_suite.hpp"

namespace gaussgeo::cli {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIllConditioned:
    case ErrorCode::kSingularPoint:
    case ErrorCode::kCutoffTooSmall:
      return kExitNumerical;
    case ErrorCode::kSingularMatrix:
      return kExitSingular;
    default:
      return kExitValidation;
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

double number_at(const json& j, const char* name) {
  if (!j.is_number()) throw Error(ErrorCode::kInvalidArgument, std::string(name) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, std::string(name) + ": non-finite value");
  return x;
}

Vector vector_from_json(const json& j, const char* name) {
  if (!j.is_array()) throw Error(ErrorCode::kInvalidArgument, std::string(name) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_at(j[i], name);
  return v;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

json read_json_file(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path);
    in = &file;
  }
  try {
    return json::parse(*in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

// Rounds every number to `digits` significant digits; rejects NaN and Inf.
void finalize_numbers(json& j, int digits) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::kIllConditioned, "non-finite value in output");
    if (digits < 17) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*g", digits, x);
      j = std::strtod(buf, nullptr);
    }
  } else if (j.is_structured()) {
    for (auto& item : j) finalize_numbers(item, digits);
  }
}

json error_json(const std::string& code, const std::string& message, int exit_code) {
  return {{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
}

json labels(const std::vector<ParameterIndex>& index) {
  json out = json::array();
  for (const auto& p : index) out.push_back(p.label());
  return out;
}

const char* choice_name(PrefactorChoice c) {
  switch (c) {
    case PrefactorChoice::kPaperTheorem1:
      return "PaperTheorem1";
    case PrefactorChoice::kProposition3:
      return "Proposition3";
    case PrefactorChoice::kOracleDefault:
      break;
  }
  return "OracleDefault";
}

PrefactorChoice parse_choice(const std::string& s) {
  if (s == "paper" || s == "PaperTheorem1") return PrefactorChoice::kPaperTheorem1;
  if (s == "prop3" || s == "Proposition3") return PrefactorChoice::kProposition3;
  if (s == "oracle" || s == "OracleDefault") return PrefactorChoice::kOracleDefault;
  throw Error(ErrorCode::kInvalidArgument, "unknown prefactor choice '" + s + "'");
}

IndexMode parse_index_mode(const std::string& s) {
  if (s == "full" || s == "FullRedundant") return IndexMode::kFullRedundant;
  if (s == "reduced" || s == "SymmetricReduced") return IndexMode::kSymmetricReduced;
  throw Error(ErrorCode::kInvalidArgument, "unknown index mode '" + s + "'");
}

json observable_json(const QuadraticObservable& o) {
  return {{"c", o.c}, {"lin", vector_to_json(o.lin)}, {"quad", matrix_to_json(symmetrized(o.quad))}};
}

constexpr const char* kObservableConvention =
    "c + sum_j lin_j xc_j + sum_kl quad_kl {xc_k, xc_l}/2, xc = x - mean, x = (q_1..q_n, p_1..p_n)";

}  // namespace

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + ": expected a nested array");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::kDimensionMismatch, std::string(name) + ": ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = number_at(row[static_cast<std::size_t>(k)], name);
  }
  return m;
}

StateSpec StateSpec::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "state spec must be a JSON object");
  StateSpec spec;
  const int supplied = static_cast<int>(j.contains("matrix")) + static_cast<int>(j.contains("hamiltonian")) +
                       static_cast<int>(j.contains("covariance"));
  if (supplied != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "supply exactly one of matrix, hamiltonian, covariance");
  }
  if (j.contains("matrix")) {
    spec.matrix = matrix_from_json(j["matrix"], "matrix");
    const std::string kind = j.value("matrix_kind", std::string());
    if (kind == "Hamiltonian" || kind == "hamiltonian") {
      spec.matrix_kind = MatrixKind::kHamiltonian;
    } else if (kind == "Covariance" || kind == "covariance") {
      spec.matrix_kind = MatrixKind::kCovariance;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "matrix_kind must be Hamiltonian or Covariance");
    }
  } else if (j.contains("hamiltonian")) {
    spec.matrix = matrix_from_json(j["hamiltonian"], "hamiltonian");
  } else {
    spec.matrix = matrix_from_json(j["covariance"], "covariance");
    spec.matrix_kind = MatrixKind::kCovariance;
  }
  const auto dim = spec.matrix.rows();
  spec.n_modes = j.contains("n_modes") ? j["n_modes"].get<int>() : static_cast<int>(dim / 2);
  if (spec.n_modes < 1 || 2 * spec.n_modes != dim || spec.matrix.cols() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix must be 2n x 2n with n = n_modes");
  }
  spec.mean = j.contains("mean") ? vector_from_json(j["mean"], "mean") : Vector::Zero(dim);
  if (spec.mean.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "mean must have length 2n");
  return spec;
}

GaussianThermalState StateSpec::load() const { return validate_state(mean, matrix, matrix_kind); }

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  RunConfig c;
  try {
    if (j.contains("quadrature")) {
      const json& q = j["quadrature"];
      c.quadrature.abs_tol = q.value("abs_tol", c.quadrature.abs_tol);
      c.quadrature.rel_tol = q.value("rel_tol", c.quadrature.rel_tol);
      c.quadrature.t_max = q.value("t_max", c.quadrature.t_max);
      c.quadrature.singular_split = q.value("singular_split", c.quadrature.singular_split);
      c.quadrature.max_intervals = q.value("max_intervals", c.quadrature.max_intervals);
    }
    if (j.contains("index_mode")) c.index_mode = parse_index_mode(j["index_mode"].get<std::string>());
    if (j.contains("mean_block_prefactor")) {
      c.mean_block_prefactor = parse_choice(j["mean_block_prefactor"].get<std::string>());
    }
    if (j.contains("fock")) {
      c.fock_cutoff = j["fock"].value("cutoff", c.fock_cutoff);
      c.fock_tol = j["fock"].value("fock_tol", c.fock_tol);
    }
    c.output_precision = j.value("output_precision", c.output_precision);
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  c.quadrature.validate();
  if (c.output_precision < 1 || c.output_precision > 17) {
    throw Error(ErrorCode::kInvalidArgument, "output_precision must be in [1, 17]");
  }
  if (c.fock_cutoff < 4 || !(c.fock_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fock.cutoff must be >= 4 and fock.fock_tol > 0");
  }
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["quadrature"] = {{"abs_tol", quadrature.abs_tol},
                     {"rel_tol", quadrature.rel_tol},
                     {"t_max", quadrature.t_max},
                     {"singular_split", quadrature.singular_split},
                     {"max_intervals", quadrature.max_intervals}};
  j["index_mode"] = gaussgeo::to_string(index_mode);
  j["mean_block_prefactor"] = choice_name(mean_block_prefactor);
  j["fock"] = {{"cutoff", fock_cutoff}, {"fock_tol", fock_tol}};
  j["output_precision"] = output_precision;
  if (data_dir) j["data_dir"] = data_dir->string();
  return j;
}

double resolve_prefactor(const RunConfig& config) {
  switch (config.mean_block_prefactor) {
    case PrefactorChoice::kPaperTheorem1:
      return kPrefactorAssembled;
    case PrefactorChoice::kProposition3:
      return kPrefactorAnticommutator;
    case PrefactorChoice::kOracleDefault:
      break;
  }
  const auto dir = config.data_dir.value_or(default_data_dir());
  if (auto p = load_prefactor_record(dir)) return *p;
  throw Error(ErrorCode::kInvalidArgument,
              "no resolved mean-block prefactor recorded in " + prefactor_record_path(dir).string() +
                  "; run oracle-check first or pass --prefactor paper|prop3");
}

namespace {

struct Options {
  std::string input;
  std::string config;
  std::string index_mode;
  std::string prefactor;
  bool pseudo_inverse = false;
  bool quick = false;
  std::string output;
  std::string param;
  std::string weight;
  int copies = 1;
};

RunConfig load_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : RunConfig::from_json(read_json_file(o.config));
  if (!o.index_mode.empty()) c.index_mode = parse_index_mode(o.index_mode);
  if (!o.prefactor.empty()) c.mean_block_prefactor = parse_choice(o.prefactor);
  return c;
}

GaussianThermalState load_state(const Options& o) {
  if (o.input.empty()) throw Error(ErrorCode::kInvalidArgument, "--input is required");
  return StateSpec::from_json(read_json_file(o.input)).load();
}

json cmd_convert(const Options& o) {
  const GaussianThermalState s = load_state(o);
  const double log_z = s.log_partition();
  return {{"n_modes", s.modes().value()},
          {"mean", vector_to_json(s.mu())},
          {"H", matrix_to_json(symmetrized(s.ham()))},
          {"V", matrix_to_json(symmetrized(s.cov()))},
          {"log_Z", log_z},
          {"Z", std::exp(log_z)},
          {"symplectic_eigenvalues", vector_to_json(s.symplectic_eigenvalues())}};
}

json cmd_info(const Options& o, InfoKind kind) {
  const RunConfig config = load_config(o);
  const GaussianThermalState s = load_state(o);
  InfoOptions options;
  options.prefactor = resolve_prefactor(config);
  options.quadrature = config.quadrature;
  const InfoMatrix info = information_matrix(kind, s, config.index_mode, options);
  return {{"kind", to_string(kind)},
          {"index_mode", to_string(info.index_mode)},
          {"prefactor", info.prefactor},
          {"prefactor_choice", choice_name(config.mean_block_prefactor)},
          {"index_map", labels(info.index)},
          {"data", matrix_to_json(symmetrized(info.data))}};
}

ParameterIndex parse_param(const Options& o, const GaussianThermalState& s) {
  if (o.param.empty()) throw Error(ErrorCode::kInvalidArgument, "--param is required");
  return ParameterIndex::parse(o.param, s.dim());
}

json cmd_sld(const Options& o) {
  const RunConfig config = load_config(o);
  const GaussianThermalState s = load_state(o);
  ObservableOptions options;
  options.quadrature = config.quadrature;
  const ParameterIndex p = parse_param(o, s);
  json j = observable_json(sld(s, p, options));
  j["param"] = p.label();
  j["convention"] = std::string(kObservableConvention) + "; d rho = {L, rho}/2";
  return j;
}

json cmd_deriv(const Options& o) {
  const RunConfig config = load_config(o);
  const GaussianThermalState s = load_state(o);
  ObservableOptions options;
  options.quadrature = config.quadrature;
  const ParameterIndex p = parse_param(o, s);
  const StateDerivative d = state_derivative(s, p, options);
  json j = observable_json(d.a_op);
  j["scalar_term"] = d.scalar_term;
  j["param"] = p.label();
  j["convention"] = std::string(kObservableConvention) + "; d rho = -{A, rho}/2 + scalar_term rho";
  return j;
}

json cmd_crb(const Options& o, bool index_mode_given) {
  RunConfig config = load_config(o);
  if (!index_mode_given && !o.pseudo_inverse) config.index_mode = IndexMode::kSymmetricReduced;
  const GaussianThermalState s = load_state(o);
  if (o.weight.empty()) throw Error(ErrorCode::kInvalidArgument, "--weight is required");
  const json wj = read_json_file(o.weight);
  const Matrix weight = matrix_from_json(wj.is_object() ? wj.at("matrix") : wj, "weight");
  InfoOptions options;
  options.prefactor = resolve_prefactor(config);
  options.quadrature = config.quadrature;
  const InfoMatrix info = fisher_bures(s, config.index_mode, options);
  const CrbResult r = crb_scalar(info, weight, o.copies, o.pseudo_inverse);

  // Conditioning of the block the weight actually probes.
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < weight.rows(); ++i) {
    if (weight.row(i).cwiseAbs().maxCoeff() > 0.0) support.push_back(i);
  }
  json sub = nullptr;
  if (!support.empty()) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix block(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) block(a, b) = info.data(support[a], support[b]);
    }
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrized(block), Eigen::EigenvaluesOnly).eigenvalues();
    json sub_labels = json::array();
    for (auto i : support) sub_labels.push_back(info.index[static_cast<std::size_t>(i)].label());
    sub = {{"coordinates", sub_labels},
           {"min_eigenvalue", ev(0)},
           {"max_eigenvalue", ev(k - 1)}};
    if (ev(0) > 0.0) sub["condition_number"] = ev(k - 1) / ev(0);
  }
  json cond = {{"rank", r.rank}, {"size", info.size()}, {"pseudo_inverse", r.pseudo_inverse},
               {"weighted_block", sub}};
  if (std::isfinite(r.condition)) cond["condition_number"] = r.condition;
  return {{"bound", r.bound},
          {"n_copies", o.copies},
          {"index_mode", to_string(info.index_mode)},
          {"index_map", labels(info.index)},
          {"prefactor", info.prefactor},
          {"conditioning", cond}};
}

json cmd_oracle_check(const Options& o, std::ostream& err, int& code) {
  const RunConfig config = load_config(o);
  OracleSuiteOptions options;
  options.quick = o.quick;
  options.cutoff = config.fock_cutoff;
  options.cutoff_quick = std::min(40, config.fock_cutoff);
  options.fock_tol = config.fock_tol;
  if (config.mean_block_prefactor != PrefactorChoice::kOracleDefault) {
    options.prefactor = resolve_prefactor(config);
  }
  const OracleReport report = run_oracle_suite(options);
  save_prefactor_record(config.data_dir.value_or(default_data_dir()), report.decision);
  json j = to_json(report);
  j["quick"] = o.quick;
  j["prefactor_choice"] = choice_name(config.mean_block_prefactor);
  if (const OracleCheck* f = report.first_failure()) {
    err << "oracle-check: " << f->name << " residual " << f->residual
        << (f->at_least ? " below " : " above ") << f->bound << "\n";
    code = kExitOracle;
  }
  return j;
}

void emit(const json& j, const Options& o, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.output);
  if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + o.output);
  file << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Information geometry of Gaussian thermal states", "gaussgeo"};
  app.require_subcommand(1);
  Options o;
  auto* mode_opt = app.add_option("--index-mode", o.index_mode, "full | reduced")
                       ->check(CLI::IsMember({"full", "reduced"}));
  app.add_option("--input", o.input, "State spec JSON file ('-' for stdin)");
  app.add_option("--config", o.config, "RunConfig JSON file");
  app.add_option("--prefactor", o.prefactor, "paper | prop3 | oracle")
      ->check(CLI::IsMember({"paper", "prop3", "oracle"}));
  app.add_flag("--pseudo-inverse", o.pseudo_inverse, "Allow a pseudo-inverse in crb");
  app.add_flag("--quick", o.quick, "oracle-check on single-mode states at a smaller cutoff");
  app.add_option("--output", o.output, "Write the JSON result to FILE");

  auto* convert = app.add_subcommand("convert", "H <-> V, partition function, symplectic spectrum");
  auto* fb = app.add_subcommand("fb", "Fisher-Bures information matrix");
  auto* km = app.add_subcommand("km", "Kubo-Mori information matrix");
  auto* sld_cmd = app.add_subcommand("sld", "Symmetric logarithmic derivative");
  auto* deriv = app.add_subcommand("deriv", "State derivative");
  auto* crb = app.add_subcommand("crb", "Scalar Cramer-Rao bound");
  auto* oracle = app.add_subcommand("oracle-check", "Run the Fock-space identity suite");
  for (auto* sub : {convert, fb, km, sld_cmd, deriv, crb, oracle}) sub->fallthrough();
  for (auto* sub : {sld_cmd, deriv}) {
    sub->add_option("--param", o.param, "mu:m or h:k,l (1-based)")->required();
  }
  crb->add_option("--weight", o.weight, "Weight matrix JSON (nested array or {\"matrix\": ...})")
      ->required();
  crb->add_option("--copies", o.copies, "Number of copies n")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    out << error_json("InvalidArgument", e.what(), kExitValidation).dump(2) << "\n";
    err << "gaussgeo: " << e.what() << "\n";
    return kExitValidation;
  }

  int code = kExitOk;
  int precision = 17;
  try {
    if (!o.config.empty()) precision = RunConfig::from_json(read_json_file(o.config)).output_precision;
    json result;
    if (convert->parsed()) {
      result = cmd_convert(o);
    } else if (fb->parsed()) {
      result = cmd_info(o, InfoKind::kFisherBures);
    } else if (km->parsed()) {
      result = cmd_info(o, InfoKind::kKuboMori);
    } else if (sld_cmd->parsed()) {
      result = cmd_sld(o);
    } else if (deriv->parsed()) {
      result = cmd_deriv(o);
    } else if (crb->parsed()) {
      result = cmd_crb(o, mode_opt->count() > 0);
    } else {
      result = cmd_oracle_check(o, err, code);
    }
    finalize_numbers(result, precision);
    emit(result, o, out);
  } catch (const Error& e) {
    const int exit_code = exit_code_for(e.code());
    out << error_json(std::string(to_string(e.code())), e.what(), exit_code).dump(2) << "\n";
    err << "gaussgeo: " << e.what() << "\n";
    return exit_code;
  } catch (const std::exception& e) {
    out << error_json("InvalidArgument", e.what(), kExitValidation).dump(2) << "\n";
    err << "gaussgeo: " << e.what() << "\n";
    return kExitValidation;
  }
  return code;
}

}  // namespace gaussgeo::cli
