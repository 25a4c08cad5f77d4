// omplab: generate sensing matrices, run the greedy decoder, estimate
// restricted-isometry constants, and check the recovery bounds end to end.
//
// Exit codes: 0 success, 1 contract violation (bad arguments or
// out-of-contract inputs), 2 I/O error (unreadable or malformed files).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "omplab/omplab.hpp"

namespace {

using nlohmann::json;
using namespace omplab;

Vector vector_from_config(const json& cfg, const std::string& field) {
  if (!cfg.contains(field)) {
    throw ContractViolation("verify config: missing field '" + field + "'");
  }
  const json& v = cfg.at(field);
  if (v.is_object() && v.contains("file")) {
    return read_vector_csv(v.at("file").get<std::string>());
  }
  if (!v.is_array()) {
    throw ContractViolation("verify config: field '" + field +
                            "' must be an array or {\"file\": path}");
  }
  Vector out;
  out.reserve(v.size());
  for (const auto& entry : v) {
    if (!entry.is_number()) {
      throw ContractViolation("verify config: field '" + field + "' must hold numbers");
    }
    out.push_back(entry.get<double>());
  }
  require_finite(out, field.c_str());
  return out;
}

Vector vector_or_zeros(const json& cfg, const std::string& field, int len) {
  if (!cfg.contains(field)) return Vector(len, 0.0);
  return vector_from_config(cfg, field);
}

DenseMatrix matrix_from_config(const json& cfg) {
  if (!cfg.contains("matrix")) throw ContractViolation("verify config: missing field 'matrix'");
  const json& m = cfg.at("matrix");
  if (!m.is_object()) throw ContractViolation("verify config: 'matrix' must be an object");
  if (m.contains("file")) return read_matrix_csv(m.at("file").get<std::string>());
  MatrixSpec spec;
  if (!m.contains("ensemble") || !m.contains("rows") || !m.contains("cols")) {
    throw ContractViolation(
        "verify config: 'matrix' needs either {\"file\": path} or ensemble/rows/cols/seed");
  }
  spec.ensemble = ensemble_from_string(m.at("ensemble").get<std::string>());
  spec.rows = m.at("rows").get<int>();
  spec.cols = m.at("cols").get<int>();
  spec.seed = m.value("seed", std::uint64_t{0});
  return generate(spec);
}

template <typename T>
T field(const json& cfg, const std::string& name) {
  if (!cfg.contains(name)) {
    throw ContractViolation("verify config: missing field '" + name + "'");
  }
  try {
    return cfg.at(name).get<T>();
  } catch (const json::exception&) {
    throw ContractViolation("verify config: field '" + name + "' has the wrong type");
  }
}

BoundReport run_verify(const std::string& kind, const json& cfg) {
  if (kind == "theorem1") {
    const DenseMatrix Phi = matrix_from_config(cfg);
    const Vector x = vector_from_config(cfg, "x");
    const Vector e = vector_or_zeros(cfg, "e", Phi.rows());
    const PremiseStatus premise =
        premise_status_from_string(cfg.value("premise_status", "not_checked"));
    return verify_theorem1(Phi, x, e, field<int>(cfg, "k"), field<double>(cfg, "p"),
                           field<double>(cfg, "q"), field<double>(cfg, "delta"), premise);
  }
  if (kind == "theorem2") {
    const DenseMatrix Phi = matrix_from_config(cfg);
    const Vector x = vector_from_config(cfg, "x");
    const PremiseStatus premise =
        premise_status_from_string(cfg.value("premise_status", "not_checked"));
    return verify_theorem2(Phi, x, field<int>(cfg, "k"), field<double>(cfg, "delta"),
                           field<double>(cfg, "C_bound"), premise);
  }
  if (kind == "zhang") {
    const DenseMatrix Phi = matrix_from_config(cfg);
    return verify_zhang(Phi, vector_from_config(cfg, "y"), vector_from_config(cfg, "xbar"),
                        field<double>(cfg, "delta"), cfg.value("use_exact", true),
                        cfg.value("samples", std::uint64_t{1000}),
                        cfg.value("seed", std::uint64_t{0}));
  }
  if (kind == "lemma1") {
    const DenseMatrix Phi = matrix_from_config(cfg);
    const PremiseStatus premise =
        premise_status_from_string(cfg.value("premise_status", "not_checked"));
    return verify_lemma1(Phi, vector_from_config(cfg, "z"), field<int>(cfg, "k"),
                         field<double>(cfg, "p"), field<double>(cfg, "delta"), premise);
  }
  if (kind == "lemma2") {
    return verify_lemma2(vector_from_config(cfg, "z"), field<int>(cfg, "k"),
                         field<double>(cfg, "p"), field<double>(cfg, "q"));
  }
  if (kind == "holder") {
    return verify_holder(vector_from_config(cfg, "b"), field<double>(cfg, "q"));
  }
  throw ContractViolation("verify: unknown kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonal matching pursuit lab: decoder, RIP estimators, bound checks"};
  app.require_subcommand(1);

  // gen-matrix
  auto* gen = app.add_subcommand("gen-matrix", "draw a sensing matrix and write it as CSV");
  std::string gen_ensemble;
  int gen_rows = 0, gen_cols = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--ensemble", gen_ensemble, "gaussian|bernoulli|orthogonal")->required();
  gen->add_option("--rows", gen_rows, "measurement count n")->required();
  gen->add_option("--cols", gen_cols, "signal dimension N")->required();
  gen->add_option("--seed", gen_seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->callback([&] {
    const MatrixSpec spec{ensemble_from_string(gen_ensemble), gen_rows, gen_cols, gen_seed};
    write_matrix_csv(generate(spec), gen_out);
  });

  // decode
  auto* dec = app.add_subcommand("decode", "run the decoder on y and write the trace as JSON");
  std::string dec_matrix, dec_y, dec_out;
  int dec_iters = 0;
  double dec_stop_rel = 1e-12;
  dec->add_option("--matrix", dec_matrix, "sensing matrix CSV")->required();
  dec->add_option("--y", dec_y, "measurement vector CSV (one row or one column)")->required();
  dec->add_option("--iters", dec_iters, "iteration count M")->required();
  dec->add_option("--stop-rel", dec_stop_rel, "relative residual stop threshold");
  dec->add_option("--out", dec_out, "output JSON path")->required();
  dec->callback([&] {
    const DenseMatrix Phi = read_matrix_csv(dec_matrix);
    const Vector y = read_vector_csv(dec_y);
    const RecoveryResult rec = omp_decode(Phi, y, OmpOptions{dec_iters, dec_stop_rel});
    json j = to_json(rec);
    j["v"] = 1;
    write_json(j, dec_out);
  });

  // rip
  auto* rip = app.add_subcommand("rip", "estimate the isometry constant delta_k");
  std::string rip_matrix, rip_out;
  int rip_k = 0;
  bool rip_exact = false;
  std::uint64_t rip_samples = 0, rip_seed = 0;
  rip->add_option("--matrix", rip_matrix, "sensing matrix CSV")->required();
  rip->add_option("--k", rip_k, "sparsity order")->required();
  auto* exact_flag = rip->add_flag("--exact", rip_exact, "enumerate every support");
  auto* samples_opt =
      rip->add_option("--samples", rip_samples, "Monte-Carlo support draws (lower bound)");
  rip->add_option("--seed", rip_seed, "Monte-Carlo seed");
  rip->add_option("--out", rip_out, "output JSON path")->required();
  exact_flag->excludes(samples_opt);
  rip->callback([&] {
    if (!rip_exact && samples_opt->count() == 0) {
      throw ContractViolation("rip: choose --exact or --samples S");
    }
    const DenseMatrix Phi = read_matrix_csv(rip_matrix);
    const RipEstimate est = rip_exact ? rip_delta_exact(Phi, rip_k)
                                      : rip_delta_lower_bound(Phi, rip_k, rip_samples, rip_seed);
    json j = to_json(est);
    j["v"] = 1;
    write_json(j, rip_out);
  });

  // premise
  auto* prem = app.add_subcommand(
      "premise", "check delta_k + (1+delta) delta_{alpha k} <= delta and write the report");
  std::string prem_matrix, prem_out;
  int prem_k = 0;
  double prem_delta = 0.0;
  std::uint64_t prem_samples = 1000, prem_seed = 0;
  bool prem_no_exact = false;
  prem->add_option("--matrix", prem_matrix, "sensing matrix CSV")->required();
  prem->add_option("--k", prem_k, "sparsity order")->required();
  prem->add_option("--delta", prem_delta, "isometry level in (0, 1]")->required();
  prem->add_option("--samples", prem_samples, "sampled supports per order when not exact");
  prem->add_option("--seed", prem_seed, "sampling seed");
  prem->add_flag("--no-exact", prem_no_exact, "skip exact enumeration even when feasible");
  prem->add_option("--out", prem_out, "output JSON path")->required();
  prem->callback([&] {
    const DenseMatrix Phi = read_matrix_csv(prem_matrix);
    const BoundReport rep =
        check_rip_premise(Phi, prem_k, prem_delta, !prem_no_exact, prem_samples, prem_seed);
    json j = to_json(rep);
    j["v"] = 1;
    write_json(j, prem_out);
  });

  // verify
  auto* ver = app.add_subcommand("verify", "evaluate one of the recovery bounds from a config");
  std::string ver_kind, ver_config, ver_out;
  ver->add_option("kind", ver_kind, "theorem1|theorem2|zhang|lemma1|lemma2|holder")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theorem2", "zhang", "lemma1", "lemma2", "holder"}));
  ver->add_option("--config", ver_config, "JSON config path")->required();
  ver->add_option("--out", ver_out, "output JSON path")->required();
  ver->callback([&] {
    const json cfg = read_json(ver_config);
    if (!cfg.is_object()) throw ContractViolation("verify config: root must be an object");
    json j = to_json(run_verify(ver_kind, cfg));
    j["v"] = 1;
    write_json(j, ver_out);
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a seeded trial batch from a config");
  std::string exp_config, exp_out;
  exp->add_option("--config", exp_config, "JSON config path")->required();
  exp->add_option("--out", exp_out, "output JSON path")->required();
  exp->callback([&] {
    const ExperimentConfig cfg = experiment_config_from_json(read_json(exp_config));
    write_json(to_json(run_experiment(cfg)), exp_out);
  });

  // constants
  auto* con = app.add_subcommand("constants", "print the bound constants as JSON");
  double con_delta = 0.0, con_q = 2.0;
  std::optional<double> con_c;
  con->add_option("--delta", con_delta, "isometry level in (0, 1]")->required();
  con->add_option("--q", con_q, "error exponent in [1, 2]")->required();
  con->add_option("--C-bound", con_c, "boundedness constant for C3");
  con->callback([&] {
    const TheoremConstants c = constants(con_delta, con_q, con_c);
    json j{{"delta", c.delta}, {"q", c.q},   {"alpha", c.alpha},
           {"C0", c.C0},       {"C1", c.C1}, {"C2", c.C2}};
    j["C3"] = c.C3 ? json(*c.C3) : json(nullptr);
    std::cout << j.dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
