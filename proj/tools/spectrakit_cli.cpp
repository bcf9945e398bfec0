#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spectrakit.hpp"

namespace fs = std::filesystem;
using namespace spectrakit;

namespace {

constexpr int kExitUndecided = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LoadedOp {
  StructuredOperator op;
  json input;  // {file, digest}
};

LoadedOp load_op(const std::string& path) {
  const std::string text = read_file(path);
  return {parse_spec(text), json{{"file", path}, {"digest", digest(text)}}};
}

/// Reports are written whole-file via a temp name + rename so readers never
/// observe a partial document.
void write_report(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  const fs::path target(out_path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw parse_error("cannot open report path: " + out_path);
    out << text;
  }
  fs::rename(tmp, target);
}

const char* attainment_str(Attainment a) {
  switch (a) {
    case Attainment::Yes: return "Yes";
    case Attainment::No: return "No";
    default: return "Undecided";
  }
}

json classify_json(const ClassifyFlags& f) {
  return json{{"self_adjoint", f.self_adjoint},
              {"normal", f.normal},
              {"hyponormal", f.hyponormal},
              {"positive", f.positive},
              {"compact", f.compact}};
}

json witness_json_obj(const Witness& w) {
  return json{{"vector", vector_json(w.vector)},
              {"value_re", w.value.real()},
              {"value_im", w.value.imag()}};
}

json analyze_one(const StructuredOperator& t, double tol, std::int64_t window) {
  json r;
  r["classification"] = classify_json(classify(t, tol));
  NormReport nr = operator_norm(t, tol);
  r["norm"] = json{{"value", nr.value},
                   {"error_bound", nr.error_bound},
                   {"attainment", attainment_str(nr.attainment)}};
  if (nr.witness) r["norm"]["witness"] = vector_json(*nr.witness);
  MinModulusReport mm = min_modulus(t, tol);
  r["min_modulus"] = json{{"value", mm.value}, {"error_bound", mm.error_bound}};
  r["essential_min_modulus"] = json{{"value", essential_min_modulus(t)}, {"error_bound", 0.0}};
  if (is_self_adjoint(t, tol)) {
    SpectrumApprox sp = spectrum_sa(t, tol, window);
    json eigs = json::array();
    std::size_t count = 0;
    for (const auto& e : sp.eigenvalues) {
      if (count++ >= static_cast<std::size_t>(t.block_size() + window)) break;
      eigs.push_back(json{{"value", e.value}, {"error_radius", e.error_radius}});
    }
    r["spectrum"] = json{{"eigenvalues", std::move(eigs)},
                         {"essential_points", sp.essential_points},
                         {"cluster_radius", sp.cluster_radius}};
  }
  return r;
}

json verdict_json(const ANVerdict& v) {
  json r;
  switch (v.kind) {
    case ANVerdict::Kind::InAN: {
      r["verdict"] = "InAN";
      r["triple"] = json{{"k", operator_json(v.triple->k)},
                         {"f", operator_json(v.triple->f)},
                         {"alpha", v.triple->alpha}};
      break;
    }
    case ANVerdict::Kind::NotAN:
      r["verdict"] = "NotAN";
      r["reason"] = v.reason == NotANReason::InfinitelyManyBelowEssential
                        ? "InfinitelyManyBelowEssential"
                        : "NormNotAttainedOnSubspace";
      r["offenders"] = v.offenders;
      break;
    default:
      r["verdict"] = "Undecided";
      r["explanation"] = v.explanation;
      break;
  }
  return r;
}

json maximizer_json(const MaximizerReport& m, double tol) {
  json r;
  r["achieved"] = m.achieved;
  r["target"] = m.target;
  r["gap"] = std::abs(m.achieved - m.target);
  r["tolerance"] = tol;
  r["x"] = operator_json(m.x);
  json ws = json::array();
  for (const auto& w : m.witnesses) ws.push_back(witness_json_obj(w));
  r["witnesses"] = std::move(ws);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral analysis of scalar + compact structured operators"};
  app.require_subcommand(1);

  double tol = kDefaultTol;
  if (const char* env = std::getenv("SPECTRAKIT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) tol = v;
  }
  std::string json_out;
  std::int64_t seed = 0;
  std::int64_t window = 32;
  bool strict = false;
  app.add_option("--tol", tol, "tolerance")->capture_default_str();
  app.add_option("--json", json_out, "write the JSON report to this path");
  app.add_option("--seed", seed, "seed echoed into reports for batch runs");
  app.add_option("--window", window, "tail eigenvalue reporting count")->capture_default_str();
  app.add_flag("--strict", strict, "exit 5 on Undecided verdicts");

  std::string file, file2;
  auto* analyze = app.add_subcommand("analyze", "classification, norms, spectrum window");
  analyze->add_option("file", file, "operator spec")->required();

  auto* an_check_cmd = app.add_subcommand("an-check", "absolute norm attainment verdict");
  an_check_cmd->add_option("file", file, "operator spec")->required();

  auto* comm = app.add_subcommand("commutator", "commutator maximizer constructions");
  std::string single_f, pair_f1, sandwich_f1;
  std::vector<std::string> pair_files, sandwich_files;
  comm->add_option("--single", single_f, "one hyponormal attaining operator");
  comm->add_option("--pair", pair_files, "two phase-matched operators")->expected(2);
  comm->add_option("--sandwich", sandwich_files, "two attaining operators")->expected(2);

  auto* attainify_cmd = app.add_subcommand("attainify", "norm-attaining perturbation certificate");
  double alpha = 0.1;
  double beta_re = 0.0, beta_im = 0.0;
  bool have_beta_re = false, have_beta_im = false;
  attainify_cmd->add_option("file", file, "operator spec")->required();
  attainify_cmd->add_option("--alpha", alpha, "perturbation budget in (0,2)")->required();
  auto* beta_re_opt = attainify_cmd->add_option("--beta", beta_re, "target diagonal value (real part)");
  auto* beta_im_opt = attainify_cmd->add_option("--beta-im", beta_im, "target diagonal value (imaginary part)");

  auto* oracle = app.add_subcommand("oracle-compare", "structured norm vs dense truncation norm");
  std::int64_t dim = 64;
  oracle->add_option("file", file, "operator spec")->required();
  oracle->add_option("--dim", dim, "truncation dimension")->capture_default_str();

  auto* suite = app.add_subcommand("suite", "analyze every .op file in a directory");
  std::string dir;
  suite->add_option("dir", dir, "directory of operator specs")->required();

  // app-level flags like --json may appear after the subcommand
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  json report;
  report["tol"] = tol;
  report["seed"] = seed;
  bool undecided = false;

  try {
    if (*analyze) {
      LoadedOp in = load_op(file);
      report["command"] = "analyze";
      report["inputs"] = json::array({in.input});
      report["result"] = analyze_one(in.op, tol, window);
      undecided = report["result"]["norm"]["attainment"] == "Undecided";
    } else if (*an_check_cmd) {
      LoadedOp in = load_op(file);
      report["command"] = "an-check";
      report["inputs"] = json::array({in.input});
      ANVerdict v = an_check(in.op, tol);
      report["result"] = verdict_json(v);
      undecided = v.kind == ANVerdict::Kind::Undecided;
    } else if (*comm) {
      report["command"] = "commutator";
      if (!single_f.empty()) {
        LoadedOp e = load_op(single_f);
        report["inputs"] = json::array({e.input});
        report["result"] = maximizer_json(maximizer_single(e.op, tol), tol);
      } else if (pair_files.size() == 2) {
        LoadedOp s = load_op(pair_files[0]), t = load_op(pair_files[1]);
        report["inputs"] = json::array({s.input, t.input});
        report["result"] = maximizer_json(maximizer_pair(s.op, t.op, tol), tol);
      } else if (sandwich_files.size() == 2) {
        LoadedOp s = load_op(sandwich_files[0]), t = load_op(sandwich_files[1]);
        report["inputs"] = json::array({s.input, t.input});
        report["result"] = maximizer_json(maximizer_sandwich(s.op, t.op, tol), tol);
      } else {
        std::cerr << "commutator requires one of --single, --pair, --sandwich\n";
        return 2;
      }
    } else if (*attainify_cmd) {
      LoadedOp in = load_op(file);
      report["command"] = "attainify";
      report["inputs"] = json::array({in.input});
      have_beta_re = beta_re_opt->count() > 0;
      have_beta_im = beta_im_opt->count() > 0;
      std::optional<cplx> beta;
      if (have_beta_re || have_beta_im) beta = cplx{beta_re, beta_im};
      PerturbationCertificate cert = attainify(in.op, alpha, beta, tol);
      report["result"] = json{{"z", operator_json(cert.z)},
                              {"eta", witness_json_obj(cert.eta)},
                              {"norm_preserved", cert.norm_preserved},
                              {"distance", cert.distance},
                              {"distance_budget", alpha},
                              {"beta_re", cert.beta_achieved.real()},
                              {"beta_im", cert.beta_achieved.imag()}};
    } else if (*oracle) {
      LoadedOp in = load_op(file);
      report["command"] = "oracle-compare";
      report["inputs"] = json::array({in.input});
      NormReport nr = operator_norm(in.op, tol);
      const double dense = dense_norm(truncate(in.op, dim));
      report["result"] = json{{"structured_norm", nr.value},
                              {"structured_error_bound", nr.error_bound},
                              {"dense_norm", dense},
                              {"dim", dim},
                              {"delta", std::abs(nr.value - dense)},
                              {"tail_env_at_dim", in.op.tail().is_zero()
                                                      ? 0.0
                                                      : in.op.tail().envelope.at(std::max(
                                                            dim + 1, in.op.tail().envelope.valid_from))}};
    } else if (*suite) {
      report["command"] = "suite";
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".op")
          files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      std::vector<std::future<json>> futures;
      futures.reserve(files.size());
      for (const auto& f : files)
        futures.push_back(std::async(std::launch::async, [&tol, &window, f]() {
          json one;
          one["file"] = f;
          try {
            LoadedOp in = load_op(f);
            one["digest"] = in.input["digest"];
            one["result"] = analyze_one(in.op, tol, window);
            one["status"] = "ok";
          } catch (const error& e) {
            one["status"] = "error";
            one["error"] = e.what();
            one["exit_code"] = e.exit_code();
          }
          return one;
        }));
      json results = json::array();
      bool any_error = false;
      for (auto& fut : futures) {
        json one = fut.get();
        any_error = any_error || one["status"] != "ok";
        if (one["status"] == "ok" && one["result"]["norm"]["attainment"] == "Undecided")
          undecided = true;
        results.push_back(std::move(one));
      }
      report["results"] = std::move(results);
      write_report(report, json_out);
      if (any_error) return 3;
      return strict && undecided ? kExitUndecided : 0;
    }
  } catch (const error& e) {
    json err;
    err["command"] = report.value("command", "");
    err["error"] = e.what();
    err["exit_code"] = e.exit_code();
    write_report(err, json_out);
    std::cerr << e.what() << "\n";
    return e.exit_code();
  }

  write_report(report, json_out);
  return strict && undecided ? kExitUndecided : 0;
}
