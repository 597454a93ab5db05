#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holderlab/corpus.hpp"
#include "holderlab/euclid_certifier.hpp"
#include "holderlab/holder_analysis.hpp"
#include "holderlab/normed_space.hpp"
#include "holderlab/quadratic_norms.hpp"
#include "holderlab/rng.hpp"
#include "holderlab/serialization.hpp"
#include "holderlab/universal_gradient.hpp"

namespace {

using holderlab::NormSpec;
using holderlab::SmoothFunction;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFail = 2;
constexpr int kExitInconclusive = 3;

// Values from --config act as option defaults; explicit flags override them.
struct ConfigDefaults {
  json values = json::object();

  static ConfigDefaults from_argv(int argc, char** argv) {
    ConfigDefaults cfg;
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      std::string path;
      if (arg == "--config" && i + 1 < argc)
        path = argv[i + 1];
      else if (arg.rfind("--config=", 0) == 0)
        path = arg.substr(9);
      if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        in >> cfg.values;
        if (!cfg.values.is_object())
          throw std::runtime_error("config file must hold a JSON object");
      }
    }
    return cfg;
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    return it->get<T>();
  }
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

// "l1" | "l2" | "linf" (with dim), "weighted:<H.json>", or a norm-spec JSON
// file path.
NormSpec resolve_norm(const std::string& arg, Eigen::Index dim) {
  if (arg == "l1") return NormSpec::l1(dim);
  if (arg == "l2") return NormSpec::l2(dim);
  if (arg == "linf") return NormSpec::linf(dim);
  if (arg.rfind("weighted:", 0) == 0)
    return NormSpec::weighted_euclidean(holderlab::matrix_from_json(load_json(arg.substr(9))));
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json")
    return holderlab::norm_spec_from_json(load_json(arg));
  throw std::runtime_error("unknown norm '" + arg + "'");
}

// Corpus id, "power:<nu>", or "quad:<B.json>".
SmoothFunction resolve_function(const std::string& arg) {
  if (arg.rfind("quad:", 0) == 0) {
    Eigen::MatrixXd B = holderlab::matrix_from_json(load_json(arg.substr(5)));
    return holderlab::make_quadratic(holderlab::SymmetricOperator(B), arg);
  }
  if (auto f = holderlab::corpus_lookup(arg)) return *f;
  throw std::runtime_error("unknown function '" + arg + "'");
}

// "diag(a,b,...)", "random", "random-psd", or a matrix JSON file path.
Eigen::MatrixXd resolve_operator(const std::string& arg, Eigen::Index dim,
                                 std::uint64_t seed) {
  if (arg.rfind("diag(", 0) == 0 && arg.back() == ')') {
    const std::vector<double> d = parse_double_list(arg.substr(5, arg.size() - 6));
    if (d.empty()) throw std::runtime_error("empty diagonal");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return m;
  }
  if (arg == "random" || arg == "random-psd") {
    if (dim < 1) throw std::runtime_error("--dim is required for random operators");
    holderlab::SeededRng rng(seed);
    Eigen::MatrixXd g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
    if (arg == "random-psd") return g.transpose() * g;
    return 0.5 * (g + g.transpose());
  }
  return holderlab::matrix_from_json(load_json(arg));
}

Eigen::VectorXd default_start(Eigen::Index dim) {
  static const double pattern[] = {1.3, -0.7, 0.9, -0.5};
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = pattern[i % 4];
  return x;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  return s;
}

void emit(const json& summary) { std::cout << summary.dump(2) << "\n"; }

// ---------------------------------------------------------------------------

int cmd_estimate(const std::string& fn_arg, const std::string& norm_arg,
                 Eigen::Index dim, std::vector<double> nus,
                 holderlab::SamplingConfig budget, const std::string& out) {
  SmoothFunction f = resolve_function(fn_arg);
  if (dim <= 0) dim = f.dim();
  NormSpec spec = resolve_norm(norm_arg, dim);
  if (nus.empty()) nus = {1.0};

  json effective = {{"command", "estimate"}, {"fn", fn_arg},
                    {"norm", norm_arg},      {"dim", dim},
                    {"nu", nus},             {"pairs", budget.pairs},
                    {"refine", budget.refine}, {"elite", budget.elite},
                    {"box", budget.box_halfwidth}, {"seed", budget.seed}};
  const std::string hash = holderlab::config_hash(effective);

  json summary = {{"command", "estimate"},
                  {"seed", budget.seed},
                  {"config_hash", hash},
                  {"results", json::array()}};
  for (double nu : nus) {
    holderlab::HolderReport report = holderlab::estimate_constants(f, spec, nu, budget);
    json rj = holderlab::holder_report_to_json(report);
    rj["fn"] = fn_arg;
    rj["norm"] = holderlab::norm_spec_to_json(spec);
    rj["seed"] = budget.seed;
    rj["config_hash"] = hash;
    json row = {{"nu", nu},
                {"M_lb", report.M_lb},
                {"L_lb", report.L_lb},
                {"Lminus_lb", report.Lminus_lb},
                {"Lplus_lb", report.Lplus_lb}};
    if (!out.empty()) {
      std::string path = out;
      if (nus.size() > 1 || path.size() < 5 || path.substr(path.size() - 5) != ".json") {
        std::filesystem::create_directories(path);
        path += "/estimate_" + sanitize(fn_arg) + "_nu" + holderlab::format_double(nu) +
                ".json";
      }
      write_text(path, rj.dump(2) + "\n");
      row["file"] = path;
    } else {
      row["report"] = rj;
    }
    summary["results"].push_back(std::move(row));
  }
  emit(summary);
  return kExitOk;
}

int cmd_descend(const std::string& fn_arg, const std::string& norm_arg,
                Eigen::Index dim, holderlab::DescentConfig config,
                const std::string& x0_arg, bool compare, const std::string& out) {
  SmoothFunction f = resolve_function(fn_arg);
  if (dim <= 0) dim = f.dim();
  NormSpec spec = resolve_norm(norm_arg, dim);
  config.x0 = x0_arg.empty() ? default_start(f.dim()) : [&] {
    const std::vector<double> vals = parse_double_list(x0_arg);
    Eigen::VectorXd x(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
      x[static_cast<Eigen::Index>(i)] = vals[i];
    return x;
  }();

  holderlab::DescentTrace trace = holderlab::run(f, spec, config);
  holderlab::TraceVerdict verdict = holderlab::verify_trace(trace);

  json effective = {{"command", "descend"}, {"fn", fn_arg}, {"norm", norm_arg},
                    {"L", config.L},        {"nu", config.nu}, {"xi", trace.config.xi},
                    {"eps", config.epsilon}, {"fstar", config.f_star},
                    {"x0", holderlab::vector_to_json(trace.config.x0)}};
  json summary = holderlab::trace_summary_to_json(trace, verdict);
  summary["command"] = "descend";
  summary["fn"] = fn_arg;
  summary["norm"] = norm_arg;
  summary["seed"] = 0;
  summary["config_hash"] = holderlab::config_hash(effective);

  if (!out.empty()) {
    std::ostringstream csv;
    holderlab::write_trace_csv(csv, trace);
    write_text(out, csv.str());
    summary["trace_csv"] = out;
  }

  if (compare) {
    auto constants = f.known_constants(spec, config.nu);
    if (!constants)
      throw std::runtime_error("--compare needs exact constants for this function/norm");
    json rows = json::array();
    for (auto [label, L] :
         {std::pair<const char*, double>{"L_f", constants->approx_parameter},
          {"2L_f", 2.0 * constants->approx_parameter},
          {"M_f", constants->holder_constant}}) {
      holderlab::DescentConfig c = config;
      c.L = L;
      c.max_iter = -1;
      holderlab::DescentTrace t = holderlab::run(f, spec, c);
      rows.push_back({{"label", label},
                      {"L", L},
                      {"iterations", t.iterations},
                      {"bound", holderlab::iteration_bound(t.config, t.steps.empty()
                                                                        ? t.f_final
                                                                        : t.steps.front().f)},
                      {"termination", holderlab::to_string(t.reason)}});
    }
    summary["comparison"] = std::move(rows);
  }

  emit(summary);
  return verdict.pass ? kExitOk : kExitVerifyFail;
}

int cmd_quadnorm(const std::string& b_arg, const std::string& norm_arg,
                 Eigen::Index dim, std::uint64_t seed, const std::string& out) {
  Eigen::MatrixXd Bm = resolve_operator(b_arg, dim, seed);
  holderlab::SymmetricOperator B(Bm);
  NormSpec spec = resolve_norm(norm_arg, B.dim());
  holderlab::GapReport report = holderlab::gap_report(B, spec);

  json effective = {{"command", "quadnorm"}, {"B", b_arg}, {"norm", norm_arg},
                    {"dim", B.dim()},        {"seed", seed}};
  json j = holderlab::gap_report_to_json(report);
  j["command"] = "quadnorm";
  j["B"] = holderlab::matrix_to_json(Bm);
  j["norm"] = holderlab::norm_spec_to_json(spec);
  j["seed"] = seed;
  j["config_hash"] = holderlab::config_hash(effective);
  if (!out.empty()) write_text(out, j.dump(2) + "\n");
  emit(j);
  return report.pass ? kExitOk : kExitVerifyFail;
}

int cmd_certify(const std::string& norm_arg, Eigen::Index dim,
                holderlab::CertifyConfig config, const std::string& out) {
  NormSpec spec = resolve_norm(norm_arg, dim);
  holderlab::CertifyResult result = holderlab::certify(spec, config);

  json effective = {{"command", "certify"},
                    {"norm", norm_arg},
                    {"dim", spec.dim()},
                    {"samples", config.mvee_samples},
                    {"margin", config.witness_margin},
                    {"euclid_tol", config.euclid_tol},
                    {"mvee_tol", config.mvee_tol},
                    {"seed", config.seed}};
  json j = holderlab::certify_result_to_json(result);
  j["command"] = "certify";
  j["norm"] = holderlab::norm_spec_to_json(spec);
  j["seed"] = config.seed;
  j["config_hash"] = holderlab::config_hash(effective);

  if (result.certificate) {
    holderlab::CertificateCheck check =
        holderlab::verify_certificate(*result.certificate, spec);
    j["reverification"] = {{"pass", check.pass}, {"detail", check.detail}};
    if (!check.pass) {
      if (!out.empty()) write_text(out, j.dump(2) + "\n");
      emit(j);
      return kExitVerifyFail;
    }
  }
  if (!out.empty()) write_text(out, j.dump(2) + "\n");
  emit(j);
  return result.verdict == holderlab::CertifyVerdict::Inconclusive ? kExitInconclusive
                                                                   : kExitOk;
}

int cmd_figure1(const std::string& grid_arg, const std::string& out) {
  const std::vector<double> parts = parse_double_list([&] {
    std::string g = grid_arg;
    for (char& c : g)
      if (c == ':') c = ',';
    return g;
  }());
  if (parts.size() != 3) throw std::runtime_error("--grid expects start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (step <= 0.0 || start > stop) throw std::runtime_error("bad grid bounds");

  std::vector<double> grid;
  const long count = std::lround((stop - start) / step);
  for (long i = 0; i <= count; ++i) {
    double nu = start + static_cast<double>(i) * step;
    if (std::abs(nu - stop) < step * 1e-9) nu = stop;
    if (nu > stop + step * 1e-9) break;
    grid.push_back(nu);
  }
  const std::vector<holderlab::Figure1Row> rows = holderlab::figure1_table(grid);

  std::ostringstream csv;
  holderlab::write_figure1_csv(csv, rows);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out, csv.str());
    json effective = {{"command", "figure1"}, {"grid", grid_arg}};
    emit(json{{"command", "figure1"},
              {"rows", rows.size()},
              {"file", out},
              {"seed", 0},
              {"config_hash", holderlab::config_hash(effective)}});
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holderlab: gradient-smoothness constants, norm geometry, and "
               "a norm-adapted gradient method"};
  app.require_subcommand(1);
  // let --seed/--config/--out/--tol appear after the subcommand as well
  app.fallthrough();

  ConfigDefaults cfg;
  try {
    cfg = ConfigDefaults::from_argv(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::uint64_t seed = cfg.get<std::uint64_t>("seed", 0);
  std::string config_path, out = cfg.get<std::string>("out", "");
  double tol = cfg.get<double>("tol", -1.0);
  app.add_option("--seed", seed, "global random seed");
  app.add_option("--config", config_path, "JSON file with default option values");
  app.add_option("--out", out, "output path (file or directory, per command)");
  app.add_option("--tol", tol, "override of the command's primary tolerance");

  // estimate
  auto* est = app.add_subcommand("estimate", "sampled lower bounds for the "
                                             "gradient-variation and Taylor-error constants");
  std::string est_fn = cfg.get<std::string>("fn", "");
  std::string est_norm = cfg.get<std::string>("norm", "l2");
  Eigen::Index est_dim = cfg.get<Eigen::Index>("dim", 0);
  std::vector<double> est_nu = cfg.get<std::vector<double>>("nu", {});
  long est_pairs = cfg.get<long>("pairs", 200000);
  int est_refine = cfg.get<int>("refine", 200);
  int est_elite = cfg.get<int>("elite", 16);
  double est_box = cfg.get<double>("box", 2.0);
  est->add_option("--fn", est_fn, "function id")->required();
  est->add_option("--norm", est_norm, "norm (l1|l2|linf|weighted:H.json|spec.json)");
  est->add_option("--dim", est_dim, "dimension for kind-only norms");
  est->add_option("--nu", est_nu, "exponents (repeatable)");
  est->add_option("--pairs", est_pairs, "sampled pairs");
  est->add_option("--refine", est_refine, "refinement sweeps per elite");
  est->add_option("--elite", est_elite, "elite pairs per objective");
  est->add_option("--box", est_box, "sampling box half-width");

  // descend
  auto* des = app.add_subcommand("descend", "run the norm-adapted gradient method "
                                            "and verify its guarantees");
  std::string des_fn = cfg.get<std::string>("fn", "");
  std::string des_norm = cfg.get<std::string>("norm", "l2");
  Eigen::Index des_dim = cfg.get<Eigen::Index>("dim", 0);
  std::string des_x0 = cfg.get<std::string>("x0", "");
  bool des_compare = false;
  holderlab::DescentConfig des_config;
  des_config.L = cfg.get<double>("L", 1.0);
  des_config.nu = cfg.get<double>("nu", 1.0);
  des_config.xi = cfg.get<double>("xi", -1.0);
  des_config.epsilon = cfg.get<double>("eps", 1e-3);
  des_config.f_star = cfg.get<double>("fstar", 0.0);
  des_config.max_iter = cfg.get<long long>("max_iter", -1);
  des->add_option("--fn", des_fn, "function id")->required();
  des->add_option("--norm", des_norm, "norm");
  des->add_option("--dim", des_dim, "dimension for kind-only norms");
  des->add_option("--L", des_config.L, "approximation parameter supplied to the method")
      ->required();
  des->add_option("--nu", des_config.nu, "exponent in (0,1]");
  des->add_option("--xi", des_config.xi, "relaxation in (0,1); negative = canonical");
  des->add_option("--eps", des_config.epsilon, "target gradient dual norm");
  des->add_option("--x0", des_x0, "start point as comma list");
  des->add_option("--fstar", des_config.f_star, "lower bound on f");
  des->add_option("--max-iter", des_config.max_iter, "iteration cap; negative = 10x bound");
  des->add_flag("--compare", des_compare,
                "also run with L in {L_f, 2L_f, M_f} and report iteration counts");

  // quadnorm
  auto* qn = app.add_subcommand("quadnorm", "operator and quadratic-form norms "
                                            "of a symmetric operator");
  std::string qn_b = cfg.get<std::string>("B", "");
  std::string qn_norm = cfg.get<std::string>("norm", "l2");
  Eigen::Index qn_dim = cfg.get<Eigen::Index>("dim", 0);
  qn->add_option("--B", qn_b, "operator (diag(...)|random|random-psd|matrix.json)")
      ->required();
  qn->add_option("--norm", qn_norm, "norm");
  qn->add_option("--dim", qn_dim, "dimension for random operators");

  // certify
  auto* cert = app.add_subcommand("certify", "decide whether a norm is induced by "
                                             "a scalar product; construct a witness if not");
  std::string cert_norm = cfg.get<std::string>("norm", "l2");
  Eigen::Index cert_dim = cfg.get<Eigen::Index>("dim", 2);
  holderlab::CertifyConfig cert_config;
  cert_config.mvee_samples = cfg.get<int>("samples", 256);
  cert_config.witness_margin = cfg.get<double>("margin", 1e-3);
  cert_config.euclid_tol = cfg.get<double>("euclid_tol", 1e-9);
  cert_config.mvee_tol = cfg.get<double>("mvee_tol", 1e-7);
  bool cert_skip_fast = false;
  cert->add_option("--norm", cert_norm, "norm");
  cert->add_option("--dim", cert_dim, "dimension for kind-only norms");
  cert->add_option("--samples", cert_config.mvee_samples, "sphere samples for the ellipsoid");
  cert->add_option("--margin", cert_config.witness_margin, "witness margin");
  cert->add_option("--euclid-tol", cert_config.euclid_tol,
                   "fast-path parallelogram threshold");
  cert->add_option("--mvee-tol", cert_config.mvee_tol, "ellipsoid tolerance");
  cert->add_flag("--skip-fast-path", cert_skip_fast, "force the full pipeline");

  // figure1
  auto* fig = app.add_subcommand("figure1", "coefficient-curve table as CSV");
  std::string fig_grid = cfg.get<std::string>("grid", "0.01:1:0.01");
  fig->add_option("--grid", fig_grid, "exponent grid start:stop:step");

  // corpus
  auto* corp = app.add_subcommand("corpus", "manifest of the bundled functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (est->parsed()) {
      holderlab::SamplingConfig budget;
      budget.pairs = est_pairs;
      budget.refine = est_refine;
      budget.elite = est_elite;
      budget.box_halfwidth = est_box;
      budget.seed = seed;
      if (tol > 0.0) budget.exclusion_radius = tol;
      return cmd_estimate(est_fn, est_norm, est_dim, est_nu, budget, out);
    }
    if (des->parsed()) return cmd_descend(des_fn, des_norm, des_dim, des_config, des_x0,
                                          des_compare, out);
    if (qn->parsed()) return cmd_quadnorm(qn_b, qn_norm, qn_dim, seed, out);
    if (cert->parsed()) {
      cert_config.seed = seed;
      cert_config.skip_fast_path = cert_skip_fast;
      if (tol > 0.0) cert_config.euclid_tol = tol;
      return cmd_certify(cert_norm, cert_dim, cert_config, out);
    }
    if (fig->parsed()) return cmd_figure1(fig_grid, out);
    if (corp->parsed()) {
      json manifest = holderlab::corpus_manifest_json();
      if (!out.empty()) write_text(out, manifest.dump(2) + "\n");
      std::cout << manifest.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
