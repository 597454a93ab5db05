#include "holderlab/serialization.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace holderlab {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw std::invalid_argument("matrix_from_json: expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix_from_json: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector_from_json: expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json norm_spec_to_json(const NormSpec& spec) {
  json j;
  j["kind"] = spec.kind_name();
  j["dim"] = spec.dim();
  if (spec.kind() == NormKind::WeightedEuclidean) j["weight"] = matrix_to_json(spec.weight());
  if (spec.kind() == NormKind::Transformed) {
    j["map"] = matrix_to_json(spec.map());
    j["base"] = norm_spec_to_json(spec.base());
  }
  return j;
}

NormSpec norm_spec_from_json(const json& j) {
  if (!j.contains("kind")) throw std::invalid_argument("norm spec: missing kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "weighted") return NormSpec::weighted_euclidean(matrix_from_json(j.at("weight")));
  if (kind == "transformed")
    return NormSpec::transformed(norm_spec_from_json(j.at("base")),
                                 matrix_from_json(j.at("map")));
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  if (kind == "l1") return NormSpec::l1(dim);
  if (kind == "l2") return NormSpec::l2(dim);
  if (kind == "linf") return NormSpec::linf(dim);
  throw std::invalid_argument("norm spec: unknown kind '" + kind + "'");
}

namespace {

json witness_to_json(const WitnessPair& w) {
  return json{{"x", vector_to_json(w.x)}, {"y", vector_to_json(w.y)}, {"ratio", w.ratio}};
}

WitnessPair witness_from_json(const json& j) {
  WitnessPair w;
  w.x = vector_from_json(j.at("x"));
  w.y = vector_from_json(j.at("y"));
  w.ratio = j.at("ratio").get<double>();
  return w;
}

}  // namespace

json holder_report_to_json(const HolderReport& report) {
  json j;
  j["nu"] = report.nu;
  j["M_lb"] = report.M_lb;
  j["L_lb"] = report.L_lb;
  j["Lminus_lb"] = report.Lminus_lb;
  j["Lplus_lb"] = report.Lplus_lb;
  j["witness_M"] = witness_to_json(report.witness_M);
  j["witness_Lminus"] = witness_to_json(report.witness_Lminus);
  j["witness_Lplus"] = witness_to_json(report.witness_Lplus);
  j["budget"] = {{"pairs", report.budget.pairs},
                 {"refine", report.budget.refine},
                 {"elite", report.budget.elite},
                 {"box_halfwidth", report.budget.box_halfwidth},
                 {"exclusion_radius", report.budget.exclusion_radius},
                 {"seed", report.budget.seed}};
  j["note"] =
      "all values are sampled lower bounds of pairwise-ratio suprema, not the "
      "constants themselves";
  return j;
}

HolderReport holder_report_from_json(const json& j) {
  HolderReport report;
  report.nu = j.at("nu").get<double>();
  report.M_lb = j.at("M_lb").get<double>();
  report.L_lb = j.at("L_lb").get<double>();
  report.Lminus_lb = j.at("Lminus_lb").get<double>();
  report.Lplus_lb = j.at("Lplus_lb").get<double>();
  report.witness_M = witness_from_json(j.at("witness_M"));
  report.witness_Lminus = witness_from_json(j.at("witness_Lminus"));
  report.witness_Lplus = witness_from_json(j.at("witness_Lplus"));
  const json& b = j.at("budget");
  report.budget.pairs = b.at("pairs").get<long>();
  report.budget.refine = b.at("refine").get<int>();
  report.budget.elite = b.at("elite").get<int>();
  report.budget.box_halfwidth = b.at("box_halfwidth").get<double>();
  report.budget.exclusion_radius = b.at("exclusion_radius").get<double>();
  report.budget.seed = b.at("seed").get<std::uint64_t>();
  return report;
}

json gap_report_to_json(const GapReport& report) {
  json j;
  j["opnorm"] = report.opnorm;
  j["qnorm"] = report.qnorm;
  j["ratio"] = report.ratio;
  j["sandwich_pass"] = report.sandwich_pass;
  j["equality_expected"] = report.equality_expected;
  j["equality_pass"] = report.equality_pass;
  j["pass"] = report.pass;
  j["witness"] = {{"op_x", vector_to_json(report.op_x)},
                  {"op_y", vector_to_json(report.op_y)},
                  {"form_x", vector_to_json(report.form_x)}};
  j["detail"] = report.detail;
  return j;
}

json certify_result_to_json(const CertifyResult& result) {
  json j;
  j["verdict"] = to_string(result.verdict);
  j["residual"] = result.residual;
  j["diagnostics"] = result.diagnostics;
  if (result.certificate) {
    const WitnessCertificate& c = *result.certificate;
    j["certificate"] = {
        {"u", vector_to_json(c.u)},
        {"v", vector_to_json(c.v)},
        {"e1", vector_to_json(c.e1)},
        {"e2", vector_to_json(c.e2)},
        {"alpha", c.alpha},
        {"beta", c.beta},
        {"kappa", c.kappa},
        {"map", matrix_to_json(c.map)},
        {"B_tilde", matrix_to_json(c.B_tilde)},
        {"B", matrix_to_json(c.B)},
        {"qnorm_upper", c.qnorm_upper},
        {"opnorm_lower", c.opnorm_lower},
        {"gap_ratio", c.opnorm_lower / c.qnorm_upper},
    };
  }
  return j;
}

json trace_summary_to_json(const DescentTrace& trace, const TraceVerdict& verdict) {
  json j;
  j["iterations"] = trace.iterations;
  j["termination"] = to_string(trace.reason);
  j["f_final"] = trace.f_final;
  j["n_final"] = trace.n_final;
  j["config"] = {{"L", trace.config.L},
                 {"nu", trace.config.nu},
                 {"xi", trace.config.xi},
                 {"epsilon", trace.config.epsilon},
                 {"f_star", trace.config.f_star},
                 {"max_iter", trace.config.max_iter},
                 {"x0", vector_to_json(trace.config.x0)}};
  j["verdict"] = {{"pass", verdict.pass},
                  {"iterations", verdict.iterations},
                  {"bound", verdict.bound},
                  {"max_direction_residual", verdict.max_direction_residual},
                  {"detail", verdict.detail}};
  if (verdict.violating_step) j["verdict"]["violating_step"] = *verdict.violating_step;
  if (!trace.diagnostics.empty()) j["diagnostics"] = trace.diagnostics;
  return j;
}

void write_trace_csv(std::ostream& os, const DescentTrace& trace) {
  os << "iteration,f,n_k,h_k\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const DescentStep& s = trace.steps[k];
    os << k << ',' << format_double(s.f) << ',' << format_double(s.grad_dual_norm)
       << ',' << format_double(s.step) << '\n';
  }
  os << trace.steps.size() << ',' << format_double(trace.f_final) << ','
     << format_double(trace.n_final) << ',' << format_double(0.0) << '\n';
}

void write_figure1_csv(std::ostream& os, const std::vector<Figure1Row>& rows) {
  os << "nu,c_general,c_euclidean\n";
  for (const Figure1Row& r : rows)
    os << format_double(r.nu) << ',' << format_double(r.c_general) << ','
       << format_double(r.c_euclidean) << '\n';
}

json corpus_manifest_json() {
  json manifest = json::array();
  for (const std::string& id : corpus_ids()) {
    auto f = corpus_lookup(id);
    if (!f) continue;
    json entry;
    entry["id"] = id;
    entry["dim"] = f->dim();
    entry["kind"] = f->hessian() ? "quadratic" : "analytic";
    if (f->hessian()) entry["parameters"] = {{"B", matrix_to_json(*f->hessian())}};
    json constants = json::array();
    const std::vector<std::pair<std::string, NormSpec>> norms = {
        {"l1", NormSpec::l1(f->dim())},
        {"l2", NormSpec::l2(f->dim())},
        {"linf", NormSpec::linf(f->dim())}};
    for (const auto& [name, spec] : norms) {
      for (double nu : {0.25, 0.5, 0.75, 1.0}) {
        if (auto c = f->known_constants(spec, nu)) {
          constants.push_back({{"norm", name},
                               {"nu", nu},
                               {"M", c->holder_constant},
                               {"L", c->approx_parameter},
                               {"provenance", c->provenance}});
        }
      }
    }
    entry["known_constants"] = std::move(constants);
    manifest.push_back(std::move(entry));
  }
  return manifest;
}

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace holderlab
