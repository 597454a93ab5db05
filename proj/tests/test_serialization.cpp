#include <sstream>

#include "doctest.h"
#include "holderlab/rng.hpp"
#include "holderlab/serialization.hpp"

using namespace holderlab;
using nlohmann::json;

namespace {

Eigen::MatrixXd random_spd(SeededRng& rng, Eigen::Index n) {
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  return g.transpose() * g + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("norm spec round trips preserve behavior") {
  SeededRng rng(61);
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.4, -0.3, 0.9;
  const std::vector<NormSpec> specs = {
      NormSpec::l1(3), NormSpec::l2(4), NormSpec::linf(2),
      NormSpec::weighted_euclidean(random_spd(rng, 3)),
      NormSpec::transformed(NormSpec::linf(2), A)};
  for (const NormSpec& spec : specs) {
    const NormSpec back = norm_spec_from_json(norm_spec_to_json(spec));
    CHECK(back.kind() == spec.kind());
    CHECK(back.dim() == spec.dim());
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd x(spec.dim());
      for (Eigen::Index k = 0; k < spec.dim(); ++k) x[k] = rng.gaussian();
      CHECK(norm_eval(back, x) == norm_eval(spec, x));
      CHECK(dual_norm_eval(back, DualVector(x)) == dual_norm_eval(spec, DualVector(x)));
    }
  }
}

TEST_CASE("norm spec json validation") {
  CHECK_THROWS_AS(norm_spec_from_json(json{{"kind", "l7"}, {"dim", 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(norm_spec_from_json(json{{"dim", 2}}), std::invalid_argument);
  CHECK_THROWS_AS(matrix_from_json(json::array({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("holder report round trip") {
  const SmoothFunction f = *corpus_lookup("example51");
  SamplingConfig budget;
  budget.pairs = 3000;
  budget.refine = 40;
  budget.seed = 17;
  const HolderReport report = estimate_constants(f, NormSpec::linf(2), 1.0, budget);
  const HolderReport back = holder_report_from_json(holder_report_to_json(report));
  CHECK(back.nu == report.nu);
  CHECK(back.M_lb == report.M_lb);
  CHECK(back.L_lb == report.L_lb);
  CHECK(back.Lminus_lb == report.Lminus_lb);
  CHECK(back.Lplus_lb == report.Lplus_lb);
  CHECK((back.witness_M.x - report.witness_M.x).norm() == 0.0);
  CHECK(back.budget.pairs == report.budget.pairs);
  CHECK(back.budget.seed == report.budget.seed);
}

TEST_CASE("trace csv layout") {
  const SmoothFunction f = *corpus_lookup("quad1d");
  DescentConfig c;
  c.L = 1.0;
  c.nu = 1.0;
  c.xi = 0.5;
  c.epsilon = 1e-3;
  c.x0 = Eigen::VectorXd::Ones(1);
  const DescentTrace trace = run(f, NormSpec::l2(1), c);
  std::ostringstream os;
  write_trace_csv(os, trace);
  const std::string text = os.str();
  CHECK(text.rfind("iteration,f,n_k,h_k\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == static_cast<std::size_t>(trace.iterations) + 2);  // header + final row
}

TEST_CASE("figure1 csv golden head") {
  const std::vector<double> grid = {0.5, 1.0};
  std::ostringstream os;
  write_figure1_csv(os, figure1_table(grid));
  CHECK(os.str() == "nu,c_general,c_euclidean\n0.5," +
                        format_double(coefficient_general(0.5)) + "," +
                        format_double(coefficient_euclidean(0.5)) + "\n1,2,1\n");
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config hash is stable and content-sensitive") {
  const json a = {{"command", "estimate"}, {"pairs", 1000}};
  const json b = {{"command", "estimate"}, {"pairs", 1001}};
  CHECK(config_hash(a) == config_hash(a));
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("corpus manifest carries the published constants") {
  const json manifest = corpus_manifest_json();
  bool found = false;
  for (const auto& entry : manifest) {
    if (entry.at("id") != "example51") continue;
    for (const auto& c : entry.at("known_constants")) {
      if (c.at("norm") == "linf" && c.at("nu") == 1.0) {
        CHECK(c.at("M").get<double>() == doctest::Approx(4.0));
        CHECK(c.at("L").get<double>() == doctest::Approx(2.0));
        CHECK(c.at("provenance") == "PAPER");
        found = true;
      }
    }
  }
  CHECK(found);
}

TEST_CASE("certificate serialization includes the re-verification payload") {
  const CertifyResult r = certify(NormSpec::linf(2));
  REQUIRE(r.certificate.has_value());
  const json j = certify_result_to_json(r);
  CHECK(j.at("verdict") == "non_euclidean");
  const json& c = j.at("certificate");
  for (const char* key : {"u", "v", "e1", "e2", "kappa", "map", "B_tilde", "B",
                          "qnorm_upper", "opnorm_lower", "gap_ratio"})
    CHECK(c.contains(key));
  // enough to rebuild and re-check the certificate
  WitnessCertificate rebuilt;
  rebuilt.u = vector_from_json(c.at("u"));
  rebuilt.v = vector_from_json(c.at("v"));
  rebuilt.e1 = vector_from_json(c.at("e1"));
  rebuilt.e2 = vector_from_json(c.at("e2"));
  rebuilt.alpha = c.at("alpha").get<double>();
  rebuilt.beta = c.at("beta").get<double>();
  rebuilt.kappa = c.at("kappa").get<double>();
  rebuilt.map = matrix_from_json(c.at("map"));
  rebuilt.B_tilde = matrix_from_json(c.at("B_tilde"));
  rebuilt.B = matrix_from_json(c.at("B"));
  rebuilt.qnorm_upper = c.at("qnorm_upper").get<double>();
  rebuilt.opnorm_lower = c.at("opnorm_lower").get<double>();
  CHECK(verify_certificate(rebuilt, NormSpec::linf(2)).pass);
}
