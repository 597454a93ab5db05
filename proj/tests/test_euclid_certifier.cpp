#include <cmath>

#include "doctest.h"
#include "holderlab/euclid_certifier.hpp"
#include "holderlab/rng.hpp"
#include "oracles.hpp"

using namespace holderlab;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::MatrixXd random_spd(SeededRng& rng, Eigen::Index n) {
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  return g.transpose() * g + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_invertible(SeededRng& rng, Eigen::Index n) {
  while (true) {
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.gaussian();
    if (std::abs(a.determinant()) > 0.2) return a;
  }
}

std::vector<Eigen::VectorXd> square_vertices() {
  return {vec2(1, 1), vec2(1, -1), vec2(-1, 1), vec2(-1, -1)};
}

}  // namespace

TEST_CASE("mvee_origin on canonical point sets") {
  SUBCASE("square vertices give the scaled disk") {
    const MveeResult r = mvee_origin(square_vertices(), 1e-9);
    CHECK((r.A - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(r.contact_indices.size() == 4);
    CHECK(oracles::mvee_locally_optimal(square_vertices(), r.A, 50, 1));
  }
  SUBCASE("points on the circle give the disk") {
    auto pts = sample_unit_sphere(NormSpec::l2(2), 64, 3);
    const std::size_t drawn = pts.size();
    for (std::size_t i = 0; i < drawn; ++i) pts.push_back(-pts[i]);
    const MveeResult r = mvee_origin(pts, 1e-9);
    CHECK((r.A - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
    for (const auto& p : pts) CHECK(p.dot(r.A * p) <= 1.0 + 1e-9);
  }
  SUBCASE("cross-polytope vertices give the disk with axis contacts") {
    const auto pts = unit_ball_vertices(NormSpec::l1(2));
    const MveeResult r = mvee_origin(pts, 1e-9);
    CHECK((r.A - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(r.contact_indices.size() == 4);
    CHECK(oracles::mvee_locally_optimal(pts, r.A, 50, 2));
  }
  SUBCASE("a transformed square still verifies as locally optimal") {
    SeededRng rng(5);
    const Eigen::MatrixXd A = random_invertible(rng, 2);
    std::vector<Eigen::VectorXd> pts;
    for (const auto& v : square_vertices()) pts.push_back(A * v);
    const MveeResult r = mvee_origin(pts, 1e-9);
    for (const auto& p : pts) CHECK(p.dot(r.A * p) <= 1.0 + 1e-8);
    CHECK(oracles::mvee_locally_optimal(pts, r.A, 50, 3));
  }
  SUBCASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(mvee_origin({vec2(1, 0), vec2(-1, 0)}, 1e-9), std::invalid_argument);
    CHECK_THROWS_AS(mvee_origin({vec2(1, 0), vec2(0, 1)}, 1e-9), std::invalid_argument);
  }
}

TEST_CASE("lowner_transform") {
  SUBCASE("max-norm ball maps to the scaled square") {
    const EllipsoidModel model = lowner_transform(NormSpec::linf(2), 64, 7, 1e-8);
    CHECK((model.map - Eigen::MatrixXd::Identity(2, 2) / std::sqrt(2.0))
              .cwiseAbs()
              .maxCoeff() <= 1e-6);
    REQUIRE(model.contact_points.size() == 4);
    const double a = 1.0 / std::sqrt(2.0);
    for (const auto& c : model.contact_points) {
      CHECK(std::abs(c.norm() - 1.0) <= 1e-9);
      CHECK(std::abs(std::abs(c[0]) - a) <= 1e-6);
      CHECK(std::abs(std::abs(c[1]) - a) <= 1e-6);
    }
  }
  SUBCASE("cross-polytope ball keeps the identity frame with axis contacts") {
    const EllipsoidModel model = lowner_transform(NormSpec::l1(2), 64, 7, 1e-8);
    CHECK((model.map - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
    REQUIRE(model.contact_points.size() == 4);
    for (const auto& c : model.contact_points)
      CHECK(std::abs(std::abs(c[0]) + std::abs(c[1]) - 1.0) <= 1e-6);
  }
  SUBCASE("euclidean ball is its own frame") {
    const EllipsoidModel model = lowner_transform(NormSpec::l2(3), 128, 9, 1e-8);
    CHECK((model.map - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK(model.contact_points.size() >= 3);
  }
}

TEST_CASE("find_witness_pair") {
  SUBCASE("max norm: contact diagonals escape") {
    const EllipsoidModel model = lowner_transform(NormSpec::linf(2), 64, 7, 1e-8);
    const NormSpec kprime = NormSpec::transformed(NormSpec::linf(2), model.map);
    const auto pair = find_witness_pair(model, kprime, 1e-3);
    REQUIRE(pair.has_value());
    const Eigen::VectorXd mid = (pair->first + pair->second).normalized();
    CHECK(norm_eval(kprime, mid) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("taxicab norm: axis pairs escape") {
    const EllipsoidModel model = lowner_transform(NormSpec::l1(2), 64, 7, 1e-8);
    const NormSpec kprime = NormSpec::transformed(NormSpec::l1(2), model.map);
    const auto pair = find_witness_pair(model, kprime, 1e-3);
    REQUIRE(pair.has_value());
    const Eigen::VectorXd mid = (pair->first + pair->second).normalized();
    CHECK(norm_eval(kprime, mid) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("euclidean ball yields no witness at any reasonable margin") {
    const EllipsoidModel model = lowner_transform(NormSpec::l2(2), 64, 7, 1e-8);
    const NormSpec kprime = NormSpec::transformed(NormSpec::l2(2), model.map);
    CHECK_FALSE(find_witness_pair(model, kprime, 1e-3).has_value());
  }
}

TEST_CASE("build_witness on the max norm reproduces the hand construction") {
  const EllipsoidModel model = lowner_transform(NormSpec::linf(2), 64, 7, 1e-8);
  const NormSpec spec = NormSpec::linf(2);
  const NormSpec kprime = NormSpec::transformed(spec, model.map);
  const auto pair = find_witness_pair(model, kprime, 1e-3);
  REQUIRE(pair.has_value());
  const WitnessCertificate cert = build_witness(model, spec, pair->first, pair->second);

  CHECK(cert.kappa == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(cert.alpha * cert.alpha / 4.0 + cert.beta * cert.beta / 4.0 ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cert.opnorm_lower == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(cert.qnorm_upper == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cert.e1.dot(cert.e2) == doctest::Approx(0.0).epsilon(1e-12));

  // the operator is the rank-2 frame operator
  const Eigen::MatrixXd expected =
      rank2_operator(DualVector(cert.e1 / cert.kappa), DualVector(cert.e2), -1).matrix();
  CHECK((cert.B_tilde - expected).cwiseAbs().maxCoeff() <= 1e-12);

  const CertificateCheck check = verify_certificate(cert, spec);
  CHECK(check.pass);
}

TEST_CASE("certify") {
  SUBCASE("euclidean kinds take the fast path") {
    for (Eigen::Index dim : {2, 3, 5}) {
      const CertifyResult r = certify(NormSpec::l2(dim));
      CHECK(r.verdict == CertifyVerdict::Euclidean);
      CHECK(r.residual <= 1e-9);
    }
    SeededRng rng(21);
    for (int i = 0; i < 5; ++i) {
      const CertifyResult r = certify(NormSpec::weighted_euclidean(random_spd(rng, 3)));
      CHECK(r.verdict == CertifyVerdict::Euclidean);
      CHECK(r.residual <= 1e-9);
    }
  }
  SUBCASE("polyhedral kinds produce certified witnesses") {
    for (auto spec : {NormSpec::linf(2), NormSpec::l1(2)}) {
      const CertifyResult r = certify(spec);
      REQUIRE(r.verdict == CertifyVerdict::NonEuclidean);
      REQUIRE(r.certificate.has_value());
      CHECK(r.certificate->opnorm_lower / r.certificate->qnorm_upper >= 1.45);
      CHECK(verify_certificate(*r.certificate, spec).pass);
    }
  }
  SUBCASE("transformed norms certify like their base") {
    SeededRng rng(23);
    const Eigen::MatrixXd A = random_invertible(rng, 2);
    const CertifyResult non_euclid =
        certify(NormSpec::transformed(NormSpec::linf(2), A));
    CHECK(non_euclid.verdict == CertifyVerdict::NonEuclidean);
    REQUIRE(non_euclid.certificate.has_value());
    CHECK(verify_certificate(*non_euclid.certificate,
                             NormSpec::transformed(NormSpec::linf(2), A))
              .pass);

    const CertifyResult euclid = certify(NormSpec::transformed(NormSpec::l2(2), A));
    CHECK(euclid.verdict == CertifyVerdict::Euclidean);
  }
  SUBCASE("no false witnesses when the pipeline is forced onto euclidean norms") {
    SeededRng rng(29);
    for (std::uint64_t s = 0; s < 20; ++s) {
      CertifyConfig config;
      config.skip_fast_path = true;
      config.seed = s;
      config.mvee_samples = 128;
      const NormSpec spec =
          s % 2 == 0 ? NormSpec::l2(2) : NormSpec::weighted_euclidean(random_spd(rng, 2));
      const CertifyResult r = certify(spec, config);
      CHECK(r.verdict != CertifyVerdict::NonEuclidean);
    }
  }
  SUBCASE("an absurd margin yields inconclusive, never a euclidean claim") {
    CertifyConfig config;
    config.witness_margin = 10.0;
    const CertifyResult r = certify(NormSpec::linf(2), config);
    CHECK(r.verdict == CertifyVerdict::Inconclusive);
    CHECK_FALSE(r.diagnostics.empty());
  }
  SUBCASE("deterministic in the seed") {
    const CertifyResult a = certify(NormSpec::linf(2));
    const CertifyResult b = certify(NormSpec::linf(2));
    REQUIRE(a.certificate.has_value());
    REQUIRE(b.certificate.has_value());
    CHECK((a.certificate->u - b.certificate->u).norm() == 0.0);
    CHECK(a.certificate->kappa == b.certificate->kappa);
  }
}

TEST_CASE("tampered certificates fail re-verification") {
  const CertifyResult r = certify(NormSpec::linf(2));
  REQUIRE(r.certificate.has_value());
  WitnessCertificate bad = *r.certificate;
  bad.kappa *= 1.05;
  CHECK_FALSE(verify_certificate(bad, NormSpec::linf(2)).pass);
  WitnessCertificate bad2 = *r.certificate;
  bad2.B_tilde(0, 0) += 0.01;
  CHECK_FALSE(verify_certificate(bad2, NormSpec::linf(2)).pass);
  WitnessCertificate bad3 = *r.certificate;
  bad3.u *= 1.2;
  CHECK_FALSE(verify_certificate(bad3, NormSpec::linf(2)).pass);
}
