#include "holderlab/euclid_certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "holderlab/rng.hpp"

namespace holderlab {

namespace {

void require_arg(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::sqrt(std::max(d[i], 0.0));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Lexicographic order for deterministic pair enumeration.
bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

}  // namespace

MveeResult mvee_origin(const std::vector<Eigen::VectorXd>& points, double tol,
                       long max_iter) {
  require_arg(!points.empty(), "mvee_origin: empty point set");
  const Eigen::Index n = points.front().size();
  const int m = static_cast<int>(points.size());
  for (const auto& p : points)
    require_arg(p.size() == n, "mvee_origin: inconsistent dimensions");
  require_arg(tol > 0.0, "mvee_origin: tol must be positive");

  // The construction needs a symmetric set: every p must have -p present.
  for (const auto& p : points) {
    bool found = false;
    for (const auto& q : points)
      if ((p + q).cwiseAbs().maxCoeff() <= 1e-9) {
        found = true;
        break;
      }
    require_arg(found, "mvee_origin: point set must contain -p for every p");
  }

  Eigen::MatrixXd P(m, n);
  for (int i = 0; i < m; ++i) P.row(i) = points[static_cast<std::size_t>(i)];
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
    require_arg(svd.singularValues().minCoeff() >
                    1e-10 * svd.singularValues().maxCoeff(),
                "mvee_origin: points do not span the space");
  }

  // Multiplicative-weights iteration on the design weights u: M(u) is the
  // weighted scatter matrix, optimal when every leverage p'M^{-1}p is at most
  // n, with equality on the support. Away steps (including drops) handle the
  // shrinking side.
  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / m);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m; ++i)
    M += u[i] * points[static_cast<std::size_t>(i)] *
         points[static_cast<std::size_t>(i)].transpose();

  MveeResult out;
  const double nd = static_cast<double>(n);
  long it = 0;
  for (; it < max_iter; ++it) {
    Eigen::MatrixXd Minv = M.inverse();
    Minv = 0.5 * (Minv + Minv.transpose());
    // leverages w_i = p_i' M^{-1} p_i
    Eigen::VectorXd w(m);
    {
      Eigen::MatrixXd PM = P * Minv;
      w = PM.cwiseProduct(P).rowwise().sum();
    }
    if (!w.allFinite())
      throw std::runtime_error("mvee_origin: numerical breakdown (singular scatter)");

    int j_plus = 0;
    double w_plus = w[0];
    for (int i = 1; i < m; ++i)
      if (w[i] > w_plus) {
        w_plus = w[i];
        j_plus = i;
      }
    int j_minus = -1;
    double w_minus = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      if (u[i] > 0.0 && w[i] < w_minus) {
        w_minus = w[i];
        j_minus = i;
      }

    const double eps_plus = w_plus / nd - 1.0;
    const double eps_minus = 1.0 - w_minus / nd;
    out.residual = std::max(eps_plus, eps_minus);
    if (out.residual <= tol) break;

    int j;
    double lambda;
    if (eps_plus >= eps_minus) {
      j = j_plus;
      lambda = (w_plus - nd) / (nd * (w_plus - 1.0));
    } else {
      j = j_minus;
      const double floor_step = -u[j_minus] / (1.0 - u[j_minus]);
      lambda = w_minus > 1.0 + 1e-12
                   ? std::max((w_minus - nd) / (nd * (w_minus - 1.0)), floor_step)
                   : floor_step;
    }
    const auto& pj = points[static_cast<std::size_t>(j)];
    M = (1.0 - lambda) * M + lambda * pj * pj.transpose();
    u *= (1.0 - lambda);
    u[j] += lambda;
    u[j] = std::max(u[j], 0.0);
  }
  out.iterations = it;
  if (out.residual > tol)
    throw std::runtime_error("mvee_origin: no convergence within the iteration cap");

  Eigen::MatrixXd Minv = M.inverse();
  out.A = 0.5 * (Minv + Minv.transpose()) / nd;
  for (int i = 0; i < m; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    if (p.dot(out.A * p) >= 1.0 - 10.0 * tol) out.contact_indices.push_back(i);
  }
  return out;
}

EllipsoidModel lowner_transform(const NormSpec& spec, int samples, std::uint64_t seed,
                                double tol) {
  require_arg(spec.dim() >= 2, "lowner_transform: dimension must be at least 2");
  std::vector<Eigen::VectorXd> points = sample_unit_sphere(spec, samples, seed);
  // the construction works on a symmetric body; complete the antipodes
  const std::size_t drawn = points.size();
  for (std::size_t i = 0; i < drawn; ++i) {
    bool has_negation = false;
    for (std::size_t j = 0; j < points.size() && !has_negation; ++j)
      has_negation = (points[i] + points[j]).cwiseAbs().maxCoeff() <= 1e-12;
    if (!has_negation) points.push_back(-points[i]);
  }
  MveeResult mvee = mvee_origin(points, tol);

  EllipsoidModel model;
  model.A = mvee.A;
  model.map = spd_sqrt(mvee.A);
  model.residual = mvee.residual;

  const double contact_tol = 10.0 * tol;
  const NormSpec kprime = NormSpec::transformed(spec, model.map);
  for (int idx : mvee.contact_indices) {
    Eigen::VectorXd mapped = model.map * points[static_cast<std::size_t>(idx)];
    const double len = mapped.norm();
    if (std::abs(len - 1.0) > contact_tol) continue;
    mapped /= len;
    if (norm_eval(kprime, mapped) > 1.0 + contact_tol)
      throw std::runtime_error("lowner_transform: contact leaves the mapped ball");
    bool duplicate = false;
    for (const auto& c : model.contact_points)
      if ((c - mapped).cwiseAbs().maxCoeff() <= 1e-9) {
        duplicate = true;
        break;
      }
    if (!duplicate) model.contact_points.push_back(std::move(mapped));
  }
  std::sort(model.contact_points.begin(), model.contact_points.end(), lex_less);

  require_arg(model.contact_points.size() >= static_cast<std::size_t>(spec.dim()),
              "lowner_transform: fewer contacts than the dimension");
  Eigen::MatrixXd C(model.contact_points.size(), spec.dim());
  for (std::size_t i = 0; i < model.contact_points.size(); ++i)
    C.row(static_cast<Eigen::Index>(i)) = model.contact_points[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  if (svd.singularValues().minCoeff() <= 1e-8 * svd.singularValues().maxCoeff())
    throw std::runtime_error("lowner_transform: contact set does not span the space");
  return model;
}

std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> find_witness_pair(
    const EllipsoidModel& model, const NormSpec& kprime_spec, double margin,
    const PairSearchConfig& config) {
  require_arg(!model.contact_points.empty(), "find_witness_pair: empty contact set");
  const auto& contacts = model.contact_points;
  const Eigen::Index n = kprime_spec.dim();

  auto midpoint_escapes = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v)
      -> std::optional<double> {
    const double alpha = (u + v).norm();
    const double beta = (u - v).norm();
    if (alpha < 1e-9 || beta < 1e-9) return std::nullopt;  // colinear
    const Eigen::VectorXd mid = (u + v) / alpha;
    const double nrm = norm_eval(kprime_spec, mid);
    if (nrm >= 1.0 + margin) return nrm;
    return std::nullopt;
  };

  for (std::size_t i = 0; i < contacts.size(); ++i)
    for (std::size_t j = i + 1; j < contacts.size(); ++j)
      if (midpoint_escapes(contacts[i], contacts[j]))
        return std::make_pair(contacts[i], contacts[j]);

  // Fallback: maximize ||x||_2 over the polytope { x : x'y <= 1 for all
  // contacts y } by vertex enumeration, then pair the contacts active at the
  // maximizer.
  const std::size_t m = contacts.size();
  if (m < static_cast<std::size_t>(n)) return std::nullopt;
  double combos = 1.0;
  for (Eigen::Index k = 0; k < n; ++k)
    combos *= static_cast<double>(m - static_cast<std::size_t>(k)) / (k + 1);
  if (combos > static_cast<double>(config.combination_cap)) return std::nullopt;

  Eigen::VectorXd best_x;
  double best_norm = 1.0;
  // enumerate n-subsets of contacts
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  while (true) {
    Eigen::MatrixXd Y(n, n);
    for (Eigen::Index r = 0; r < n; ++r) Y.row(r) = contacts[idx[static_cast<std::size_t>(r)]];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Y);
    if (lu.isInvertible()) {
      const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(n));
      bool feasible = true;
      for (const auto& c : contacts)
        if (c.dot(x) > 1.0 + 1e-9) {
          feasible = false;
          break;
        }
      if (feasible && x.norm() > best_norm + 1e-12) {
        best_norm = x.norm();
        best_x = x;
      }
    }
    // next combination
    Eigen::Index k = n - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] ==
                         m - static_cast<std::size_t>(n - k)) {
      --k;
    }
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (Eigen::Index r = k + 1; r < n; ++r)
      idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
  }

  if (best_x.size() == 0) return std::nullopt;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < contacts.size(); ++i)
    if (std::abs(contacts[i].dot(best_x) - 1.0) <= 1e-7 * std::max(1.0, best_x.norm()))
      active.push_back(i);
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t b = a + 1; b < active.size(); ++b)
      if (midpoint_escapes(contacts[active[a]], contacts[active[b]]))
        return std::make_pair(contacts[active[a]], contacts[active[b]]);
  return std::nullopt;
}

WitnessCertificate build_witness(const EllipsoidModel& model, const NormSpec& spec,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                 const CertifyConfig& config) {
  require_arg(u.size() == spec.dim() && v.size() == spec.dim(),
              "build_witness: dimension mismatch");
  const NormSpec kprime = NormSpec::transformed(spec, model.map);

  WitnessCertificate cert;
  cert.u = u / u.norm();
  cert.v = v / v.norm();
  cert.map = model.map;
  cert.alpha = (cert.u + cert.v).norm();
  cert.beta = (cert.u - cert.v).norm();
  require_arg(cert.alpha > 1e-9 && cert.beta > 1e-9, "build_witness: colinear pair");
  cert.e1 = (cert.u + cert.v) / cert.alpha;
  cert.e2 = (cert.u - cert.v) / cert.beta;

  cert.kappa = dual_norm_eval(kprime, DualVector(cert.e1));
  if (!(cert.kappa > 1e-9 && cert.kappa < 1.0 - 1e-9))
    throw std::runtime_error(
        "build_witness: kappa = " + std::to_string(cert.kappa) +
        " does not certify a witness (the midpoint functional is not separated "
        "from the ball)");

  const double inv_k2 = 1.0 / (cert.kappa * cert.kappa);
  cert.B_tilde = inv_k2 * cert.e1 * cert.e1.transpose() - cert.e2 * cert.e2.transpose();
  cert.B = model.map.transpose() * cert.B_tilde * model.map;

  cert.opnorm_lower = inv_k2 * cert.alpha * cert.alpha / 4.0 +
                      cert.beta * cert.beta / 4.0;
  const double direct = cert.v.dot(cert.B_tilde * cert.u);
  if (std::abs(direct - cert.opnorm_lower) > 1e-9 * std::max(1.0, cert.opnorm_lower))
    throw std::runtime_error("build_witness: bilinear value check failed");

  cert.qnorm_upper =
      quadratic_form_norm(SymmetricOperator(cert.B_tilde), kprime).value;
  const double tol = 10.0 * config.mvee_tol;
  if (cert.qnorm_upper > 1.0 + tol)
    throw std::runtime_error("build_witness: form norm exceeds 1 beyond tolerance");
  if (cert.opnorm_lower <= cert.qnorm_upper + config.witness_margin * 0.1)
    throw std::runtime_error("build_witness: certified gap failed to open");
  return cert;
}

CertifyResult certify(const NormSpec& spec, const CertifyConfig& config) {
  require_arg(spec.dim() >= 2, "certify: dimension must be at least 2");
  CertifyResult result;

  if (!config.skip_fast_path) {
    SeededRng rng(config.seed);
    double max_residual = 0.0;
    const Eigen::Index n = spec.dim();
    for (int i = 0; i < config.fast_pairs; ++i) {
      Eigen::VectorXd a(n), b(n);
      for (Eigen::Index k = 0; k < n; ++k) a[k] = rng.gaussian();
      for (Eigen::Index k = 0; k < n; ++k) b[k] = rng.gaussian();
      const double na = norm_eval(spec, a);
      const double nb = norm_eval(spec, b);
      if (na < 1e-300 || nb < 1e-300) continue;
      max_residual = std::max(max_residual, parallelogram_residual(spec, a / na, b / nb));
    }
    result.residual = max_residual;
    if (max_residual <= config.euclid_tol) {
      result.verdict = CertifyVerdict::Euclidean;
      result.diagnostics = "parallelogram residual within tolerance";
      return result;
    }
  }

  try {
    EllipsoidModel model =
        lowner_transform(spec, config.mvee_samples, config.seed, config.mvee_tol);
    const NormSpec kprime = NormSpec::transformed(spec, model.map);
    auto pair = find_witness_pair(model, kprime, config.witness_margin,
                                  config.pair_search);
    if (!pair) {
      result.verdict = CertifyVerdict::Inconclusive;
      result.diagnostics =
          "parallelogram residual above tolerance but no contact pair cleared "
          "the witness margin";
      return result;
    }
    result.certificate = build_witness(model, spec, pair->first, pair->second, config);
    result.verdict = CertifyVerdict::NonEuclidean;
    result.diagnostics = "witness pair found among ellipsoid contacts";
  } catch (const std::exception& e) {
    result.verdict = CertifyVerdict::Inconclusive;
    result.diagnostics = std::string("pipeline failure: ") + e.what();
  }
  return result;
}

CertificateCheck verify_certificate(const WitnessCertificate& cert, const NormSpec& spec,
                                    double tol) {
  CertificateCheck check;
  auto fail = [&](const std::string& why) {
    check.pass = false;
    check.detail = why;
    return check;
  };

  NormSpec kprime = NormSpec::transformed(spec, cert.map);
  if (std::abs(cert.u.norm() - 1.0) > tol || std::abs(cert.v.norm() - 1.0) > tol)
    return fail("contact pair is not on the Euclidean sphere");
  if (norm_eval(kprime, cert.u) > 1.0 + tol || norm_eval(kprime, cert.v) > 1.0 + tol)
    return fail("contact pair leaves the mapped unit ball");

  const double alpha = (cert.u + cert.v).norm();
  const double beta = (cert.u - cert.v).norm();
  if (std::abs(alpha - cert.alpha) > tol || std::abs(beta - cert.beta) > tol)
    return fail("alpha/beta do not match the pair");
  if (std::abs(alpha * alpha / 4.0 + beta * beta / 4.0 - 1.0) > 1e-12)
    return fail("parallelogram identity violated");
  if (std::abs(cert.e1.dot(cert.e2)) > 1e-9 || std::abs(cert.e1.norm() - 1.0) > 1e-9 ||
      std::abs(cert.e2.norm() - 1.0) > 1e-9)
    return fail("frame is not orthonormal");

  const double kappa = dual_norm_eval(kprime, DualVector(cert.e1));
  if (std::abs(kappa - cert.kappa) > tol * std::max(1.0, kappa) || kappa >= 1.0 - tol ||
      kappa <= tol)
    return fail("kappa does not re-verify");

  const double inv_k2 = 1.0 / (kappa * kappa);
  Eigen::MatrixXd expected =
      inv_k2 * cert.e1 * cert.e1.transpose() - cert.e2 * cert.e2.transpose();
  if ((expected - cert.B_tilde).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, inv_k2))
    return fail("operator does not match its defining frame");

  const double bilinear = cert.v.dot(cert.B_tilde * cert.u);
  if (std::abs(bilinear - cert.opnorm_lower) > tol * std::max(1.0, cert.opnorm_lower))
    return fail("bilinear lower bound does not re-verify");
  if (!(bilinear > 1.0))
    return fail("bilinear value does not exceed 1");

  const double qnorm =
      quadratic_form_norm(SymmetricOperator(cert.B_tilde), kprime).value;
  if (std::abs(qnorm - cert.qnorm_upper) > tol * std::max(1.0, qnorm))
    return fail("form norm does not re-verify");
  if (qnorm > 1.0 + 10.0 * tol) return fail("form norm exceeds 1 beyond tolerance");

  Eigen::MatrixXd pulled = cert.map.transpose() * cert.B_tilde * cert.map;
  if ((pulled - cert.B).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, pulled.cwiseAbs().maxCoeff()))
    return fail("pullback operator does not match");
  const double qnorm_orig = quadratic_form_norm(SymmetricOperator(cert.B), spec).value;
  if (std::abs(qnorm_orig - qnorm) > tol * std::max(1.0, qnorm))
    return fail("form norm differs between the two frames");
  const double opnorm_orig = operator_norm(SymmetricOperator(cert.B), spec).value;
  if (opnorm_orig < cert.opnorm_lower - tol * std::max(1.0, cert.opnorm_lower))
    return fail("exact operator norm falls below the certified lower bound");

  if (!(cert.qnorm_upper < cert.opnorm_lower))
    return fail("certified gap is not open");
  check.pass = true;
  check.detail = "certificate re-verified from scratch";
  return check;
}

const char* to_string(CertifyVerdict verdict) {
  switch (verdict) {
    case CertifyVerdict::Euclidean:
      return "euclidean";
    case CertifyVerdict::NonEuclidean:
      return "non_euclidean";
    case CertifyVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

}  // namespace holderlab
