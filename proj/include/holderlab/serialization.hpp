#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "holderlab/euclid_certifier.hpp"
#include "holderlab/holder_analysis.hpp"
#include "holderlab/normed_space.hpp"
#include "holderlab/quadratic_norms.hpp"
#include "holderlab/universal_gradient.hpp"
#include "json.hpp"

namespace holderlab {

// Shortest round-trip decimal representation; identical bytes for identical
// doubles, used for every CSV field.
std::string format_double(double v);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// Norm specs as {"kind": "l1"|"l2"|"linf"|"weighted"|"transformed",
/// "dim": n, "weight": [[...]], "map": [[...]], "base": {...}}.
nlohmann::json norm_spec_to_json(const NormSpec& spec);
NormSpec norm_spec_from_json(const nlohmann::json& j);

nlohmann::json holder_report_to_json(const HolderReport& report);
HolderReport holder_report_from_json(const nlohmann::json& j);

nlohmann::json gap_report_to_json(const GapReport& report);
nlohmann::json certify_result_to_json(const CertifyResult& result);
nlohmann::json trace_summary_to_json(const DescentTrace& trace,
                                     const TraceVerdict& verdict);

/// CSV with header "iteration,f,n_k,h_k"; one row per step plus the final
/// point (step 0).
void write_trace_csv(std::ostream& os, const DescentTrace& trace);

/// CSV with header "nu,c_general,c_euclidean".
void write_figure1_csv(std::ostream& os, const std::vector<Figure1Row>& rows);

/// Corpus manifest: id, kind, parameters, and the exact constants that are
/// known under the closed-form norms.
nlohmann::json corpus_manifest_json();

/// FNV-1a 64-bit hash of a canonical JSON dump, as 16 hex digits. Stamped
/// into every command output for reproducibility.
std::string config_hash(const nlohmann::json& config);

}  // namespace holderlab
