#pragma once

#include <cstdint>
#include <vector>

#include "spectral_cascade/cascade.hpp"
#include "spectral_cascade/codec.hpp"
#include "spectral_cascade/prove.hpp"
#include "spectral_cascade/scenario.hpp"
#include "spectral_cascade/search.hpp"

namespace spectral_cascade {

/// {"structure", "T_blocks", "L", "law", "progression"}.
Json instance_to_json(const InstanceSpec& spec);
/// Parses and validates the model; throws kParse or kInvalidArgument.
InstanceSpec instance_from_json(const Json& j);

Json condition_report_to_json(const ConditionReport& rep);
Json constants_to_json(const TransformConstants& k);
Json split_problem_to_json(const SplitProblem& p);
Json certificate_to_json(const SplitCertificate& cert);
Json certificate_report_to_json(const CertificateReport& rep);
Json cascade_parameters_to_json(const ParameterCascade& pc);
Json cascade_result_to_json(const CascadeResult& res);
Json polar_forms_to_json(const std::vector<PolarForm>& forms);
/// Hits carry L_n so the artifact re-validates without the sequence law code.
Json search_report_to_json(const SearchReport& rep, const InstanceSpec& spec);

/// Inputs a command records next to its results.
struct RunParameters {
  double eps0 = 0.05;
  double gap_tol = 1e-9;
  double margin_fraction = 0.05;
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::size_t count = 3;
  std::int64_t n_max = 100000;
};
Json run_parameters_to_json(const RunParameters& p);

// Complete artifacts, ready for write_artifact(). verify_artifact() knows
// these layouts and nothing else.
Json instance_artifact(const InstanceSpec& spec);
Json conditions_artifact(const InstanceSpec& spec, const ConditionReport& rep);
/// `k` is the sequence index of J = L_k. Embeds verify_certificate() residuals.
Json split_artifact(const SplitProblem& problem, const TransformConstants& constants,
                    const SplitCertificate& cert, std::int64_t k);
Json cascade_artifact(const InstanceSpec& spec, const ParameterCascade& pc, const CascadeResult& res,
                      std::int64_t k, const std::vector<PolarForm>& polar);
Json search_artifact(const InstanceSpec& spec, const ParameterCascade& pc, const RunParameters& run,
                     const SearchReport& rep);
Json proof_artifact(const InstanceSpec& spec, const RunParameters& run, const ProofReport& pr);

}  // namespace spectral_cascade
