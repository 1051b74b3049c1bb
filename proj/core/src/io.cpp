#include "spectral_cascade/io.hpp"

#include <cmath>

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

using json_field::integer;
using json_field::number;
using json_field::unsigned_integer;

const Json& field(const Json& j, const char* key) { return json_field::get(j, key); }

// NaN has no JSON number; it marks reflection levels in phase lists.
Json nullable(double x) { return std::isnan(x) ? Json(nullptr) : Json(x); }

Json doubles(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(nullable(x));
  return out;
}

}  // namespace

Json polar_forms_to_json(const std::vector<PolarForm>& forms) {
  Json out = Json::array();
  for (const auto& pf : forms) {
    Json f{{"level", pf.level}, {"reflection", pf.reflection}, {"degenerate", pf.degenerate}};
    if (!pf.reflection) {
      f["P"] = matrix_to_json(pf.p);
      f["alpha"] = pf.alpha;
      f["eps_hat"] = pf.eps_hat;
    }
    out.push_back(std::move(f));
  }
  return out;
}

Json instance_to_json(const InstanceSpec& spec) {
  return {{"structure", structure_to_json(spec.structure())},
          {"T_blocks", blocks_to_json(spec.model.blocks)},
          {"L", matrix_to_json(spec.l)},
          {"law", {{"c", spec.law.c}, {"rho", spec.law.rho}, {"seed", spec.law.seed}}},
          {"progression", {{"a", spec.progression.a}, {"b", spec.progression.b}}}};
}

InstanceSpec instance_from_json(const Json& j) {
  InstanceSpec spec;
  spec.model.structure = structure_from_json(field(j, "structure"));
  spec.model.blocks = blocks_from_json(field(j, "T_blocks"));
  spec.model.validate();
  spec.l = matrix_from_json(field(j, "L"));
  const int d = spec.model.structure.dim();
  if (spec.l.rows() != static_cast<std::size_t>(d) || spec.l.cols() != static_cast<std::size_t>(d)) {
    throw Error(ErrorKind::kInvalidArgument, "L does not match the block structure");
  }
  const Json& law = field(j, "law");
  spec.law = {number(law, "c"), number(law, "rho"), unsigned_integer(law, "seed")};
  if (!(spec.law.c >= 0.0 && spec.law.c < 1.0) || !(spec.law.rho > 0.0 && spec.law.rho < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "law needs 0 <= c < 1 and 0 < rho < 1");
  }
  const Json& prog = field(j, "progression");
  spec.progression = {integer(prog, "a"), integer(prog, "b")};
  if (spec.progression.a < 1 || spec.progression.b < 0) {
    throw Error(ErrorKind::kInvalidArgument, "progression needs a >= 1 and b >= 0");
  }
  return spec;
}

Json condition_report_to_json(const ConditionReport& rep) {
  Json lines = Json::array();
  for (const auto& l : rep.lines) {
    lines.push_back({{"name", l.name}, {"level", l.level}, {"passed", l.passed}, {"margin", l.margin}});
  }
  return {{"passed", rep.passed}, {"lines", std::move(lines)}};
}

Json constants_to_json(const TransformConstants& k) {
  return {{"alpha", k.alpha},   {"beta", k.beta},       {"gamma", k.gamma},
          {"rho", k.rho},       {"delta", k.delta},     {"n1", k.n1},
          {"n2", k.n2},         {"n3", k.n3},           {"n_domination", k.n_domination},
          {"n_transversal", k.n_transversal},           {"n0plus", k.n0plus},
          {"n0minus", k.n0minus},                       {"n0", k.n0}};
}

Json split_problem_to_json(const SplitProblem& p) {
  Json out{{"V", matrix_to_json(p.v)},
           {"J0", matrix_to_json(p.j0)},
           {"split", {{"top", p.split.top}, {"bottom", p.split.bottom}}},
           {"delta", p.delta}};
  if (!p.v_blocks.empty()) out["V_blocks"] = blocks_to_json(p.v_blocks);
  return out;
}

Json certificate_to_json(const SplitCertificate& cert) {
  return {{"n", cert.n},
          {"J", matrix_to_json(cert.j)},
          {"xi", matrix_to_json(cert.xi)},
          {"eta_hat", matrix_to_json(cert.eta_hat)},
          {"eta", matrix_to_json(cert.eta)},
          {"X_n", matrix_to_json(cert.x_n)},
          {"Y_n_inv", matrix_to_json(cert.y_inv)},
          {"Y_n", matrix_to_json(cert.y_n)},
          {"xi_iterations", cert.xi_iterations},
          {"eta_iterations", cert.eta_iterations}};
}

Json certificate_report_to_json(const CertificateReport& rep) {
  Json items = Json::array();
  for (const auto& i : rep.items) {
    items.push_back({{"name", i.name},
                     {"item", i.item},
                     {"passed", i.passed},
                     {"measured", nullable(i.measured)},
                     {"bound", nullable(i.bound)}});
  }
  return {{"passed", rep.passed}, {"items", std::move(items)}};
}

Json cascade_parameters_to_json(const ParameterCascade& pc) {
  Json stages = Json::array();
  for (const auto& st : pc.stages) {
    stages.push_back({{"level", st.level},
                      {"problem", split_problem_to_json(st.problem)},
                      {"constants", constants_to_json(st.constants)}});
  }
  Json refs = Json::array();
  for (const auto& r : pc.references) refs.push_back(matrix_to_json(r));
  Json rots = Json::array();
  for (const auto& r : pc.rotations) {
    Json o{{"level", r.level},
           {"reference", matrix_to_json(r.reference)},
           {"reflection", r.reflection},
           {"eps_hat", r.eps_hat},
           {"alpha_drift", r.alpha_drift}};
    if (!r.reflection) {
      o["reference_P"] = matrix_to_json(r.reference_p);
      o["reference_alpha"] = r.reference_alpha;
    }
    rots.push_back(std::move(o));
  }
  return {{"eps0", pc.eps0}, {"delta", pc.delta},        {"beta", pc.beta},
          {"k0", pc.k0},     {"n0", pc.n0},             {"stages", std::move(stages)},
          {"references", std::move(refs)},              {"rotations", std::move(rots)}};
}

Json cascade_result_to_json(const CascadeResult& res) {
  Json levels = Json::array();
  for (const auto& lv : res.levels) {
    Json o{{"level", lv.level},
           {"X", matrix_to_json(lv.x)},
           {"reference_error", lv.reference_error},
           {"spectrum", spectrum_to_json(lv.spectrum)}};
    if (lv.y) o["Y"] = matrix_to_json(*lv.y);
    if (lv.split) {
      o["split"] = {{"top_error", lv.split->top_error},
                    {"bottom_error", lv.split->bottom_error},
                    {"log_domination", lv.split->log_domination}};
    }
    levels.push_back(std::move(o));
  }
  return {{"n", res.n},
          {"L_k", matrix_to_json(res.l_k)},
          {"levels", std::move(levels)},
          {"spectrum", spectrum_to_json(res.spectrum)},
          {"domination_gaps", res.domination_gaps}};
}

Json search_report_to_json(const SearchReport& rep, const InstanceSpec& spec) {
  Json hits = Json::array();
  for (const auto& h : rep.hits) {
    hits.push_back({{"n", h.n},
                    {"exponent", h.exponent},
                    {"phases", doubles(h.phases)},
                    {"spectrum", spectrum_to_json(h.spectrum)},
                    {"min_gap", h.min_gap},
                    {"max_imag_ratio", h.max_imag_ratio},
                    {"L_n", matrix_to_json(make_sequence_Ln(spec, h.n))}});
  }
  Json misses = Json::array();
  for (const auto& m : rep.near_misses) {
    misses.push_back({{"n", m.n}, {"excess", m.excess}, {"reason", m.reason}});
  }
  return {{"a", rep.a},
          {"b", rep.b},
          {"first_n", rep.first_n},
          {"last_n", rep.last_n},
          {"scanned", rep.scanned},
          {"candidates", rep.candidates},
          {"rotation_levels", rep.rotation_levels},
          {"windows", rep.windows},
          {"hits", std::move(hits)},
          {"near_misses", std::move(misses)}};
}

Json run_parameters_to_json(const RunParameters& p) {
  return {{"eps0", p.eps0}, {"gap_tol", p.gap_tol}, {"margin_fraction", p.margin_fraction},
          {"a", p.a},       {"b", p.b},             {"count", p.count},
          {"n_max", p.n_max}};
}

Json instance_artifact(const InstanceSpec& spec) {
  return make_artifact("instance", instance_to_json(spec));
}

Json conditions_artifact(const InstanceSpec& spec, const ConditionReport& rep) {
  return make_artifact("conditions",
                       {{"instance", instance_to_json(spec)}, {"report", condition_report_to_json(rep)}});
}

Json split_artifact(const SplitProblem& problem, const TransformConstants& constants,
                    const SplitCertificate& cert, std::int64_t k) {
  return make_artifact("split", {{"k", k},
                                 {"problem", split_problem_to_json(problem)},
                                 {"constants", constants_to_json(constants)},
                                 {"certificate", certificate_to_json(cert)},
                                 {"residuals", certificate_report_to_json(verify_certificate(cert, problem, constants))}});
}

Json cascade_artifact(const InstanceSpec& spec, const ParameterCascade& pc, const CascadeResult& res,
                      std::int64_t k, const std::vector<PolarForm>& polar) {
  return make_artifact("cascade", {{"instance", instance_to_json(spec)},
                                   {"k", k},
                                   {"parameters", cascade_parameters_to_json(pc)},
                                   {"result", cascade_result_to_json(res)},
                                   {"polar", polar_forms_to_json(polar)}});
}

Json search_artifact(const InstanceSpec& spec, const ParameterCascade& pc, const RunParameters& run,
                     const SearchReport& rep) {
  return make_artifact("search", {{"instance", instance_to_json(spec)},
                                  {"parameters", cascade_parameters_to_json(pc)},
                                  {"run", run_parameters_to_json(run)},
                                  {"report", search_report_to_json(rep, spec)}});
}

Json proof_artifact(const InstanceSpec& spec, const RunParameters& run, const ProofReport& pr) {
  return make_artifact("proof", {{"instance", instance_to_json(spec)},
                                 {"conditions", condition_report_to_json(pr.conditions)},
                                 {"parameters", cascade_parameters_to_json(pr.cascade)},
                                 {"sample", cascade_result_to_json(pr.sample)},
                                 {"polar", polar_forms_to_json(pr.polar)},
                                 {"run", run_parameters_to_json(run)},
                                 {"search", search_report_to_json(pr.search, spec)}});
}

}  // namespace spectral_cascade
