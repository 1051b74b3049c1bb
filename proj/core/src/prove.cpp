#include "spectral_cascade/prove.hpp"

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

ProofReport prove_instance(const InstanceSpec& instance, double eps0, std::int64_t a,
                           std::int64_t b, std::size_t count, std::int64_t n_max,
                           const SearchOptions& opts) {
  ProofReport out;
  instance.model.validate();
  out.conditions = check_L_conditions(instance.l, instance.structure());
  if (const ConditionLine* bad = out.conditions.first_failure()) {
    throw Error(ErrorKind::kConditionFailure, bad->name);
  }
  CascadeOptions co;
  co.sequence_distance_bound = [&](std::int64_t k) { return sequence_distance_bound(instance, k); };
  out.cascade = choose_parameters(instance.model, instance.l, eps0, co);

  const std::int64_t n = std::max(out.cascade.n0, out.cascade.k0);
  out.sample = cascade_decompose(make_sequence_Ln(instance, n), a * n + b, instance.model, out.cascade);
  out.polar = polar_forms(out.sample, instance.model, true);
  const SequenceFn seq = [&](std::int64_t k) { return make_sequence_Ln(instance, k); };
  out.search = find_subsequence(instance.model, seq, out.cascade, a, b, count, n_max, opts);
  return out;
}

}  // namespace spectral_cascade
