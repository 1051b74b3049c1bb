#include <benchmark/benchmark.h>

#include <random>

#include "spectral_cascade/cascade.hpp"
#include "spectral_cascade/eigen.hpp"
#include "spectral_cascade/graph_transform.hpp"
#include "spectral_cascade/product_spectrum.hpp"
#include "spectral_cascade/scenario.hpp"
#include "spectral_cascade/search.hpp"
#include "spectral_cascade/io.hpp"
#include "spectral_cascade/verify.hpp"

namespace sc = spectral_cascade;

namespace {

// Benchmark argument -> block pattern.
sc::BlockStructure pattern(std::int64_t i) {
  static const std::vector<std::vector<int>> p = {{1, 2}, {2, 2}, {1, 2, 2}, {2, 2, 2}};
  return sc::BlockStructure(p.at(static_cast<std::size_t>(i)));
}

struct Prepared {
  sc::InstanceSpec spec;
  sc::ParameterCascade pc;
};

Prepared prepare(std::int64_t pat) {
  Prepared p;
  const sc::BlockStructure s = pattern(pat);
  p.spec = sc::generate_instance(s.dim(), s, 11);
  sc::CascadeOptions co;
  const sc::InstanceSpec spec = p.spec;
  co.sequence_distance_bound = [spec](std::int64_t k) { return sc::sequence_distance_bound(spec, k); };
  p.pc = sc::choose_parameters(p.spec.model, p.spec.l, 0.05, co);
  return p;
}

void label(benchmark::State& state) {
  const sc::BlockStructure structure = pattern(state.range(0));
  std::string l;
  for (int s : structure.sizes()) l += (l.empty() ? "" : ",") + std::to_string(s);
  state.SetLabel("(" + l + ")");
}

void BM_CascadeDecompose(benchmark::State& state) {
  const Prepared p = prepare(state.range(0));
  const sc::Matrix l_k = sc::make_sequence_Ln(p.spec, p.pc.k0);
  for (auto _ : state) benchmark::DoNotOptimize(sc::cascade_decompose(l_k, p.pc.n0 + 10, p.spec.model, p.pc));
  label(state);
}
BENCHMARK(BM_CascadeDecompose)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_ProductSpectrum(benchmark::State& state) {
  const Prepared p = prepare(state.range(0));
  const std::int64_t n = state.range(1);
  for (auto _ : state) benchmark::DoNotOptimize(sc::product_spectrum(p.spec.l, p.spec.model.blocks, n));
  label(state);
}
BENCHMARK(BM_ProductSpectrum)->ArgsProduct({{0, 3}, {10, 1000, 10000}})->Unit(benchmark::kMicrosecond);

void BM_InvariantPair(benchmark::State& state) {
  const Prepared p = prepare(state.range(0));
  const sc::Stage& st = p.pc.stages.front();
  const sc::Matrix j = sc::make_sequence_Ln(p.spec, p.pc.k0);
  for (auto _ : state) benchmark::DoNotOptimize(sc::invariant_pair(st.problem, st.constants, j, st.constants.n0));
  label(state);
}
BENCHMARK(BM_InvariantPair)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_FindSubsequence(benchmark::State& state) {
  const Prepared p = prepare(state.range(0));
  const sc::InstanceSpec& spec = p.spec;
  const sc::SequenceFn seq = [&spec](std::int64_t n) { return sc::make_sequence_Ln(spec, n); };
  for (auto _ : state) benchmark::DoNotOptimize(sc::find_subsequence(spec.model, seq, p.pc, 1, 0, 3, 100000));
  label(state);
}
BENCHMARK(BM_FindSubsequence)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Eigenvalues(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto d = static_cast<std::size_t>(state.range(0));
  sc::Matrix m(d, d);
  for (double& x : m.data()) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(sc::eigenvalues(m));
  state.SetLabel("d=" + std::to_string(d));
}
BENCHMARK(BM_Eigenvalues)->DenseRange(2, 6);

void BM_VerifyProof(benchmark::State& state) {
  const Prepared p = prepare(state.range(0));
  sc::RunParameters run;
  const std::string text = sc::canonical_text(
      sc::proof_artifact(p.spec, run, sc::prove_instance(p.spec, run.eps0, run.a, run.b, run.count, run.n_max)));
  for (auto _ : state) benchmark::DoNotOptimize(sc::verify_artifact_text(text));
  label(state);
}
BENCHMARK(BM_VerifyProof)->DenseRange(0, 1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
