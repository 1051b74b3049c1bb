#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "spectral_cascade/cascade.hpp"
#include "spectral_cascade/codec.hpp"
#include "spectral_cascade/error.hpp"
#include "spectral_cascade/graph_transform.hpp"
#include "spectral_cascade/io.hpp"
#include "spectral_cascade/prove.hpp"
#include "spectral_cascade/scenario.hpp"
#include "spectral_cascade/search.hpp"
#include "spectral_cascade/verify.hpp"

namespace sc = spectral_cascade;

namespace {

constexpr int kExitCondition = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitExhausted = 3;
constexpr int kExitUsage = 64;

int exit_code(sc::ErrorKind kind) {
  using K = sc::ErrorKind;
  switch (kind) {
    case K::kConditionFailure:
    case K::kHypothesisFailure:
    case K::kCertificateFailure:
    case K::kEpsilonTooLarge:
    case K::kStageFailure:
    case K::kResonanceFound:
    case K::kIndependenceFailure:
    case K::kNegativeDeterminant:
    case K::kDegenerateP:
    case K::kPerturbationExhausted:
      return kExitCondition;
    case K::kNoConvergence:
    case K::kConvergenceFailure:
    case K::kOverflow:
    case K::kSingular:
    case K::kIllConditioned:
      return kExitNumeric;
    case K::kSearchExhausted:
      return kExitExhausted;
    case K::kSizeMismatch:
    case K::kInvalidArgument:
    case K::kParse:
      return kExitUsage;
  }
  return kExitNumeric;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream one(item);
    T v{};
    if (!(one >> v) || !(one >> std::ws).eof()) {
      throw sc::Error(sc::ErrorKind::kInvalidArgument, std::string("bad entry in ") + what + ": '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw sc::Error(sc::ErrorKind::kInvalidArgument, std::string(what) + " is empty");
  return out;
}

// 0 requests every hardware thread; SPECTRAL_CASCADE_THREADS caps the result.
int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SPECTRAL_CASCADE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

// Accepts an instance artifact or any artifact that embeds one.
sc::InstanceSpec load_instance(const std::string& path) {
  const sc::Json j = sc::read_artifact(path);
  if (j.is_object() && j.value("kind", "") != "instance" && j.contains("instance")) {
    return sc::instance_from_json(j["instance"]);
  }
  return sc::instance_from_json(j);
}

void emit(const std::string& path, const sc::Json& art) {
  if (path.empty() || path == "-") {
    std::cout << sc::canonical_text(art);
  } else {
    sc::write_artifact(path, art);
  }
}

sc::CascadeOptions cascade_options(const sc::InstanceSpec& spec) {
  sc::CascadeOptions o;
  o.sequence_distance_bound = [spec](std::int64_t k) { return sc::sequence_distance_bound(spec, k); };
  return o;
}

struct Common {
  std::string input;
  std::string output;
  double eps0 = 0.05;
};

struct SearchArgs {
  std::optional<std::int64_t> a, b;
  std::size_t count = 3;
  std::int64_t n_max = 100000;
  double margin = 0.05;
  double gap_tol = 1e-9;
  int threads = 0;
};

void add_search_flags(CLI::App* cmd, SearchArgs& s) {
  cmd->add_option("--a", s.a, "progression step (default: from the instance)")->check(CLI::PositiveNumber);
  cmd->add_option("--b", s.b, "progression offset (default: from the instance)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--count", s.count, "exponents to certify")->check(CLI::PositiveNumber);
  cmd->add_option("--n-max", s.n_max, "last index scanned")->check(CLI::PositiveNumber);
  cmd->add_option("--margin", s.margin, "window margin as a fraction of eps_hat")->check(CLI::Range(0.0, 0.999));
  cmd->add_option("--gap-tol", s.gap_tol, "required relative modulus gap")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", s.threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
}

sc::RunParameters run_parameters(const sc::InstanceSpec& spec, const Common& c, const SearchArgs& s) {
  sc::RunParameters p;
  p.eps0 = c.eps0;
  p.gap_tol = s.gap_tol;
  p.margin_fraction = s.margin;
  p.a = s.a.value_or(spec.progression.a);
  p.b = s.b.value_or(spec.progression.b);
  p.count = s.count;
  p.n_max = s.n_max;
  return p;
}

sc::SearchOptions search_options(const SearchArgs& s, bool rows) {
  sc::SearchOptions o;
  o.margin_fraction = s.margin;
  o.gap_tol = s.gap_tol;
  o.threads = resolve_threads(s.threads);
  o.collect_rows = rows;
  return o;
}

int cmd_gen(int d, const std::string& sizes, std::uint64_t seed, const std::string& moduli,
            const sc::GenerateOptions& base, const std::string& out) {
  sc::GenerateOptions opts = base;
  if (!moduli.empty()) opts.moduli = parse_list<double>(moduli, "--moduli");
  opts.law.seed = seed;
  const sc::BlockStructure s(parse_list<int>(sizes, "--sizes"));
  const sc::InstanceSpec spec = sc::generate_instance(d, s, seed, opts);
  emit(out, sc::instance_artifact(spec));
  return 0;
}

int cmd_check(const Common& c) {
  const sc::InstanceSpec spec = load_instance(c.input);
  const sc::ConditionReport rep = sc::check_L_conditions(spec.l, spec.structure());
  for (const auto& l : rep.lines) {
    std::cout << (l.passed ? "pass  " : "FAIL  ") << l.name << "  margin " << l.margin << "\n";
  }
  if (!c.output.empty()) {
    emit(c.output, sc::conditions_artifact(spec, rep));
  }
  if (!rep.passed) {
    std::cerr << "condition failed: " << rep.first_failure()->name << "\n";
    return kExitCondition;
  }
  return 0;
}

int cmd_split(const Common& c, std::int64_t n_req, std::int64_t k_req) {
  const sc::InstanceSpec spec = load_instance(c.input);
  const sc::ParameterCascade pc = sc::choose_parameters(spec.model, spec.l, c.eps0, cascade_options(spec));
  const sc::Stage& st = pc.stages.front();
  const std::int64_t k = std::max(pc.k0, k_req);
  const std::int64_t n = std::max(st.constants.n0, n_req);
  const sc::Matrix j = sc::make_sequence_Ln(spec, k);
  const sc::SplitCertificate cert = sc::invariant_pair(st.problem, st.constants, j, n);
  emit(c.output, sc::split_artifact(st.problem, st.constants, cert, k));
  return 0;
}

int cmd_cascade(const Common& c, std::int64_t n_req, std::int64_t k_req) {
  const sc::InstanceSpec spec = load_instance(c.input);
  const sc::ParameterCascade pc = sc::choose_parameters(spec.model, spec.l, c.eps0, cascade_options(spec));
  const std::int64_t k = std::max(pc.k0, k_req);
  const std::int64_t n = std::max(pc.n0, n_req);
  const sc::CascadeResult res = sc::cascade_decompose(sc::make_sequence_Ln(spec, k), n, spec.model, pc);
  emit(c.output, sc::cascade_artifact(spec, pc, res, k, sc::polar_forms(res, spec.model, true)));
  return 0;
}

void report_exhausted(const sc::SearchExhausted& e, std::size_t count) {
  const sc::SearchReport& r = e.report();
  std::cerr << e.what() << "\n  " << r.hits.size() << " of " << count << " exponents up to n = " << r.last_n
            << " (" << r.candidates << " window candidates)\n";
  for (const auto& m : r.near_misses) std::cerr << "  near miss n = " << m.n << ": " << m.reason << "\n";
}

int cmd_find(const Common& c, const SearchArgs& s, const std::string& csv) {
  const sc::InstanceSpec spec = load_instance(c.input);
  const sc::RunParameters run = run_parameters(spec, c, s);
  const sc::ParameterCascade pc = sc::choose_parameters(spec.model, spec.l, c.eps0, cascade_options(spec));
  const sc::SequenceFn seq = [&spec](std::int64_t n) { return sc::make_sequence_Ln(spec, n); };
  sc::SearchReport rep;
  try {
    rep = sc::find_subsequence(spec.model, seq, pc, run.a, run.b, run.count, run.n_max,
                               search_options(s, !csv.empty()));
  } catch (const sc::SearchExhausted& e) {
    if (!csv.empty()) sc::write_text_file(csv, sc::search_csv(e.report(), spec.dimension()));
    report_exhausted(e, run.count);
    return kExitExhausted;
  }
  if (!csv.empty()) sc::write_text_file(csv, sc::search_csv(rep, spec.dimension()));
  for (const auto& h : rep.hits) std::cerr << "n = " << h.n << "  exponent " << h.exponent << "  min_gap " << h.min_gap << "\n";
  emit(c.output, sc::search_artifact(spec, pc, run, rep));
  return 0;
}

int cmd_prove(const Common& c, const SearchArgs& s) {
  const sc::InstanceSpec spec = load_instance(c.input);
  const sc::RunParameters run = run_parameters(spec, c, s);
  sc::ProofReport pr;
  try {
    pr = sc::prove_instance(spec, run.eps0, run.a, run.b, run.count, run.n_max, search_options(s, false));
  } catch (const sc::SearchExhausted& e) {
    report_exhausted(e, run.count);
    return kExitExhausted;
  }
  for (const auto& h : pr.search.hits) std::cerr << "n = " << h.n << "  exponent " << h.exponent << "\n";
  emit(c.output, sc::proof_artifact(spec, run, pr));
  return 0;
}

// Unreadable files count as failed artifacts here, not as usage errors.
int cmd_verify(const std::vector<std::string>& files, bool verbose) {
  bool all = true;
  for (const auto& f : files) {
    sc::VerifyReport rep;
    try {
      rep = sc::verify_artifact_text(sc::read_text_file(f));
    } catch (const std::exception& e) {
      rep.lines.push_back({std::string("readable: ") + e.what(), false, 0.0, 0.0});
    }
    all = all && rep.passed;
    if (verbose) {
      for (const auto& l : rep.lines) {
        std::cout << "  " << (l.passed ? "pass  " : "FAIL  ") << l.name << "  " << l.measured << " / " << l.bound << "\n";
      }
    }
    if (rep.passed) {
      std::cout << f << ": ok " << rep.kind << " (" << rep.lines.size() << " checks)\n";
    } else {
      const sc::VerifyLine* bad = rep.first_failure();
      std::cout << f << ": FAILED " << (bad ? bad->name : std::string("no checks ran"));
      if (bad && (bad->measured != 0.0 || bad->bound != 0.0)) {
        std::cout << " (measured " << bad->measured << ", bound " << bad->bound << ")";
      }
      std::cout << "\n";
    }
  }
  return all ? 0 : kExitCondition;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral cascade of L T^n: invariant splittings, block decomposition and real-simple exponent search"};
  app.require_subcommand(1);

  Common common;
  SearchArgs search;
  std::int64_t n_req = 0, k_req = 0;

  const auto add_io = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) cmd->add_option("-i,--input", common.input, "instance or artifact JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", common.output, "artifact path (default: stdout)");
  };
  const auto add_eps = [&](CLI::App* cmd) {
    cmd->add_option("--eps0", common.eps0, "radius of the reference balls")->check(CLI::PositiveNumber);
  };

  int d = 0;
  std::string sizes, moduli;
  std::uint64_t seed = 1;
  sc::GenerateOptions gen_opts;
  std::int64_t gen_a = 1, gen_b = 0;
  CLI::App* gen = app.add_subcommand("gen", "generate a valid instance");
  gen->add_option("--d", d, "dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--sizes", sizes, "block sizes, comma separated, e.g. 1,2")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--moduli", moduli, "block moduli, strictly decreasing");
  gen->add_option("--c", gen_opts.law.c, "perturbation amplitude")->check(CLI::Range(0.0, 0.999999));
  gen->add_option("--rho", gen_opts.law.rho, "perturbation decay")->check(CLI::Range(1e-12, 0.999999));
  gen->add_option("--a", gen_a, "progression step")->check(CLI::PositiveNumber);
  gen->add_option("--b", gen_b, "progression offset")->check(CLI::NonNegativeNumber);
  add_io(gen, false);

  CLI::App* check = app.add_subcommand("check", "check the conditions on L");
  add_io(check, true);

  CLI::App* split = app.add_subcommand("split", "certify the first invariant splitting");
  add_io(split, true);
  add_eps(split);
  split->add_option("--n", n_req, "exponent (raised to n0)")->check(CLI::NonNegativeNumber);
  split->add_option("--k", k_req, "sequence index (raised to k0)")->check(CLI::NonNegativeNumber);

  CLI::App* cascade = app.add_subcommand("cascade", "decompose the spectrum of L_k T^n");
  add_io(cascade, true);
  add_eps(cascade);
  cascade->add_option("--n", n_req, "exponent (raised to n0)")->check(CLI::NonNegativeNumber);
  cascade->add_option("--k", k_req, "sequence index (raised to k0)")->check(CLI::NonNegativeNumber);

  std::string csv;
  CLI::App* find = app.add_subcommand("find-n", "search exponents with real simple spectrum");
  add_io(find, true);
  add_eps(find);
  add_search_flags(find, search);
  find->add_option("--csv", csv, "write one row per scanned exponent");

  CLI::App* prove = app.add_subcommand("prove", "conditions, cascade and exponent search end to end");
  add_io(prove, true);
  add_eps(prove);
  add_search_flags(prove, search);

  std::vector<std::string> files;
  bool verbose = false;
  CLI::App* verify = app.add_subcommand("verify", "re-validate artifacts from their stored data");
  verify->add_option("files", files, "artifact files")->required();
  verify->add_flag("-v,--verbose", verbose, "print every check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      gen_opts.progression = {gen_a, gen_b};
      return cmd_gen(d, sizes, seed, moduli, gen_opts, common.output);
    }
    if (*check) return cmd_check(common);
    if (*split) return cmd_split(common, n_req, k_req);
    if (*cascade) return cmd_cascade(common, n_req, k_req);
    if (*find) return cmd_find(common, search, csv);
    if (*prove) return cmd_prove(common, search);
    if (*verify) return cmd_verify(files, verbose);
  } catch (const sc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
