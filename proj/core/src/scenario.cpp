#include "spectral_cascade/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rng.hpp"
#include "spectral_cascade/decompositions.hpp"
#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

std::string level_name(const char* what, int level) {
  return std::string(what) + "_" + std::to_string(level);
}

// Evaluates every condition; references are filled only while invertibility
// holds, so a failure stops the chain at that level.
ConditionReport evaluate_conditions(const Matrix& l, const BlockStructure& s, double gap_tol,
                                    std::vector<Matrix>* refs) {
  ConditionReport rep;
  const auto add = [&](std::string name, int level, bool ok, double margin) {
    rep.lines.push_back({std::move(name), level, ok, margin});
    return ok;
  };
  const auto inverse = [](const Matrix& m, std::optional<Matrix>& out) {
    try {
      out = invert(m);
    } catch (const Error&) {
      out.reset();
    }
  };
  const auto reference = [&](const Matrix& r, int level, const std::string& label) {
    const auto sv = singular_values(r);
    std::optional<Matrix> inv;
    inverse(r, inv);
    bool ok = add(label + " invertible", level, inv.has_value(), sv.back());
    if (r.rows() == 2) {
      const double gap = sv[0] - sv[1];
      ok = add(label + " has distinct singular values", level, gap > gap_tol * sv[0], gap) && ok;
    }
    if (refs) refs->push_back(r);
    return ok;
  };

  const bool shape = l.is_square() && l.rows() == static_cast<std::size_t>(s.dim()) &&
                     l.all_finite();
  if (!add("L is a finite d x d matrix", 0, shape, static_cast<double>(l.rows()))) return rep;
  std::optional<Matrix> k_inv;
  inverse(l, k_inv);
  if (!add("L invertible", 0, k_inv.has_value(), singular_values(l).back())) return rep;

  bool ok = reference(project_A(l, s, 1), 1, "A_1(L)");
  for (int j = 1; j < s.levels(); ++j) {
    const Matrix g = d_chain(*k_inv, s, j);
    std::optional<Matrix> j0;
    inverse(g, j0);
    const std::string dj = "D^(" + std::to_string(j) + ")(inv L)";
    if (!add(dj + " invertible", j, j0.has_value(), singular_values(g).back())) {
      ok = false;
      break;
    }
    const Matrix r = j + 1 < s.levels() ? project_A(*j0, s, j + 1) : *j0;
    ok = reference(r, j + 1, level_name("reference", j + 1)) && ok;
  }
  rep.passed = ok && std::all_of(rep.lines.begin(), rep.lines.end(),
                                 [](const ConditionLine& c) { return c.passed; });
  return rep;
}

constexpr int kPrimeCount = 400;

std::vector<int> small_primes() {
  std::vector<int> out;
  for (int p = 2; static_cast<int>(out.size()) < kPrimeCount; ++p) {
    bool prime = true;
    for (int q : out) {
      if (q * q > p) break;
      if (p % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) out.push_back(p);
  }
  return out;
}

}  // namespace

const ConditionLine* ConditionReport::first_failure() const {
  for (const auto& c : lines)
    if (!c.passed) return &c;
  return nullptr;
}

ConditionReport check_L_conditions(const Matrix& l, const BlockStructure& structure,
                                   double gap_tol) {
  return evaluate_conditions(l, structure, gap_tol, nullptr);
}

std::vector<Matrix> level_references(const Matrix& l, const BlockStructure& structure) {
  std::vector<Matrix> refs;
  const ConditionReport rep = evaluate_conditions(l, structure, 0.0, &refs);
  const ConditionLine* bad = rep.first_failure();
  if (bad || static_cast<int>(refs.size()) != structure.levels()) {
    throw Error(ErrorKind::kConditionFailure, bad ? bad->name : "reference chain incomplete");
  }
  return refs;
}

Matrix perturb_to_generic(const Matrix& l, const BlockStructure& structure, double strength,
                          std::uint64_t seed, int attempts) {
  if (check_L_conditions(l, structure).passed) return l;
  if (!(strength > 0.0)) {
    throw Error(ErrorKind::kPerturbationExhausted, "L is not generic and strength is zero");
  }
  detail::Rng rng(detail::mix_seed(seed, 0x9e11));
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Matrix e = rng.matrix(l.rows(), l.cols(), -1.0, 1.0);
    // Slightly inside the ball so rounding cannot push the move past strength.
    e *= (1.0 - 1e-12) * strength / norm2(e);
    Matrix candidate = l + e;
    if (check_L_conditions(candidate, structure).passed) return candidate;
  }
  throw Error(ErrorKind::kPerturbationExhausted,
              "no generic L within " + std::to_string(strength) + " after " +
                  std::to_string(attempts) + " attempts");
}

ResonanceReport nonresonance_report(const Spectrum& spectrum, int k_max,
                                    const NonresonanceOptions& opts) {
  if (k_max < 1) throw Error(ErrorKind::kInvalidArgument, "K must be positive");
  std::vector<double> logs, turns;
  ResonanceReport rep;
  for (const auto& z : spectrum) {
    if (z == std::complex<double>(0.0, 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "zero eigenvalue");
    }
    if (!opts.include_phases && z.imag() < 0.0) continue;  // partner of a listed pair
    logs.push_back(std::log(std::abs(z)));
    turns.push_back(std::arg(z) / (2.0 * std::numbers::pi));
    rep.moduli.push_back(std::abs(z));
  }
  const std::size_t m = logs.size();
  rep.min_margin = std::numeric_limits<double>::infinity();
  if (m == 0) return rep;

  std::vector<int> k(m, -k_max);
  int best_shell = k_max + 1;
  for (;;) {
    // Half space: the first nonzero entry positive.
    std::size_t first = 0;
    while (first < m && k[first] == 0) ++first;
    if (first < m && k[first] > 0) {
      int shell = 0;
      long double sum = 0.0L, phase = 0.0L;
      for (std::size_t i = 0; i < m; ++i) {
        shell = std::max(shell, std::abs(k[i]));
        sum += static_cast<long double>(k[i]) * logs[i];
        phase += static_cast<long double>(k[i]) * turns[i];
      }
      double margin = std::abs(static_cast<double>(sum));
      if (opts.include_phases) {
        const double frac = static_cast<double>(phase - std::nearbyint(phase));
        margin = std::max(margin, std::abs(frac));
      }
      if (margin < rep.min_margin || (margin == rep.min_margin && shell < best_shell)) {
        rep.min_margin = margin;
        best_shell = shell;
        rep.witness = k;
        if (static_cast<double>(sum) < -opts.tol_log) {
          for (int& v : rep.witness) v = -v;
        }
      }
    }
    std::size_t i = m;
    while (i-- > 0) {
      if (k[i] < k_max) {
        ++k[i];
        break;
      }
      k[i] = -k_max;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  rep.resonant = rep.min_margin <= opts.tol_log;
  return rep;
}

ResonanceReport check_nonresonance(const Spectrum& spectrum, int k_max,
                                   const NonresonanceOptions& opts) {
  ResonanceReport rep = nonresonance_report(spectrum, k_max, opts);
  if (rep.resonant) {
    std::string w;
    for (int v : rep.witness) w += (w.empty() ? "" : ",") + std::to_string(v);
    throw Error(ErrorKind::kResonanceFound, "k = (" + w + ")");
  }
  return rep;
}

DiagonalModel random_model_T(const BlockStructure& structure, const std::vector<double>& moduli,
                             std::uint64_t seed) {
  const int m = structure.levels();
  if (static_cast<int>(moduli.size()) != m) {
    throw Error(ErrorKind::kInvalidArgument, "need one modulus per block");
  }
  for (int j = 0; j < m; ++j) {
    if (!(moduli[j] > 0.0) || !std::isfinite(moduli[j]) || (j > 0 && !(moduli[j - 1] > moduli[j]))) {
      throw Error(ErrorKind::kInvalidArgument, "moduli must be positive and strictly decreasing");
    }
  }
  static const std::vector<int> primes = small_primes();
  const auto rot = structure.rotation_levels();
  detail::Rng rng(detail::mix_seed(seed, 0x7a7));
  for (int attempt = 0; attempt < 20; ++attempt) {
    // Consecutive primes from a seeded offset.
    const std::size_t start = rng.below(primes.size() - rot.size() - 1);
    DiagonalModel model{structure, {}};
    std::size_t next = start;
    for (int j = 1; j <= m; ++j) {
      if (structure.size(j) == 1) {
        model.blocks.push_back(DiagonalBlock::scalar(moduli[j - 1]));
      } else {
        const double root = std::sqrt(static_cast<double>(primes[next++]));
        model.blocks.push_back(DiagonalBlock::rotation(moduli[j - 1], root - std::floor(root)));
      }
    }
    if (check_rational_independence(model.rotation_angles()).independent) return model;
  }
  throw Error(ErrorKind::kIndependenceFailure, "no independent angle set after 20 draws");
}

Matrix perturbation_direction(const PerturbationLaw& law, std::size_t d) {
  detail::Rng rng(detail::mix_seed(law.seed, 0x1a3));
  Matrix g = rng.matrix(d, d, -1.0, 1.0);
  g *= 1.0 / norm2(g);
  return g;
}

Matrix make_sequence_Ln(const InstanceSpec& spec, std::int64_t n) {
  if (n < 0) throw Error(ErrorKind::kInvalidArgument, "sequence index must be >= 0");
  if (spec.law.c == 0.0) return spec.l;
  const Matrix g = perturbation_direction(spec.law, spec.l.rows());
  const double amp = spec.law.c * std::pow(spec.law.rho, static_cast<double>(n));
  return spec.l + (spec.l * g) * amp;
}

double sequence_distance_bound(const InstanceSpec& spec, std::int64_t n) {
  // Relative slack covers the rounding of L * G and of the sum.
  return norm2(spec.l) * spec.law.c * std::pow(spec.law.rho, static_cast<double>(n)) *
         (1.0 + 1e-12);
}

InstanceSpec generate_instance(int d, const BlockStructure& structure, std::uint64_t seed,
                               const GenerateOptions& opts) {
  if (structure.dim() != d) {
    throw Error(ErrorKind::kInvalidArgument, "block sizes do not sum to d");
  }
  if (!(opts.law.c >= 0.0 && opts.law.c < 1.0) || !(opts.law.rho > 0.0 && opts.law.rho < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "law needs 0 <= c < 1 and 0 < rho < 1");
  }
  if (opts.progression.a < 1 || opts.progression.b < 0) {
    throw Error(ErrorKind::kInvalidArgument, "progression needs a >= 1 and b >= 0");
  }
  const int m = structure.levels();
  detail::Rng rng(detail::mix_seed(seed, 0));

  for (int attempt = 0; attempt < opts.attempts; ++attempt) {
    Matrix l = Matrix::identity(d) + rng.matrix(d, d, -1.0, 1.0) * opts.l_scale;
    try {
      l = perturb_to_generic(l, structure, opts.perturb_strength,
                             detail::mix_seed(seed, 1000 + attempt));
    } catch (const Error&) {
      continue;
    }
    const ConditionReport rep = check_L_conditions(l, structure);
    const bool margins = std::all_of(rep.lines.begin(), rep.lines.end(), [&](const ConditionLine& c) {
      return c.name == "L is a finite d x d matrix" || c.margin >= opts.min_margin;
    });
    if (!rep.passed || !margins) continue;

    // The model last: the independence scan dominates the cost of an attempt.
    std::vector<double> moduli = opts.moduli;
    if (moduli.empty()) {
      // Ratio about 3 between consecutive levels, jittered off resonances.
      for (int j = 0; j < m; ++j)
        moduli.push_back(std::exp(std::log(4.0) - j * std::log(3.0) + rng.uniform(-0.15, 0.15)));
    }
    DiagonalModel model = random_model_T(structure, moduli, detail::mix_seed(seed, attempt + 1));
    Spectrum t_spec = eigenvalues(model.t());
    if (nonresonance_report(t_spec, opts.resonance_order).resonant) {
      if (!opts.moduli.empty()) throw Error(ErrorKind::kResonanceFound, "given moduli are resonant");
      continue;
    }

    InstanceSpec spec{std::move(model), std::move(l), opts.law, opts.progression};
    if (spec.law.seed == 0) spec.law.seed = detail::mix_seed(seed, 0x1a);
    return spec;
  }
  throw Error(ErrorKind::kConditionFailure,
              "no instance met the margins after " + std::to_string(opts.attempts) + " attempts");
}

}  // namespace spectral_cascade
