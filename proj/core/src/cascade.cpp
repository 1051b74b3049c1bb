#include "spectral_cascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spectral_cascade/error.hpp"
#include "spectral_cascade/scenario.hpp"

namespace spectral_cascade {

namespace {

double smin(const Matrix& m) { return singular_values(m).back(); }

// sigma(x * T_block^n), moduli carried in log form.
ScaledSpectrum level_spectrum(const Matrix& x, const DiagonalBlock& block, std::int64_t n) {
  const double shift = static_cast<double>(n) * block.log_abs();
  if (block.size == 1) {
    const double v = x(0, 0) * block.unit_power(n)(0, 0);
    return {{std::log(std::abs(v)) + shift, v < 0.0 ? std::numbers::pi : 0.0, true}};
  }
  return scale_spectrum(to_scaled(eigenvalues(x * block.unit_power(n))), shift);
}

// Least k with bound(k) < target, for a non-increasing bound.
std::int64_t first_below(const std::function<double(std::int64_t)>& bound, double target,
                         std::int64_t k_max) {
  if (bound(0) < target) return 0;
  std::int64_t hi = 1;
  while (!(bound(hi) < target)) {
    if (hi >= k_max) throw Error(ErrorKind::kConditionFailure, "sequence never enters the beta-ball");
    hi = std::min(k_max, 2 * hi);
  }
  std::int64_t lo = hi / 2;  // bound(lo) >= target
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (bound(mid) < target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

SplitBlocks lemma52_split(const SplitProblem& problem, const TransformConstants& constants,
                          const Matrix& j, std::int64_t n) {
  SplitBlocks out;
  out.certificate = invariant_pair(problem, constants, j, n);
  out.x_n = out.certificate.x_n;
  out.y_n = out.certificate.y_n;
  const Split s = problem.split;
  out.top_error = norm2(out.x_n - partition(problem.j0, s).a);
  out.bottom_error = norm2(invert(out.y_n) - partition(invert(problem.j0), s).d);

  const SplitPowers powers = SplitPowers::compute(problem, n);
  const double top = std::log(norm2(powers.a_inv_pow.mantissa * invert(out.x_n))) +
                     powers.a_inv_pow.log_scale;
  const double bottom = std::log(norm2(out.y_n * powers.d_pow.mantissa)) + powers.d_pow.log_scale;
  out.log_domination = top + bottom;
  if (!(out.log_domination < 0.0)) {
    throw Error(ErrorKind::kCertificateFailure,
                "top block does not dominate: log ratio " + std::to_string(out.log_domination));
  }
  return out;
}

ParameterCascade choose_parameters(const DiagonalModel& model, const Matrix& l, double eps0,
                                   const CascadeOptions& opts) {
  model.validate();
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    throw Error(ErrorKind::kInvalidArgument, "eps0 must be positive");
  }
  const BlockStructure& s = model.structure;
  const int m = s.levels();
  const ConditionReport conditions = check_L_conditions(l, s);
  if (const ConditionLine* bad = conditions.first_failure()) {
    throw Error(ErrorKind::kConditionFailure, bad->name);
  }
  const Matrix k_inv = invert(l);

  ParameterCascade pc;
  pc.eps0 = eps0;
  pc.references = level_references(l, s);
  pc.delta.assign(m - 1, 0.0);
  pc.beta.assign(m - 1, 0.0);
  pc.stages.resize(m - 1);

  // Backward over the stages: stage j hands Y^{(j)} to stage j + 1 (or, at
  // the end, to the last level), so t is the radius that Y^{(j)} must meet.
  double t = eps0;
  for (int j = m - 1; j >= 1; --j) {
    const Matrix g_next = d_chain(k_inv, s, j);  // D^{(j)}(iota L) = J0_{j+1}^{-1}
    const Matrix j0 = j == 1 ? l : invert(d_chain(k_inv, s, j - 1));
    const Split split{s.size(j), s.tail(j + 1)};
    const double g = norm2(invert(g_next));
    // ||Y^{-1} - G|| < delta implies ||Y - G^{-1}|| <= g^2 delta / (1 - g delta) < t.
    double delta = 0.5 * t / (g * (g + t));
    delta = std::min(delta, 0.5 * std::min(smin(partition(j0, split).a), smin(g_next)));
    delta = std::min(delta, j == m - 1 ? 0.5 * eps0 : 0.5 * pc.delta[j]);

    Stage& st = pc.stages[j - 1];
    st.level = j;
    const auto blocks = model.tail_blocks(j);
    st.problem = SplitProblem{block_diagonal(blocks), j0, split, delta, blocks};
    st.constants = derive_constants(st.problem, opts.transform);
    pc.delta[j - 1] = delta;
    pc.beta[j - 1] = st.constants.beta;
    pc.n0 = std::max(pc.n0, st.constants.n0);
    t = st.constants.beta;
  }

  if (opts.sequence_distance_bound) {
    pc.k0 = first_below(opts.sequence_distance_bound, pc.beta[0], opts.k_max);
  }

  for (int j : s.rotation_levels()) {
    RotationLevel rl;
    rl.level = j;
    rl.reference = pc.references[j - 1];
    const auto sv = singular_values(rl.reference);
    if (!(sv[0] - sv[1] > 2.0 * eps0) || !(sv[1] > eps0)) {
      throw Error(ErrorKind::kEpsilonTooLarge,
                  "level " + std::to_string(j) + ": singular values " + std::to_string(sv[0]) +
                      ", " + std::to_string(sv[1]) + " not separated by 2 eps0");
    }
    const Matrix& r = rl.reference;
    if (determinant(r) < 0.0) {
      rl.reflection = true;
    } else {
      const Polar2x2 polar = polar_decompose_2x2(r);
      rl.reference_p = polar.p;
      rl.reference_alpha = polar.theta;
      rl.eps_hat = max_real_simple_angle(polar.p);
      // alpha = arg((a + d) + i (c - b)); a perturbation of 2-norm < eps0
      // moves that vector by less than 2 eps0.
      const double v = std::hypot(r(0, 0) + r(1, 1), r(1, 0) - r(0, 1));
      rl.alpha_drift = 2.0 * eps0 < v ? std::asin(2.0 * eps0 / v) / (2.0 * std::numbers::pi) : 0.5;
    }
    pc.rotations.push_back(std::move(rl));
  }
  return pc;
}

CascadeResult cascade_decompose(const Matrix& l_k, std::int64_t n, const DiagonalModel& model,
                                const ParameterCascade& cascade) {
  const BlockStructure& s = model.structure;
  const int m = s.levels();
  if (static_cast<int>(cascade.stages.size()) != m - 1) {
    throw Error(ErrorKind::kSizeMismatch, "cascade parameters do not match the model");
  }
  CascadeResult out;
  out.n = n;
  out.l_k = l_k;
  Matrix y = l_k;
  for (int j = 1; j < m; ++j) {
    const Stage& st = cascade.stages[j - 1];
    const double dist = norm2(y - st.problem.j0);
    if (!(dist < st.constants.beta)) {
      throw StageError(j, "input at distance " + std::to_string(dist) + " from J0, beta = " +
                              std::to_string(st.constants.beta));
    }
    CascadeLevel lv;
    lv.level = j;
    try {
      lv.split = lemma52_split(st.problem, st.constants, y, n);
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(j, e.what());
    }
    lv.x = lv.split->x_n;
    lv.y = lv.split->y_n;
    lv.reference_error = norm2(lv.x - cascade.references[j - 1]);
    lv.spectrum = level_spectrum(lv.x, model.blocks[j - 1], n);
    y = *lv.y;
    out.levels.push_back(std::move(lv));
  }
  CascadeLevel last;
  last.level = m;
  last.x = y;
  last.reference_error = norm2(y - cascade.references[m - 1]);
  last.spectrum = level_spectrum(y, model.blocks[m - 1], n);
  out.levels.push_back(std::move(last));

  for (const auto& lv : out.levels)
    out.spectrum.insert(out.spectrum.end(), lv.spectrum.begin(), lv.spectrum.end());
  sort_by_modulus(out.spectrum);
  for (int j = 0; j + 1 < m; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& e : out.levels[j].spectrum) lo = std::min(lo, e.log_abs);
    for (const auto& e : out.levels[j + 1].spectrum) hi = std::max(hi, e.log_abs);
    out.domination_gaps.push_back(lo - hi);
  }
  return out;
}

std::vector<PolarForm> polar_forms(const CascadeResult& result, const DiagonalModel& model,
                                   bool allow_reflection) {
  std::vector<PolarForm> out;
  for (int j : model.structure.rotation_levels()) {
    const Matrix& x = result.levels.at(j - 1).x;
    PolarForm pf;
    pf.level = j;
    if (determinant(x) < 0.0) {
      if (!allow_reflection) {
        throw Error(ErrorKind::kNegativeDeterminant, "level " + std::to_string(j));
      }
      pf.reflection = true;
      out.push_back(std::move(pf));
      continue;
    }
    const Polar2x2 polar = polar_decompose_2x2(x);
    pf.p = polar.p;
    pf.alpha = polar.theta;
    try {
      pf.eps_hat = max_real_simple_angle(polar.p);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerateP) throw;
      pf.degenerate = true;
    }
    out.push_back(std::move(pf));
  }
  return out;
}

double rotation_phase(double alpha, double theta, std::int64_t n, std::int64_t a, std::int64_t b) {
  return wrap_turns(wrap_turns(alpha) + multiply_turns(a * n + b, theta));
}

double rotation_phase(const DiagonalModel& model, const CascadeResult& result, int level,
                      std::int64_t n, std::int64_t a, std::int64_t b) {
  if (model.structure.size(level) != 2) {
    throw Error(ErrorKind::kInvalidArgument, "level " + std::to_string(level) + " is not a rotation");
  }
  const Polar2x2 polar = polar_decompose_2x2(result.levels.at(level - 1).x);
  return rotation_phase(polar.theta, model.blocks[level - 1].theta, n, a, b);
}

}  // namespace spectral_cascade
