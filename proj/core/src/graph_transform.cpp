#include "spectral_cascade/graph_transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

double smin(const Matrix& m) { return singular_values(m).back(); }

// Least n >= 1 with holds(n), for a predicate that is monotone in n. `guess`
// only seeds the search.
std::int64_t least_n(const std::function<bool(std::int64_t)>& holds, double guess) {
  constexpr std::int64_t kCap = std::int64_t{1} << 40;
  std::int64_t n = 1;
  if (std::isfinite(guess) && guess > 1.0) n = static_cast<std::int64_t>(std::min(guess, 1e12));
  while (n > 1 && holds(n - 1)) --n;
  while (!holds(n)) {
    if (n >= kCap) throw Error(ErrorKind::kHypothesisFailure, "threshold search diverged");
    n = n < 64 ? n + 1 : n + n / 8;
  }
  // Coarse steps above may overshoot; walk back to the least value.
  while (n > 1 && holds(n - 1)) --n;
  return n;
}

// Least n with coef * rho^n compared against target, strict or not.
std::int64_t threshold(double coef, double rho, double target, bool strict) {
  const double log_rho = std::log(rho);
  const auto holds = [&](std::int64_t n) {
    const double lhs = std::log(coef) + static_cast<double>(n) * log_rho;
    const double rhs = std::log(target);
    return strict ? lhs < rhs : lhs <= rhs;
  };
  return least_n(holds, (std::log(target) - std::log(coef)) / log_rho);
}

struct ForwardOperands {
  Matrix ca_inv;  // C(J) A(J)^{-1}
  Matrix d;       // D(J)
  Matrix b;       // B(J)
  Matrix a_inv;   // A(J)^{-1}
  Matrix a;       // A(J)
};

struct BackwardOperands {
  Matrix bd_inv;  // B(K) D(K)^{-1}
  Matrix a;       // A(K)
  Matrix c;       // C(K)
  Matrix d_inv;   // D(K)^{-1}
  Matrix d;       // D(K)
};

ForwardOperands forward_operands(const Matrix& j, Split split) {
  const Partition p = partition(j, split);
  Matrix a_inv = invert(p.a);
  return {p.c * a_inv, p.d, p.b, a_inv, p.a};
}

BackwardOperands backward_operands(const Matrix& j, Split split) {
  const Partition p = partition(invert(j), split);
  Matrix d_inv = invert(p.d);
  return {p.b * d_inv, p.a, p.c, d_inv, p.d};
}

Matrix phi_eval(const Matrix& u, const ForwardOperands& op, const SplitPowers& powers) {
  return op.ca_inv + (op.d - u * op.b) * powers.forward(u) * op.a_inv;
}

Matrix psi_eval(const Matrix& u, const BackwardOperands& op, const SplitPowers& powers) {
  return op.bd_inv + (op.a - u * op.c) * powers.backward(u) * op.d_inv;
}

FixedPoint iterate(const std::function<Matrix(const Matrix&)>& f, Matrix u,
                   const FixedPointOptions& opts, const char* what) {
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Matrix next = f(u);
    if (!next.all_finite()) {
      throw Error(ErrorKind::kNoConvergence, std::string(what) + ": iterate left the finite range");
    }
    const double step = (next - u).frobenius_norm();
    u = std::move(next);
    if (step < opts.step_tol * std::max(1.0, u.frobenius_norm())) {
      const double residual = (f(u) - u).frobenius_norm();
      return {std::move(u), it, residual};
    }
  }
  throw Error(ErrorKind::kNoConvergence, std::string(what) + ": iteration cap " +
                                             std::to_string(opts.max_iterations) + " exceeded");
}

bool is_split_block_diagonal(const Matrix& v, Split split) {
  return off_diag_B(v, split).max_abs() == 0.0 && off_diag_C(v, split).max_abs() == 0.0;
}

// exp(s) * m, materialised.
Matrix materialise(const Matrix& m, double s) { return ScaledMatrix{m, s}.value(); }

}  // namespace

HypothesisReport check_hypotheses(const SplitProblem& problem) {
  HypothesisReport rep;
  const auto add = [&](std::string name, bool ok, double value) {
    rep.checks.push_back({std::move(name), ok, value});
  };
  const Split s = problem.split;
  const auto d = static_cast<std::size_t>(s.dim());
  const bool shapes = s.top > 0 && s.bottom > 0 && problem.v.is_square() &&
                      problem.j0.is_square() && problem.v.rows() == d && problem.j0.rows() == d;
  add("shapes", shapes, static_cast<double>(d));
  if (!shapes) return rep;
  add("V finite", problem.v.all_finite() && problem.j0.all_finite(), 0.0);
  if (!rep.checks.back().passed) return rep;

  const double off = std::max(off_diag_B(problem.v, s).max_abs(), off_diag_C(problem.v, s).max_abs());
  add("V block diagonal", off == 0.0, off);
  add("delta positive", problem.delta > 0.0 && std::isfinite(problem.delta), problem.delta);

  const Partition pv = partition(problem.v, s);
  const Partition pj = partition(problem.j0, s);
  const auto invertible = [&](const std::string& name, const Matrix& m) {
    const double sm = smin(m);
    bool ok = true;
    try {
      (void)invert(m);
    } catch (const Error&) {
      ok = false;
    }
    add(name, ok, sm);
    return ok;
  };
  const bool av = invertible("A(V) invertible", pv.a);
  const bool dv = invertible("D(V) invertible", pv.d);
  invertible("A(J0) invertible", pj.a);
  if (invertible("J0 invertible", problem.j0)) {
    invertible("D(J0^-1) invertible", partition(invert(problem.j0), s).d);
  }
  if (av && dv) {
    rep.rho = norm2(pv.d) * norm2(invert(pv.a));
    add("domination rho < 1", rep.rho < 1.0, rep.rho);
  }
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const HypothesisCheck& c) { return c.passed; });
  return rep;
}

TransformConstants derive_constants(const SplitProblem& problem, const TransformOptions& opts) {
  const HypothesisReport rep = check_hypotheses(problem);
  if (!rep.passed) {
    std::string failed;
    for (const auto& c : rep.checks)
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    throw Error(ErrorKind::kHypothesisFailure, "split hypotheses violated: " + failed);
  }
  if (!(opts.gamma_factor > 1.0) || !(opts.beta_safety > 0.0 && opts.beta_safety <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "gamma_factor must exceed 1, beta_safety in (0, 1]");
  }
  const Split s = problem.split;
  const Partition pj = partition(problem.j0, s);
  const Matrix k0 = invert(problem.j0);
  const Partition pk = partition(k0, s);
  const double delta = problem.delta;

  const double s_a = smin(pj.a);
  const double s_dk = smin(pk.d);
  if (!(delta < std::min(s_a, s_dk))) {
    throw Error(ErrorKind::kHypothesisFailure,
                "delta must stay below smin(A(J0)) and smin(D(J0^-1)) for domination");
  }
  const double c = norm2(k0);

  // ||A(J) - A(J0)|| <= ||J - J0|| and, by the Neumann series,
  // ||J^{-1} - J0^{-1}|| <= c^2 beta / (1 - c beta); both stay below delta / 2.
  double beta = opts.beta_safety * std::min(0.5 * delta, 0.5 * delta / (c * c + 0.5 * c * delta));
  double r = 0.0;
  for (int halving = 0;; ++halving) {
    r = c * c * beta / (1.0 - c * beta);
    if (c * beta < 0.5 && beta < 0.5 * s_a && r < 0.5 * s_dk) break;
    if (halving > 200) throw Error(ErrorKind::kHypothesisFailure, "no admissible beta");
    beta *= 0.5;
  }

  const double a_inv_bound = 1.0 / (s_a - beta);
  const double dk_inv_bound = 1.0 / (s_dk - r);
  const double alpha = std::max({
      norm2(pj.d) + beta,
      a_inv_bound,
      norm2(pj.b) + beta,
      (norm2(pj.c) + beta) * a_inv_bound,
      norm2(pk.a) + r,
      norm2(pk.c) + r,
      dk_inv_bound,
      (norm2(pk.b) + r) * dk_inv_bound,
  });

  TransformConstants k;
  k.alpha = alpha;
  k.beta = beta;
  k.gamma = opts.gamma_factor * alpha;
  k.rho = rep.rho;
  k.delta = delta;
  const double g = k.gamma;
  const double rho = k.rho;
  // alpha + alpha^2 gamma (1 + gamma) rho^n <= gamma
  k.n1 = threshold(alpha * alpha * g * (1.0 + g), rho, g - alpha, false);
  k.n2 = threshold(alpha * alpha * (1.0 + 2.0 * g), rho, 1.0, true);
  k.n3 = threshold(g * alpha, rho, 0.5 * delta, true);
  k.n_domination = threshold(1.0, rho, (s_a - delta) * (s_dk - delta), true);
  k.n_transversal = threshold(g * g, rho, 0.5, false);
  // The backward operator is bounded by the same alpha, gamma and rho, so both
  // constructions share their thresholds.
  k.n0plus = std::max({k.n1, k.n2, k.n3});
  k.n0minus = k.n0plus;
  k.n0 = std::max({k.n0plus, k.n0minus, k.n_domination, k.n_transversal});
  return k;
}

SplitPowers SplitPowers::compute(const SplitProblem& problem, std::int64_t n) {
  if (n < 0) throw Error(ErrorKind::kInvalidArgument, "negative exponent");
  SplitPowers p;
  p.n = n;
  const Split s = problem.split;
  if (!problem.v_blocks.empty()) {
    std::vector<DiagonalBlock> top, bottom;
    int acc = 0;
    for (const auto& b : problem.v_blocks) {
      (acc < s.top ? top : bottom).push_back(b);
      acc += b.size;
      if (acc > s.top && acc - b.size < s.top) {
        throw Error(ErrorKind::kSizeMismatch, "a 2x2 block of V straddles the split");
      }
    }
    if (acc != s.dim()) throw Error(ErrorKind::kSizeMismatch, "V blocks do not match the split");
    p.a_pow = block_diagonal_power(top, n);
    p.a_inv_pow = block_diagonal_power(top, -n);
    p.d_pow = block_diagonal_power(bottom, n);
    p.d_inv_pow = block_diagonal_power(bottom, -n);
    return p;
  }
  if (!is_split_block_diagonal(problem.v, s)) {
    throw Error(ErrorKind::kHypothesisFailure, "V is not block diagonal for the split");
  }
  const Partition pv = partition(problem.v, s);
  p.a_pow = scaled_power(pv.a, n);
  p.a_inv_pow = scaled_power(invert(pv.a), n);
  p.d_pow = scaled_power(pv.d, n);
  p.d_inv_pow = scaled_power(invert(pv.d), n);
  return p;
}

Matrix SplitPowers::forward(const Matrix& u) const {
  return materialise(d_pow.mantissa * u * a_inv_pow.mantissa, d_pow.log_scale + a_inv_pow.log_scale);
}

Matrix SplitPowers::backward(const Matrix& u) const {
  return materialise(a_inv_pow.mantissa * u * d_pow.mantissa, a_inv_pow.log_scale + d_pow.log_scale);
}

Matrix phi_apply(const Matrix& u, const Matrix& j, const SplitPowers& powers, Split split) {
  return phi_eval(u, forward_operands(j, split), powers);
}

Matrix phi_apply(const Matrix& u, const Matrix& j, const Matrix& v, Split split, std::int64_t n) {
  SplitProblem problem{v, Matrix::identity(v.rows()), split, 1.0, {}};
  return phi_apply(u, j, SplitPowers::compute(problem, n), split);
}

Matrix psi_apply(const Matrix& u, const Matrix& j, const SplitPowers& powers, Split split) {
  return psi_eval(u, backward_operands(j, split), powers);
}

FixedPoint solve_xi(const SplitProblem& problem, const Matrix& j, std::int64_t n,
                    const FixedPointOptions& opts) {
  const SplitPowers powers = SplitPowers::compute(problem, n);
  const ForwardOperands op = forward_operands(j, problem.split);
  Matrix start = opts.start.value_or(Matrix(problem.split.bottom, problem.split.top));
  return iterate([&](const Matrix& u) { return phi_eval(u, op, powers); }, std::move(start), opts,
                 "solve_xi");
}

FixedPoint solve_eta_hat(const SplitProblem& problem, const Matrix& j, std::int64_t n,
                         const FixedPointOptions& opts) {
  const SplitPowers powers = SplitPowers::compute(problem, n);
  const BackwardOperands op = backward_operands(j, problem.split);
  Matrix start = opts.start.value_or(Matrix(problem.split.top, problem.split.bottom));
  return iterate([&](const Matrix& u) { return psi_eval(u, op, powers); }, std::move(start), opts,
                 "solve_eta");
}

Matrix solve_eta(const SplitProblem& problem, const Matrix& j, std::int64_t n,
                 const FixedPointOptions& opts) {
  const FixedPoint hat = solve_eta_hat(problem, j, n, opts);
  return SplitPowers::compute(problem, n).backward(hat.value);
}

SplitCertificate assemble_certificate(const SplitProblem& problem, const Matrix& j,
                                      std::int64_t n) {
  const SplitPowers powers = SplitPowers::compute(problem, n);
  const Split s = problem.split;
  const ForwardOperands fop = forward_operands(j, s);
  const BackwardOperands bop = backward_operands(j, s);
  const FixedPointOptions opts;
  const FixedPoint xi = iterate([&](const Matrix& u) { return phi_eval(u, fop, powers); },
                                Matrix(s.bottom, s.top), opts, "solve_xi");
  const FixedPoint hat = iterate([&](const Matrix& u) { return psi_eval(u, bop, powers); },
                                 Matrix(s.top, s.bottom), opts, "solve_eta");

  SplitCertificate cert;
  cert.n = n;
  cert.j = j;
  cert.xi = xi.value;
  cert.eta_hat = hat.value;
  cert.eta = powers.backward(hat.value);
  cert.xi_iterations = xi.iterations;
  cert.eta_iterations = hat.iterations;
  cert.x_n = fop.a + fop.b * powers.forward(cert.xi);
  cert.y_inv = bop.c * cert.eta + bop.d;
  cert.y_n = invert(cert.y_inv);
  return cert;
}

ScaledMatrix phi_matrix(const SplitCertificate& cert, const SplitPowers& powers) {
  return {cert.x_n * powers.a_pow.mantissa, powers.a_pow.log_scale};
}

const CertificateItem* CertificateReport::first_failure() const {
  for (const auto& it : items)
    if (!it.passed) return &it;
  return nullptr;
}

CertificateReport verify_certificate(const SplitCertificate& cert, const SplitProblem& problem,
                                     const TransformConstants& constants) {
  CertificateReport rep;
  const auto add = [&](std::string name, int item, bool ok, double measured, double bound) {
    rep.items.push_back({std::move(name), item, ok, measured, bound});
  };
  const Split s = problem.split;
  const std::int64_t n = cert.n;
  const double log_rho_n = static_cast<double>(n) * std::log(constants.rho);
  const SplitPowers powers = SplitPowers::compute(problem, n);

  const double ball = norm2(cert.j - problem.j0);
  add("J inside beta-ball", 0, ball < constants.beta, ball, constants.beta);
  add("n >= n0", 0, n >= constants.n0, static_cast<double>(n), static_cast<double>(constants.n0));

  const double xi_res = (phi_apply(cert.xi, cert.j, powers, s) - cert.xi).frobenius_norm();
  const double xi_tol = 1e-12 * std::max(1.0, cert.xi.frobenius_norm());
  add("xi fixed point", 0, xi_res < xi_tol, xi_res, xi_tol);
  const double hat_res = (psi_apply(cert.eta_hat, cert.j, powers, s) - cert.eta_hat).frobenius_norm();
  const double hat_tol = 1e-12 * std::max(1.0, cert.eta_hat.frobenius_norm());
  add("eta_hat fixed point", 0, hat_res < hat_tol, hat_res, hat_tol);
  const Matrix eta = powers.backward(cert.eta_hat);
  const double eta_diff = (eta - cert.eta).frobenius_norm();
  const double eta_tol = 1e-12 * eta.frobenius_norm();
  add("eta = A(V)^-n eta_hat D(V)^n", 0, eta_diff <= eta_tol, eta_diff, eta_tol);

  const double xi_norm = norm2(cert.xi);
  add("||xi|| <= gamma", 1, xi_norm <= constants.gamma, xi_norm, constants.gamma);
  const double eta_norm = norm2(cert.eta);
  const double eta_ratio = eta_norm == 0.0 ? 0.0 : std::exp(std::log(eta_norm) - log_rho_n);
  add("||eta|| <= gamma rho^n", 1, eta_ratio <= constants.gamma * (1.0 + 1e-12), eta_ratio,
      constants.gamma);

  const double coupling = std::exp(2.0 * std::log(constants.gamma) + log_rho_n);
  const double trans_bound = coupling < 1.0
                                 ? std::pow(1.0 - coupling, std::min(s.top, s.bottom))
                                 : 0.0;
  const double trans_det =
      std::abs(determinant(Matrix::identity(s.top) - cert.eta * cert.xi));
  add("transversality |det(I - eta xi)|", 2,
      trans_bound > 0.0 && trans_det >= trans_bound * (1.0 - 1e-12), trans_det, trans_bound);

  const Partition pj0 = partition(problem.j0, s);
  const Partition pk0 = partition(invert(problem.j0), s);
  const Partition pj = partition(cert.j, s);
  const Matrix k = invert(cert.j);
  const Partition pk = partition(k, s);

  const Matrix w = powers.forward(cert.xi);
  const Matrix x = pj.a + pj.b * w;
  const double top = norm2(x - pj0.a);
  add("||X_n - A(J0)|| < delta", 3, top < constants.delta, top, constants.delta);
  const double x_tol = 1e-12 * std::max(1.0, norm2(x));
  const double x_cons = norm2(x - cert.x_n);
  add("X_n recomputed from xi", 0, x_cons <= x_tol, x_cons, x_tol);

  const Matrix y_inv = pk.c * cert.eta + pk.d;
  const double bottom = norm2(y_inv - pk0.d);
  add("||Y_n^-1 - D(J0^-1)|| < delta", 4, bottom < constants.delta, bottom, constants.delta);
  const double y_tol = 1e-12 * std::max(1.0, norm2(y_inv));
  const double y_cons = norm2(y_inv - cert.y_inv);
  add("Y_n^-1 recomputed from eta", 0, y_cons <= y_tol, y_cons, y_tol);
  const double y_pair = norm2(cert.y_n * cert.y_inv - Matrix::identity(s.bottom));
  add("Y_n inverts Y_n^-1", 0, y_pair <= 1e-9, y_pair, 1e-9);

  Matrix r_fwd(s.dim(), s.top);
  r_fwd.set_block(0, 0, pj.a + pj.b * w - cert.x_n);
  r_fwd.set_block(s.top, 0, pj.c + pj.d * w - cert.xi * cert.x_n);
  const double fwd = norm2(r_fwd) * norm2(k);
  add("forward graph invariance", 0, fwd < 1e-8, fwd, 1e-8);

  Matrix r_bwd(s.dim(), s.bottom);
  r_bwd.set_block(0, 0, pk.a * cert.eta + pk.b - cert.eta_hat * cert.y_inv);
  r_bwd.set_block(s.top, 0, pk.c * cert.eta + pk.d - cert.y_inv);
  const double bwd = norm2(r_bwd) * norm2(cert.j);
  add("backward graph invariance", 0, bwd < 1e-8, bwd, 1e-8);

  rep.passed = std::all_of(rep.items.begin(), rep.items.end(),
                           [](const CertificateItem& i) { return i.passed; });
  return rep;
}

SplitCertificate invariant_pair(const SplitProblem& problem, const TransformConstants& constants,
                                const Matrix& j, std::int64_t n) {
  SplitCertificate cert = assemble_certificate(problem, j, n);
  const CertificateReport rep = verify_certificate(cert, problem, constants);
  if (const CertificateItem* bad = rep.first_failure()) {
    throw Error(ErrorKind::kCertificateFailure,
                "item " + std::to_string(bad->item) + " (" + bad->name + "): measured " +
                    std::to_string(bad->measured) + ", bound " + std::to_string(bad->bound));
  }
  return cert;
}

}  // namespace spectral_cascade
