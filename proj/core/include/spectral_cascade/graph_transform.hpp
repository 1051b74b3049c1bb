#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral_cascade/blocks.hpp"
#include "spectral_cascade/decompositions.hpp"
#include "spectral_cascade/diagonal_blocks.hpp"
#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// One dominated split of J * V^n with R^d = R^top x R^bottom.
///
/// V must be block diagonal for the split (the transfer operators below use
/// V^n = diag[A(V)^n : D(V)^n]). When `v_blocks` is non-empty it describes V
/// exactly and powers are taken block by block without rounding growth.
struct SplitProblem {
  Matrix v;
  Matrix j0;
  Split split;
  double delta = 0.0;
  std::vector<DiagonalBlock> v_blocks;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double rho = 0.0;  ///< ||D(V)|| * ||A(V)^{-1}||
  bool passed = false;
};

HypothesisReport check_hypotheses(const SplitProblem& problem);

struct TransformOptions {
  double gamma_factor = 2.0;  ///< gamma = gamma_factor * alpha, must exceed 1
  double beta_safety = 0.5;
};

/// Constants valid uniformly on the ball ||J - J0|| <= beta.
///
/// alpha bounds the eight block norms of the proof over the whole ball (from
/// perturbation bounds, not sampling). Every threshold is the least n >= 1
/// satisfying its inequality:
///   n1: alpha + alpha^2 gamma (1 + gamma) rho^n <= gamma
///   n2: alpha^2 (1 + 2 gamma) rho^n < 1
///   n3: gamma alpha rho^n < delta / 2
///   n_domination: rho^n < (smin A(J0) - delta) (smin D(J0^{-1}) - delta)
///   n_transversal: gamma^2 rho^n <= 1/2
struct TransformConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  double delta = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  std::int64_t n3 = 0;
  std::int64_t n_domination = 0;
  std::int64_t n_transversal = 0;
  std::int64_t n0plus = 0;
  std::int64_t n0minus = 0;
  std::int64_t n0 = 0;
};

/// Throws kHypothesisFailure when check_hypotheses() fails or delta is too
/// large for the domination bound.
TransformConstants derive_constants(const SplitProblem& problem, const TransformOptions& opts = {});

/// Powers of the diagonal blocks of V, kept in scaled form.
struct SplitPowers {
  std::int64_t n = 0;
  ScaledMatrix a_pow;      ///< A(V)^n
  ScaledMatrix a_inv_pow;  ///< A(V)^{-n}
  ScaledMatrix d_pow;      ///< D(V)^n
  ScaledMatrix d_inv_pow;  ///< D(V)^{-n}

  static SplitPowers compute(const SplitProblem& problem, std::int64_t n);

  /// D(V)^n u A(V)^{-n}
  Matrix forward(const Matrix& u) const;
  /// A(V)^{-n} u D(V)^n
  Matrix backward(const Matrix& u) const;
};

/// phi_{n,J}(u) = C(J)A(J)^{-1} + (D(J) - u B(J)) D(V)^n u A(V)^{-n} A(J)^{-1}.
Matrix phi_apply(const Matrix& u, const Matrix& j, const SplitPowers& powers, Split split);
/// Same operator with the powers of V formed from scratch.
Matrix phi_apply(const Matrix& u, const Matrix& j, const Matrix& v, Split split, std::int64_t n);

/// Psi(u) = B(K)D(K)^{-1} + (A(K) - u C(K)) A(V)^{-n} u D(V)^n D(K)^{-1}, K = J^{-1}.
Matrix psi_apply(const Matrix& u, const Matrix& j, const SplitPowers& powers, Split split);

struct FixedPointOptions {
  int max_iterations = 500;
  double step_tol = 1e-13;
  std::optional<Matrix> start;  ///< defaults to u = 0
};

struct FixedPoint {
  Matrix value;
  int iterations = 0;
  double residual = 0.0;  ///< ||F(value) - value||_F
};

/// Invariant graph xi (bottom x top) of J V^n. Throws kNoConvergence.
FixedPoint solve_xi(const SplitProblem& problem, const Matrix& j, std::int64_t n,
                    const FixedPointOptions& opts = {});
/// Fixed point eta_hat of Psi (top x bottom); eta = A(V)^{-n} eta_hat D(V)^n.
FixedPoint solve_eta_hat(const SplitProblem& problem, const Matrix& j, std::int64_t n,
                         const FixedPointOptions& opts = {});
/// Invariant graph eta of (J V^n)^{-1}. Throws kNoConvergence.
Matrix solve_eta(const SplitProblem& problem, const Matrix& j, std::int64_t n,
                 const FixedPointOptions& opts = {});

/// Invariant pair and conjugated corner blocks for one (n, J).
///
/// phi = X_n A(V)^n and psi = D(V)^{-n} Y_n^{-1} are kept through their
/// well-scaled factors X_n and Y_n^{-1}: when A(V) or D(V) holds blocks of
/// different moduli, no single scale represents phi or psi for large n.
struct SplitCertificate {
  std::int64_t n = 0;
  Matrix j;
  Matrix xi;       ///< bottom x top
  Matrix eta_hat;  ///< top x bottom
  Matrix eta;      ///< top x bottom
  Matrix x_n;      ///< A(J) + B(J) D(V)^n xi A(V)^{-n} = phi A(V)^{-n}
  Matrix y_inv;    ///< C(J^{-1}) eta + D(J^{-1}) = D(V)^n psi
  Matrix y_n;      ///< y_inv^{-1} = psi^{-1} D(V)^{-n}
  int xi_iterations = 0;
  int eta_iterations = 0;
};

/// phi = X_n A(V)^n, exact when A(V) is a single block.
ScaledMatrix phi_matrix(const SplitCertificate& cert, const SplitPowers& powers);

/// Builds the certificate without checking it.
SplitCertificate assemble_certificate(const SplitProblem& problem, const Matrix& j,
                                      std::int64_t n);

struct CertificateItem {
  std::string name;
  int item = 0;  ///< 1..4 for the numbered properties, 0 for auxiliary checks
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct CertificateReport {
  std::vector<CertificateItem> items;
  bool passed = false;

  /// First failing item, if any.
  const CertificateItem* first_failure() const;
};

/// Recomputes every residual and bound of `cert` from the problem data.
///
/// Graph invariance is checked with the powers of V cancelled: for the
/// forward graph J V^n [I; xi] - [I; xi] phi = R A(V)^n with
/// R = [A(J) + B(J) W - X_n; C(J) + D(J) W - xi X_n], W = D(V)^n xi A(V)^{-n},
/// and ||R|| ||J^{-1}|| bounds the residual relative to ||J V^n||. The
/// backward graph is handled the same way with V^{-n} and ||J||.
CertificateReport verify_certificate(const SplitCertificate& cert, const SplitProblem& problem,
                                     const TransformConstants& constants);

/// assemble_certificate() followed by verify_certificate(); throws
/// kCertificateFailure naming the violated item.
SplitCertificate invariant_pair(const SplitProblem& problem, const TransformConstants& constants,
                                const Matrix& j, std::int64_t n);

}  // namespace spectral_cascade
