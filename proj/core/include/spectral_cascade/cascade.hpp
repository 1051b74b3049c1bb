#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spectral_cascade/graph_transform.hpp"
#include "spectral_cascade/model.hpp"
#include "spectral_cascade/product_spectrum.hpp"

namespace spectral_cascade {

/// sigma(J V^n) = sigma(X_n A(V)^n) u sigma(Y_n D(V)^n) for one (n, J).
struct SplitBlocks {
  SplitCertificate certificate;
  Matrix x_n;  ///< phi A(V)^{-n}
  Matrix y_n;  ///< psi^{-1} D(V)^{-n}
  double top_error = 0.0;     ///< ||X_n - A(J0)||
  double bottom_error = 0.0;  ///< ||Y_n^{-1} - D(J0^{-1})||
  /// log(||(X_n A(V)^n)^{-1}|| * ||Y_n D(V)^n||); negative means dominated.
  double log_domination = 0.0;
};

/// Throws kCertificateFailure (propagated from invariant_pair) or
/// kHypothesisFailure when the domination product is not below 1.
SplitBlocks lemma52_split(const SplitProblem& problem, const TransformConstants& constants,
                          const Matrix& j, std::int64_t n);

struct Stage {
  int level = 0;
  SplitProblem problem;  ///< V = D^{(level-1)}(T), J0 = iota D^{(level-1)} iota L
  TransformConstants constants;
};

struct RotationLevel {
  int level = 0;
  Matrix reference;          ///< the matrix X^{(level)} converges to
  bool reflection = false;   ///< det(reference) < 0: no polar targeting
  Matrix reference_p;        ///< polar factor of the reference (det > 0 only)
  double reference_alpha = 0.0;
  double eps_hat = 0.0;      ///< real-simple half width of the reference, turns
  double alpha_drift = 0.0;  ///< bound on |alpha_n - reference_alpha| over the eps0-ball
};

struct ParameterCascade {
  double eps0 = 0.0;
  std::vector<double> delta;  ///< delta_1 < ... < delta_{m-1} < eps0
  std::vector<double> beta;   ///< beta_1 .. beta_{m-1}
  std::vector<Stage> stages;  ///< levels 1 .. m-1
  std::vector<Matrix> references;  ///< X^{(j)} limits, j = 1..m
  std::vector<RotationLevel> rotations;
  std::int64_t k0 = 0;
  std::int64_t n0 = 0;
};

struct CascadeOptions {
  TransformOptions transform;
  /// Upper bound on ||L_k - L||, non-increasing in k. Leaves k0 = 0 when unset.
  std::function<double(std::int64_t)> sequence_distance_bound;
  std::int64_t k_max = std::int64_t{1} << 40;
};

/// Backward induction over the stages: delta_{m-1} first, each earlier delta
/// small enough that the level it controls lands in the next stage's beta-ball.
/// Throws kConditionFailure (L conditions), kEpsilonTooLarge (eps0 leaves a
/// 2x2 reference without a positive real-simple window) and
/// kHypothesisFailure (a stage violates the split hypotheses).
ParameterCascade choose_parameters(const DiagonalModel& model, const Matrix& l, double eps0,
                                   const CascadeOptions& opts = {});

struct CascadeLevel {
  int level = 0;
  Matrix x;                ///< X^{(level)}
  std::optional<Matrix> y;  ///< Y^{(level)}, absent at the last level
  std::optional<SplitBlocks> split;
  double reference_error = 0.0;  ///< ||X^{(level)} - reference||
  ScaledSpectrum spectrum;       ///< sigma(X^{(level)} T_level^n)
};

struct CascadeResult {
  std::int64_t n = 0;
  Matrix l_k;
  std::vector<CascadeLevel> levels;
  ScaledSpectrum spectrum;  ///< union of the level spectra, modulus sorted
  /// min log-modulus at level j minus max log-modulus at level j+1, per j.
  std::vector<double> domination_gaps;
};

/// Decomposes sigma(L_k T^n) level by level. Throws StageError naming the
/// level whose input left the beta-ball or whose certificate failed.
CascadeResult cascade_decompose(const Matrix& l_k, std::int64_t n, const DiagonalModel& model,
                                const ParameterCascade& cascade);

struct PolarForm {
  int level = 0;
  Matrix p;
  double alpha = 0.0;  ///< turns
  double eps_hat = 0.0;
  bool degenerate = false;  ///< P has equal eigenvalues, eps_hat = 0
  bool reflection = false;  ///< det X < 0, P and alpha unset
};

/// Polar data of every 2x2 level. With allow_reflection = false a level with
/// det X < 0 throws kNegativeDeterminant; otherwise it is flagged.
std::vector<PolarForm> polar_forms(const CascadeResult& result, const DiagonalModel& model,
                                   bool allow_reflection = false);

/// (alpha + (a n + b) theta) mod 1 with a compensated product.
double rotation_phase(double alpha, double theta, std::int64_t n, std::int64_t a, std::int64_t b);
/// Same, with alpha taken from the polar form of level j in `result`.
double rotation_phase(const DiagonalModel& model, const CascadeResult& result, int level,
                      std::int64_t n, std::int64_t a, std::int64_t b);

}  // namespace spectral_cascade
