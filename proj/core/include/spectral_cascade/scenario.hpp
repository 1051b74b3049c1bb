#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral_cascade/blocks.hpp"
#include "spectral_cascade/eigen.hpp"
#include "spectral_cascade/matrix.hpp"
#include "spectral_cascade/model.hpp"

namespace spectral_cascade {

struct ConditionLine {
  std::string name;
  int level = 0;  ///< 0 for whole-matrix conditions
  bool passed = false;
  double margin = 0.0;  ///< smallest singular value, or singular-value gap
};

struct ConditionReport {
  std::vector<ConditionLine> lines;
  bool passed = false;

  const ConditionLine* first_failure() const;
};

/// Conditions on L for the block structure: L and every D^{(j)}(iota L)
/// invertible, and every 2x2 reference block (A_1(L), then
/// A_{j+1}(iota D^{(j)} iota L)) invertible with distinct singular values.
/// Singular values count as distinct when their relative gap exceeds
/// `gap_tol`.
ConditionReport check_L_conditions(const Matrix& l, const BlockStructure& structure,
                                   double gap_tol = 1e-8);

/// The m reference blocks X^{(j)} converges to: A_1(L), then
/// A_{j+1}(iota D^{(j)} iota L); the last one is iota D^{(m-1)} iota L.
std::vector<Matrix> level_references(const Matrix& l, const BlockStructure& structure);

/// Random move of norm <= strength that makes L generic. Returns L
/// unchanged when it already passes. Throws kPerturbationExhausted.
Matrix perturb_to_generic(const Matrix& l, const BlockStructure& structure, double strength,
                          std::uint64_t seed = 1, int attempts = 50);

struct ResonanceReport {
  bool resonant = false;
  double min_margin = 0.0;
  std::vector<int> witness;  ///< exponents on the collapsed spectrum
  /// Moduli the exponents refer to (one per conjugate pair).
  std::vector<double> moduli;
};

struct NonresonanceOptions {
  double tol_log = 1e-9;
  /// Also require the phase sum to vanish mod 1 (complex resonance); then
  /// conjugate pairs are kept apart.
  bool include_phases = false;
};

/// Scans every integer vector k with 0 < max|k_i| <= K. Without phases a
/// conjugate pair contributes one modulus. The witness is normalised so that
/// sum k_i log|lambda_i| >= 0, and its first nonzero entry is positive when
/// that sum vanishes.
ResonanceReport nonresonance_report(const Spectrum& spectrum, int k_max,
                                    const NonresonanceOptions& opts = {});
/// nonresonance_report() that throws kResonanceFound with the witness.
ResonanceReport check_nonresonance(const Spectrum& spectrum, int k_max,
                                   const NonresonanceOptions& opts = {});

struct PerturbationLaw {
  double c = 0.0;    ///< amplitude, < 1
  double rho = 0.5;  ///< decay rate in (0, 1)
  std::uint64_t seed = 0;
};

struct Progression {
  std::int64_t a = 1;
  std::int64_t b = 0;
};

struct InstanceSpec {
  DiagonalModel model;
  Matrix l;
  PerturbationLaw law;
  Progression progression;

  int dimension() const { return structure().dim(); }
  const BlockStructure& structure() const { return model.structure; }
};

/// Rotation angles frac(sqrt(p)) over distinct primes picked from the seed,
/// re-drawn until the relation test passes. Throws kIndependenceFailure.
DiagonalModel random_model_T(const BlockStructure& structure, const std::vector<double>& moduli,
                             std::uint64_t seed);

/// The fixed unit-norm direction G of the law.
Matrix perturbation_direction(const PerturbationLaw& law, std::size_t d);

/// L_n = L (I + c rho^n G), so ||L_n - L|| <= ||L|| c rho^n.
Matrix make_sequence_Ln(const InstanceSpec& spec, std::int64_t n);

/// ||L|| c rho^n, the bound make_sequence_Ln() guarantees.
double sequence_distance_bound(const InstanceSpec& spec, std::int64_t n);

struct GenerateOptions {
  /// Moduli of T_1..T_m; drawn from the seed when empty.
  std::vector<double> moduli;
  double l_scale = 0.3;     ///< L = I + l_scale * (uniform [-1, 1] entries)
  double min_margin = 0.3;  ///< required absolute singular-value gaps and minima
  double perturb_strength = 0.01;
  PerturbationLaw law{0.5, 0.5, 0};
  Progression progression;
  int resonance_order = 5;
  int attempts = 200;
};

/// Composes random_model_T, a generic L and the perturbation law. The result
/// passes check_L_conditions() with every margin >= min_margin and is
/// non-resonant up to resonance_order. Throws kConditionFailure when the
/// attempts run out.
InstanceSpec generate_instance(int d, const BlockStructure& structure, std::uint64_t seed,
                               const GenerateOptions& opts = {});

}  // namespace spectral_cascade
