#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral_cascade/blocks.hpp"
#include "spectral_cascade/diagonal_blocks.hpp"
#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// T = diag[T_1 : ... : T_m] in normal form, moduli strictly decreasing.
struct DiagonalModel {
  BlockStructure structure;
  std::vector<DiagonalBlock> blocks;

  Matrix t() const;
  /// Blocks level..m, i.e. the normal form of D^{(level-1)}(T).
  std::vector<DiagonalBlock> tail_blocks(int level) const;
  /// theta_j for j in the rotation index set, in level order.
  std::vector<double> rotation_angles() const;

  /// Block sizes agree with the structure and every modulus in a block
  /// exceeds every modulus in later blocks. Throws kInvalidArgument.
  void validate() const;
};

struct IndependenceReport {
  bool independent = true;
  /// Smallest |q + sum p_j theta_j| found over the scanned relations.
  double min_residual = 1.0;
  /// Coefficients (p_1, ..., p_k, q) of that relation; empty for no angles.
  std::vector<std::int64_t> witness;
  std::string method;
};

/// Searches integer relations q + sum p_j theta_j = 0 with |p_j| <= max_coeff.
///
/// Exhaustive for up to two angles (meet in the middle over the pair); for
/// more angles every pair is scanned exhaustively and the remaining
/// coefficients are drawn at random (`samples` draws, fixed seed). A relation
/// counts when the residual is at rounding level for the coefficients used.
IndependenceReport check_rational_independence(const std::vector<double>& theta,
                                               std::int64_t max_coeff = 10000,
                                               int samples = 64);

}  // namespace spectral_cascade
