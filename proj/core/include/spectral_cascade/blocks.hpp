#pragma once

#include <vector>

#include "spectral_cascade/matrix.hpp"

namespace spectral_cascade {

/// Decomposition R^d = R^{i_1} x ... x R^{i_m} with every i_j in {1, 2}.
///
/// Levels are 1-based throughout the library so that level j always refers to
/// the block of size i_j. tail(j) is the trailing dimension i_j + ... + i_m,
/// with tail(m + 1) == 0.
class BlockStructure {
 public:
  BlockStructure() = default;
  explicit BlockStructure(std::vector<int> sizes);

  int levels() const noexcept { return static_cast<int>(sizes_.size()); }
  int dim() const noexcept { return tails_.empty() ? 0 : tails_.front(); }
  int size(int level) const;
  int tail(int level) const;
  /// First row/column index of `level` inside the full d x d matrix.
  int offset(int level) const { return dim() - tail(level); }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  /// Levels j with i_j == 2.
  std::vector<int> rotation_levels() const;

  friend bool operator==(const BlockStructure&, const BlockStructure&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<int> tails_;
};

/// Two-block split R^d = R^top x R^bottom.
struct Split {
  int top = 0;
  int bottom = 0;

  int dim() const noexcept { return top + bottom; }
};

struct Partition {
  Matrix a;  ///< top x top
  Matrix b;  ///< top x bottom
  Matrix c;  ///< bottom x top
  Matrix d;  ///< bottom x bottom
};

Partition partition(const Matrix& j, Split split);
Matrix reassemble(const Partition& p);
Matrix off_diag_B(const Matrix& j, Split split);
Matrix off_diag_C(const Matrix& j, Split split);

/// Top-left i_j x i_j block of a tail(j) x tail(j) matrix.
Matrix project_A(const Matrix& j_mat, const BlockStructure& s, int level);
/// Bottom-right tail(j+1) x tail(j+1) block of a tail(j) x tail(j) matrix.
Matrix project_D(const Matrix& j_mat, const BlockStructure& s, int level);
/// D_j o ... o D_1 applied to a d x d matrix; depth 0 returns the input.
Matrix d_chain(const Matrix& j_mat, const BlockStructure& s, int depth);

}  // namespace spectral_cascade
