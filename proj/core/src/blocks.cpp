#include "spectral_cascade/blocks.hpp"

#include <numeric>
#include <string>

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

BlockStructure::BlockStructure(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw Error(ErrorKind::kInvalidArgument, "empty block structure");
  for (int s : sizes_) {
    if (s != 1 && s != 2) {
      throw Error(ErrorKind::kInvalidArgument,
                  "block size " + std::to_string(s) + " not in {1, 2}");
    }
  }
  tails_.assign(sizes_.size(), 0);
  int acc = 0;
  for (std::size_t k = sizes_.size(); k-- > 0;) {
    acc += sizes_[k];
    tails_[k] = acc;
  }
  if (acc < 3) {
    throw Error(ErrorKind::kInvalidArgument, "block structure dimension must be at least 3");
  }
}

int BlockStructure::size(int level) const {
  if (level < 1 || level > levels()) {
    throw Error(ErrorKind::kInvalidArgument, "level " + std::to_string(level) + " out of range");
  }
  return sizes_[level - 1];
}

int BlockStructure::tail(int level) const {
  if (level == levels() + 1) return 0;
  if (level < 1 || level > levels()) {
    throw Error(ErrorKind::kInvalidArgument, "level " + std::to_string(level) + " out of range");
  }
  return tails_[level - 1];
}

std::vector<int> BlockStructure::rotation_levels() const {
  std::vector<int> out;
  for (int j = 1; j <= levels(); ++j)
    if (sizes_[j - 1] == 2) out.push_back(j);
  return out;
}

namespace {

void require_split(const Matrix& j, Split split) {
  if (split.top <= 0 || split.bottom <= 0 || !j.is_square() ||
      j.rows() != static_cast<std::size_t>(split.dim())) {
    throw Error(ErrorKind::kSizeMismatch,
                "split " + std::to_string(split.top) + "|" + std::to_string(split.bottom) +
                    " does not fit a " + std::to_string(j.rows()) + "x" + std::to_string(j.cols()) +
                    " matrix");
  }
}

void require_level_square(const Matrix& j, const BlockStructure& s, int level) {
  const auto n = static_cast<std::size_t>(s.tail(level));
  if (!j.is_square() || j.rows() != n) {
    throw Error(ErrorKind::kSizeMismatch, "level " + std::to_string(level) + " expects a " +
                                              std::to_string(n) + "x" + std::to_string(n) +
                                              " matrix");
  }
}

}  // namespace

Partition partition(const Matrix& j, Split split) {
  require_split(j, split);
  const auto t = static_cast<std::size_t>(split.top);
  const auto b = static_cast<std::size_t>(split.bottom);
  return {j.block(0, 0, t, t), j.block(0, t, t, b), j.block(t, 0, b, t), j.block(t, t, b, b)};
}

Matrix reassemble(const Partition& p) {
  const std::size_t t = p.a.rows();
  const std::size_t b = p.d.rows();
  Matrix j(t + b, t + b);
  j.set_block(0, 0, p.a);
  j.set_block(0, t, p.b);
  j.set_block(t, 0, p.c);
  j.set_block(t, t, p.d);
  return j;
}

Matrix off_diag_B(const Matrix& j, Split split) {
  require_split(j, split);
  return j.block(0, split.top, split.top, split.bottom);
}

Matrix off_diag_C(const Matrix& j, Split split) {
  require_split(j, split);
  return j.block(split.top, 0, split.bottom, split.top);
}

Matrix project_A(const Matrix& j_mat, const BlockStructure& s, int level) {
  require_level_square(j_mat, s, level);
  const auto i = static_cast<std::size_t>(s.size(level));
  return j_mat.block(0, 0, i, i);
}

Matrix project_D(const Matrix& j_mat, const BlockStructure& s, int level) {
  if (level >= s.levels()) {
    throw Error(ErrorKind::kInvalidArgument, "project_D needs level <= m - 1");
  }
  require_level_square(j_mat, s, level);
  const auto i = static_cast<std::size_t>(s.size(level));
  const auto k = static_cast<std::size_t>(s.tail(level + 1));
  return j_mat.block(i, i, k, k);
}

Matrix d_chain(const Matrix& j_mat, const BlockStructure& s, int depth) {
  if (depth < 0 || depth > s.levels() - 1) {
    throw Error(ErrorKind::kInvalidArgument, "d_chain depth " + std::to_string(depth) +
                                                 " out of range [0, m - 1]");
  }
  require_level_square(j_mat, s, 1);
  Matrix out = j_mat;
  for (int level = 1; level <= depth; ++level) out = project_D(out, s, level);
  return out;
}

}  // namespace spectral_cascade
