#include "spectral_cascade/diagonal_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

DiagonalBlock DiagonalBlock::scalar(double lambda) {
  if (!std::isfinite(lambda) || lambda == 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "scalar block needs a finite nonzero value");
  }
  DiagonalBlock b;
  b.size = 1;
  b.lambda = lambda;
  b.modulus = std::abs(lambda);
  b.theta = 0.0;
  return b;
}

DiagonalBlock DiagonalBlock::rotation(double modulus, double theta) {
  if (!std::isfinite(modulus) || !(modulus > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorKind::kInvalidArgument, "rotation block needs modulus > 0 and finite angle");
  }
  DiagonalBlock b;
  b.size = 2;
  b.lambda = 0.0;
  b.modulus = modulus;
  b.theta = wrap_turns(theta);
  return b;
}

double DiagonalBlock::abs_value() const { return size == 1 ? std::abs(lambda) : modulus; }

double DiagonalBlock::log_abs() const { return std::log(abs_value()); }

Matrix DiagonalBlock::matrix() const {
  if (size == 1) return Matrix{{lambda}};
  return rotation_matrix(theta) * modulus;
}

Matrix DiagonalBlock::unit_power(std::int64_t n) const {
  if (size == 1) {
    const bool negative = lambda < 0.0 && (n % 2 != 0);
    return Matrix{{negative ? -1.0 : 1.0}};
  }
  return rotation_matrix(multiply_turns(n, theta));
}

ScaledMatrix DiagonalBlock::power(std::int64_t n) const {
  return {unit_power(n), static_cast<double>(n) * log_abs()};
}

double multiply_turns(std::int64_t n, double theta) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::kInvalidArgument, "angle not finite");
  if (std::abs(n) > (std::int64_t{1} << 53)) {
    throw Error(ErrorKind::kInvalidArgument, "exponent too large for exact angle reduction");
  }
  const double nd = static_cast<double>(n);
  const double hi = nd * theta;
  const double lo = std::fma(nd, theta, -hi);  // n * theta = hi + lo exactly
  const double frac_hi = hi - std::floor(hi);  // exact
  return wrap_turns(frac_hi + lo);
}

Matrix block_diagonal(std::span<const DiagonalBlock> blocks) {
  std::vector<Matrix> mats;
  mats.reserve(blocks.size());
  for (const auto& b : blocks) mats.push_back(b.matrix());
  return block_diagonal(std::span<const Matrix>(mats));
}

ScaledMatrix block_diagonal_power(std::span<const DiagonalBlock> blocks, std::int64_t n) {
  if (blocks.empty()) return {Matrix(), 0.0};
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) top = std::max(top, static_cast<double>(n) * b.log_abs());
  std::vector<Matrix> mats;
  mats.reserve(blocks.size());
  for (const auto& b : blocks) {
    const double rel = static_cast<double>(n) * b.log_abs() - top;  // <= 0
    mats.push_back(b.unit_power(n) * std::exp(rel));
  }
  return {block_diagonal(std::span<const Matrix>(mats)), top};
}

}  // namespace spectral_cascade
