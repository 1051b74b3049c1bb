#include "spectral_cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spectral_cascade/decompositions.hpp"
#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

Matrix DiagonalModel::t() const { return block_diagonal(blocks); }

std::vector<DiagonalBlock> DiagonalModel::tail_blocks(int level) const {
  if (level < 1 || level > structure.levels()) {
    throw Error(ErrorKind::kInvalidArgument, "tail level out of range");
  }
  return {blocks.begin() + (level - 1), blocks.end()};
}

std::vector<double> DiagonalModel::rotation_angles() const {
  std::vector<double> out;
  for (const auto& b : blocks)
    if (b.size == 2) out.push_back(b.theta);
  return out;
}

void DiagonalModel::validate() const {
  if (static_cast<int>(blocks.size()) != structure.levels()) {
    throw Error(ErrorKind::kInvalidArgument, "block count differs from the structure");
  }
  for (int j = 1; j <= structure.levels(); ++j) {
    const auto& b = blocks[j - 1];
    if (b.size != structure.size(j)) {
      throw Error(ErrorKind::kInvalidArgument, "block " + std::to_string(j) + " has wrong size");
    }
    if (!(b.abs_value() > 0.0) || !std::isfinite(b.abs_value())) {
      throw Error(ErrorKind::kInvalidArgument, "block " + std::to_string(j) + " modulus invalid");
    }
    if (j > 1 && !(blocks[j - 2].abs_value() > b.abs_value())) {
      throw Error(ErrorKind::kInvalidArgument,
                  "moduli must strictly decrease (level " + std::to_string(j) + ")");
    }
  }
}

namespace {

constexpr double kRelationTol = 1e-12;

struct Relation {
  double residual = 1.0;
  std::int64_t p1 = 0;
  std::int64_t p2 = 0;
};

double circular_distance(double x, double y) {
  const double d = std::abs(x - y);
  return std::min(d, 1.0 - d);
}

// frac(p * theta) for p in [-M, M], sorted by value.
std::vector<std::pair<double, std::int64_t>> sorted_multiples(double theta, std::int64_t m) {
  std::vector<std::pair<double, std::int64_t>> out;
  out.reserve(static_cast<std::size_t>(2 * m + 1));
  for (std::int64_t p = -m; p <= m; ++p) out.emplace_back(multiply_turns(p, theta), p);
  std::sort(out.begin(), out.end());
  return out;
}

// Best p1 * theta1 + p2 * theta2 + offset = 0 (mod 1) over |p1|, |p2| <= M.
// `allow_zero` admits p1 = p2 = 0, meaningful only with a nonzero offset.
Relation meet_in_the_middle(const std::vector<std::pair<double, std::int64_t>>& first,
                            double theta2, double offset, std::int64_t m, bool allow_zero) {
  Relation best;
  const auto consider = [&](std::size_t idx, double target, std::int64_t p2) {
    const auto& [v, p1] = first[idx % first.size()];
    if (!allow_zero && p1 == 0 && p2 == 0) return;
    const double r = circular_distance(v, target);
    if (r < best.residual) best = {r, p1, p2};
  };
  for (std::int64_t p2 = -m; p2 <= m; ++p2) {
    const double target = wrap_turns(-(multiply_turns(p2, theta2) + offset));
    auto it = std::lower_bound(first.begin(), first.end(), std::pair{target, std::int64_t{-m - 1}});
    const auto idx = static_cast<std::size_t>(it - first.begin());
    // Neighbours on the circle; two on each side cover the excluded zero entry.
    for (std::size_t k = 0; k < 2; ++k) {
      consider(idx + k, target, p2);
      consider(idx + first.size() - 1 - k, target, p2);
    }
  }
  return best;
}

}  // namespace

IndependenceReport check_rational_independence(const std::vector<double>& theta,
                                               std::int64_t max_coeff, int samples) {
  IndependenceReport rep;
  const std::size_t k = theta.size();
  if (k == 0) {
    rep.method = "no angles";
    return rep;
  }
  if (max_coeff < 1) throw Error(ErrorKind::kInvalidArgument, "max_coeff must be positive");
  for (double t : theta)
    if (!std::isfinite(t)) throw Error(ErrorKind::kInvalidArgument, "angle not finite");

  const auto record = [&](const Relation& r, std::size_t i1, std::size_t i2,
                          const std::vector<std::int64_t>& rest) {
    if (r.residual >= rep.min_residual) return;
    rep.min_residual = r.residual;
    rep.witness = rest.empty() ? std::vector<std::int64_t>(k, 0) : rest;
    rep.witness[i1] = r.p1;
    if (i2 != i1) rep.witness[i2] = r.p2;
    // q makes the relation exact in the integers.
    long double s = 0.0L;
    for (std::size_t j = 0; j < k; ++j)
      s += static_cast<long double>(rep.witness[j]) * static_cast<long double>(theta[j]);
    rep.witness.push_back(-static_cast<std::int64_t>(std::llround(static_cast<double>(s))));
  };

  if (k == 1) {
    Relation best;
    for (std::int64_t p = 1; p <= max_coeff; ++p) {
      const double r = circular_distance(multiply_turns(p, theta[0]), 0.0);
      if (r < best.residual) best = {r, p, 0};
    }
    record(best, 0, 0, {});
    rep.method = "exhaustive";
  } else {
    std::vector<std::vector<std::pair<double, std::int64_t>>> tables(k);
    for (std::size_t i = 0; i + 1 < k; ++i) tables[i] = sorted_multiples(theta[i], max_coeff);
    for (std::size_t i = 0; i + 1 < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        record(meet_in_the_middle(tables[i], theta[j], 0.0, max_coeff, false), i, j, {});
    rep.method = "meet-in-the-middle";
    if (k > 2) {
      rep.method += " + randomized";
      std::mt19937_64 rng(0x5eed5eedULL);
      std::uniform_int_distribution<std::int64_t> coeff(-max_coeff, max_coeff);
      for (int s = 0; s < samples; ++s) {
        std::vector<std::int64_t> rest(k, 0);
        double offset = 0.0;
        bool nonzero = false;
        for (std::size_t j = 2; j < k; ++j) {
          rest[j] = coeff(rng);
          nonzero = nonzero || rest[j] != 0;
          offset = wrap_turns(offset + multiply_turns(rest[j], theta[j]));
        }
        if (!nonzero) continue;
        record(meet_in_the_middle(tables[0], theta[1], offset, max_coeff, true), 0, 1, rest);
      }
    }
  }
  rep.independent = rep.min_residual > kRelationTol;
  return rep;
}

}  // namespace spectral_cascade
