#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace spectral_cascade::detail {

// Worst distance of a pairing between two modulus-sorted sequences. Runs of
// consecutive elements of the first sequence with tied(i - 1, i) form a group
// and are matched greedily by distance within the same index window of the
// second sequence, so near-equal moduli cannot swap partners.
template <class Tied, class Dist>
double grouped_pairing(std::size_t n, Tied tied, Dist dist) {
  double worst = 0.0;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && tied(end - 1, end)) ++end;
    std::vector<bool> used(end - start, false);
    for (std::size_t i = start; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t pick = end;
      for (std::size_t j = start; j < end; ++j) {
        if (used[j - start]) continue;
        const double dd = dist(i, j);
        if (pick == end || dd < best) {
          best = dd;
          pick = j;
        }
      }
      used[pick - start] = true;
      if (!(best <= worst)) worst = best;  // propagates NaN
    }
    start = end;
  }
  return worst;
}

}  // namespace spectral_cascade::detail
