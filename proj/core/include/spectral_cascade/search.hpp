#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spectral_cascade/cascade.hpp"
#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

/// L_n for the scan; must be a pure function of n (it is called concurrently).
using SequenceFn = std::function<Matrix(std::int64_t)>;

struct SearchOptions {
  /// The phase window of rotation level j is |phase| < (1 - margin_fraction) eps_hat_j.
  double margin_fraction = 0.05;
  double gap_tol = 1e-9;
  int threads = 1;          ///< <= 0 selects the hardware concurrency
  std::int64_t wave = 64;   ///< exponents per worker per wave
  bool collect_rows = false;
  std::size_t near_miss_count = 10;
};

/// One scanned exponent, as written to CSV.
struct SearchRow {
  std::int64_t n = 0;
  std::int64_t exponent = 0;   ///< a n + b
  std::vector<double> phases;  ///< centred turns per rotation level; NaN for reflections
  ScaledSpectrum eigenvalues;  ///< cascade spectrum of L_n T^{an+b}
  double min_gap = 0.0;
  bool accepted = false;
};

struct SearchHit {
  std::int64_t n = 0;
  std::int64_t exponent = 0;
  std::vector<double> phases;
  ScaledSpectrum spectrum;  ///< direct high-precision spectrum that confirmed the hit
  double min_gap = 0.0;
  double max_imag_ratio = 0.0;
};

struct NearMiss {
  std::int64_t n = 0;
  /// How far the worst phase sits outside its window (turns); 0 when every
  /// phase was inside but the direct confirmation failed.
  double excess = 0.0;
  std::string reason;
};

struct SearchReport {
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t first_n = 0;
  std::int64_t last_n = 0;  ///< last exponent index examined
  std::int64_t scanned = 0;
  std::int64_t candidates = 0;  ///< phases inside every window
  std::vector<int> rotation_levels;
  std::vector<double> windows;  ///< half widths per rotation level, turns
  std::vector<SearchHit> hits;
  std::vector<SearchRow> rows;
  std::vector<NearMiss> near_misses;
};

class SearchExhausted : public Error {
 public:
  SearchExhausted(SearchReport report, const std::string& what)
      : Error(ErrorKind::kSearchExhausted, what), report_(std::move(report)) {}
  const SearchReport& report() const noexcept { return report_; }

 private:
  SearchReport report_;
};

/// Scans n = max(n0, k0) .. n_max and returns the first `count` n whose
/// cascade phases all fall inside the windows and for which the direct
/// spectrum of L_n T^{an+b} is real and simple. The scan runs in waves
/// across threads; the result is independent of the thread count. Throws
/// SearchExhausted with the partial report when fewer hits exist.
SearchReport find_subsequence(const DiagonalModel& model, const SequenceFn& l_seq,
                              const ParameterCascade& cascade, std::int64_t a, std::int64_t b,
                              std::size_t count, std::int64_t n_max,
                              const SearchOptions& opts = {});

/// Header plus one line per row: n, phase per rotation level, (re, im) per
/// eigenvalue, min_gap, accepted.
std::string search_csv(const SearchReport& report, int dimension);

struct FrequencyReport {
  std::int64_t scanned = 0;
  std::int64_t hits = 0;
  double frequency = 0.0;
  /// Product over rotation levels of the window lengths 2 (1 - margin) eps_hat.
  double predicted = 0.0;
  std::vector<double> per_level_frequency;
  std::vector<double> window_lengths;
};

/// Fraction of n in [max(n0, k0), n_max] whose cascade phases fall inside
/// every window. No direct confirmation.
FrequencyReport phase_window_frequency(const DiagonalModel& model, const SequenceFn& l_seq,
                                       const ParameterCascade& cascade, std::int64_t a,
                                       std::int64_t b, std::int64_t n_max,
                                       const SearchOptions& opts = {});

}  // namespace spectral_cascade
