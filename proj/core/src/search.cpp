#include "spectral_cascade/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

namespace spectral_cascade {

namespace {

struct Outcome {
  std::optional<SearchHit> hit;
  std::optional<SearchRow> row;
  bool candidate = false;
  std::vector<bool> level_inside;
  double excess = 0.0;
  std::string reason;
  std::exception_ptr error;
};

struct Scan {
  const DiagonalModel& model;
  const SequenceFn& l_seq;
  const ParameterCascade& cascade;
  std::int64_t a;
  std::int64_t b;
  const SearchOptions& opts;
  std::vector<double> windows;
  bool confirm = true;

  Outcome evaluate(std::int64_t n) const {
    Outcome out;
    try {
      const std::int64_t exponent = a * n + b;
      const Matrix l = l_seq(n);
      const CascadeResult res = cascade_decompose(l, exponent, model, cascade);
      const auto forms = polar_forms(res, model, true);
      std::vector<double> phases;
      bool inside = true;
      out.excess = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < forms.size(); ++i) {
        const PolarForm& pf = forms[i];
        if (pf.reflection) {
          phases.push_back(std::numeric_limits<double>::quiet_NaN());
          out.level_inside.push_back(true);
          continue;
        }
        const double theta = model.blocks[pf.level - 1].theta;
        const double c = centered_turns(rotation_phase(pf.alpha, theta, n, a, b));
        phases.push_back(c);
        // The window of the limit, clipped to the exact window of this P.
        const double bound = pf.degenerate ? 0.0 : std::min(windows[i], pf.eps_hat);
        const bool in = std::abs(c) < bound;
        out.level_inside.push_back(in);
        inside = inside && in;
        out.excess = std::max(out.excess, std::abs(c) - bound);
      }
      out.excess = std::max(out.excess, 0.0);
      out.candidate = inside;

      bool accepted = false;
      double min_gap = 0.0;
      if (inside && confirm) {
        ScaledSpectrum direct = product_spectrum(l, model.blocks, exponent);
        const RealSimpleReport rep = real_simple_report(direct, opts.gap_tol);
        min_gap = rep.min_gap;
        if (rep.real_simple) {
          accepted = true;
          sort_by_modulus(direct);
          out.hit = SearchHit{n, exponent, phases, std::move(direct), rep.min_gap,
                              rep.max_imag_ratio};
        } else {
          out.reason = "phases inside windows, direct spectrum not real and simple";
        }
      } else if (!inside) {
        out.reason = "phase outside window";
      }
      if (opts.collect_rows) {
        if (!accepted) min_gap = real_simple_report(res.spectrum, opts.gap_tol).min_gap;
        out.row = SearchRow{n, exponent, phases, res.spectrum, min_gap, accepted};
      }
    } catch (...) {
      out.error = std::current_exception();
    }
    return out;
  }

  // Outcomes for [start, start + len) in index order.
  std::vector<Outcome> wave(std::int64_t start, std::int64_t len, int threads) const {
    std::vector<Outcome> out(static_cast<std::size_t>(len));
    if (threads <= 1) {
      for (std::int64_t i = 0; i < len; ++i) out[i] = evaluate(start + i);
      return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::int64_t i = t; i < len; i += threads) out[i] = evaluate(start + i);
      });
    }
    for (auto& th : pool) th.join();
    return out;
  }
};

int worker_count(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> window_half_widths(const ParameterCascade& cascade, double margin) {
  std::vector<double> out;
  for (const auto& r : cascade.rotations) out.push_back(r.reflection ? 0.5 : (1.0 - margin) * r.eps_hat);
  return out;
}

void validate(std::int64_t a, std::int64_t b, const SearchOptions& opts) {
  if (a < 1 || b < 0) throw Error(ErrorKind::kInvalidArgument, "progression needs a >= 1, b >= 0");
  if (!(opts.margin_fraction >= 0.0 && opts.margin_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "margin_fraction must lie in [0, 1)");
  }
  if (!(opts.gap_tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "gap_tol must be positive");
  if (opts.wave < 1) throw Error(ErrorKind::kInvalidArgument, "wave must be positive");
}

}  // namespace

SearchReport find_subsequence(const DiagonalModel& model, const SequenceFn& l_seq,
                              const ParameterCascade& cascade, std::int64_t a, std::int64_t b,
                              std::size_t count, std::int64_t n_max, const SearchOptions& opts) {
  validate(a, b, opts);
  Scan scan{model, l_seq, cascade, a, b, opts, window_half_widths(cascade, opts.margin_fraction)};
  SearchReport rep;
  rep.a = a;
  rep.b = b;
  rep.first_n = std::max(cascade.n0, cascade.k0);
  rep.last_n = rep.first_n - 1;
  rep.windows = scan.windows;
  for (const auto& r : cascade.rotations) rep.rotation_levels.push_back(r.level);

  const int threads = worker_count(opts.threads);
  const std::int64_t chunk = opts.wave * threads;
  bool done = count == 0;
  for (std::int64_t start = rep.first_n; !done && start <= n_max; start += chunk) {
    const std::int64_t len = std::min(chunk, n_max - start + 1);
    std::vector<Outcome> outcomes = scan.wave(start, len, threads);
    for (std::int64_t i = 0; i < len && !done; ++i) {
      Outcome& o = outcomes[i];
      if (o.error) std::rethrow_exception(o.error);
      ++rep.scanned;
      rep.last_n = start + i;
      if (o.candidate) ++rep.candidates;
      if (o.row) rep.rows.push_back(std::move(*o.row));
      if (o.hit) {
        rep.hits.push_back(std::move(*o.hit));
        done = rep.hits.size() >= count;
      } else {
        rep.near_misses.push_back({start + i, o.excess, o.reason});
      }
    }
    std::sort(rep.near_misses.begin(), rep.near_misses.end(),
              [](const NearMiss& x, const NearMiss& y) {
                return x.excess < y.excess || (x.excess == y.excess && x.n < y.n);
              });
    if (rep.near_misses.size() > opts.near_miss_count) rep.near_misses.resize(opts.near_miss_count);
  }
  if (rep.hits.size() < count) {
    const std::string what = "found " + std::to_string(rep.hits.size()) + " of " +
                             std::to_string(count) + " exponents up to n = " +
                             std::to_string(n_max);
    throw SearchExhausted(std::move(rep), what);
  }
  return rep;
}

std::string search_csv(const SearchReport& report, int dimension) {
  std::string out = "n";
  for (int level : report.rotation_levels) out += ",phase_" + std::to_string(level);
  for (int k = 1; k <= dimension; ++k)
    out += ",re_" + std::to_string(k) + ",im_" + std::to_string(k);
  out += ",min_gap,accepted\n";
  char buf[64];
  for (const auto& row : report.rows) {
    out += std::to_string(row.n);
    for (double p : row.phases) {
      if (std::isnan(p)) {
        out += ",nan";
      } else {
        std::snprintf(buf, sizeof buf, ",%.17g", p);
        out += buf;
      }
    }
    for (const auto& e : row.eigenvalues) {
      out += "," + e.real_part_decimal() + "," + e.imag_part_decimal();
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%d\n", row.min_gap, row.accepted ? 1 : 0);
    out += buf;
  }
  return out;
}

FrequencyReport phase_window_frequency(const DiagonalModel& model, const SequenceFn& l_seq,
                                       const ParameterCascade& cascade, std::int64_t a,
                                       std::int64_t b, std::int64_t n_max,
                                       const SearchOptions& opts) {
  validate(a, b, opts);
  SearchOptions quiet = opts;
  quiet.collect_rows = false;
  const Scan lean{model, l_seq, cascade, a, b, quiet,
                  window_half_widths(cascade, opts.margin_fraction), false};

  FrequencyReport rep;
  rep.predicted = 1.0;
  for (std::size_t i = 0; i < cascade.rotations.size(); ++i) {
    const double len = cascade.rotations[i].reflection ? 1.0 : 2.0 * lean.windows[i];
    rep.window_lengths.push_back(len);
    rep.predicted *= len;
  }
  std::vector<std::int64_t> level_hits(cascade.rotations.size(), 0);
  const int threads = worker_count(opts.threads);
  const std::int64_t chunk = opts.wave * threads;
  for (std::int64_t start = std::max(cascade.n0, cascade.k0); start <= n_max; start += chunk) {
    const std::int64_t len = std::min(chunk, n_max - start + 1);
    for (Outcome& o : lean.wave(start, len, threads)) {
      if (o.error) std::rethrow_exception(o.error);
      ++rep.scanned;
      if (o.candidate) ++rep.hits;
      for (std::size_t i = 0; i < o.level_inside.size(); ++i) level_hits[i] += o.level_inside[i];
    }
  }
  const double total = static_cast<double>(std::max<std::int64_t>(rep.scanned, 1));
  rep.frequency = static_cast<double>(rep.hits) / total;
  for (auto h : level_hits) rep.per_level_frequency.push_back(static_cast<double>(h) / total);
  return rep;
}

}  // namespace spectral_cascade
