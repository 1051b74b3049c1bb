#include "spectral_cascade/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "spectral_cascade/blocks.hpp"
#include "spectral_cascade/decompositions.hpp"
#include "spectral_cascade/diagonal_blocks.hpp"
#include "spectral_cascade/eigen.hpp"
#include "spectral_cascade/error.hpp"
#include "spectral_cascade/matrix.hpp"
#include "spectral_cascade/product_spectrum.hpp"

namespace spectral_cascade {

namespace {

namespace jf = json_field;

constexpr std::int64_t kRelationBound = 10000;
constexpr double kRelationTol = 1e-12;
constexpr double kSvGapTol = 1e-8;

class Lines {
 public:
  explicit Lines(VerifyReport& rep) : rep_(rep) {}

  bool add(std::string name, bool ok, double measured = 0.0, double bound = 0.0) {
    rep_.lines.push_back({std::move(name), ok, measured, bound});
    return ok;
  }
  // measured < bound
  bool below(std::string name, double measured, double bound) {
    return add(std::move(name), measured < bound, measured, bound);
  }
  bool at_most(std::string name, double measured, double bound) {
    return add(std::move(name), measured <= bound, measured, bound);
  }

 private:
  VerifyReport& rep_;
};

struct Instance {
  BlockStructure structure;
  std::vector<DiagonalBlock> blocks;
  Matrix l;
  double c = 0.0;
  double rho = 0.0;
  std::int64_t a = 1;
  std::int64_t b = 0;
};

std::string level_name(const char* what, int level) {
  return std::string(what) + " " + std::to_string(level);
}

// Smallest |q + p . theta| over single angles and pairs, |p_j| <= bound.
double relation_residual(const std::vector<double>& theta) {
  double best = 1.0;
  const auto circ = [](double x) { return std::min(x, 1.0 - x); };
  for (double t : theta)
    for (std::int64_t p = 1; p <= kRelationBound; ++p) best = std::min(best, circ(multiply_turns(p, t)));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t k = i + 1; k < theta.size(); ++k) {
      std::vector<double> table;
      for (std::int64_t p = -kRelationBound; p <= kRelationBound; ++p)
        if (p != 0) table.push_back(multiply_turns(p, theta[k]));
      std::sort(table.begin(), table.end());
      for (std::int64_t p = 1; p <= kRelationBound; ++p) {
        const double want = wrap_turns(-multiply_turns(p, theta[i]));
        const auto it = std::lower_bound(table.begin(), table.end(), want);
        for (auto c : {it, it == table.begin() ? table.end() - 1 : it - 1}) {
          if (c == table.end()) c = table.begin();
          best = std::min(best, circ(std::abs(*c - want)));
        }
      }
    }
  }
  return best;
}

// Reference chain of L: A_1(L), then the leading block of inv(D^(j)(inv L)).
// Returns false (with lines) when an inverse along the chain does not exist.
bool l_conditions(const Instance& in, Lines& out, std::vector<Matrix>* refs) {
  const BlockStructure& s = in.structure;
  bool ok = true;
  const auto reference = [&](const Matrix& r, int level) {
    const auto sv = singular_values(r);
    ok = out.add(level_name("reference invertible, level", level), sv.back() > 0.0, sv.back()) && ok;
    if (r.rows() == 2) {
      ok = out.add(level_name("reference singular values distinct, level", level),
                   sv[0] - sv[1] > kSvGapTol * sv[0], sv[0] - sv[1], kSvGapTol * sv[0]) &&
           ok;
    }
    if (refs) refs->push_back(r);
  };
  const double smin = singular_values(in.l).back();
  if (!out.add("L invertible", smin > 0.0, smin)) return false;
  Matrix cur = in.l;
  reference(project_A(cur, s, 1), 1);
  for (int j = 1; j < s.levels(); ++j) {
    const int keep = s.tail(j + 1);
    Matrix d;
    try {
      const Matrix k = invert(cur);
      d = k.block(k.rows() - keep, k.cols() - keep, keep, keep);
      cur = invert(d);
    } catch (const Error&) {
      out.add(level_name("D chain invertible, level", j), false);
      return false;
    }
    out.add(level_name("D chain invertible, level", j), true, singular_values(d).back());
    reference(cur.block(0, 0, s.size(j + 1), s.size(j + 1)), j + 1);
  }
  return ok;
}

std::optional<Instance> check_instance(const Json& j, Lines& out, bool require_l) {
  Instance in;
  try {
    in.structure = structure_from_json(jf::get(j, "structure"));
    in.blocks = blocks_from_json(jf::get(j, "T_blocks"));
    in.l = matrix_from_json(jf::get(j, "L"));
    const Json& law = jf::get(j, "law");
    in.c = jf::number(law, "c");
    in.rho = jf::number(law, "rho");
    jf::unsigned_integer(law, "seed");
    const Json& prog = jf::get(j, "progression");
    in.a = jf::integer(prog, "a");
    in.b = jf::integer(prog, "b");
  } catch (const Error& e) {
    out.add(std::string("instance parses: ") + e.what(), false);
    return std::nullopt;
  }
  const BlockStructure& s = in.structure;
  bool shape = static_cast<int>(in.blocks.size()) == s.levels();
  for (int k = 0; shape && k < s.levels(); ++k) shape = in.blocks[k].size == s.size(k + 1);
  const auto d = static_cast<std::size_t>(s.dim());
  shape = shape && in.l.rows() == d && in.l.cols() == d;
  if (!out.add("T blocks and L match the structure", shape)) return std::nullopt;

  double worst = INFINITY;
  for (std::size_t k = 0; k + 1 < in.blocks.size(); ++k)
    worst = std::min(worst, in.blocks[k].log_abs() - in.blocks[k + 1].log_abs());
  out.add("T moduli strictly decreasing", worst > 0.0, worst);
  bool nonzero = true;
  for (const auto& b : in.blocks) nonzero = nonzero && b.abs_value() > 0.0 && std::isfinite(b.log_abs());
  out.add("T blocks invertible", nonzero);

  std::vector<double> theta;
  for (const auto& b : in.blocks)
    if (b.size == 2) theta.push_back(b.theta);
  if (!theta.empty()) {
    const double r = relation_residual(theta);
    out.add("no integer relation among (1, theta) up to 10^4", r > kRelationTol, r, kRelationTol);
  }
  out.add("law 0 <= c < 1", in.c >= 0.0 && in.c < 1.0, in.c, 1.0);
  out.add("law 0 < rho < 1", in.rho > 0.0 && in.rho < 1.0, in.rho, 1.0);
  out.add("progression a >= 1, b >= 0", in.a >= 1 && in.b >= 0);
  if (require_l) l_conditions(in, out, nullptr);
  return in;
}

std::vector<DiagonalBlock> slice(const std::vector<DiagonalBlock>& v, std::size_t from,
                                 std::size_t to) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to)};
}

ScaledSpectrum union_of(std::vector<ScaledSpectrum> parts) {
  ScaledSpectrum out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  sort_by_modulus(out);
  return out;
}

double min_log(const ScaledSpectrum& s) {
  double v = INFINITY;
  for (const auto& e : s) v = std::min(v, e.log_abs);
  return v;
}

double max_log(const ScaledSpectrum& s) {
  double v = -INFINITY;
  for (const auto& e : s) v = std::max(v, e.log_abs);
  return v;
}

// u scaled by exp(log_scale), exact zeros where it underflows.
Matrix scaled(Matrix u, double log_scale) {
  const double f = std::exp(log_scale);
  for (double& x : u.data()) x *= f;
  return u;
}

void verify_split(const Json& body, Lines& out) {
  const Json& prob = jf::get(body, "problem");
  const Json& k = jf::get(body, "constants");
  const Json& cert = jf::get(body, "certificate");
  const Matrix v = matrix_from_json(jf::get(prob, "V"));
  const Matrix j0 = matrix_from_json(jf::get(prob, "J0"));
  const std::vector<DiagonalBlock> vb = blocks_from_json(jf::get(prob, "V_blocks"));
  const Json& sp = jf::get(prob, "split");
  const Split s{static_cast<int>(jf::integer(sp, "top")), static_cast<int>(jf::integer(sp, "bottom"))};
  const double delta = jf::number(prob, "delta");
  const double alpha = jf::number(k, "alpha"), beta = jf::number(k, "beta");
  const double gamma = jf::number(k, "gamma"), rho = jf::number(k, "rho");
  const std::int64_t n0 = jf::integer(k, "n0");
  const std::int64_t n = jf::integer(cert, "n");
  const Matrix j = matrix_from_json(jf::get(cert, "J"));
  const Matrix xi = matrix_from_json(jf::get(cert, "xi"));
  const Matrix eta_hat = matrix_from_json(jf::get(cert, "eta_hat"));
  const Matrix eta = matrix_from_json(jf::get(cert, "eta"));
  const Matrix x_n = matrix_from_json(jf::get(cert, "X_n"));
  const Matrix y_inv = matrix_from_json(jf::get(cert, "Y_n_inv"));
  const Matrix y_n = matrix_from_json(jf::get(cert, "Y_n"));

  const auto d = static_cast<std::size_t>(s.dim());
  const auto top = static_cast<std::size_t>(s.top), bot = static_cast<std::size_t>(s.bottom);
  const bool shapes = s.top > 0 && s.bottom > 0 && v.rows() == d && v.cols() == d && j0.rows() == d &&
                      j0.cols() == d && j.rows() == d && j.cols() == d && xi.rows() == bot &&
                      xi.cols() == top && eta_hat.rows() == top && eta_hat.cols() == bot &&
                      eta.rows() == top && eta.cols() == bot && x_n.rows() == top &&
                      x_n.cols() == top && y_inv.rows() == bot && y_inv.cols() == bot &&
                      y_n.rows() == bot && y_n.cols() == bot;
  if (!out.add("certificate shapes agree with the split", shapes)) return;
  if (!out.add("V_blocks describe V", block_diagonal(vb) == v)) return;
  std::size_t cut = 0;
  int acc = 0;
  while (cut < vb.size() && acc < s.top) acc += vb[cut++].size;
  if (!out.add("split respects the blocks of V", acc == s.top)) return;
  const auto top_blocks = slice(vb, 0, cut), bot_blocks = slice(vb, cut, vb.size());

  double top_min = INFINITY, bot_max = -INFINITY;
  for (const auto& b : top_blocks) top_min = std::min(top_min, b.log_abs());
  for (const auto& b : bot_blocks) bot_max = std::max(bot_max, b.log_abs());
  const double rho_re = std::exp(bot_max - top_min);
  out.at_most("rho = ||D(V)|| ||A(V)^-1||", std::abs(rho - rho_re), 1e-12 * rho_re);
  out.below("rho < 1", rho, 1.0);
  out.below("J inside beta-ball", norm2(j - j0), beta);
  out.add("n >= n0", n >= n0, static_cast<double>(n), static_cast<double>(n0));
  out.add("delta recorded consistently", jf::number(k, "delta") == delta, jf::number(k, "delta"), delta);

  const double log_rn = static_cast<double>(n) * std::log(rho);
  const double rn = std::exp(log_rn);
  out.at_most("alpha + alpha^2 gamma (1 + gamma) rho^n <= gamma",
              alpha + alpha * alpha * gamma * (1 + gamma) * rn, gamma);
  out.below("alpha^2 (1 + 2 gamma) rho^n < 1", alpha * alpha * (1 + 2 * gamma) * rn, 1.0);
  out.below("gamma alpha rho^n < delta / 2", gamma * alpha * rn, delta / 2);

  Matrix k_inv;
  try {
    k_inv = invert(j);
  } catch (const Error&) {
    out.add("J invertible", false);
    return;
  }
  const Partition pj = partition(j, s), pk = partition(k_inv, s);
  const Partition pj0 = partition(j0, s), pk0 = partition(invert(j0), s);
  double block_norm = 0.0;
  try {
    const Matrix a_inv = invert(pj.a), dk_inv = invert(pk.d);
    for (const Matrix& m : {pj.d, a_inv, pj.b, Matrix(pj.c * a_inv), pk.a, pk.c, dk_inv,
                            Matrix(pk.b * dk_inv)})
      block_norm = std::max(block_norm, norm2(m));
  } catch (const Error&) {
    block_norm = INFINITY;
  }
  out.at_most("alpha bounds the block norms at J", block_norm, alpha);

  const double xi_norm = norm2(xi);
  out.at_most("||xi|| <= gamma", xi_norm, gamma);
  const double eta_norm = norm2(eta);
  const double eta_ratio = eta_norm == 0.0 ? 0.0 : std::exp(std::log(eta_norm) - log_rn);
  out.at_most("||eta|| <= gamma rho^n", eta_ratio, gamma * (1 + 1e-12));

  // D(V)^{+-n}, A(V)^{-+n} from the blocks; the scales combine before materialising.
  const ScaledMatrix d_pow = block_diagonal_power(bot_blocks, n);
  const ScaledMatrix a_inv = block_diagonal_power(top_blocks, -n);
  const Matrix w = scaled(d_pow.mantissa * xi * a_inv.mantissa, d_pow.log_scale + a_inv.log_scale);
  const Matrix w_back =
      scaled(a_inv.mantissa * eta_hat * d_pow.mantissa, a_inv.log_scale + d_pow.log_scale);
  const double eta_gap = (eta - w_back).frobenius_norm();
  out.at_most("eta = A(V)^-n eta_hat D(V)^n", eta_gap, 1e-12 * std::max(w_back.frobenius_norm(), 1e-300));

  const Matrix x_re = pj.a + pj.b * w;
  out.at_most("X_n = A(J) + B(J) D(V)^n xi A(V)^-n", norm2(x_re - x_n), 1e-12 * std::max(1.0, norm2(x_re)));
  const Matrix y_re = pk.c * eta + pk.d;
  out.at_most("Y_n^-1 = C(J^-1) eta + D(J^-1)", norm2(y_re - y_inv),
              1e-12 * std::max(1.0, norm2(y_re)));
  out.at_most("Y_n Y_n^-1 = I", norm2(y_n * y_inv - Matrix::identity(bot)), 1e-9);

  Matrix r_fwd(d, top);
  r_fwd.set_block(0, 0, pj.a + pj.b * w - x_n);
  r_fwd.set_block(top, 0, pj.c + pj.d * w - xi * x_n);
  out.below("forward graph invariance", norm2(r_fwd) * norm2(k_inv), 1e-8);
  Matrix r_bwd(d, bot);
  r_bwd.set_block(0, 0, pk.a * eta + pk.b - eta_hat * y_inv);
  r_bwd.set_block(top, 0, pk.c * eta + pk.d - y_inv);
  out.below("backward graph invariance", norm2(r_bwd) * norm2(j), 1e-8);

  const double coupling = std::exp(2 * std::log(gamma) + log_rn);
  const double trans_bound = coupling < 1.0 ? std::pow(1.0 - coupling, std::min(s.top, s.bottom)) : 0.0;
  const double trans = std::abs(determinant(Matrix::identity(top) - eta * xi));
  out.add("transversality |det(I - eta xi)|", trans_bound > 0.0 && trans >= trans_bound * (1 - 1e-12),
          trans, trans_bound);
  out.below("||X_n - A(J0)|| < delta", norm2(x_n - pj0.a), delta);
  out.below("||Y_n^-1 - D(J0^-1)|| < delta", norm2(y_inv - pk0.d), delta);

  const ScaledSpectrum top_spec = product_spectrum(x_n, top_blocks, n);
  const ScaledSpectrum bot_spec = product_spectrum(y_n, bot_blocks, n);
  const ScaledSpectrum direct = product_spectrum(j, vb, n);
  out.below("sigma(J V^n) = sigma(X_n A(V)^n) u sigma(Y_n D(V)^n)",
            max_relative_mismatch(union_of({top_spec, bot_spec}), direct), 1e-6);
  out.add("domination min|sigma top| > max|sigma bottom|", min_log(top_spec) > max_log(bot_spec),
          min_log(top_spec) - max_log(bot_spec));
}

void verify_cascade(const Json& params, const Json& result, const Instance& in, Lines& out) {
  const BlockStructure& s = in.structure;
  const int m = s.levels();
  const double eps0 = jf::number(params, "eps0");
  std::vector<double> delta, beta;
  for (const Json& x : jf::get(params, "delta")) delta.push_back(x.get<double>());
  for (const Json& x : jf::get(params, "beta")) beta.push_back(x.get<double>());
  const std::int64_t n0 = jf::integer(params, "n0");
  bool chain = static_cast<int>(delta.size()) == m - 1 && static_cast<int>(beta.size()) == m - 1;
  for (std::size_t i = 0; chain && i < delta.size(); ++i)
    chain = delta[i] > 0.0 && beta[i] > 0.0 && delta[i] < (i + 1 < delta.size() ? delta[i + 1] : eps0);
  if (!out.add("0 < delta_1 < ... < delta_{m-1} < eps0", chain)) return;

  const std::int64_t n = jf::integer(result, "n");
  const Matrix l_k = matrix_from_json(jf::get(result, "L_k"));
  const Json& levels = jf::get(result, "levels");
  out.below("||L_k - L|| < beta_1", norm2(l_k - in.l), beta[0]);
  out.add("n >= n0", n >= n0, static_cast<double>(n), static_cast<double>(n0));
  if (!out.add("one level per block", levels.is_array() && static_cast<int>(levels.size()) == m)) return;

  std::vector<Matrix> refs;
  VerifyReport scratch;
  Lines scratch_lines(scratch);
  l_conditions(in, scratch_lines, &refs);
  if (!out.add("references of L computable", static_cast<int>(refs.size()) == m)) return;

  std::vector<ScaledSpectrum> parts;
  std::optional<Matrix> prev_y;
  for (int j = 1; j <= m; ++j) {
    const Json& lv = levels[static_cast<std::size_t>(j - 1)];
    const Matrix x = matrix_from_json(jf::get(lv, "X"));
    const auto sz = static_cast<std::size_t>(s.size(j));
    if (!out.add(level_name("X shape, level", j), x.rows() == sz && x.cols() == sz)) return;
    out.below(level_name("||X - reference|| < eps0, level", j), norm2(x - refs[j - 1]), eps0);
    if (j == m && prev_y) out.add("X^(m) = Y^(m-1)", *prev_y == x);
    if (lv.contains("Y")) prev_y = matrix_from_json(lv["Y"]);
    const ScaledSpectrum spec = product_spectrum(x, slice(in.blocks, j - 1, j), n);
    out.below(level_name("recorded spectrum of X T_j^n, level", j),
              max_relative_mismatch(spectrum_from_json(jf::get(lv, "spectrum")), spec), 1e-9);
    parts.push_back(spec);
  }
  for (int j = 1; j < m; ++j) {
    out.add(level_name("domination between levels", j) + " and " + std::to_string(j + 1),
            min_log(parts[j - 1]) > max_log(parts[j]), min_log(parts[j - 1]) - max_log(parts[j]));
  }
  const ScaledSpectrum direct = product_spectrum(l_k, in.blocks, n);
  const ScaledSpectrum joined = union_of(parts);
  out.below("union of level spectra = sigma(L_k T^n)", max_relative_mismatch(joined, direct), 1e-6);
  out.below("recorded spectrum = sigma(L_k T^n)",
            max_relative_mismatch(spectrum_from_json(jf::get(result, "spectrum")), direct), 1e-6);
  double log_det = 0.0;
  for (const auto& e : joined) log_det += e.log_abs;
  double want = std::log(std::abs(determinant(l_k)));
  for (const auto& b : in.blocks) want += static_cast<double>(n) * b.size * b.log_abs();
  out.at_most("determinant conserved", std::abs(log_det - want), 1e-8 * std::max(1.0, std::abs(want)));
}

void verify_search(const Json& params, const Json& run, const Json& report, const Instance& in,
                   Lines& out) {
  const std::int64_t a = jf::integer(run, "a"), b = jf::integer(run, "b");
  const auto count = static_cast<std::size_t>(jf::integer(run, "count"));
  const std::int64_t n_max = jf::integer(run, "n_max");
  const double gap_tol = jf::number(run, "gap_tol");
  const std::int64_t first = std::max(jf::integer(params, "n0"), jf::integer(params, "k0"));
  out.add("report progression matches the run",
          jf::integer(report, "a") == a && jf::integer(report, "b") == b);
  const Json& hits = jf::get(report, "hits");
  if (!out.add("at least count hits", hits.is_array() && hits.size() >= count,
               hits.is_array() ? static_cast<double>(hits.size()) : 0.0, static_cast<double>(count)))
    return;
  const double l_norm = norm2(in.l);
  // L_n is a rounded product L (I + c rho^n G); once c rho^n drops below the
  // unit roundoff the stored difference is rounding alone.
  const double rounding = 4.0 * static_cast<double>(in.l.rows()) *
                          std::numeric_limits<double>::epsilon() * in.l.frobenius_norm();
  std::int64_t prev = -1;
  for (const Json& h : hits) {
    const std::int64_t n = jf::integer(h, "n");
    const std::int64_t e = jf::integer(h, "exponent");
    const std::string tag = "hit n = " + std::to_string(n) + ": ";
    out.add(tag + "n increasing", n > prev);
    prev = n;
    out.add(tag + "exponent = a n + b", e == a * n + b, static_cast<double>(e));
    out.add(tag + "max(n0, k0) <= n <= n_max", n >= first && n <= n_max, static_cast<double>(n));
    const Matrix l_n = matrix_from_json(jf::get(h, "L_n"));
    if (!out.add(tag + "L_n shape", l_n.rows() == in.l.rows() && l_n.cols() == in.l.cols())) continue;
    const double bound =
        l_norm * in.c * std::exp(static_cast<double>(n) * std::log(in.rho)) * (1 + 1e-12) + rounding;
    out.at_most(tag + "||L_n - L|| <= ||L|| c rho^n + rounding", norm2(l_n - in.l), bound);
    const ScaledSpectrum spec = product_spectrum(l_n, in.blocks, e);
    const RealSimpleReport rs = real_simple_report(spec, gap_tol);
    out.add(tag + "L_n T^(an+b) real with distinct moduli", rs.real_simple && rs.min_gap >= gap_tol,
            rs.min_gap, gap_tol);
    out.below(tag + "recorded spectrum agrees",
              max_relative_mismatch(spectrum_from_json(jf::get(h, "spectrum")), spec), 1e-9);
  }
}

void verify_body(const std::string& kind, const Json& j, Lines& out) {
  if (kind == "split") {
    verify_split(j, out);
    return;
  }
  const bool conditions_only = kind == "conditions";
  const std::optional<Instance> in =
      check_instance(kind == "instance" ? j : jf::get(j, "instance"), out, !conditions_only);
  if (!in) return;
  if (kind == "instance") return;
  if (conditions_only) {
    VerifyReport scratch;
    Lines quiet(scratch);
    const bool re = l_conditions(*in, quiet, nullptr);
    const bool recorded = jf::boolean(jf::get(j, "report"), "passed");
    out.add("recorded verdict matches recomputation", re == recorded, re ? 1.0 : 0.0,
            recorded ? 1.0 : 0.0);
    return;
  }
  if (kind == "cascade") {
    verify_cascade(jf::get(j, "parameters"), jf::get(j, "result"), *in, out);
  } else if (kind == "search") {
    verify_search(jf::get(j, "parameters"), jf::get(j, "run"), jf::get(j, "report"), *in, out);
  } else if (kind == "proof") {
    out.add("recorded conditions passed", jf::boolean(jf::get(j, "conditions"), "passed"));
    verify_cascade(jf::get(j, "parameters"), jf::get(j, "sample"), *in, out);
    verify_search(jf::get(j, "parameters"), jf::get(j, "run"), jf::get(j, "search"), *in, out);
  } else {
    out.add("known artifact kind: " + kind, false);
  }
}

}  // namespace

const VerifyLine* VerifyReport::first_failure() const {
  for (const auto& l : lines)
    if (!l.passed) return &l;
  return nullptr;
}

VerifyReport verify_artifact(const Json& artifact) {
  VerifyReport rep;
  Lines out(rep);
  try {
    const bool format = artifact.is_object() && artifact.value("format", "") == kArtifactFormat &&
                        artifact.value("version", -1) == kArtifactVersion;
    if (out.add("format and version", format)) {
      rep.kind = jf::get(artifact, "kind").get<std::string>();
      verify_body(rep.kind, artifact, out);
    }
  } catch (const std::exception& e) {
    out.add(std::string("artifact readable: ") + e.what(), false);
  }
  rep.passed = !rep.lines.empty() && rep.first_failure() == nullptr;
  return rep;
}

VerifyReport verify_artifact_text(std::string_view text) {
  VerifyReport rep;
  Lines out(rep);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    out.add(std::string("parses as JSON: ") + e.what(), false);
    return rep;
  }
  const bool canonical = canonical_text(j) == text;
  out.add("canonical serialization", canonical);
  const bool digest = j.is_object() && j.contains("digest") && j["digest"].is_string() &&
                      j["digest"].get<std::string>() == artifact_digest(j);
  out.add("digest matches", digest);
  if (!canonical || !digest) return rep;
  VerifyReport inner = verify_artifact(j);
  rep.kind = inner.kind;
  rep.lines.insert(rep.lines.end(), inner.lines.begin(), inner.lines.end());
  rep.passed = inner.passed;
  return rep;
}

}  // namespace spectral_cascade
