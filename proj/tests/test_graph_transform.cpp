#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spectral_cascade/error.hpp"
#include "spectral_cascade/graph_transform.hpp"
#include "spectral_cascade/product_spectrum.hpp"

namespace sc = spectral_cascade;

namespace {

using sc::DiagonalBlock;
using sc::Matrix;

std::vector<DiagonalBlock> scalars(std::initializer_list<double> values) {
  std::vector<DiagonalBlock> out;
  for (double v : values) out.push_back(DiagonalBlock::scalar(v));
  return out;
}

sc::SplitProblem diagonal_problem(Matrix j0, double delta) {
  auto blocks = scalars({4.0, 1.0, 0.5});
  return {sc::block_diagonal(blocks), std::move(j0), {1, 2}, delta, blocks};
}

Matrix ones_perturbed_identity() {
  Matrix j = Matrix::identity(3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) j(r, c) += 0.1;
  return j;
}

Matrix random_in_ball(std::mt19937_64& rng, const Matrix& center, double radius) {
  Matrix e = oracle::random_matrix(rng, center.rows(), center.cols());
  std::uniform_real_distribution<double> u(0.0, 0.999);
  return center + e * (u(rng) * radius / oracle::norm2(e));
}

// Test-side transcription of phi: every power by plain repeated multiplication.
Eigen::MatrixXd phi_oracle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& j,
                           const Eigen::MatrixXd& v, int top, int n) {
  const int bot = static_cast<int>(j.rows()) - top;
  const Eigen::MatrixXd a = j.topLeftCorner(top, top);
  const Eigen::MatrixXd b = j.topRightCorner(top, bot);
  const Eigen::MatrixXd c = j.bottomLeftCorner(bot, top);
  const Eigen::MatrixXd d = j.bottomRightCorner(bot, bot);
  const Eigen::MatrixXd av_inv = v.topLeftCorner(top, top).inverse();
  const Eigen::MatrixXd dv = v.bottomRightCorner(bot, bot);
  Eigen::MatrixXd dn = Eigen::MatrixXd::Identity(bot, bot);
  Eigen::MatrixXd an = Eigen::MatrixXd::Identity(top, top);
  for (int k = 0; k < n; ++k) {
    dn = dn * dv;
    an = an * av_inv;
  }
  const Eigen::MatrixXd a_inv = a.inverse();
  return c * a_inv + (d - u * b) * dn * u * an * a_inv;
}

}  // namespace

TEST(Hypotheses, DiagonalDominatedPasses) {
  const auto rep = sc::check_hypotheses(diagonal_problem(Matrix::identity(3), 0.1));
  EXPECT_TRUE(rep.passed);
  EXPECT_DOUBLE_EQ(rep.rho, 0.25);
}

TEST(Hypotheses, ReversedDominationFails) {
  auto blocks = scalars({1.0, 2.0, 3.0});
  const sc::SplitProblem p{sc::block_diagonal(blocks), Matrix::identity(3), {1, 2}, 0.1, blocks};
  const auto rep = sc::check_hypotheses(p);
  EXPECT_FALSE(rep.passed);
  EXPECT_DOUBLE_EQ(rep.rho, 3.0);
}

TEST(Hypotheses, RotationBlockOnTop) {
  std::vector<DiagonalBlock> blocks{DiagonalBlock::rotation(2.0, std::sqrt(2.0) - 1.0),
                                    DiagonalBlock::scalar(0.5)};
  const sc::SplitProblem p{sc::block_diagonal(blocks), Matrix::identity(3), {2, 1}, 0.1, blocks};
  const auto rep = sc::check_hypotheses(p);
  EXPECT_TRUE(rep.passed);
  EXPECT_NEAR(rep.rho, 0.25, 1e-15);
}

TEST(Hypotheses, SingularCornerReported) {
  Matrix j0{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}};  // A(J0) = 0
  const auto rep = sc::check_hypotheses(diagonal_problem(j0, 0.1));
  EXPECT_FALSE(rep.passed);
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name == "A(J0) invertible") found = !c.passed;
  EXPECT_TRUE(found);
  EXPECT_THROW(sc::derive_constants(diagonal_problem(j0, 0.1)), sc::Error);
}

TEST(Constants, InequalitiesTightAtThresholds) {
  Matrix j0{{1.5, 0, 0}, {0, 1.0, 0.2}, {0, 0.1, 1.0}};
  const auto p = diagonal_problem(j0, 0.2);
  const auto k = sc::derive_constants(p);
  const double a = k.alpha, g = k.gamma, r = k.rho;
  EXPECT_DOUBLE_EQ(g, 2.0 * a);
  const auto pw = [&](std::int64_t n) { return std::pow(r, static_cast<double>(n)); };
  const auto c1 = [&](std::int64_t n) { return a + a * a * g * (1 + g) * pw(n) <= g; };
  const auto c2 = [&](std::int64_t n) { return a * a * (1 + 2 * g) * pw(n) < 1; };
  const auto c3 = [&](std::int64_t n) { return g * a * pw(n) < k.delta / 2; };
  for (auto [n, cond] : {std::pair{k.n1, std::function<bool(std::int64_t)>(c1)},
                         std::pair{k.n2, std::function<bool(std::int64_t)>(c2)},
                         std::pair{k.n3, std::function<bool(std::int64_t)>(c3)}}) {
    EXPECT_GE(n, 1);
    EXPECT_TRUE(cond(n));
    EXPECT_TRUE(cond(n + 7));
    if (n > 1) EXPECT_FALSE(cond(n - 1)) << n;
  }
  EXPECT_GE(k.n0, std::max({k.n1, k.n2, k.n3}));
  // alpha dominates the block norms at the centre.
  const auto pj = sc::partition(j0, {1, 2});
  EXPECT_GE(a, oracle::norm2(pj.d));
  EXPECT_GE(a, oracle::norm2(sc::invert(pj.a)));
  EXPECT_GE(a, oracle::norm2(pj.c * sc::invert(pj.a)));
}

TEST(Constants, BetaBallKeepsBlocksWithinHalfDelta) {
  Matrix j0 = ones_perturbed_identity();
  const auto p = diagonal_problem(j0, 0.15);
  const auto k = sc::derive_constants(p);
  const auto p0 = sc::partition(j0, {1, 2});
  const auto k0 = sc::partition(sc::invert(j0), {1, 2});
  std::mt19937_64 rng(11);
  for (int s = 0; s < 200; ++s) {
    const Matrix j = random_in_ball(rng, j0, k.beta);
    const auto pj = sc::partition(j, {1, 2});
    const auto pk = sc::partition(sc::invert(j), {1, 2});
    ASSERT_LT(oracle::norm2(pj.a - p0.a), k.delta / 2);
    ASSERT_LT(oracle::norm2(pk.d - k0.d), k.delta / 2);
    const Matrix a_inv = sc::invert(pj.a);
    const Matrix dk_inv = sc::invert(pk.d);
    for (const Matrix& m : {pj.d, a_inv, pj.b, Matrix(pj.c * a_inv), pk.a, pk.c, dk_inv,
                            Matrix(pk.b * dk_inv)}) {
      ASSERT_LE(oracle::norm2(m), k.alpha);
    }
  }
}

TEST(Constants, ThresholdsGrowLikeInverseLogRho) {
  const auto thresholds = [](double rho) {
    auto blocks = scalars({1.0, rho, rho});
    const sc::SplitProblem p{sc::block_diagonal(blocks), Matrix::identity(3), {1, 2}, 0.1, blocks};
    return sc::derive_constants(p);
  };
  const auto k9 = thresholds(0.9);
  const auto k99 = thresholds(0.99);
  const double expect = std::log(0.9) / std::log(0.99);
  for (auto [lo, hi] : {std::pair{k9.n1, k99.n1}, std::pair{k9.n2, k99.n2},
                        std::pair{k9.n3, k99.n3}}) {
    EXPECT_GT(hi, lo);
    const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
    EXPECT_GT(ratio, 0.8 * expect);
    EXPECT_LT(ratio, 1.2 * expect);
  }
}

TEST(Constants, DoublingDeltaNeverRaisesN3) {
  for (double delta : {0.01, 0.05, 0.1, 0.2}) {
    const auto a = sc::derive_constants(diagonal_problem(ones_perturbed_identity(), delta));
    const auto b = sc::derive_constants(diagonal_problem(ones_perturbed_identity(), 2 * delta));
    EXPECT_LE(b.n3, a.n3) << delta;
  }
}

TEST(Constants, DeltaBeyondDominationRejected) {
  // smin(A(J0)) = 1, so delta = 1 leaves no room for the spectral gap.
  EXPECT_THROW(sc::derive_constants(diagonal_problem(Matrix::identity(3), 1.0)), sc::Error);
}

TEST(Phi, ZeroArgumentGivesCAinv) {
  const Matrix j = ones_perturbed_identity();
  const auto p = diagonal_problem(j, 0.1);
  const auto powers = sc::SplitPowers::compute(p, 5);
  const auto pj = sc::partition(j, {1, 2});
  const Matrix got = sc::phi_apply(Matrix(2, 1), j, powers, {1, 2});
  EXPECT_LT(oracle::max_abs_diff(got, pj.c * sc::invert(pj.a)), 1e-15);
}

TEST(Phi, BlockDiagonalZero) {
  Matrix j{{2, 0, 0}, {0, 1, 0.3}, {0, -0.2, 1}};
  const auto p = diagonal_problem(j, 0.1);
  const Matrix got = sc::phi_apply(Matrix(2, 1), j, sc::SplitPowers::compute(p, 3), {1, 2});
  EXPECT_EQ(got, Matrix(2, 1));
}

TEST(Phi, DualImplementation) {
  std::mt19937_64 rng(5);
  Matrix v{{3.0, 0.4, 0}, {-0.2, 2.5, 0}, {0, 0, 0.7}};
  for (int trial = 0; trial < 10; ++trial) {
    Matrix j = Matrix::identity(3) + oracle::random_matrix(rng, 3, 3, -0.3, 0.3);
    Matrix u = oracle::random_matrix(rng, 1, 2);
    for (int n : {0, 1, 4, 9}) {
      const Matrix got = sc::phi_apply(u, j, v, {2, 1}, n);
      const Eigen::MatrixXd want =
          phi_oracle(oracle::to_eigen(u), oracle::to_eigen(j), oracle::to_eigen(v), 2, n);
      const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
      EXPECT_LT(oracle::max_abs_diff(got, oracle::from_eigen(want)), 1e-12 * scale);
    }
  }
}

TEST(Phi, NonBlockDiagonalVRejected) {
  Matrix v{{4, 0.1, 0}, {0, 1, 0}, {0, 0, 0.5}};
  EXPECT_THROW(sc::phi_apply(Matrix(2, 1), Matrix::identity(3), v, {1, 2}, 2), sc::Error);
}

TEST(SolveXi, BlockDiagonalExactZero) {
  Matrix j{{1.2, 0, 0}, {0, 1, 0.3}, {0, -0.2, 1}};
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  const auto xi = sc::solve_xi(p, j, k.n0);
  EXPECT_EQ(xi.value, Matrix(2, 1));
  EXPECT_EQ(sc::solve_eta(p, j, k.n0), Matrix(1, 2));
}

TEST(SolveXi, FixedPointResidualAndBound) {
  const Matrix j = ones_perturbed_identity();
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  const auto xi = sc::solve_xi(p, j, k.n0);
  const auto powers = sc::SplitPowers::compute(p, k.n0);
  const double res = (sc::phi_apply(xi.value, j, powers, {1, 2}) - xi.value).frobenius_norm();
  EXPECT_LT(res, 1e-12 * std::max(1.0, xi.value.frobenius_norm()));
  EXPECT_LE(oracle::norm2(xi.value), k.gamma);
}

TEST(SolveXi, LipschitzProbe) {
  const Matrix j = ones_perturbed_identity();
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  std::mt19937_64 rng(3);
  for (std::int64_t n : {std::max(k.n1, k.n2), k.n0, k.n0 + 4}) {
    const auto powers = sc::SplitPowers::compute(p, n);
    const double bound = k.alpha * k.alpha * (1 + 2 * k.gamma) * std::pow(k.rho, n);
    ASSERT_LT(bound, 1.0);
    for (int s = 0; s < 50; ++s) {
      Matrix u = random_in_ball(rng, Matrix(2, 1), k.gamma);
      Matrix w = random_in_ball(rng, Matrix(2, 1), k.gamma);
      const double lip = oracle::norm2(sc::phi_apply(u, j, powers, {1, 2}) -
                                       sc::phi_apply(w, j, powers, {1, 2})) /
                         oracle::norm2(u - w);
      EXPECT_LE(lip, bound * (1 + 1e-12));
    }
  }
}

TEST(SolveXi, UniqueFromFiveStarts) {
  const Matrix j = ones_perturbed_identity();
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  const Matrix ref = sc::solve_xi(p, j, k.n0).value;
  std::mt19937_64 rng(17);
  for (int s = 0; s < 5; ++s) {
    sc::FixedPointOptions opts;
    opts.start = random_in_ball(rng, Matrix(2, 1), k.gamma);
    const Matrix got = sc::solve_xi(p, j, k.n0, opts).value;
    EXPECT_LT(oracle::max_abs_diff(got, ref), 1e-10);
  }
}

TEST(SolveXi, DivergentIterationReported) {
  // Far outside the constants: n = 0 makes the operator expansive here.
  Matrix j{{0.05, 3, 3}, {3, 1, 0}, {3, 0, 1}};
  auto blocks = scalars({1.0, 0.99, 0.99});
  const sc::SplitProblem p{sc::block_diagonal(blocks), j, {1, 2}, 0.01, blocks};
  sc::FixedPointOptions opts;
  opts.max_iterations = 50;
  try {
    (void)sc::solve_xi(p, j, 0, opts);
    FAIL() << "expected NoConvergence";
  } catch (const sc::Error& e) {
    EXPECT_EQ(e.kind(), sc::ErrorKind::kNoConvergence);
  }
}

TEST(SolveEta, BackwardInvarianceAndDecay) {
  const Matrix j = ones_perturbed_identity();
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  for (std::int64_t n = k.n0; n <= k.n0 + 10; ++n) {
    const Matrix eta = sc::solve_eta(p, j, n);
    EXPECT_LE(oracle::norm2(eta) / std::pow(k.rho, n), k.gamma) << n;
    // (J V^n)^{-1} (eta y, y) must again have the form (eta y', y').
    const Eigen::MatrixXd m =
        (oracle::to_eigen(j) * oracle::to_eigen(sc::block_diagonal_power(p.v_blocks, n).value()))
            .inverse();
    Eigen::MatrixXd g(3, 2);
    g.topRows(1) = oracle::to_eigen(eta);
    g.bottomRows(2) = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd img = m * g;
    const Eigen::MatrixXd bottom = img.bottomRows(2);
    const Eigen::MatrixXd resid = img.topRows(1) - oracle::to_eigen(eta) * bottom;
    EXPECT_LT(resid.cwiseAbs().maxCoeff(), 1e-8 * m.norm()) << n;
  }
}

TEST(InvariantPair, BlockDiagonalDecoupled) {
  Matrix j{{1.2, 0, 0}, {0, 1, 0.3}, {0, -0.2, 1}};
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  const auto cert = sc::invariant_pair(p, k, j, k.n0);
  const auto powers = sc::SplitPowers::compute(p, k.n0);
  const auto pj = sc::partition(j, {1, 2});
  EXPECT_LT(oracle::max_abs_diff(cert.x_n, pj.a), 1e-15);
  EXPECT_LT(oracle::max_abs_diff(cert.y_n, pj.d), 1e-14);
  const Matrix phi_want = pj.a * powers.a_pow.mantissa;
  const sc::ScaledMatrix phi = sc::phi_matrix(cert, powers);
  EXPECT_LT(oracle::max_abs_diff(phi.mantissa, phi_want), 1e-15);
  EXPECT_DOUBLE_EQ(phi.log_scale, powers.a_pow.log_scale);
  EXPECT_EQ(cert.xi, Matrix(2, 1));
  EXPECT_EQ(cert.eta, Matrix(1, 2));
  const auto rep = sc::verify_certificate(cert, p, k);
  for (const auto& it : rep.items) EXPECT_TRUE(it.passed) << it.name;
}

TEST(InvariantPair, SpectrumUnionMatchesDirectProduct) {
  std::mt19937_64 rng(23);
  const Matrix j0 = ones_perturbed_identity();
  const auto p = diagonal_problem(j0, 0.1);
  const auto k = sc::derive_constants(p);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix j = random_in_ball(rng, j0, k.beta);
    for (std::int64_t n : {k.n0, k.n0 + 13, 4 * k.n0}) {
      const auto cert = sc::invariant_pair(p, k, j, n);
      const auto powers = sc::SplitPowers::compute(p, n);
      const sc::ScaledMatrix phi = sc::phi_matrix(cert, powers);
      auto top = sc::scale_spectrum(sc::to_scaled(sc::eigenvalues(phi.mantissa)), phi.log_scale);
      // psi^{-1} = Y_n D(V)^n
      auto bot = sc::scale_spectrum(
          sc::to_scaled(sc::eigenvalues(cert.y_n * powers.d_pow.mantissa)), powers.d_pow.log_scale);
      // Domination between the two pieces.
      double min_top = 1e300, max_bot = -1e300;
      for (const auto& e : top) min_top = std::min(min_top, e.log_abs);
      for (const auto& e : bot) max_bot = std::max(max_bot, e.log_abs);
      EXPECT_GT(min_top, max_bot);
      top.insert(top.end(), bot.begin(), bot.end());
      const auto direct = sc::product_spectrum(j, p.v_blocks, n);
      EXPECT_LT(sc::max_relative_mismatch(top, direct), 1e-6) << n;
    }
  }
}

TEST(InvariantPair, TransversalityDeterminant) {
  std::mt19937_64 rng(29);
  const Matrix j0 = ones_perturbed_identity();
  const auto p = diagonal_problem(j0, 0.1);
  const auto k = sc::derive_constants(p);
  const Matrix j = random_in_ball(rng, j0, k.beta);
  const auto cert = sc::invariant_pair(p, k, j, k.n0);
  Matrix full = Matrix::identity(3);
  full.set_block(0, 1, cert.eta);
  full.set_block(1, 0, cert.xi);
  const double det = oracle::to_eigen(full).determinant();
  EXPECT_GE(std::abs(det), 1.0 - k.gamma * k.gamma * std::pow(k.rho, k.n0));
  EXPECT_GT(std::abs(det), 0.0);
}

TEST(Verify, ProducedCertificatePasses) {
  std::mt19937_64 rng(31);
  const Matrix j0 = ones_perturbed_identity();
  const auto p = diagonal_problem(j0, 0.1);
  const auto k = sc::derive_constants(p);
  const auto cert = sc::assemble_certificate(p, random_in_ball(rng, j0, k.beta), k.n0 + 2);
  const auto rep = sc::verify_certificate(cert, p, k);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.first_failure(), nullptr);
  for (int item = 1; item <= 4; ++item) {
    EXPECT_TRUE(std::any_of(rep.items.begin(), rep.items.end(),
                            [&](const sc::CertificateItem& i) { return i.item == item; }));
  }
}

TEST(Verify, CorruptedXiFailsInvariance) {
  const Matrix j = ones_perturbed_identity();
  const auto p = diagonal_problem(j, 0.1);
  const auto k = sc::derive_constants(p);
  auto cert = sc::assemble_certificate(p, j, k.n0);
  cert.xi(0, 0) += 0.1;
  const auto rep = sc::verify_certificate(cert, p, k);
  EXPECT_FALSE(rep.passed);
  for (const auto& it : rep.items) {
    if (it.name == "forward graph invariance" || it.name == "xi fixed point") {
      EXPECT_FALSE(it.passed) << it.name;
    }
  }
  try {
    (void)sc::invariant_pair(p, k, j, k.n0);
  } catch (...) {
    FAIL() << "uncorrupted certificate must pass";
  }
}

TEST(Verify, BelowThresholdNamesTheItem) {
  Matrix j0 = ones_perturbed_identity();
  auto blocks = scalars({1.5, 1.0, 0.8});
  const sc::SplitProblem p{sc::block_diagonal(blocks), j0, {1, 2}, 0.1, blocks};
  const auto k = sc::derive_constants(p);
  ASSERT_GT(k.n0, 5);
  try {
    const auto cert = sc::assemble_certificate(p, j0, k.n0 - 5);
    const auto rep = sc::verify_certificate(cert, p, k);
    ASSERT_NE(rep.first_failure(), nullptr);
    const auto it = std::find_if(rep.items.begin(), rep.items.end(),
                                 [](const sc::CertificateItem& i) { return i.name == "n >= n0"; });
    ASSERT_NE(it, rep.items.end());
    EXPECT_FALSE(it->passed);
  } catch (const sc::Error& e) {
    // Below n0 the contraction is not guaranteed; non-convergence is a valid outcome.
    EXPECT_EQ(e.kind(), sc::ErrorKind::kNoConvergence);
  }
}

TEST(Properties, UniformThresholdOverBall) {
  std::mt19937_64 rng(37);
  const Matrix j0 = ones_perturbed_identity();
  const auto p = diagonal_problem(j0, 0.1);
  const auto k = sc::derive_constants(p);
  for (int s = 0; s < 50; ++s) {
    const Matrix j = random_in_ball(rng, j0, k.beta);
    const auto cert = sc::invariant_pair(p, k, j, k.n0);
    EXPECT_LE(oracle::norm2(cert.xi), k.gamma);
    EXPECT_LE(oracle::norm2(cert.eta), k.gamma * std::pow(k.rho, k.n0) * (1 + 1e-12));
  }
}

TEST(Properties, ForwardGraphInvarianceOnVectors) {
  std::mt19937_64 rng(41);
  std::vector<DiagonalBlock> blocks{DiagonalBlock::rotation(2.0, std::sqrt(2.0) - 1.0),
                                    DiagonalBlock::scalar(0.5)};
  Matrix j0 = Matrix::identity(3) + 0.05 * oracle::random_matrix(rng, 3, 3);
  const sc::SplitProblem p{sc::block_diagonal(blocks), j0, {2, 1}, 0.1, blocks};
  const auto k = sc::derive_constants(p);
  const std::int64_t n = k.n0;
  const auto cert = sc::invariant_pair(p, k, j0, n);
  const Eigen::MatrixXd jvn =
      oracle::to_eigen(j0) * oracle::to_eigen(sc::block_diagonal_power(blocks, n).value());
  const Eigen::MatrixXd phi =
      oracle::to_eigen(sc::phi_matrix(cert, sc::SplitPowers::compute(p, n)).value());
  const Eigen::MatrixXd xi = oracle::to_eigen(cert.xi);
  for (int s = 0; s < 20; ++s) {
    Eigen::VectorXd x = Eigen::VectorXd::Random(2).normalized();
    Eigen::VectorXd graph(3);
    graph << x, xi * x;
    const Eigen::VectorXd lhs = jvn * graph;
    Eigen::VectorXd rhs(3);
    rhs << phi * x, xi * phi * x;
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8 * jvn.norm());
  }
}

TEST(Properties, SeveralBottomModuliAtLargeExponent) {
  // D(V)^{-n} spans ~600 orders of magnitude; the certificate must stay exact.
  auto blocks = scalars({4.0, 1.2, 0.3});
  std::mt19937_64 rng(43);
  Matrix j0 = Matrix::identity(3) + 0.1 * oracle::random_matrix(rng, 3, 3);
  const sc::SplitProblem p{sc::block_diagonal(blocks), j0, {1, 2}, 0.1, blocks};
  const auto k = sc::derive_constants(p);
  for (std::int64_t n : {k.n0, std::int64_t{400}, std::int64_t{1000}}) {
    const auto cert = sc::invariant_pair(p, k, random_in_ball(rng, j0, k.beta), n);
    EXPECT_TRUE(cert.y_inv.all_finite());
  }
}
