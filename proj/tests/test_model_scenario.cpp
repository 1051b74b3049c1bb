#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spectral_cascade/blocks.hpp"
#include "spectral_cascade/decompositions.hpp"
#include "spectral_cascade/error.hpp"
#include "spectral_cascade/model.hpp"
#include "spectral_cascade/scenario.hpp"

namespace sc = spectral_cascade;

namespace {

using sc::BlockStructure;
using sc::Matrix;

sc::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const sc::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return sc::ErrorKind::kParse;
}

// Independent recomputation of the reference chain with Eigen inverses.
std::vector<Eigen::MatrixXd> reference_oracle(const Matrix& l, const BlockStructure& s) {
  std::vector<Eigen::MatrixXd> refs;
  Eigen::MatrixXd cur = oracle::to_eigen(l);
  refs.push_back(cur.topLeftCorner(s.size(1), s.size(1)));
  for (int j = 1; j < s.levels(); ++j) {
    const int keep = s.tail(j + 1);
    const Eigen::MatrixXd inv = cur.inverse();
    const Eigen::MatrixXd d = inv.bottomRightCorner(keep, keep);
    cur = d.inverse();
    refs.push_back(cur.topLeftCorner(s.size(j + 1), s.size(j + 1)));
  }
  return refs;
}

}  // namespace

TEST(Independence, SqrtTwoAndThreePass) {
  const auto rep = sc::check_rational_independence({std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0});
  EXPECT_TRUE(rep.independent);
  EXPECT_GT(rep.min_residual, 1e-12);
}

TEST(Independence, PlantedRelationFound) {
  // 3 theta_1 - 2 theta_2 = 1 up to rounding.
  const double t1 = std::sqrt(5.0) - 2.0;
  const auto rep = sc::check_rational_independence({t1, (3.0 * t1 - 1.0) / 2.0 + 1.0});
  EXPECT_FALSE(rep.independent);
  ASSERT_EQ(rep.witness.size(), 3u);
  const double r = static_cast<double>(rep.witness[0]) * t1 +
                   static_cast<double>(rep.witness[1]) * ((3.0 * t1 - 1.0) / 2.0 + 1.0) +
                   static_cast<double>(rep.witness[2]);
  EXPECT_LT(std::abs(r), 1e-10);
}

TEST(Independence, RationalAngleFails) {
  const auto rep = sc::check_rational_independence({0.25});
  EXPECT_FALSE(rep.independent);
  ASSERT_EQ(rep.witness.size(), 2u);
  EXPECT_EQ(std::abs(rep.witness[0]) % 4, 0);
}

TEST(Independence, PairRelationWithLargeCoefficientMeetInTheMiddle) {
  const double t1 = std::sqrt(7.0) - 2.0;
  // t2 = (1 + 4321 t1) / 97 - floor: a relation 97 t2 - 4321 t1 = integer.
  const double raw = (1.0 + 4321.0 * t1) / 97.0;
  const double t2 = raw - std::floor(raw);
  const auto rep = sc::check_rational_independence({t1, t2});
  EXPECT_FALSE(rep.independent);
}

TEST(RandomModel, ScalarsOnlyHasNoRotations) {
  const auto m = sc::random_model_T(BlockStructure({1, 1, 1}), {4, 2, 0.5}, 3);
  EXPECT_TRUE(m.rotation_angles().empty());
  EXPECT_EQ(m.t(), (Matrix{{4, 0, 0}, {0, 2, 0}, {0, 0, 0.5}}));
}

TEST(RandomModel, OneRotationBlock) {
  const auto m = sc::random_model_T(BlockStructure({1, 2}), {4, 0.5}, 3);
  ASSERT_EQ(m.rotation_angles().size(), 1u);
  const double th = m.rotation_angles()[0];
  const Matrix t = m.t();
  EXPECT_EQ(t(0, 0), 4.0);
  EXPECT_NEAR(t(1, 1), 0.5 * std::cos(2 * M_PI * th), 1e-15);
  EXPECT_NEAR(t(2, 1), 0.5 * std::sin(2 * M_PI * th), 1e-15);
  EXPECT_NEAR(t(1, 2), -0.5 * std::sin(2 * M_PI * th), 1e-15);
}

TEST(RandomModel, TwoRotationsIndependent) {
  const auto m = sc::random_model_T(BlockStructure({2, 2}), {3, 0.5}, 9);
  const auto th = m.rotation_angles();
  ASSERT_EQ(th.size(), 2u);
  EXPECT_TRUE(sc::check_rational_independence(th).independent);
  EXPECT_NE(th[0], th[1]);
}

TEST(RandomModel, RejectsIncreasingModuli) {
  EXPECT_EQ(kind_of([] { sc::random_model_T(BlockStructure({1, 2}), {0.5, 4}, 1); }),
            sc::ErrorKind::kInvalidArgument);
}

TEST(RandomModel, DeterministicInSeed) {
  const auto a = sc::random_model_T(BlockStructure({2, 2, 2}), {4, 1, 0.25}, 42);
  const auto b = sc::random_model_T(BlockStructure({2, 2, 2}), {4, 1, 0.25}, 42);
  EXPECT_EQ(a.blocks, b.blocks);
}

TEST(LConditions, IdentityFailsEverySingularValueCondition) {
  const BlockStructure s({2, 2});
  const auto rep = sc::check_L_conditions(Matrix::identity(4), s);
  EXPECT_FALSE(rep.passed);
  int failures = 0;
  for (const auto& line : rep.lines) {
    if (line.name.find("distinct singular values") != std::string::npos) {
      EXPECT_FALSE(line.passed) << line.name;
      EXPECT_EQ(line.margin, 0.0);
      ++failures;
    } else {
      EXPECT_TRUE(line.passed) << line.name;
    }
  }
  EXPECT_EQ(failures, 2);
  ASSERT_NE(rep.first_failure(), nullptr);
  EXPECT_EQ(rep.first_failure()->name, "A_1(L) has distinct singular values");
}

TEST(LConditions, DistinctDiagonalPasses) {
  const auto rep = sc::check_L_conditions(Matrix{{2, 0, 0}, {0, 1.5, 0}, {0, 0, 1}},
                                          BlockStructure({1, 2}));
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.first_failure(), nullptr);
}

TEST(LConditions, ScalarLevelsSkipSingularValueGap) {
  const auto rep = sc::check_L_conditions(Matrix::identity(3), BlockStructure({1, 1, 1}));
  EXPECT_TRUE(rep.passed);
  for (const auto& line : rep.lines)
    EXPECT_EQ(line.name.find("distinct singular values"), std::string::npos);
}

TEST(LConditions, MarginsMatchIndependentSvd) {
  std::mt19937_64 rng(5);
  const BlockStructure s({2, 1, 2});
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix l = Matrix::identity(5) + 0.4 * oracle::random_matrix(rng, 5, 5);
    const auto rep = sc::check_L_conditions(l, s);
    const auto refs = reference_oracle(l, s);
    const auto lib_refs = sc::level_references(l, s);
    ASSERT_EQ(lib_refs.size(), refs.size());
    for (std::size_t j = 0; j < refs.size(); ++j)
      EXPECT_LT((oracle::to_eigen(lib_refs[j]) - refs[j]).norm(), 1e-10);
    for (const auto& line : rep.lines) {
      if (line.name.find("distinct singular values") == std::string::npos) continue;
      const auto sv = oracle::singular_values(oracle::from_eigen(refs[line.level - 1]));
      EXPECT_NEAR(line.margin, sv[0] - sv[1], 1e-12) << line.name;
    }
  }
}

TEST(LConditions, SingularLReported) {
  Matrix l = Matrix::identity(3);
  l(2, 2) = 0.0;
  const auto rep = sc::check_L_conditions(l, BlockStructure({1, 2}));
  EXPECT_FALSE(rep.passed);
  EXPECT_EQ(rep.first_failure()->name, "L invertible");
  EXPECT_EQ(kind_of([&] { sc::level_references(l, BlockStructure({1, 2})); }),
            sc::ErrorKind::kConditionFailure);
}

TEST(Perturb, GenericInputUnchanged) {
  const Matrix l{{2, 0.1, 0}, {0, 1.5, 0.2}, {0.1, 0, 1}};
  const BlockStructure s({1, 2});
  ASSERT_TRUE(sc::check_L_conditions(l, s).passed);
  EXPECT_EQ(sc::perturb_to_generic(l, s, 0.01), l);
}

TEST(Perturb, IdentityBecomesGenericWithinStrength) {
  const BlockStructure s({2, 2});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Matrix l = sc::perturb_to_generic(Matrix::identity(4), s, 0.01, seed);
    const auto rep = sc::check_L_conditions(l, s);
    EXPECT_TRUE(rep.passed);
    for (const auto& line : rep.lines) EXPECT_GT(line.margin, 0.0);
    EXPECT_LE(oracle::norm2(l - Matrix::identity(4)), 0.01 * (1 + 1e-12));
  }
}

TEST(Perturb, MarginsScaleWithStrength) {
  const BlockStructure s({1, 2});
  const auto gap = [&](double strength) {
    const Matrix l = sc::perturb_to_generic(Matrix::identity(3), s, strength, 7);
    double g = INFINITY;
    for (const auto& line : sc::check_L_conditions(l, s).lines)
      if (line.name.find("distinct") != std::string::npos) g = std::min(g, line.margin);
    return g;
  };
  const double g1 = gap(1e-3), g2 = gap(1e-2), g3 = gap(1e-1);
  EXPECT_GT(g2 / g1, 3.0);
  EXPECT_LT(g2 / g1, 30.0);
  EXPECT_GT(g3 / g2, 3.0);
  EXPECT_LT(g3 / g2, 30.0);
}

TEST(Perturb, ZeroStrengthOnDegenerateInputExhausts) {
  EXPECT_EQ(kind_of([] { sc::perturb_to_generic(Matrix::identity(3), BlockStructure({1, 2}), 0.0); }),
            sc::ErrorKind::kPerturbationExhausted);
}

TEST(Nonresonance, TwoThreeMinimalMargin) {
  const auto rep = sc::nonresonance_report({2.0, 3.0}, 5);
  EXPECT_FALSE(rep.resonant);
  EXPECT_EQ(rep.witness, (std::vector<int>{-3, 2}));
  EXPECT_NEAR(rep.min_margin, std::abs(-3 * std::log(2.0) + 2 * std::log(3.0)), 1e-14);
  EXPECT_NEAR(rep.min_margin, 0.118, 5e-4);
}

TEST(Nonresonance, ExhaustiveBoxOracle) {
  // Plain scan of the full box, both signs.
  const std::vector<double> lam{2.0, 3.0};
  double best = INFINITY;
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      if (a != 0 || b != 0) best = std::min(best, std::abs(a * std::log(2.0) + b * std::log(3.0)));
  EXPECT_NEAR(sc::nonresonance_report({2.0, 3.0}, 5).min_margin, best, 1e-15);
}

TEST(Nonresonance, PowerOfTwoResonant) {
  const auto rep = sc::nonresonance_report({2.0, 4.0}, 5);
  EXPECT_TRUE(rep.resonant);
  EXPECT_EQ(rep.witness, (std::vector<int>{2, -1}));
  EXPECT_EQ(kind_of([] { sc::check_nonresonance({2.0, 4.0}, 5); }), sc::ErrorKind::kResonanceFound);
}

TEST(Nonresonance, ReciprocalResonant) {
  const auto rep = sc::nonresonance_report({2.0, 0.5}, 5);
  EXPECT_TRUE(rep.resonant);
  EXPECT_EQ(rep.witness, (std::vector<int>{1, 1}));
}

TEST(Nonresonance, ConjugatePairCountsOnce) {
  const std::complex<double> z = std::polar(0.5, 0.7);
  const auto rep = sc::nonresonance_report({3.0, z, std::conj(z)}, 4);
  EXPECT_EQ(rep.moduli.size(), 2u);
  EXPECT_FALSE(rep.resonant);
}

TEST(Nonresonance, PermutationInvariantMargin) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    sc::Spectrum s{u(rng), u(rng), u(rng)};
    const double m0 = sc::nonresonance_report(s, 4).min_margin;
    std::shuffle(s.begin(), s.end(), rng);
    EXPECT_NEAR(sc::nonresonance_report(s, 4).min_margin, m0, 1e-14);
  }
}

TEST(Nonresonance, ZeroEigenvalueRejected) {
  EXPECT_EQ(kind_of([] { sc::nonresonance_report({2.0, 0.0}, 3); }),
            sc::ErrorKind::kInvalidArgument);
}

TEST(Sequence, ZeroAmplitudeIsConstant) {
  auto inst = sc::generate_instance(3, BlockStructure({1, 2}), 4);
  inst.law.c = 0.0;
  for (std::int64_t n : {0, 1, 10, 1000}) EXPECT_EQ(sc::make_sequence_Ln(inst, n), inst.l);
}

TEST(Sequence, DecayAudit) {
  const auto inst = sc::generate_instance(4, BlockStructure({2, 2}), 11);
  ASSERT_GT(inst.law.c, 0.0);
  double prev = oracle::norm2(sc::make_sequence_Ln(inst, 0) - inst.l);
  for (std::int64_t n = 1; n <= 100; ++n) {
    const double cur = oracle::norm2(sc::make_sequence_Ln(inst, n) - inst.l);
    EXPECT_LE(cur, inst.law.rho * prev + 1e-15) << n;
    EXPECT_LE(cur, sc::sequence_distance_bound(inst, n)) << n;
    if (n < 40) EXPECT_LT(cur, prev) << n;
    prev = cur;
  }
}

TEST(Sequence, BitIdenticalReplay) {
  const auto a = sc::generate_instance(5, BlockStructure({1, 2, 2}), 21);
  const auto b = sc::generate_instance(5, BlockStructure({1, 2, 2}), 21);
  EXPECT_EQ(a.l, b.l);
  EXPECT_EQ(a.model.blocks, b.model.blocks);
  for (std::int64_t n : {0, 3, 17}) EXPECT_EQ(sc::make_sequence_Ln(a, n), sc::make_sequence_Ln(b, n));
}

TEST(Sequence, NegativeIndexRejected) {
  const auto inst = sc::generate_instance(3, BlockStructure({1, 2}), 4);
  EXPECT_EQ(kind_of([&] { sc::make_sequence_Ln(inst, -1); }), sc::ErrorKind::kInvalidArgument);
}

TEST(Generate, OneTwoPassesAllChecks) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = sc::generate_instance(3, BlockStructure({1, 2}), seed);
    ASSERT_NO_THROW(inst.model.validate());
    const auto rep = sc::check_L_conditions(inst.l, inst.structure());
    EXPECT_TRUE(rep.passed);
    for (const auto& line : rep.lines)
      if (line.level > 0) EXPECT_GE(line.margin, 0.3) << line.name;
    EXPECT_TRUE(sc::check_rational_independence(inst.model.rotation_angles()).independent);
    for (std::int64_t n : {0, 5, 50})
      EXPECT_TRUE(sc::check_L_conditions(sc::make_sequence_Ln(inst, n), inst.structure()).passed);
  }
}

TEST(Generate, ThreeRotationsIndependent) {
  const auto inst = sc::generate_instance(6, BlockStructure({2, 2, 2}), 3);
  EXPECT_TRUE(sc::check_L_conditions(inst.l, inst.structure()).passed);
  const auto th = inst.model.rotation_angles();
  ASSERT_EQ(th.size(), 3u);
  EXPECT_TRUE(sc::check_rational_independence(th).independent);
  sc::Spectrum spec;
  for (const auto& b : inst.model.blocks) spec.push_back(b.abs_value());
  EXPECT_FALSE(sc::nonresonance_report(spec, 5).resonant);
}

TEST(Generate, InvalidSizesRejected) {
  EXPECT_THROW(
      {
        const BlockStructure s({3});
        sc::generate_instance(3, s, 1);
      },
      sc::Error);
  EXPECT_EQ(kind_of([] { sc::generate_instance(4, BlockStructure({1, 2}), 1); }),
            sc::ErrorKind::kInvalidArgument);
}
