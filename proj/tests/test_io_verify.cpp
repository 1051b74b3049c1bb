#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "spectral_cascade/codec.hpp"
#include "spectral_cascade/error.hpp"
#include "spectral_cascade/io.hpp"
#include "spectral_cascade/prove.hpp"
#include "spectral_cascade/scenario.hpp"
#include "spectral_cascade/verify.hpp"

namespace sc = spectral_cascade;

namespace {

using sc::BlockStructure;
using sc::Json;
using sc::Matrix;

sc::CascadeOptions with_sequence(const sc::InstanceSpec& inst) {
  sc::CascadeOptions co;
  co.sequence_distance_bound = [inst](std::int64_t k) { return sc::sequence_distance_bound(inst, k); };
  return co;
}

struct Produced {
  sc::InstanceSpec spec;
  Json instance, conditions, split, cascade, search, proof;
};

// Same calls the command-line front end makes.
Produced produce(const BlockStructure& s, std::uint64_t seed) {
  Produced p;
  p.spec = sc::generate_instance(s.dim(), s, seed);
  const sc::InstanceSpec& spec = p.spec;
  p.instance = sc::instance_artifact(spec);
  p.conditions = sc::conditions_artifact(spec, sc::check_L_conditions(spec.l, spec.structure()));

  sc::RunParameters run;
  const sc::ParameterCascade pc = sc::choose_parameters(spec.model, spec.l, run.eps0, with_sequence(spec));
  const sc::Stage& st = pc.stages.front();
  const sc::SplitCertificate cert =
      sc::invariant_pair(st.problem, st.constants, sc::make_sequence_Ln(spec, pc.k0), st.constants.n0);
  p.split = sc::split_artifact(st.problem, st.constants, cert, pc.k0);

  const sc::CascadeResult res = sc::cascade_decompose(sc::make_sequence_Ln(spec, pc.k0), pc.n0 + 3, spec.model, pc);
  p.cascade = sc::cascade_artifact(spec, pc, res, pc.k0, sc::polar_forms(res, spec.model, true));

  const sc::SequenceFn seq = [&spec](std::int64_t n) { return sc::make_sequence_Ln(spec, n); };
  sc::SearchOptions so;
  const sc::SearchReport rep = sc::find_subsequence(spec.model, seq, pc, run.a, run.b, run.count, run.n_max, so);
  p.search = sc::search_artifact(spec, pc, run, rep);
  p.proof = sc::proof_artifact(spec, run, sc::prove_instance(spec, run.eps0, run.a, run.b, run.count, run.n_max));
  return p;
}

const Produced& fixture() {
  static const Produced p = produce(BlockStructure({1, 2}), 7);
  return p;
}

// Applies `edit` to the body and re-seals, so only the semantic checks can object.
template <class F>
Json resealed(const Json& art, F edit) {
  Json body = art;
  const std::string kind = body["kind"];
  for (const char* k : {"format", "kind", "version", "digest"}) body.erase(k);
  edit(body);
  return sc::make_artifact(kind, std::move(body));
}

std::string failure_of(const sc::VerifyReport& r) {
  const sc::VerifyLine* f = r.first_failure();
  return f ? f->name : std::string();
}

void expect_verifies(const Json& art) {
  const sc::VerifyReport r = sc::verify_artifact_text(sc::canonical_text(art));
  EXPECT_TRUE(r.passed) << art["kind"] << ": " << failure_of(r);
}

void expect_rejected(const Json& art, const std::string& line_fragment) {
  const sc::VerifyReport r = sc::verify_artifact_text(sc::canonical_text(art));
  EXPECT_FALSE(r.passed);
  EXPECT_NE(failure_of(r).find(line_fragment), std::string::npos) << "first failure: " << failure_of(r);
}

Json& entry(Json& matrix_json, std::size_t r, std::size_t c) { return matrix_json["data"][r][c]; }

}  // namespace

TEST(Codec, MatrixRoundTripIsBitExact) {
  const double awkward[] = {0.1,
                            1.0 / 3.0,
                            -0.0,
                            1e-300,
                            std::numeric_limits<double>::denorm_min(),
                            std::numeric_limits<double>::max(),
                            -2.5e17,
                            std::nextafter(1.0, 2.0),
                            123456789.123456789};
  Matrix m(3, 3);
  for (std::size_t i = 0; i < 9; ++i) m.data()[i] = awkward[i];
  const Matrix back = sc::matrix_from_json(Json::parse(sc::matrix_to_json(m).dump()));
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(std::signbit(back.data()[i]), std::signbit(m.data()[i]));
    EXPECT_EQ(back.data()[i], m.data()[i]) << i;
  }
}

TEST(Codec, MatrixLayoutIsRowNested) {
  const Json j = sc::matrix_to_json(Matrix{{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(j, Json::parse(R"({"rows":2,"cols":3,"data":[[1.0,2.0,3.0],[4.0,5.0,6.0]]})"));
  const Matrix empty = sc::matrix_from_json(Json{{"rows", 0}, {"cols", 0}, {"data", Json::array()}});
  EXPECT_EQ(empty.rows(), 0u);
}

TEST(Codec, MatrixShapeValidated) {
  EXPECT_THROW(sc::matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", {{1, 2}, {3}}}}), sc::Error);
  EXPECT_THROW(sc::matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3, 4}}}), sc::Error);
  EXPECT_THROW(sc::matrix_from_json(Json{{"rows", 1}, {"cols", 1}, {"data", {{"x"}}}}), sc::Error);
  EXPECT_THROW(sc::matrix_from_json(Json::array()), sc::Error);
}

TEST(Codec, InstanceRoundTrip) {
  const sc::InstanceSpec& a = fixture().spec;
  const sc::InstanceSpec b = sc::instance_from_json(Json::parse(sc::instance_to_json(a).dump()));
  EXPECT_EQ(a.l, b.l);
  EXPECT_EQ(a.structure(), b.structure());
  ASSERT_EQ(a.model.blocks.size(), b.model.blocks.size());
  for (std::size_t i = 0; i < a.model.blocks.size(); ++i) {
    EXPECT_EQ(a.model.blocks[i].size, b.model.blocks[i].size);
    EXPECT_EQ(a.model.blocks[i].lambda, b.model.blocks[i].lambda);
    EXPECT_EQ(a.model.blocks[i].modulus, b.model.blocks[i].modulus);
    EXPECT_EQ(a.model.blocks[i].theta, b.model.blocks[i].theta);
  }
  EXPECT_EQ(a.law.c, b.law.c);
  EXPECT_EQ(a.law.rho, b.law.rho);
  EXPECT_EQ(a.law.seed, b.law.seed);
  EXPECT_EQ(a.progression.a, b.progression.a);
  EXPECT_EQ(a.progression.b, b.progression.b);
  for (std::int64_t n : {0, 5, 40}) EXPECT_EQ(sc::make_sequence_Ln(a, n), sc::make_sequence_Ln(b, n));
}

TEST(Codec, InstanceFromJsonRejectsInvalid) {
  Json j = sc::instance_to_json(fixture().spec);
  Json bad = j;
  bad["law"]["rho"] = 1.0;
  EXPECT_THROW(sc::instance_from_json(bad), sc::Error);
  bad = j;
  bad["progression"]["a"] = 0;
  EXPECT_THROW(sc::instance_from_json(bad), sc::Error);
  bad = j;
  bad["structure"]["sizes"] = {2, 1};
  EXPECT_THROW(sc::instance_from_json(bad), sc::Error);
}

TEST(Codec, CanonicalTextIsAFixedPoint) {
  for (const Json* art : {&fixture().instance, &fixture().split, &fixture().proof}) {
    const std::string text = sc::canonical_text(*art);
    EXPECT_EQ(sc::canonical_text(Json::parse(text)), text);
    EXPECT_EQ(text.back(), '\n');
  }
}

TEST(Codec, DigestCoversEveryField) {
  const Json& art = fixture().instance;
  EXPECT_EQ(art["digest"].get<std::string>(), sc::artifact_digest(art));
  EXPECT_EQ(art["digest"].get<std::string>().rfind("fnv1a64:", 0), 0u);
  Json other = art;
  other["law"]["seed"] = other["law"]["seed"].get<std::uint64_t>() + 1;
  EXPECT_NE(sc::artifact_digest(other), sc::artifact_digest(art));
  other = art;
  other["kind"] = "search";
  EXPECT_NE(sc::artifact_digest(other), sc::artifact_digest(art));
}

TEST(Codec, KnownFnvVectors) {
  EXPECT_EQ(sc::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(sc::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(sc::fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Codec, ReservedKeysRejected) {
  EXPECT_THROW(sc::make_artifact("instance", Json{{"digest", "x"}}), sc::Error);
  EXPECT_THROW(sc::make_artifact("instance", Json{{"format", "x"}}), sc::Error);
  EXPECT_THROW(sc::make_artifact("instance", Json::array()), sc::Error);
}

TEST(Codec, FileRoundTripAndDigestCheck) {
  const std::string path = ::testing::TempDir() + "sc_instance.json";
  sc::write_artifact(path, fixture().instance);
  EXPECT_EQ(sc::read_text_file(path), sc::canonical_text(fixture().instance));
  EXPECT_EQ(sc::read_artifact(path, true), fixture().instance);

  Json tampered = fixture().instance;
  tampered["law"]["c"] = 0.25;
  sc::write_text_file(path, sc::canonical_text(tampered));
  EXPECT_THROW(sc::read_artifact(path), sc::Error);

  Json bare = tampered;
  bare.erase("digest");
  sc::write_text_file(path, bare.dump());
  EXPECT_NO_THROW(sc::read_artifact(path));
  EXPECT_THROW(sc::read_artifact(path, true), sc::Error);
}

TEST(Verify, FreshArtifactsPass) {
  const Produced& p = fixture();
  for (const Json* art : {&p.instance, &p.conditions, &p.split, &p.cascade, &p.search, &p.proof}) {
    expect_verifies(*art);
  }
}

TEST(Verify, FreshArtifactsPassAcrossStructures) {
  for (const auto& sizes : {std::vector<int>{2, 1}, std::vector<int>{2, 2}, std::vector<int>{1, 1, 2}}) {
    const Produced p = produce(BlockStructure(sizes), 3);
    for (const Json* art : {&p.split, &p.cascade, &p.proof}) expect_verifies(*art);
  }
}

TEST(Verify, ReportKindAndLines) {
  const sc::VerifyReport r = sc::verify_artifact_text(sc::canonical_text(fixture().split));
  EXPECT_EQ(r.kind, "split");
  EXPECT_GT(r.lines.size(), 20u);
  EXPECT_EQ(r.first_failure(), nullptr);
}

TEST(Verify, EverySingleBitFlipOfAnInstanceFails) {
  const std::string text = sc::canonical_text(fixture().instance);
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (int bit = 0; bit < 8; ++bit) {
      std::string flipped = text;
      flipped[i] = static_cast<char>(flipped[i] ^ (1 << bit));
      ASSERT_FALSE(sc::verify_artifact_text(flipped).passed) << "byte " << i << " bit " << bit;
    }
  }
}

TEST(Verify, SampledBitFlipsOfAProofFail) {
  const std::string text = sc::canonical_text(fixture().proof);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
  for (int t = 0; t < 3000; ++t) {
    std::string flipped = text;
    const std::size_t i = pos(rng);
    const int bit = static_cast<int>(rng() % 8);
    flipped[i] = static_cast<char>(flipped[i] ^ (1 << bit));
    ASSERT_FALSE(sc::verify_artifact_text(flipped).passed) << "byte " << i << " bit " << bit;
  }
}

TEST(Verify, NonCanonicalSpellingOfTheSameValuesFails) {
  Json art = fixture().instance;
  const std::string text = sc::canonical_text(art);
  const sc::VerifyReport compact = sc::verify_artifact_text(art.dump());
  EXPECT_FALSE(compact.passed);
  EXPECT_EQ(failure_of(compact), "canonical serialization");
  std::string upper = text;
  const auto e = upper.find("e-");
  if (e != std::string::npos) {
    upper[e] = 'E';
    EXPECT_FALSE(sc::verify_artifact_text(upper).passed);
  }
}

TEST(Verify, GarbageNeverThrows) {
  for (const std::string s : {"", "{}", "[1,2]", "null", "{\"format\":\"spectral-cascade\"}", "{\"a\":"}) {
    EXPECT_NO_THROW({
      const sc::VerifyReport r = sc::verify_artifact_text(s);
      EXPECT_FALSE(r.passed);
    });
  }
  const Json wrong_kind = resealed(fixture().instance, [](Json& b) { b = Json{{"x", 1}}; });
  EXPECT_FALSE(sc::verify_artifact(wrong_kind).passed);
  Json unknown = sc::make_artifact("mystery", Json::object());
  EXPECT_FALSE(sc::verify_artifact(unknown).passed);
}

TEST(Verify, HandCorruptedCertificateFails) {
  expect_rejected(resealed(fixture().split, [](Json& b) { entry(b["certificate"]["xi"], 0, 0) = 0.3; }),
                  "");
  expect_rejected(
      resealed(fixture().split,
               [](Json& b) {
                 Json& x = entry(b["certificate"]["X_n"], 0, 0);
                 x = x.get<double>() + 1e-6;
               }),
      "X_n = A(J)");
  expect_rejected(resealed(fixture().split, [](Json& b) { b["certificate"]["n"] = 1; }), "n >= n0");
  expect_rejected(
      resealed(fixture().split,
               [](Json& b) {
                 Json& x = entry(b["certificate"]["J"], 0, 1);
                 x = x.get<double>() + 10.0;
               }),
      "beta-ball");
  expect_rejected(resealed(fixture().split, [](Json& b) { b["constants"]["gamma"] = 1e-3; }), "gamma");
}

TEST(Verify, HandCorruptedCascadeFails) {
  expect_rejected(resealed(fixture().cascade,
                           [](Json& b) {
                             Json& x = entry(b["result"]["levels"][0]["X"], 0, 0);
                             x = x.get<double>() * (1 + 1e-4);
                           }),
                  "recorded spectrum of X");
  expect_rejected(resealed(fixture().cascade,
                           [](Json& b) {
                             Json& x = b["result"]["spectrum"][0]["log_abs"];
                             x = x.get<double>() + 0.01;
                           }),
                  "recorded spectrum = sigma");
  expect_rejected(resealed(fixture().cascade, [](Json& b) { b["parameters"]["delta"][0] = 1.0; }), "delta");
}

TEST(Verify, HandCorruptedSearchFails) {
  expect_rejected(resealed(fixture().search,
                           [](Json& b) {
                             Json& n = b["report"]["hits"][0]["n"];
                             n = n.get<std::int64_t>() + 1;
                           }),
                  "exponent = a n + b");
  expect_rejected(resealed(fixture().search,
                           [](Json& b) {
                             Json& h = b["report"]["hits"][0];
                             h["n"] = h["n"].get<std::int64_t>() + 1;
                             h["exponent"] = h["n"];
                           }),
                  "");
  expect_rejected(resealed(fixture().search, [](Json& b) { b["run"]["count"] = 50; }), "at least count hits");
  expect_rejected(resealed(fixture().search,
                           [](Json& b) {
                             Json& x = entry(b["report"]["hits"][0]["L_n"], 0, 0);
                             x = x.get<double>() + 0.01;
                           }),
                  "||L_n - L||");
}

TEST(Verify, HandCorruptedInstanceFails) {
  expect_rejected(resealed(fixture().instance, [](Json& b) { b["T_blocks"][1]["theta"] = 0.25; }),
                  "integer relation");
  expect_rejected(resealed(fixture().instance,
                           [](Json& b) {
                             Json& m = b["T_blocks"][1]["modulus"];
                             m = 100.0;
                           }),
                  "decreasing");
  expect_rejected(resealed(fixture().instance,
                           [](Json& b) {
                             b["L"]["data"] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
                           }),
                  "distinct");
}

TEST(Verify, IdentityConditionsArtifactRecordsTheFailure) {
  sc::InstanceSpec spec = fixture().spec;
  spec.l = Matrix::identity(3);
  const sc::ConditionReport rep = sc::check_L_conditions(spec.l, spec.structure());
  ASSERT_FALSE(rep.passed);
  const Json honest = sc::conditions_artifact(spec, rep);
  expect_verifies(honest);
  expect_rejected(resealed(honest, [](Json& b) { b["report"]["passed"] = true; }), "recorded verdict");
}

TEST(Verify, ProofNeedsPassedConditions) {
  expect_rejected(resealed(fixture().proof, [](Json& b) { b["conditions"]["passed"] = false; }),
                  "recorded conditions passed");
}

TEST(Verify, HitsBeyondRoundoffOfTheSequenceLaw) {
  // Hits late enough that c rho^n is below the unit roundoff.
  const Produced p = produce(BlockStructure({1, 2}), 106);
  std::int64_t last = 0;
  for (const auto& h : p.proof["search"]["hits"]) last = std::max(last, h["n"].get<std::int64_t>());
  ASSERT_LT(sc::sequence_distance_bound(p.spec, last), 1e-16 * sc::norm2(p.spec.l));
  expect_verifies(p.proof);
  expect_verifies(p.search);
}
