#include <doctest.h>

#include "fixtures.hpp"
#include "logsurf/bounds.hpp"
#include "logsurf/errors.hpp"

using namespace logsurf;
using logsurf::testing::q;

namespace {

BigInt part_sum(const BigInt& n, const SemigroupDecomposition& d) {
  BigInt sum{0};
  for (const BigInt& part : d.parts) sum += part * n + 1;
  return sum;
}

BoundInputs demo_inputs(const char* delta, const char* epsilon, long long a,
                        std::optional<long long> cartier = std::nullopt) {
  BoundInputs in;
  in.delta = *Rational::parse(delta);
  in.epsilon = *Rational::parse(epsilon);
  in.component_bound = a;
  if (cartier) in.cartier_bound = BigInt(*cartier);
  return in;
}

}  // namespace

TEST_CASE("semigroup decomposition: pinned small cases") {
  auto d = semigroup_decompose(2, 5);
  CHECK(d.representable);
  CHECK(d.parts == std::vector<BigInt>{2});
  CHECK(part_sum(2, d) == 5);

  d = semigroup_decompose(3, 10);
  CHECK(d.representable);
  CHECK(d.parts == std::vector<BigInt>{3});

  d = semigroup_decompose(1, 2);
  CHECK(d.representable);
  CHECK(d.parts == std::vector<BigInt>{1});

  CHECK(!semigroup_decompose(2, 4).representable);
  CHECK(!semigroup_decompose(2, 1).representable);
  CHECK(!semigroup_decompose(2, 2).representable);
  CHECK(semigroup_decompose(2, 3).representable);  // the generator itself

  CHECK_THROWS_AS(semigroup_decompose(0, 5), domain_error);
  CHECK_THROWS_AS(semigroup_decompose(2, 0), domain_error);
}

TEST_CASE("constructive split above n^2 matches the division algorithm") {
  for (long long n = 1; n <= 12; ++n) {
    for (long long k = 1; k <= 80; ++k) {
      const BigInt m = n * n + k;
      const auto d = semigroup_decompose(n, m);
      REQUIRE(d.representable);
      CHECK(part_sum(n, d) == m);
      const long long a = k / (n + 1), b = k % (n + 1);
      std::multiset<BigInt> expected;
      if (b == 0) {
        expected.insert(n + 1);
        for (long long i = 0; i < a - 1; ++i) expected.insert(1);
      } else {
        expected.insert(n - b + 1);
        for (long long i = 0; i < a + b - 1; ++i) expected.insert(1);
      }
      CHECK(std::multiset<BigInt>(d.parts.begin(), d.parts.end()) == expected);
      for (const BigInt& part : d.parts) CHECK(part >= 1);
    }
  }
}

TEST_CASE("membership table agrees with decomposition on a quick sweep") {
  for (long long n = 1; n <= 8; ++n) {
    const std::size_t limit = static_cast<std::size_t>(n * n + 100);
    const auto table = semigroup_membership_dp(n, limit);
    for (std::size_t m = 1; m <= limit; ++m) {
      const auto d = semigroup_decompose(n, BigInt(m));
      CHECK(d.representable == table[m]);
      if (d.representable) CHECK(part_sum(n, d) == m);
    }
  }
}

TEST_CASE("threshold arithmetic") {
  CHECK(birationality_threshold(1) == 325);
  CHECK(birationality_threshold(2) == 1297);
  CHECK(birationality_threshold(3) == 2917);
  CHECK_THROWS_AS(birationality_threshold(0), domain_error);
  // Every m in a window above the threshold decomposes for the replaced
  // constant.
  for (long long n = 1; n <= 5; ++n) {
    const BigInt replaced = 18 * n;
    const BigInt m0 = birationality_threshold(n);
    CHECK(m0 == replaced * replaced + 1);
    for (BigInt m = m0; m <= m0 + 200; ++m) {
      const auto d = semigroup_decompose(replaced, m);
      CHECK(d.representable);
      CHECK(part_sum(replaced, d) == m);
    }
  }
}

TEST_CASE("pipeline: trivial terminal input with integral log divisor") {
  SurfaceModel m = SurfaceModel::make({"H"}, {{q(1)}}, {q(1)});
  const LogPair pair = LogPair::boundary_pair(m, {});
  const BoundCertificate cert =
      run_pipeline(pair, demo_inputs("1/2", "1/2", 1));
  CHECK(cert.m0 == 325);
  CHECK(cert.round.grid == 1);
  CHECK(cert.redundant.removed.empty());
  CHECK(cert.terminalization.morphism.is_identity());
  CHECK(cert.mmp.trace.steps.empty());
  CHECK(cert.cartier.concrete);
  CHECK(cert.cartier.value == 1);
  CHECK_NOTHROW(verify_certificate(cert));
}

TEST_CASE("pipeline: the worked pair runs all stages") {
  const LogPair pair = logsurf::testing::worked_pair();
  const BoundCertificate cert =
      run_pipeline(pair, demo_inputs("1/2", "1/6", 2));
  CHECK(cert.round.grid == 3);
  CHECK(cert.round.boundary_after == pair.boundary());  // already on grid
  CHECK(cert.terminalization.morphism.steps().size() == 3);
  CHECK(cert.epsilon_klt.report.classification == SingularityClass::Terminal);
  CHECK(cert.mmp.trace.steps.empty());
  CHECK(cert.negative_count.count == 0);
  CHECK(cert.cartier.value == 3);
  CHECK(cert.threshold.n_replaced == 54);
  CHECK(cert.m0 == 2917);
  CHECK_NOTHROW(verify_certificate(cert));
}

TEST_CASE("pipeline: declared cartier bound short-circuits the concrete one") {
  SurfaceModel m = SurfaceModel::make(
      {"H", "P"}, {{q(1), q(0)}, {q(0), q(-2)}}, {q(1), q(0)});
  QDivisor b;
  b.set_coefficient(m.ids()[1], q(1, 2));
  const LogPair pair = LogPair::boundary_pair(m, b);
  const BoundCertificate cert =
      run_pipeline(pair, demo_inputs("1/2", "1/4", 1, 5));
  // P is redundant here: the positivity lives on H alone.
  CHECK(cert.redundant.removed == b);
  CHECK(!cert.cartier.concrete);
  CHECK(cert.cartier.value == 5);
  CHECK(cert.m0 == 90 * 90 + 1);
  CHECK_NOTHROW(verify_certificate(cert));
}

TEST_CASE("pipeline: m0 depends only on the produced constant") {
  // Two unrelated geometries, both with integral log data and index 1.
  SurfaceModel m1 = SurfaceModel::make({"H"}, {{q(1)}}, {q(1)});
  SurfaceModel m2 = SurfaceModel::make(
      {"A", "B"}, {{q(1), q(0)}, {q(0), q(1)}}, {q(1), q(1)});
  const BoundCertificate c1 =
      run_pipeline(LogPair::boundary_pair(m1, {}), demo_inputs("1/2", "1/2", 1));
  const BoundCertificate c2 =
      run_pipeline(LogPair::boundary_pair(m2, {}), demo_inputs("1/3", "1/3", 3));
  CHECK(c1.cartier.value == c2.cartier.value);
  CHECK(c1.m0 == c2.m0);
}

TEST_CASE("pipeline rejects bad inputs with the stage name") {
  SurfaceModel m = logsurf::testing::crossing_pair_model();
  QDivisor lc;
  lc.set_coefficient(m.ids()[0], q(1));
  const BoundInputs inputs = demo_inputs("1/2", "1/6", 2);

  CHECK_THROWS_WITH_AS(
      run_pipeline(LogPair::boundary_pair(m, lc), inputs),
      doctest::Contains("stage input"), domain_error);

  CHECK_THROWS_WITH_AS(
      run_pipeline(logsurf::testing::worked_pair(),
                   demo_inputs("3/2", "1/6", 2)),
      doctest::Contains("stage inputs"), domain_error);

  // Epsilon far too large for the 2/3 coefficients.
  CHECK_THROWS_WITH_AS(
      run_pipeline(logsurf::testing::worked_pair(),
                   demo_inputs("1/2", "2/3", 2)),
      doctest::Contains("stage epsilon-klt"), domain_error);

  // No tracked positivity at all: bigness cannot be certified.
  SurfaceModel flat = SurfaceModel::make({"F"}, {{q(0)}}, {q(-2)});
  CHECK_THROWS_WITH_AS(
      run_pipeline(LogPair::boundary_pair(flat, {}), inputs),
      doctest::Contains("stage bigness"), domain_error);
}

TEST_CASE("verify rejects a tampered certificate") {
  const BoundCertificate cert = run_pipeline(
      logsurf::testing::worked_pair(), demo_inputs("1/2", "1/6", 2));

  BoundCertificate bad = cert;
  bad.m0 += 1;
  CHECK_THROWS_AS(verify_certificate(bad), verify_error);

  bad = cert;
  bad.threshold.n_replaced = 55;
  CHECK_THROWS_AS(verify_certificate(bad), verify_error);

  bad = cert;
  bad.negative_count.count = 1;
  CHECK_THROWS_AS(verify_certificate(bad), verify_error);

  bad = cert;
  bad.round.grid = 4;
  CHECK_THROWS_AS(verify_certificate(bad), verify_error);
}
