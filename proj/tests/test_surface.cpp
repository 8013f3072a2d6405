#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "logsurf/errors.hpp"
#include "logsurf/sampling.hpp"
#include "logsurf/surface.hpp"

using namespace logsurf;
using logsurf::testing::q;
using logsurf::testing::random_chain;
using logsurf::testing::random_divisor;

TEST_CASE("model construction validates its invariants") {
  CHECK_THROWS_AS(SurfaceModel::make({"A", "B"},
                                     {{q(0), q(1)}, {q(2), q(0)}},
                                     {q(-2), q(-2)}),
                  domain_error);  // not symmetric
  CHECK_THROWS_AS(SurfaceModel::make({"A", "B"},
                                     {{q(0), q(-1)}, {q(-1), q(0)}},
                                     {q(-2), q(-2)}),
                  domain_error);  // negative off-diagonal
  CHECK_THROWS_AS(SurfaceModel::make({"A"}, {{q(1)}}, {q(0)}),
                  domain_error);  // K.A + A.A odd
  CHECK_THROWS_AS(SurfaceModel::make({"A", "A"},
                                     {{q(0), q(0)}, {q(0), q(0)}},
                                     {q(-2), q(-2)}),
                  domain_error);  // duplicate label
}

TEST_CASE("pairs validate coefficient ranges") {
  SurfaceModel m = logsurf::testing::crossing_pair_model();
  QDivisor over;
  over.set_coefficient(m.ids()[0], q(3, 2));
  CHECK_THROWS_AS(LogPair::boundary_pair(m, over), domain_error);
  CHECK_NOTHROW(LogPair::sub_boundary_pair(m, over));
  QDivisor stray;
  stray.set_coefficient(DivisorId{77}, q(1, 2));
  CHECK_THROWS_AS(LogPair::boundary_pair(m, stray), domain_error);
}

TEST_CASE("intersection form extends bilinearly") {
  SurfaceModel m = logsurf::testing::crossing_pair_model();
  const DivisorId d1 = m.ids()[0], d2 = m.ids()[1];
  CHECK(m.intersect(QDivisor{}, QDivisor::single(d1, q(1))) == q(0));
  PairSampler sampler(3);
  for (int i = 0; i < 50; ++i) {
    const QDivisor x = random_divisor(sampler, m);
    const QDivisor y = random_divisor(sampler, m);
    const QDivisor z = random_divisor(sampler, m);
    const Rational a = q(static_cast<long long>(sampler.pick(0, 6)) - 3,
                         static_cast<long long>(sampler.pick(1, 3)));
    CHECK(m.intersect(a * x + y, z) ==
          a * m.intersect(x, z) + m.intersect(y, z));
    CHECK(m.intersect(x, y) == m.intersect(y, x));
  }
  CHECK(m.form(d1, d2) == q(1));
}

TEST_CASE("blow-up at an intersection point: crepant coefficient 2/3+2/3-1") {
  LogPair pair = logsurf::testing::worked_pair();
  const DivisorId d1 = pair.model().ids()[0], d2 = pair.model().ids()[1];
  BlowUpResult res = blow_up(pair, BlowUpSpec::intersection_point(d1, d2));
  const DivisorId e = res.exceptional;

  CHECK(res.pair.boundary().coefficient(e) == q(1, 3));
  const SurfaceModel& m = res.pair.model();
  CHECK(m.form(e, e) == q(-1));
  CHECK(m.canonical_degree(e) == q(-1));
  CHECK(m.form(d1, d1) == q(2));
  CHECK(m.form(d2, d2) == q(2));
  CHECK(m.form(d1, d2) == q(0));
  CHECK(m.form(d1, e) == q(1));
  CHECK(m.canonical_degree(d1) == q(0));

  // The crepancy identity (K' + boundary').E = 0, checked by intersection.
  QDivisor log_part = res.pair.boundary();
  CHECK(m.canonical_degree(e) + m.intersect(log_part, e) == q(0));

  // Both pullback routes reproduce the blown-up boundary exactly.
  CHECK(crepant_pullback_boundary(res.morphism, pair.boundary()) ==
        res.pair.boundary());
  CHECK(crepant_pullback_boundary_solved(res.morphism, pair.boundary()) ==
        res.pair.boundary());
}

TEST_CASE("free-point blow-up on an empty boundary has coefficient -1") {
  SurfaceModel m = logsurf::testing::crossing_pair_model();
  LogPair pair = LogPair::boundary_pair(m, {});
  BlowUpResult res = blow_up(pair, BlowUpSpec::free_point(m.ids()[0]));
  CHECK(res.pair.boundary().coefficient(res.exceptional) == q(-1));
  CHECK(!res.pair.boundary_in_unit_range());
}

TEST_CASE("blow-up discrepancies on a crossed sub-boundary configuration") {
  // Boundary a1*D1 + a2*D2 + b*D with D meeting D1 and D2, a1 = 1/2,
  // b = -1/2: a point of D and D1 gives discrepancy 1 - a1 - b = 1.
  SurfaceModel m = logsurf::testing::triple_crossing_model();
  const DivisorId d1 = m.ids()[0], d2 = m.ids()[1], d = m.ids()[2];
  QDivisor b;
  b.set_coefficient(d1, q(1, 2));
  b.set_coefficient(d2, q(1, 3));
  b.set_coefficient(d, q(-1, 2));
  LogPair pair = LogPair::sub_boundary_pair(m, b);

  BlowUpResult at_d1 = blow_up(pair, BlowUpSpec::intersection_point(d, d1));
  CHECK(-at_d1.pair.boundary().coefficient(at_d1.exceptional) == q(1));

  BlowUpResult at_d2 = blow_up(pair, BlowUpSpec::intersection_point(d, d2));
  CHECK(-at_d2.pair.boundary().coefficient(at_d2.exceptional) ==
        q(1) - q(1, 3) + q(1, 2));

  BlowUpResult off = blow_up(pair, BlowUpSpec::free_point(d));
  CHECK(-off.pair.boundary().coefficient(off.exceptional) == q(3, 2));
}

TEST_CASE("blow-up spec validation") {
  LogPair pair = logsurf::testing::worked_pair();
  const DivisorId d1 = pair.model().ids()[0], d2 = pair.model().ids()[1];
  BlowUpResult res = blow_up(pair, BlowUpSpec::intersection_point(d1, d2));
  // The only crossing is used up; a second one is invalid.
  CHECK_THROWS_AS(
      blow_up(res.pair, BlowUpSpec::intersection_point(d1, d2)),
      domain_error);
  CHECK_THROWS_AS(blow_up(pair, BlowUpSpec::intersection_point(d1, d1)),
                  domain_error);
  CHECK_THROWS_AS(blow_up(pair, BlowUpSpec::free_point(DivisorId{9})),
                  domain_error);
}

TEST_CASE("contracting a fresh exceptional restores the pair bit-exactly") {
  LogPair pair = logsurf::testing::worked_pair();
  const DivisorId d1 = pair.model().ids()[0], d2 = pair.model().ids()[1];
  for (const BlowUpSpec& spec :
       {BlowUpSpec::intersection_point(d1, d2), BlowUpSpec::free_point(d1),
        BlowUpSpec::general_point()}) {
    BlowUpResult up = blow_up(pair, spec);
    ContractResult down = contract(up.pair, up.exceptional);
    CHECK(down.pair == pair);
  }
}

TEST_CASE("random blow-up/contract round trips restore everything") {
  PairSampler sampler(17);
  for (int i = 0; i < 200; ++i) {
    const LogPair pair = sampler.klt_pair(2 + sampler.pick(0, 2), 5, 2);
    const auto& ids = pair.model().ids();
    std::vector<BlowUpSpec> specs{BlowUpSpec::general_point()};
    for (std::size_t a = 0; a < ids.size(); ++a) {
      specs.push_back(BlowUpSpec::free_point(ids[a]));
      for (std::size_t b2 = a + 1; b2 < ids.size(); ++b2)
        if (pair.model().form(ids[a], ids[b2]) >= q(1))
          specs.push_back(BlowUpSpec::intersection_point(ids[a], ids[b2]));
    }
    BlowUpResult up = blow_up(pair, specs[sampler.pick(0, specs.size() - 1)]);
    ContractResult down = contract(up.pair, up.exceptional);
    CHECK(down.pair == pair);
    CHECK(down.pair.model() == pair.model());
  }
}

TEST_CASE("contract records the defining discrepancy value") {
  // K.C = -1, C.C = -1, boundary away from C: a = (-1)/(-1) = 1.
  SurfaceModel m = SurfaceModel::make(
      {"H", "C"}, {{q(1), q(0)}, {q(0), q(-1)}}, {q(1), q(-1)});
  LogPair pair = LogPair::boundary_pair(m, {});
  ContractResult res = contract(pair, m.ids()[1]);
  CHECK(res.step.discrepancy == q(1));
  CHECK(res.step.pair_degree == q(-1));

  // K.C = 0, C.C = -2: a = 0, and the curve drops out of the K-degrees.
  SurfaceModel m2 = SurfaceModel::make(
      {"B", "C"}, {{q(2), q(1)}, {q(1), q(-2)}}, {q(0), q(0)});
  LogPair pair2 = LogPair::boundary_pair(m2, {});
  ContractResult res2 = contract(pair2, m2.ids()[1]);
  CHECK(res2.step.discrepancy == q(0));
  // Mumford correction makes the image self-intersection 2 + 1/2.
  CHECK(res2.pair.model().form(res2.pair.model().ids()[0],
                               res2.pair.model().ids()[0]) == q(5, 2));

  CHECK_THROWS_AS(contract(pair, m.ids()[0]), domain_error);  // H.H >= 0
}

TEST_CASE("pullback adds the multiplicity along the exceptional") {
  LogPair pair = logsurf::testing::worked_pair();
  const DivisorId d1 = pair.model().ids()[0], d2 = pair.model().ids()[1];
  BlowUpResult up = blow_up(pair, BlowUpSpec::intersection_point(d1, d2));

  const QDivisor d = QDivisor::single(d1, q(1));
  QDivisor expected = d;
  expected.set_coefficient(up.exceptional, q(1));
  CHECK(pullback(up.morphism, d) == expected);
  CHECK(pushforward(up.morphism, pullback(up.morphism, d)) == d);
}

TEST_CASE("pullback and pushforward along random mixed chains") {
  PairSampler sampler(23);
  for (int i = 0; i < 120; ++i) {
    const ModelMorphism chain = random_chain(sampler);
    const QDivisor d = random_divisor(sampler, chain.target());
    const QDivisor pb = pullback(chain, d);

    // Zero intersection against every removed divisor, on the source model.
    for (DivisorId e : chain.exceptional_ids())
      CHECK(chain.source().intersect(pb, e) == q(0));
    // Round trip.
    CHECK(pushforward(chain, pb) == d);

    // The intersection pairing of pullbacks matches the pairing downstairs.
    const QDivisor d2 = random_divisor(sampler, chain.target());
    CHECK(chain.source().intersect(pb, pullback(chain, d2)) ==
          chain.target().intersect(d, d2));
  }
}

TEST_CASE("morphism replay reproduces every level exactly") {
  PairSampler sampler(29);
  for (int i = 0; i < 60; ++i) {
    const ModelMorphism chain = random_chain(sampler);
    const auto levels = morphism_levels(chain);
    REQUIRE(levels.size() == chain.steps().size() + 1);
    CHECK(levels.front() == chain.target());
    CHECK(levels.back() == chain.source());
  }
}

TEST_CASE("crepant pullback routes agree on random chains") {
  PairSampler sampler(31);
  for (int i = 0; i < 80; ++i) {
    const ModelMorphism chain = random_chain(sampler);
    QDivisor boundary;
    for (DivisorId id : chain.target().ids())
      if (sampler.pick(0, 1)) boundary.set_coefficient(id, q(1, 2));
    const QDivisor replayed = crepant_pullback_boundary(chain, boundary);
    const QDivisor solved = crepant_pullback_boundary_solved(chain, boundary);
    CHECK(replayed == solved);
    // The defining property: (K + crepant).E = 0 for every removed divisor.
    for (DivisorId e : chain.exceptional_ids())
      CHECK(chain.source().canonical_degree(e) +
                chain.source().intersect(replayed, e) ==
            q(0));
  }
}

TEST_CASE("adjunction parity survives blow-ups and contractions") {
  PairSampler sampler(37);
  for (int i = 0; i < 60; ++i) {
    const ModelMorphism chain = random_chain(sampler);
    for (const SurfaceModel& level : morphism_levels(chain))
      for (DivisorId c : level.ids()) {
        const Rational sum =
            level.canonical_degree(c) + level.form(c, c);
        if (sum.is_integer()) CHECK(sum.num() % 2 == 0);
      }
  }
}

TEST_CASE("nef check and volume") {
  LogPair pair = logsurf::testing::worked_pair();
  CHECK(is_nef_on_tracked(pair.model(), {}).nef);
  CHECK(volume_nef(pair.model(), {}) == q(0));

  BlowUpResult up = blow_up(
      pair, BlowUpSpec::intersection_point(pair.model().ids()[0],
                                           pair.model().ids()[1]));
  const QDivisor e = QDivisor::single(up.exceptional, q(1));
  NefResult nef = is_nef_on_tracked(up.pair.model(), e);
  CHECK(!nef.nef);
  REQUIRE(nef.violations.size() == 1);
  CHECK(nef.violations[0].first == up.exceptional);
  CHECK(nef.violations[0].second == q(-1));
  CHECK_THROWS_AS(volume_nef(up.pair.model(), e), domain_error);

  // A divisor of square 2, nef on this model.
  const QDivisor h = QDivisor{{pair.model().ids()[0], q(1, 2)},
                              {pair.model().ids()[1], q(1, 2)}};
  CHECK(volume_nef(pair.model(), h) == q(2));
  // Volume is invariant under pullback.
  CHECK(volume_nef(up.pair.model(), pullback(up.morphism, h)) == q(2));
}
