#pragma once

// Shared model builders for the test suites.

#include <string>
#include <vector>

#include "logsurf/birational.hpp"
#include "logsurf/sampling.hpp"
#include "logsurf/surface.hpp"

namespace logsurf::testing {

inline Rational q(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

/// Two curves of square 3 meeting once, each with K-degree -1; carries the
/// boundary (2/3, 2/3) in the worked examples.
inline SurfaceModel crossing_pair_model() {
  return SurfaceModel::make(
      {"D1", "D2"},
      {{q(3), q(1)}, {q(1), q(3)}},
      {q(-1), q(-1)});
}

inline LogPair worked_pair() {
  SurfaceModel m = crossing_pair_model();
  QDivisor b;
  b.set_coefficient(m.ids()[0], q(2, 3));
  b.set_coefficient(m.ids()[1], q(2, 3));
  return LogPair::boundary_pair(std::move(m), std::move(b));
}

/// One boundary curve D crossed by two others, with free room for
/// sub-boundary coefficients: D1, D2, D with D.D1 = D.D2 = 1.
inline SurfaceModel triple_crossing_model() {
  return SurfaceModel::make(
      {"D1", "D2", "D"},
      {{q(0), q(0), q(1)},
       {q(0), q(0), q(1)},
       {q(1), q(1), q(-2)}},
      {q(-2), q(-2), q(0)});
}

/// A (-1)-curve crossed once by five coefficient-1/4 curves; contracting it
/// yields a negative discrepancy over the end pair.
inline LogPair negative_count_pair() {
  std::vector<std::string> labels{"C", "B1", "B2", "B3", "B4", "B5"};
  std::vector<std::vector<Rational>> form(6, std::vector<Rational>(6));
  std::vector<Rational> canonical(6);
  form[0][0] = q(-1);
  canonical[0] = q(-1);
  for (std::size_t j = 1; j < 6; ++j) {
    form[0][j] = q(1);
    form[j][0] = q(1);
    form[j][j] = q(0);
    canonical[j] = q(0);
  }
  SurfaceModel m = SurfaceModel::make(std::move(labels), std::move(form),
                                      std::move(canonical));
  QDivisor b;
  b.set_coefficient(m.ids()[0], q(1, 2));
  for (std::size_t j = 1; j < 6; ++j)
    b.set_coefficient(m.ids()[j], q(1, 4));
  return LogPair::boundary_pair(std::move(m), std::move(b));
}

/// Random morphism with mixed step kinds: a few blow-ups stacked above the
/// base pair composed with a few numerical contractions below it. Returns
/// the morphism; divisors for pullback live on its target.
inline ModelMorphism random_chain(PairSampler& sampler, int max_ups = 3,
                                  int max_downs = 2) {
  const LogPair base =
      sampler.klt_pair(2 + sampler.pick(0, 2), 2 + sampler.pick(0, 4), 2);

  LogPair up = base;
  ModelMorphism above = ModelMorphism::identity(base.model());
  const int ups = static_cast<int>(sampler.pick(0, max_ups));
  for (int i = 0; i < ups; ++i) {
    const auto& ids = up.model().ids();
    std::vector<BlowUpSpec> specs;
    specs.push_back(BlowUpSpec::general_point());
    for (std::size_t a = 0; a < ids.size(); ++a) {
      specs.push_back(BlowUpSpec::free_point(ids[a]));
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        if (up.model().form(ids[a], ids[b]) >= Rational(1))
          specs.push_back(BlowUpSpec::intersection_point(ids[a], ids[b]));
    }
    BlowUpResult res =
        blow_up(up, specs[sampler.pick(0, specs.size() - 1)]);
    above = compose(res.morphism, above);
    up = std::move(res.pair);
  }

  LogPair down = base;
  ModelMorphism below = ModelMorphism::identity(base.model());
  const int downs = static_cast<int>(sampler.pick(0, max_downs));
  for (int i = 0; i < downs; ++i) {
    std::vector<DivisorId> negatives;
    for (DivisorId id : down.model().ids())
      if (down.model().form(id, id).is_negative()) negatives.push_back(id);
    if (negatives.empty()) break;
    ContractResult res =
        contract(down, negatives[sampler.pick(0, negatives.size() - 1)]);
    below = compose(below, res.morphism);
    down = std::move(res.pair);
  }

  return compose(above, below);
}

/// Random divisor supported on the model with small rational coefficients.
inline QDivisor random_divisor(PairSampler& sampler, const SurfaceModel& m) {
  QDivisor d;
  for (DivisorId id : m.ids()) {
    if (sampler.pick(0, 2) == 0) continue;
    const long long num = static_cast<long long>(sampler.pick(0, 12)) - 6;
    const long long den = static_cast<long long>(sampler.pick(1, 4));
    d.set_coefficient(id, q(num, den));
  }
  return d;
}

}  // namespace logsurf::testing
