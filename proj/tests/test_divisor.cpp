#include <doctest.h>

#include "fixtures.hpp"
#include "logsurf/divisor.hpp"
#include "logsurf/errors.hpp"
#include "logsurf/sampling.hpp"

using namespace logsurf;
using logsurf::testing::q;

namespace {
const DivisorId A{0}, B{1};
}

TEST_CASE("divisors never store zero coefficients") {
  QDivisor d;
  d.set_coefficient(A, q(1, 2));
  d.set_coefficient(A, q(0));
  CHECK(d.empty());
  d.add_term(B, q(1, 3));
  d.add_term(B, q(-1, 3));
  CHECK(d.component_count() == 0);
}

TEST_CASE("componentwise floor") {
  QDivisor d{{A, q(3, 2)}, {B, q(7, 10)}};
  CHECK(floor_divisor(d) == QDivisor{{A, q(1)}});

  QDivisor integral{{A, q(2)}, {B, q(-1)}};
  CHECK(floor_divisor(integral) == integral);

  CHECK(floor_divisor(QDivisor{{A, q(-1, 2)}}) == QDivisor{{A, q(-1)}});
}

TEST_CASE("componentwise ceiling") {
  CHECK(ceil_divisor(QDivisor{{A, q(3, 2)}}) == QDivisor{{A, q(2)}});
  CHECK(ceil_divisor(QDivisor{{A, q(-1, 2)}}).empty());
  QDivisor integral{{A, q(4)}, {B, q(-2)}};
  CHECK(ceil_divisor(integral) == integral);
}

TEST_CASE("boundary decomposition splits off the coefficient-one part") {
  QDivisor d{{A, q(1)}, {B, q(3, 10)}};
  auto parts = decompose_boundary(d);
  CHECK(parts.equal_one == QDivisor{{A, q(1)}});
  CHECK(parts.less_one == QDivisor{{B, q(3, 10)}});

  auto all_below = decompose_boundary(QDivisor{{B, q(2, 3)}});
  CHECK(all_below.equal_one.empty());
  CHECK(all_below.less_one == QDivisor{{B, q(2, 3)}});

  auto all_one = decompose_boundary(QDivisor{{A, q(1)}, {B, q(1)}});
  CHECK(all_one.less_one.empty());
  CHECK(all_one.equal_one.component_count() == 2);

  CHECK_THROWS_AS(decompose_boundary(QDivisor{{A, q(3, 2)}}), domain_error);
  CHECK_THROWS_AS(decompose_boundary(QDivisor{{A, q(-1, 4)}}), domain_error);
}

TEST_CASE("floor and ceiling properties over random divisors") {
  PairSampler sampler(55);
  for (int i = 0; i < 400; ++i) {
    QDivisor d;
    for (std::uint32_t k = 0; k < 5; ++k)
      d.set_coefficient(DivisorId{k},
                        q(static_cast<long long>(sampler.pick(0, 40)) - 20,
                          static_cast<long long>(sampler.pick(1, 7))));
    const QDivisor fd = floor_divisor(d);
    const QDivisor cd = ceil_divisor(d);
    CHECK(fd == -ceil_divisor(-d));
    for (const auto& e : d.entries()) {
      CHECK(fd.coefficient(e.id) <= e.coeff);
      CHECK(cd.coefficient(e.id) >= e.coeff);
    }
  }
}

TEST_CASE("coefficient sets validate their range and floor") {
  auto set = CoefficientSet::make({q(1, 2), q(2, 3), q(1, 2)});
  CHECK(set.elements().size() == 2);  // deduplicated
  CHECK(set.min_nonzero() == q(1, 2));
  CHECK_THROWS_AS(CoefficientSet::make({q(3, 2)}), domain_error);
  CHECK_THROWS_AS(CoefficientSet::make({q(1, 2)}, q(2, 3)), domain_error);
  auto floored = CoefficientSet::make({q(1, 2)}, q(1, 5));
  CHECK(floored.effective_floor() == q(1, 5));
}

TEST_CASE("rounding: the worked example") {
  // min 1/2 and margin 1/4 give the grid 1/8; 2/3 lands on 5/8.
  auto rounded = round_coefficients(CoefficientSet::make({q(1, 2), q(2, 3)}),
                                    q(1, 4));
  CHECK(rounded.grid == 8);
  CHECK(rounded.apply(q(2, 3)) == q(5, 8));
  CHECK(q(1, 2) < q(5, 8));
  CHECK(q(5, 8) <= q(2, 3));
  CHECK(rounded.apply(q(1, 2)) == q(1, 2));  // already on the grid
}

TEST_CASE("rounding: degenerate singleton") {
  auto rounded = round_coefficients(CoefficientSet::make({q(1)}), q(1, 2));
  CHECK(rounded.grid == 2);
  CHECK(rounded.apply(q(1)) == q(1));
}

TEST_CASE("rounding rejects bad margins and empty sets") {
  CHECK_THROWS_AS(round_coefficients(CoefficientSet::make({q(1, 2)}), q(1)),
                  domain_error);
  CHECK_THROWS_AS(round_coefficients(CoefficientSet::make({q(1, 2)}), q(0)),
                  domain_error);
  CHECK_THROWS_AS(round_coefficients(CoefficientSet::make({q(0)}), q(1, 2)),
                  domain_error);
}

TEST_CASE("rounding inequality and monotonicity over random sets") {
  PairSampler sampler(7);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Rational> elems;
    const int count = static_cast<int>(sampler.pick(1, 5));
    for (int k = 0; k < count; ++k) {
      Rational x = sampler.rational_in_unit(24);
      if (x.is_zero()) x = q(1, 24);
      elems.push_back(x);
    }
    Rational delta = sampler.rational_in_unit(24);
    if (delta.is_zero() || delta == q(1)) delta = q(1, 3);

    const bool declare_floor = sampler.pick(0, 1) == 1;
    CoefficientSet set =
        declare_floor
            ? CoefficientSet::make(
                  elems, CoefficientSet::make(elems).min_nonzero() / q(2))
            : CoefficientSet::make(elems);

    auto rounded = round_coefficients(set, delta);
    CHECK(rounded.grid == (q(1) / (set.effective_floor() * delta)).ceil());

    Rational prev_from{-1}, prev_to{-1};
    for (const auto& [from, to] : rounded.map) {
      CHECK((q(1) - delta) * from < to);
      CHECK(to <= from);
      CHECK((Rational(rounded.grid) * to).is_integer());
      if (prev_from >= q(0)) {
        CHECK(prev_from < from);
        CHECK(prev_to <= to);  // rounding is monotone
      }
      prev_from = from;
      prev_to = to;
    }
  }
}
