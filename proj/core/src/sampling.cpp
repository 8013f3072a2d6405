#include "logsurf/sampling.hpp"

#include <string>

namespace logsurf {

namespace {
const Rational kOne{1};
}

std::uint64_t PairSampler::pick(std::uint64_t lo, std::uint64_t hi) {
  return lo + rng_() % (hi - lo + 1);
}

Rational PairSampler::rational_in_unit(std::uint64_t max_den) {
  const std::uint64_t q = pick(1, max_den);
  const std::uint64_t p = pick(0, q);
  return Rational(BigInt(p), BigInt(q));
}

Rational PairSampler::grid_fraction(std::uint64_t k) {
  return Rational(BigInt(pick(1, k - 1)), BigInt(k));
}

SurfaceModel PairSampler::model(std::size_t components,
                                std::uint64_t max_pair_units) {
  std::vector<std::string> labels;
  labels.reserve(components);
  for (std::size_t i = 0; i < components; ++i)
    labels.push_back("D" + std::to_string(i + 1));
  std::vector<std::vector<Rational>> form(components,
                                          std::vector<Rational>(components));
  std::vector<Rational> canonical(components);
  for (std::size_t i = 0; i < components; ++i) {
    for (std::size_t j = i + 1; j < components; ++j) {
      // Two thirds of pairs meet; transverse unit counts stay small.
      const std::uint64_t units =
          pick(0, 2) == 0 ? 0 : pick(1, max_pair_units);
      form[i][j] = Rational(BigInt(units));
      form[j][i] = form[i][j];
    }
    const long long self = static_cast<long long>(pick(0, 6)) - 3;
    const long long genus = static_cast<long long>(pick(0, 2));
    form[i][i] = Rational(self);
    canonical[i] = Rational(2 * genus - 2 - self);
  }
  return SurfaceModel::make(std::move(labels), std::move(form),
                            std::move(canonical));
}

LogPair PairSampler::klt_pair(std::size_t components, std::uint64_t k,
                              std::uint64_t max_pair_units) {
  SurfaceModel m = model(components, max_pair_units);
  QDivisor boundary;
  for (DivisorId id : m.ids())
    if (pick(0, 3) != 0) boundary.set_coefficient(id, grid_fraction(k));
  return LogPair::boundary_pair(std::move(m), std::move(boundary));
}

LogPair PairSampler::terminal_pair(std::size_t components, std::uint64_t k,
                                   std::uint64_t max_pair_units) {
  LogPair pair = klt_pair(components, k, max_pair_units);
  QDivisor boundary = pair.boundary();
  const SurfaceModel& m = pair.model();
  const Rational step{BigInt(1), BigInt(k)};
  // Shave intersecting pairs until every sum drops below 1.
  for (bool dirty = true; dirty;) {
    dirty = false;
    const auto& ids = m.ids();
    for (std::size_t i = 0; i < ids.size() && !dirty; ++i)
      for (std::size_t j = i + 1; j < ids.size() && !dirty; ++j) {
        if (!m.form(ids[i], ids[j]).is_positive()) continue;
        const Rational a = boundary.coefficient(ids[i]);
        const Rational b = boundary.coefficient(ids[j]);
        if (a + b < kOne) continue;
        const DivisorId larger = a >= b ? ids[i] : ids[j];
        boundary.set_coefficient(larger,
                                 boundary.coefficient(larger) - step);
        dirty = true;
      }
  }
  return LogPair::boundary_pair(m, std::move(boundary));
}

}  // namespace logsurf
