#include "logsurf/birational.hpp"

#include <algorithm>

#include "logsurf/errors.hpp"
#include "logsurf/linalg.hpp"

namespace logsurf {

namespace {
const Rational kZero{};
const Rational kOne{1};
}  // namespace

void validate_bigness_certificate(const LogPair& pair,
                                  const BignessCertificate& cert) {
  const SurfaceModel& m = pair.model();
  NefResult nef = is_nef_on_tracked(m, cert.nef_part);
  if (!nef.nef)
    throw domain_error("bigness certificate: nef part fails against " +
                       m.label(nef.violations.front().first));
  if (!m.intersect(cert.nef_part, cert.nef_part).is_positive())
    throw domain_error(
        "bigness certificate: nef part needs positive self-intersection");
  if (!cert.effective_part.is_effective())
    throw domain_error("bigness certificate: effective part is not effective");
  const QDivisor total = cert.nef_part + cert.effective_part;
  for (DivisorId c : m.ids()) {
    if (m.intersect(total, c) != pair.log_degree(c))
      throw domain_error(
          "bigness certificate: decomposition does not match K + boundary "
          "against " +
          m.label(c));
  }
}

std::optional<BignessCertificate> build_bigness_certificate(
    const LogPair& pair) {
  const SurfaceModel& m = pair.model();
  const std::size_t n = m.size();
  if (n == 0) return std::nullopt;

  RationalMatrix gram(n, std::vector<Rational>(n));
  std::vector<Rational> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      gram[i][j] = m.form(m.ids()[i], m.ids()[j]);
    rhs[i] = pair.log_degree(m.ids()[i]);
  }
  auto x = solve_consistent(gram, rhs);
  if (!x) return std::nullopt;
  QDivisor representative;
  for (std::size_t i = 0; i < n; ++i)
    representative.set_coefficient(m.ids()[i], (*x)[i]);

  // Split off the negative part supported on violating curves until the
  // rest is nef on tracked curves.
  std::vector<DivisorId> support;
  QDivisor negative_part;
  for (std::size_t round = 0; round <= n; ++round) {
    QDivisor nef_part = representative - negative_part;
    NefResult nef = is_nef_on_tracked(m, nef_part);
    if (nef.nef) {
      if (!negative_part.is_effective()) return std::nullopt;
      if (!m.intersect(nef_part, nef_part).is_positive()) return std::nullopt;
      return BignessCertificate{std::move(nef_part),
                                std::move(negative_part)};
    }
    for (const auto& [id, value] : nef.violations)
      if (std::find(support.begin(), support.end(), id) == support.end())
        support.push_back(id);
    const std::size_t k = support.size();
    RationalMatrix sub(k, std::vector<Rational>(k));
    std::vector<Rational> target(k);
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t t = 0; t < k; ++t)
        sub[s][t] = m.form(support[s], support[t]);
      target[s] = m.intersect(representative, support[s]);
    }
    auto f = solve_square(std::move(sub), std::move(target));
    if (!f) return std::nullopt;
    negative_part = QDivisor{};
    for (std::size_t s = 0; s < k; ++s)
      negative_part.set_coefficient(support[s], (*f)[s]);
  }
  return std::nullopt;
}

BignessOracle default_bigness_oracle() {
  return [](const LogPair& pair) -> std::optional<BignessWitness> {
    pair.require_boundary_pair("bigness oracle");
    if (auto cert = build_bigness_certificate(pair))
      return BignessWitness{pair, std::move(*cert), false, {}};
    MmpTrace trace = run_mmp(pair, BignessAssumption::assumed());
    if (trace.steps.empty()) return std::nullopt;
    if (auto cert = build_bigness_certificate(trace.final_pair)) {
      std::vector<DivisorId> contracted;
      contracted.reserve(trace.steps.size());
      for (const MmpStep& s : trace.steps) contracted.push_back(s.contracted);
      return BignessWitness{trace.final_pair, std::move(*cert), true,
                            std::move(contracted)};
    }
    return std::nullopt;
  };
}

namespace {

// First intersecting pair of components whose coefficients sum to >= 1,
// scanned over index pairs (i,j), i<j, in the requested order.
std::optional<BlowUpSpec> find_blow_up_target(const LogPair& pair,
                                              ScanOrder order) {
  const SurfaceModel& m = pair.model();
  const QDivisor& b = pair.boundary();
  const std::size_t n = m.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (order == ScanOrder::Descending) std::reverse(idx.begin(), idx.end());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const DivisorId di = m.ids()[idx[i]];
      const DivisorId dj = m.ids()[idx[j]];
      if (m.form(di, dj) < kOne) continue;
      if (b.coefficient(di) + b.coefficient(dj) >= kOne)
        return BlowUpSpec::intersection_point(di, dj);
    }
  }
  return std::nullopt;
}

}  // namespace

TerminalizeResult terminalize(const LogPair& pair, ScanOrder order) {
  pair.require_boundary_pair("terminalize");
  for (const QDivisor::Entry& e : pair.boundary().entries())
    if (e.coeff >= kOne)
      throw domain_error("terminalize needs a klt pair; coefficient " +
                         e.coeff.str() + " on " + pair.model().label(e.id));

  BigInt grid{1};
  for (const QDivisor::Entry& e : pair.boundary().entries())
    grid = boost::multiprecision::lcm(grid, e.coeff.den());
  BigInt units{0};
  const auto& ids = pair.model().ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const Rational& f = pair.model().form(ids[i], ids[j]);
      if (f.is_positive()) units += f.ceil();
    }
  // Each unit supports at most ~grid^2 extractions of nonpositive
  // discrepancy; anything past this budget indicates a bug.
  const BigInt budget = 16 + grid * grid * units;

  LogPair current = pair;
  ModelMorphism total = ModelMorphism::identity(pair.model());
  BigInt steps{0};
  while (auto spec = find_blow_up_target(current, order)) {
    if (++steps > budget)
      throw resource_error("terminalization exceeded its step budget");
    BlowUpResult res = blow_up(current, *spec);
    total = compose(res.morphism, total);
    current = std::move(res.pair);
  }
  return TerminalizeResult{
      LogPair::boundary_pair(current.model(), current.boundary()),
      std::move(total)};
}

MmpTrace run_mmp(const LogPair& pair, const BignessAssumption& bigness) {
  pair.require_boundary_pair("mmp");
  if (!bigness.assume) {
    if (!bigness.certificate)
      throw domain_error(
          "mmp needs a bigness certificate or an explicit assumption");
    validate_bigness_certificate(pair, *bigness.certificate);
  }

  MmpTrace trace;
  LogPair current = pair;
  ModelMorphism total = ModelMorphism::identity(pair.model());
  for (;;) {
    std::optional<std::pair<Rational, DivisorId>> best;
    for (DivisorId c : current.model().ids()) {
      if (!current.model().form(c, c).is_negative()) continue;
      Rational degree = current.log_degree(c);
      if (!degree.is_negative()) continue;
      std::pair<Rational, DivisorId> key{std::move(degree), c};
      if (!best || key < *best) best = std::move(key);
    }
    if (!best) break;
    ContractResult res = contract(current, best->second);
    trace.steps.push_back(MmpStep{best->second, res.step.label,
                                  res.step.pair_degree,
                                  res.step.self_intersection,
                                  res.step.discrepancy});
    total = compose(total, res.morphism);
    current = std::move(res.pair);
  }
  trace.final_nef = log_nef_on_tracked(current);
  trace.final_pair =
      LogPair::boundary_pair(current.model(), current.boundary());
  trace.morphism = std::move(total);
  return trace;
}

std::vector<ContractedDiscrepancy> discrepancies_over_final(
    const MmpTrace& trace) {
  std::vector<ContractedDiscrepancy> out;
  if (trace.steps.empty()) return out;
  const QDivisor crepant = crepant_pullback_boundary_solved(
      trace.morphism, trace.final_pair.boundary());
  out.reserve(trace.steps.size());
  for (const MmpStep& s : trace.steps)
    out.push_back(ContractedDiscrepancy{
        s.contracted, s.label, -crepant.coefficient(s.contracted)});
  return out;
}

std::size_t count_negative_discrepancy(const MmpTrace& trace) {
  std::size_t count = 0;
  for (const ContractedDiscrepancy& d : discrepancies_over_final(trace))
    if (d.discrepancy.is_negative()) ++count;
  return count;
}

bool check_projection_formula(const ModelMorphism& morphism, const QDivisor& d,
                              long multiple, const QDivisor& e) {
  if (multiple < 1) throw domain_error("projection check needs multiple >= 1");
  if (!e.is_effective())
    throw domain_error("projection check needs an effective correction");
  const std::vector<DivisorId> exc = morphism.exceptional_ids();
  for (const QDivisor::Entry& entry : e.entries())
    if (std::find(exc.begin(), exc.end(), entry.id) == exc.end())
      throw domain_error(
          "projection check: correction must be exceptional for the "
          "morphism");
  const Rational m{static_cast<long long>(multiple)};
  const QDivisor lhs =
      pushforward(morphism, floor_divisor(m * pullback(morphism, d)) + e);
  const QDivisor rhs = floor_divisor(m * d);
  return lhs == rhs;
}

QDivisor redundant_part(const LogPair& pair, const BignessOracle& oracle) {
  pair.require_boundary_pair("redundant part");
  if (!oracle(pair))
    throw domain_error(
        "redundant part: the oracle cannot certify the input pair as big");

  QDivisor remaining = pair.boundary();
  QDivisor removed;
  std::vector<DivisorId> components = remaining.support();
  std::sort(components.begin(), components.end(),
            [](DivisorId a, DivisorId b) { return b < a; });
  for (DivisorId id : components) {
    QDivisor candidate = remaining;
    Rational coeff = candidate.coefficient(id);
    candidate.set_coefficient(id, kZero);
    if (oracle(LogPair::boundary_pair(pair.model(), candidate))) {
      removed.set_coefficient(id, std::move(coeff));
      remaining = std::move(candidate);
    }
  }
  return removed;
}

}  // namespace logsurf
