#include "logsurf/singularity.hpp"

#include <algorithm>

#include "logsurf/errors.hpp"

namespace logsurf {

namespace {
const Rational kZero{};
const Rational kOne{1};
constexpr int kMaxOracleDepth = 5;
}  // namespace

std::string to_string(SingularityClass c) {
  switch (c) {
    case SingularityClass::Terminal:
      return "terminal";
    case SingularityClass::Canonical:
      return "canonical";
    case SingularityClass::KltNotCanonical:
      return "klt-not-canonical";
    case SingularityClass::LcNotKlt:
      return "lc-not-klt";
    case SingularityClass::NotLc:
      return "not-lc";
  }
  return "unknown";
}

MinDiscrepancy min_discrepancy_snc(const LogPair& pair) {
  const SurfaceModel& m = pair.model();
  const QDivisor& b = pair.boundary();

  MinDiscrepancy out;
  for (const QDivisor::Entry& e : b.entries()) {
    if (e.coeff > kOne) {
      // Weighted blow-ups over this component have unbounded negative
      // discrepancy.
      out.bounded = false;
      out.witnesses.push_back({DiscrepancyWitness::Location::FreePoint, e.id,
                               DivisorId{}, kOne - e.coeff});
      return out;
    }
  }

  std::vector<DiscrepancyWitness> candidates;
  candidates.push_back(
      {DiscrepancyWitness::Location::GeneralPoint, {}, {}, kOne});
  const auto& ids = m.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    candidates.push_back({DiscrepancyWitness::Location::FreePoint, ids[i],
                          DivisorId{}, kOne - b.coefficient(ids[i])});
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (!m.form(ids[i], ids[j]).is_positive()) continue;
      candidates.push_back(
          {DiscrepancyWitness::Location::IntersectionPoint, ids[i], ids[j],
           kOne - b.coefficient(ids[i]) - b.coefficient(ids[j])});
    }
  }

  out.value = candidates.front().discrepancy;
  for (const DiscrepancyWitness& w : candidates)
    out.value = std::min(out.value, w.discrepancy);
  for (DiscrepancyWitness& w : candidates)
    if (w.discrepancy == out.value) out.witnesses.push_back(std::move(w));
  return out;
}

SingularityReport classify(const LogPair& pair) {
  const QDivisor& b = pair.boundary();

  SingularityReport report;
  report.min_exceptional = min_discrepancy_snc(pair);
  report.witnesses = report.min_exceptional.witnesses;

  bool all_below_one = true;   // every coefficient < 1
  bool all_at_most_one = true; // every coefficient <= 1
  Rational max_coeff = kZero;
  for (const QDivisor::Entry& e : b.entries()) {
    if (e.coeff >= kOne) all_below_one = false;
    if (e.coeff > kOne) all_at_most_one = false;
    max_coeff = std::max(max_coeff, e.coeff);
  }

  if (!all_at_most_one) {
    report.classification = SingularityClass::NotLc;
    return report;
  }
  if (!all_below_one) {
    report.classification = SingularityClass::LcNotKlt;
    return report;
  }

  const Rational& min_disc = report.min_exceptional.value;
  if (min_disc.is_positive())
    report.classification = SingularityClass::Terminal;
  else if (!min_disc.is_negative())
    report.classification = SingularityClass::Canonical;
  else
    report.classification = SingularityClass::KltNotCanonical;

  report.epsilon_klt_threshold =
      std::min(kOne - max_coeff, kOne + min_disc);
  return report;
}

namespace {

void oracle_walk(SurfaceModel& model, QDivisor& boundary, int depth,
                 Rational& best) {
  const auto& ids = model.ids();
  const std::size_t n = ids.size();

  auto visit = [&](const BlowUpSpec& spec) {
    BlowUpUndo undo;
    const DivisorId e = blow_up_in_place(model, boundary, spec, &undo);
    Rational disc = -boundary.coefficient(e);
    if (disc < best) best = disc;
    if (depth > 1) oracle_walk(model, boundary, depth - 1, best);
    undo_blow_up(model, boundary, undo);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const DivisorId di = ids[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const DivisorId dj = ids[j];
      if (model.form(di, dj) >= kOne)
        visit(BlowUpSpec::intersection_point(di, dj));
    }
    visit(BlowUpSpec::free_point(di));
  }
  visit(BlowUpSpec::general_point());
}

}  // namespace

int brute_force_max_depth() { return kMaxOracleDepth; }

Rational brute_force_min_discrepancy(const LogPair& pair, int depth) {
  if (depth < 1) throw domain_error("enumeration depth must be >= 1");
  if (depth > kMaxOracleDepth)
    throw resource_error("enumeration depth " + std::to_string(depth) +
                         " exceeds the configured maximum " +
                         std::to_string(kMaxOracleDepth));
  SurfaceModel model = pair.model();
  QDivisor boundary = pair.boundary();
  Rational best = 2;  // above any depth-1 discrepancy: a general point gives 1
  oracle_walk(model, boundary, depth, best);
  return best;
}

BigInt cartier_index(const ModelMorphism& morphism, const QDivisor& d) {
  const QDivisor pb = pullback(morphism, d);
  BigInt n{1};
  for (const QDivisor::Entry& e : pb.entries())
    n = boost::multiprecision::lcm(n, e.coeff.den());
  for (const QDivisor::Entry& e : d.entries())
    n = boost::multiprecision::lcm(n, e.coeff.den());
  return n;
}

BigInt log_cartier_index(const ModelMorphism& morphism,
                         const LogPair& target_pair) {
  if (!(morphism.target() == target_pair.model()))
    throw domain_error("log cartier index: pair lives on the wrong model");
  const QDivisor crepant =
      crepant_pullback_boundary_solved(morphism, target_pair.boundary());
  BigInt n{1};
  for (const QDivisor::Entry& e : crepant.entries())
    n = boost::multiprecision::lcm(n, e.coeff.den());
  for (const QDivisor::Entry& e : target_pair.boundary().entries())
    n = boost::multiprecision::lcm(n, e.coeff.den());
  return n;
}

}  // namespace logsurf
