#include "logsurf/bounds.hpp"

#include <algorithm>

#include "logsurf/errors.hpp"

namespace logsurf {

namespace {

const Rational kZero{};
const Rational kOne{1};

const char* kCaveatTrackedWindow =
    "nef and big are certified relative to the tracked configuration only";
const char* kCaveatVolume =
    "the volume comparison against the canonical class alone is not "
    "checkable from tracked data and is assumed";
const char* kCaveatAssumedBigness =
    "the contraction run used a declared bigness assumption, not a "
    "transported certificate";

[[noreturn]] void stage_error(const std::string& stage,
                              const std::string& what) {
  throw domain_error("stage " + stage + ": " + what);
}

}  // namespace

SemigroupDecomposition semigroup_decompose(const BigInt& n, const BigInt& m) {
  if (n < 1 || m < 1)
    throw domain_error("semigroup decomposition needs positive parameters");
  SemigroupDecomposition out;
  if (m >= n * n + 1) {
    // Split k = m - n^2 >= 1 as (n+1)*a + b with 0 <= b <= n; each case
    // rewrites n^2 + k over the generators q*n+1.
    const BigInt k = m - n * n;
    const BigInt a = k / (n + 1);
    const BigInt b = k % (n + 1);
    out.representable = true;
    if (b.is_zero()) {
      out.parts.push_back(n + 1);
      for (BigInt i = 0; i < a - 1; ++i) out.parts.emplace_back(1);
    } else {
      out.parts.push_back(n - b + 1);
      for (BigInt i = 0; i < a + b - 1; ++i) out.parts.emplace_back(1);
    }
    return out;
  }
  // Below the guaranteed threshold: m is a sum of r generators exactly when
  // m = s*n + r with s >= r >= 1, i.e. r == m mod n (shifted into [1,n])
  // and r*(n+1) <= m. Larger candidates r+n, r+2n, ... only tighten the
  // inequality, so the smallest residue decides membership.
  BigInt r = m % n;
  if (r.is_zero()) r = n;
  if (r * (n + 1) > m) return out;  // not representable
  const BigInt s = (m - r) / n;
  out.representable = true;
  for (BigInt i = 0; i < r - 1; ++i) out.parts.emplace_back(1);
  out.parts.push_back(s - (r - 1));
  return out;
}

BigInt birationality_threshold(const BigInt& n) {
  if (n < 1) throw domain_error("threshold needs a positive constant");
  const BigInt replaced = 18 * n;
  return replaced * replaced + 1;
}

std::vector<bool> semigroup_membership_dp(const BigInt& n, std::size_t limit) {
  if (n < 1) throw domain_error("membership table needs a positive constant");
  // All generators q*n+1 that fit the table. Truncating at q <= n would be
  // wrong: n^2 + n + 1 is a generator (q = n+1) but not a sum of smaller
  // ones, yet it lies above the n^2 threshold.
  std::vector<std::size_t> generators;
  for (BigInt q = 1;; ++q) {
    const BigInt g = q * n + 1;
    if (g > limit) break;
    generators.push_back(static_cast<std::size_t>(g));
  }
  std::vector<bool> table(limit + 1, false);
  table[0] = true;
  for (std::size_t v = 1; v <= limit; ++v)
    for (std::size_t g : generators) {
      if (g > v) break;
      if (table[v - g]) {
        table[v] = true;
        break;
      }
    }
  return table;
}

namespace {

void validate_inputs(const BoundInputs& inputs) {
  if (!inputs.delta.is_positive() || inputs.delta >= kOne)
    stage_error("inputs", "delta must lie strictly between 0 and 1");
  if (!inputs.epsilon.is_positive() || inputs.epsilon >= kOne)
    stage_error("inputs", "epsilon must lie strictly between 0 and 1");
  if (inputs.component_bound < 1)
    stage_error("inputs", "component bound must be a positive integer");
  if (inputs.cartier_bound && *inputs.cartier_bound < 1)
    stage_error("inputs", "cartier bound must be a positive integer");
}

StageRound make_round_stage(const LogPair& pair, const Rational& delta) {
  StageRound stage;
  stage.delta = delta;
  stage.boundary_before = pair.boundary();
  if (pair.boundary().empty()) {
    // Nothing to round; the grid degenerates to the integers.
    stage.grid = 1;
    return stage;
  }
  std::vector<Rational> coefficients;
  for (const QDivisor::Entry& e : pair.boundary().entries())
    coefficients.push_back(e.coeff);
  RoundedCoefficients rounded =
      round_coefficients(CoefficientSet::make(std::move(coefficients)), delta);
  stage.grid = rounded.grid;
  stage.map = rounded.map;
  for (const QDivisor::Entry& e : pair.boundary().entries())
    stage.boundary_after.set_coefficient(e.id, rounded.apply(e.coeff));
  return stage;
}

/// K + rounded = (K + margin) + (rounded - margin), and the difference is
/// effective because the rounding loss stays under the margin.
BignessCertificate transport_over_rounding(const BignessCertificate& margin,
                                           const QDivisor& margin_boundary,
                                           const QDivisor& rounded_boundary) {
  BignessCertificate out;
  out.nef_part = margin.nef_part;
  out.effective_part =
      margin.effective_part + (rounded_boundary - margin_boundary);
  return out;
}

}  // namespace

BoundCertificate run_pipeline(
    const LogPair& pair, const BoundInputs& inputs,
    const std::optional<BignessCertificate>& supplied) {
  validate_inputs(inputs);
  pair.require_boundary_pair("pipeline input");
  {
    SingularityReport input_report = classify(pair);
    if (input_report.classification == SingularityClass::LcNotKlt ||
        input_report.classification == SingularityClass::NotLc)
      stage_error("input", "the pipeline needs a klt pair, got " +
                               to_string(input_report.classification));
  }

  BoundCertificate cert;
  cert.input = pair;
  cert.inputs = inputs;
  cert.caveats = {kCaveatTrackedWindow, kCaveatVolume};

  // Stage 1: round the boundary coefficients onto the grid {l/k}.
  cert.round = make_round_stage(pair, inputs.delta);
  const LogPair rounded =
      LogPair::boundary_pair(pair.model(), cert.round.boundary_after);

  // Bigness of the margin pair (model, (1-delta)*boundary): the declared
  // margin makes the rounded pair big whenever the margin pair is.
  const QDivisor margin_boundary =
      (kOne - inputs.delta) * pair.boundary();
  cert.bigness.margin_pair =
      LogPair::boundary_pair(pair.model(), margin_boundary);
  if (supplied) {
    validate_bigness_certificate(cert.bigness.margin_pair, *supplied);
    cert.bigness.witness =
        BignessWitness{cert.bigness.margin_pair, *supplied, false, {}};
    cert.bigness.supplied = true;
  } else {
    auto witness = default_bigness_oracle()(cert.bigness.margin_pair);
    if (!witness)
      stage_error("bigness",
                  "no certificate supplied and none constructible for the "
                  "margin pair");
    cert.bigness.witness = std::move(*witness);
  }

  // Stage 2: drop redundant components while bigness stays certified.
  std::optional<BignessCertificate> transported;
  if (!cert.bigness.witness.after_contractions)
    transported = transport_over_rounding(cert.bigness.witness.certificate,
                                          margin_boundary,
                                          cert.round.boundary_after);
  const BignessOracle base_oracle = default_bigness_oracle();
  const BignessOracle oracle =
      [&](const LogPair& candidate) -> std::optional<BignessWitness> {
    if (transported && candidate == rounded)
      return BignessWitness{candidate, *transported, false, {}};
    return base_oracle(candidate);
  };
  QDivisor removed;
  try {
    removed = redundant_part(rounded, oracle);
  } catch (const domain_error& e) {
    stage_error("redundant-part", e.what());
  }
  cert.redundant.removed = removed;
  cert.redundant.result = LogPair::boundary_pair(
      pair.model(), cert.round.boundary_after - removed);
  {
    auto witness = oracle(cert.redundant.result);
    if (!witness)
      stage_error("redundant-part", "lost the bigness certificate");
    cert.redundant.witness = std::move(*witness);
  }
  if (BigInt(cert.redundant.result.boundary().component_count()) >
      inputs.component_bound)
    stage_error("redundant-part",
                "non-redundant components exceed the declared bound");

  // Stage 3: crepant terminalization.
  try {
    TerminalizeResult term = terminalize(cert.redundant.result);
    cert.terminalization.morphism = std::move(term.morphism);
    cert.terminalization.result = std::move(term.pair);
  } catch (const domain_error& e) {
    stage_error("terminalize", e.what());
  }

  // Stage 4: check the declared klt level.
  cert.epsilon_klt.epsilon = inputs.epsilon;
  cert.epsilon_klt.report = classify(cert.terminalization.result);
  if (cert.epsilon_klt.report.classification != SingularityClass::Terminal)
    stage_error("epsilon-klt", "terminalization did not produce a terminal "
                               "pair");
  if (!cert.epsilon_klt.report.epsilon_klt_threshold ||
      *cert.epsilon_klt.report.epsilon_klt_threshold < inputs.epsilon)
    stage_error("epsilon-klt",
                "the pair is not klt at the declared level epsilon");

  // Stage 5: contract to a minimal model.
  BignessAssumption assumption = BignessAssumption::assumed();
  if (!cert.bigness.witness.after_contractions) {
    BignessCertificate lifted;
    lifted.nef_part = pullback(cert.terminalization.morphism,
                               cert.redundant.witness.certificate.nef_part);
    lifted.effective_part =
        pullback(cert.terminalization.morphism,
                 cert.redundant.witness.certificate.effective_part);
    assumption = BignessAssumption::certified(std::move(lifted));
  } else if (auto direct =
                 build_bigness_certificate(cert.terminalization.result)) {
    assumption = BignessAssumption::certified(std::move(*direct));
  } else {
    cert.mmp.bigness_assumed = true;
    cert.caveats.push_back(kCaveatAssumedBigness);
  }
  cert.mmp.trace = run_mmp(cert.terminalization.result, assumption);
  if (!cert.mmp.trace.final_nef.nef)
    stage_error("mmp",
                "no minimal model along tracked curves: a negative-degree "
                "curve with nonnegative self-intersection remains");

  // Stage 6: count negative discrepancies over the final pair.
  cert.negative_count.discrepancies = discrepancies_over_final(cert.mmp.trace);
  for (const ContractedDiscrepancy& d : cert.negative_count.discrepancies)
    if (d.discrepancy.is_negative()) ++cert.negative_count.count;
  cert.negative_count.components_at_mmp_input =
      cert.terminalization.result.boundary().component_count();
  if (cert.negative_count.count > cert.negative_count.components_at_mmp_input)
    throw std::logic_error(
        "internal: negative-discrepancy count exceeded the component count");
  if (BigInt(cert.negative_count.count) > inputs.component_bound)
    stage_error("negative-count",
                "negative-discrepancy count exceeds the declared bound");

  // Stage 7: the Cartier constant.
  if (inputs.cartier_bound) {
    cert.cartier.concrete = false;
    cert.cartier.value = *inputs.cartier_bound;
  } else {
    cert.cartier.concrete = true;
    cert.cartier.crepant_pullback = crepant_pullback_boundary_solved(
        cert.mmp.trace.morphism, cert.mmp.trace.final_pair.boundary());
    cert.cartier.value =
        log_cartier_index(cert.mmp.trace.morphism, cert.mmp.trace.final_pair);
  }

  // Stage 8: the threshold.
  cert.threshold.n = cert.cartier.value;
  cert.threshold.n_replaced = 18 * cert.cartier.value;
  cert.threshold.m0 = birationality_threshold(cert.cartier.value);
  cert.m0 = cert.threshold.m0;
  return cert;
}

namespace {

[[noreturn]] void fail(const std::string& stage, const std::string& what) {
  throw verify_error(stage, what);
}

void check(bool ok, const std::string& stage, const std::string& what) {
  if (!ok) fail(stage, what);
}

}  // namespace

void verify_certificate(const BoundCertificate& cert) {
  // Inputs and input pair.
  try {
    validate_inputs(cert.inputs);
  } catch (const domain_error& e) {
    fail("inputs", e.what());
  }
  check(cert.input.boundary_in_unit_range(), "input",
        "input boundary out of range");

  // Rounding: recompute grid, map and image.
  {
    StageRound expected;
    try {
      expected = make_round_stage(cert.input, cert.inputs.delta);
    } catch (const domain_error& e) {
      fail("round", e.what());
    }
    check(cert.round.delta == cert.inputs.delta, "round",
          "recorded delta disagrees with the inputs");
    check(expected.grid == cert.round.grid, "round", "grid mismatch");
    check(expected.map == cert.round.map, "round", "rounding map mismatch");
    check(expected.boundary_before == cert.round.boundary_before, "round",
          "boundary before rounding mismatch");
    check(expected.boundary_after == cert.round.boundary_after, "round",
          "boundary after rounding mismatch");
    for (const auto& [from, to] : cert.round.map) {
      check((kOne - cert.inputs.delta) * from < to && to <= from, "round",
            "rounded coefficient violates the margin inequality");
      check((Rational(cert.round.grid) * to).is_integer(), "round",
            "rounded coefficient off the grid");
    }
  }

  // Bigness of the margin pair.
  {
    const QDivisor margin_boundary =
        (kOne - cert.inputs.delta) * cert.input.boundary();
    check(cert.bigness.margin_pair.boundary() == margin_boundary, "bigness",
          "margin boundary mismatch");
    check(cert.bigness.margin_pair.model() == cert.input.model(), "bigness",
          "margin pair lives on the wrong model");
    try {
      validate_bigness_certificate(cert.bigness.witness.pair,
                                   cert.bigness.witness.certificate);
    } catch (const domain_error& e) {
      fail("bigness", e.what());
    }
    if (!cert.bigness.witness.after_contractions)
      check(cert.bigness.witness.pair == cert.bigness.margin_pair, "bigness",
            "witness pair is not the margin pair");
  }

  // Redundant part: full components, certified result, bounded count.
  {
    for (const QDivisor::Entry& e : cert.redundant.removed.entries())
      check(cert.round.boundary_after.coefficient(e.id) == e.coeff,
            "redundant-part", "removed part is not a union of components");
    check(cert.redundant.result.boundary() ==
              cert.round.boundary_after - cert.redundant.removed,
          "redundant-part", "kept boundary mismatch");
    check(cert.redundant.result.model() == cert.input.model(),
          "redundant-part", "kept pair lives on the wrong model");
    try {
      validate_bigness_certificate(cert.redundant.witness.pair,
                                   cert.redundant.witness.certificate);
    } catch (const domain_error& e) {
      fail("redundant-part", e.what());
    }
    check(BigInt(cert.redundant.result.boundary().component_count()) <=
              cert.inputs.component_bound,
          "redundant-part", "component bound violated");
  }

  // Terminalization: replay the recorded morphism and the crepant identity.
  {
    const ModelMorphism& f = cert.terminalization.morphism;
    check(f.target() == cert.redundant.result.model(), "terminalize",
          "morphism target is not the rounded model");
    check(f.source() == cert.terminalization.result.model(), "terminalize",
          "morphism source is not the terminal model");
    for (const MorphismStep& s : f.steps())
      check(s.kind == MorphismStep::Kind::BlowDown, "terminalize",
            "terminalization contains a non-blow-up step");
    std::vector<SurfaceModel> levels;
    try {
      levels = morphism_levels(f);
    } catch (const domain_error& e) {
      fail("terminalize", e.what());
    }
    check(levels.back() == f.source(), "terminalize",
          "upward replay does not reach the recorded terminal model");
    QDivisor crepant;
    try {
      crepant =
          crepant_pullback_boundary(f, cert.redundant.result.boundary());
    } catch (const domain_error& e) {
      fail("terminalize", e.what());
    }
    check(crepant == cert.terminalization.result.boundary(), "terminalize",
          "crepant pullback does not reproduce the terminal boundary");
    check(crepant_pullback_boundary_solved(
              f, cert.redundant.result.boundary()) == crepant,
          "terminalize", "replayed and solved crepant pullbacks disagree");
    for (const QDivisor::Entry& e :
         cert.terminalization.result.boundary().entries())
      check((Rational(cert.round.grid) * e.coeff).is_integer(), "terminalize",
            "terminal coefficient off the grid");
  }

  // Klt level.
  {
    check(cert.epsilon_klt.epsilon == cert.inputs.epsilon, "epsilon-klt",
          "recorded epsilon disagrees with the inputs");
    SingularityReport report = classify(cert.terminalization.result);
    check(report.classification == SingularityClass::Terminal, "epsilon-klt",
          "the terminalized pair does not classify terminal");
    check(report.classification == cert.epsilon_klt.report.classification &&
              report.epsilon_klt_threshold ==
                  cert.epsilon_klt.report.epsilon_klt_threshold &&
              report.min_exceptional.bounded ==
                  cert.epsilon_klt.report.min_exceptional.bounded &&
              report.min_exceptional.value ==
                  cert.epsilon_klt.report.min_exceptional.value,
          "epsilon-klt", "recorded classification mismatch");
    check(report.epsilon_klt_threshold &&
              *report.epsilon_klt_threshold >= cert.inputs.epsilon,
          "epsilon-klt", "the pair is not klt at the declared level");
  }

  // Contraction run: deterministic re-run must reproduce the trace.
  {
    MmpTrace replay =
        run_mmp(cert.terminalization.result, BignessAssumption::assumed());
    check(replay.steps.size() == cert.mmp.trace.steps.size(), "mmp",
          "contraction count mismatch");
    for (std::size_t i = 0; i < replay.steps.size(); ++i) {
      const MmpStep& a = replay.steps[i];
      const MmpStep& b = cert.mmp.trace.steps[i];
      check(a.contracted == b.contracted && a.pair_degree == b.pair_degree &&
                a.self_intersection == b.self_intersection &&
                a.discrepancy == b.discrepancy,
            "mmp", "contraction step mismatch");
      check(b.pair_degree.is_negative() &&
                b.self_intersection.is_negative(),
            "mmp", "recorded step contracts a non-negative curve");
      check(b.discrepancy == b.pair_degree / b.self_intersection, "mmp",
            "recorded step discrepancy is inconsistent");
    }
    check(replay.final_pair == cert.mmp.trace.final_pair, "mmp",
          "final pair mismatch");
    check(replay.final_nef.nef && cert.mmp.trace.final_nef.nef, "mmp",
          "final pair is not nef along tracked curves");
  }

  // Negative-discrepancy count.
  {
    auto recomputed = discrepancies_over_final(cert.mmp.trace);
    check(recomputed.size() == cert.negative_count.discrepancies.size(),
          "negative-count", "discrepancy list size mismatch");
    for (std::size_t i = 0; i < recomputed.size(); ++i)
      check(recomputed[i].id == cert.negative_count.discrepancies[i].id &&
                recomputed[i].discrepancy ==
                    cert.negative_count.discrepancies[i].discrepancy,
            "negative-count", "discrepancy mismatch");
    std::size_t negatives = 0;
    for (const ContractedDiscrepancy& d : recomputed)
      if (d.discrepancy.is_negative()) ++negatives;
    check(negatives == cert.negative_count.count, "negative-count",
          "negative count mismatch");
    check(cert.negative_count.components_at_mmp_input ==
              cert.terminalization.result.boundary().component_count(),
          "negative-count", "component count mismatch");
    check(cert.negative_count.count <=
              cert.negative_count.components_at_mmp_input,
          "negative-count", "count exceeds the component bound");
    check(BigInt(cert.negative_count.count) <= cert.inputs.component_bound,
          "negative-count", "count exceeds the declared bound");
  }

  // Cartier constant.
  {
    if (cert.cartier.concrete) {
      check(!cert.inputs.cartier_bound, "cartier",
            "concrete mode despite a declared bound");
      QDivisor crepant = crepant_pullback_boundary_solved(
          cert.mmp.trace.morphism, cert.mmp.trace.final_pair.boundary());
      check(crepant == cert.cartier.crepant_pullback, "cartier",
            "crepant pullback mismatch");
      check(log_cartier_index(cert.mmp.trace.morphism,
                              cert.mmp.trace.final_pair) ==
                cert.cartier.value,
            "cartier", "index mismatch");
    } else {
      check(cert.inputs.cartier_bound &&
                *cert.inputs.cartier_bound == cert.cartier.value,
            "cartier", "declared bound mismatch");
    }
  }

  // Threshold arithmetic.
  {
    check(cert.threshold.n == cert.cartier.value, "threshold",
          "constant mismatch");
    check(cert.threshold.n_replaced == 18 * cert.threshold.n, "threshold",
          "replacement constant mismatch");
    check(cert.threshold.m0 ==
              cert.threshold.n_replaced * cert.threshold.n_replaced + 1,
          "threshold", "threshold arithmetic mismatch");
    check(cert.m0 == cert.threshold.m0, "threshold",
          "certificate threshold mismatch");
    SemigroupDecomposition probe =
        semigroup_decompose(cert.threshold.n_replaced, cert.threshold.m0);
    check(probe.representable, "threshold",
          "threshold does not decompose over the semigroup");
  }
}

}  // namespace logsurf
