#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logsurf/birational.hpp"
#include "logsurf/divisor.hpp"
#include "logsurf/singularity.hpp"
#include "logsurf/surface.hpp"

namespace logsurf {

/// External constants of the effectivity pipeline. They come from
/// non-effective existence results, so they are inputs, not derived values:
/// delta is the declared bigness margin (K + (1-delta)*boundary stays big),
/// epsilon the declared klt level, component_bound the declared bound on
/// non-redundant components, and cartier_bound an optional declared Cartier
/// index bound (absent = compute the concrete index of the produced model).
struct BoundInputs {
  Rational delta;
  Rational epsilon;
  BigInt component_bound{1};
  std::optional<BigInt> cartier_bound;

  friend bool operator==(const BoundInputs&, const BoundInputs&) = default;
};

struct SemigroupDecomposition {
  bool representable = false;
  std::vector<BigInt> parts;  // the q_i >= 1; sum of (q_i*n + 1) equals m
};

/// Writes m as a sum of generators q*n+1 (q >= 1) of the numerical
/// semigroup. For m >= n*n+1 the constructive split of m - n*n by n+1
/// always succeeds; below that threshold exact residue search may certify
/// non-representability.
SemigroupDecomposition semigroup_decompose(const BigInt& n, const BigInt& m);

/// Smallest exponent bound emitted by the pipeline for a model whose log
/// divisor has Cartier index n: (18n)^2 + 1. Every m at or above it
/// decomposes over the semigroup generated by {q*(18n)+1}.
BigInt birationality_threshold(const BigInt& n);

/// Independent membership table for the semigroup generated by the
/// truncated list {q*n+1 : 1 <= q <= n}: entry v says whether v is a sum of
/// such generators. Straight dynamic programming, no shared logic with
/// semigroup_decompose; exists to cross-check it.
std::vector<bool> semigroup_membership_dp(const BigInt& n, std::size_t limit);

// --- pipeline stages -------------------------------------------------------

struct StageRound {
  Rational delta;
  BigInt grid{1};  // k: rounded coefficients lie in {l/k}
  std::vector<std::pair<Rational, Rational>> map;
  QDivisor boundary_before;
  QDivisor boundary_after;
};

struct StageBigness {
  LogPair margin_pair;  // (model, (1-delta) * input boundary)
  BignessWitness witness;
  bool supplied = false;  // certificate came with the input document
};

struct StageRedundant {
  QDivisor removed;  // full components whose removal kept bigness
  LogPair result;
  BignessWitness witness;  // for K + result boundary
};

struct StageTerminalize {
  ModelMorphism morphism;  // source = terminal model, target = result model
  LogPair result;
};

struct StageEpsilonKlt {
  Rational epsilon;
  SingularityReport report;
};

struct StageMmp {
  MmpTrace trace;
  bool bigness_assumed = false;  // ran under an assumption, not a certificate
};

struct StageNegativeCount {
  std::vector<ContractedDiscrepancy> discrepancies;
  std::size_t count = 0;
  std::size_t components_at_mmp_input = 0;
};

struct StageCartier {
  bool concrete = false;  // computed from the produced model
  BigInt value{1};
  QDivisor crepant_pullback;  // backing data in concrete mode
};

struct StageThreshold {
  BigInt n{1};
  BigInt n_replaced{18};  // 18n
  BigInt m0{325};         // (18n)^2 + 1
};

/// Complete, replayable log of one pipeline run. Every stage records the
/// exact values needed to re-check its identities offline.
struct BoundCertificate {
  LogPair input;
  BoundInputs inputs;
  StageRound round;
  StageBigness bigness;
  StageRedundant redundant;
  StageTerminalize terminalization;
  StageEpsilonKlt epsilon_klt;
  StageMmp mmp;
  StageNegativeCount negative_count;
  StageCartier cartier;
  StageThreshold threshold;
  BigInt m0{325};
  std::vector<std::string> caveats;
};

/// Runs the staged reduction on a transverse klt pair: round the boundary
/// coefficients onto a grid, certify bigness of the margin pair, drop
/// redundant components (bounded by component_bound), terminalize, check
/// the klt level, contract to a minimal model, count negative-discrepancy
/// curves, determine the Cartier constant, and emit the threshold.
/// Stage-precondition failures throw domain_error naming the stage.
BoundCertificate run_pipeline(
    const LogPair& pair, const BoundInputs& inputs,
    const std::optional<BignessCertificate>& supplied = std::nullopt);

/// Replays every stage identity of a certificate from its recorded data
/// alone. Throws verify_error naming the first failing stage.
void verify_certificate(const BoundCertificate& cert);

}  // namespace logsurf
