#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "logsurf/singularity.hpp"
#include "logsurf/surface.hpp"

namespace logsurf {

/// Honest bigness evidence relative to the tracked configuration: a
/// decomposition K + boundary = nef_part + effective_part (numerically
/// against every tracked curve) with nef_part nef-on-tracked of positive
/// self-intersection and effective_part effective.
struct BignessCertificate {
  QDivisor nef_part;
  QDivisor effective_part;
};

/// Throws domain_error when the certificate does not certify K + boundary
/// of `pair` big relative to the tracked configuration.
void validate_bigness_certificate(const LogPair& pair,
                                  const BignessCertificate& cert);

/// Tries to construct a certificate: solves for a tracked representative R
/// of K + boundary (same intersection numbers against all tracked curves)
/// and splits off the negative part on the span of violating curves until
/// the rest is nef-on-tracked. Returns nullopt when no representative
/// exists, the negative-part system is singular, the split is not
/// effective, or the nef part has nonpositive square.
std::optional<BignessCertificate> build_bigness_certificate(
    const LogPair& pair);

/// Where a bigness oracle found its certificate: on the pair itself, or on
/// the end of a numerical contraction run.
struct BignessWitness {
  LogPair pair;
  BignessCertificate certificate;
  bool after_contractions = false;
  std::vector<DivisorId> contracted;
};

using BignessOracle =
    std::function<std::optional<BignessWitness>(const LogPair&)>;

/// Certificate construction on the pair, falling back to construction after
/// contracting all (K+boundary)-negative tracked curves.
BignessOracle default_bigness_oracle();

struct TerminalizeResult {
  LogPair pair;            // terminal, crepant over the input
  ModelMorphism morphism;  // source = terminal model, target = input model
};

enum class ScanOrder { Ascending, Descending };

/// Crepant terminalization of a transverse klt pair with coefficients on a
/// grid {l/k}: repeatedly blows up one intersection unit of a pair of
/// components with coefficient sum >= 1, assigning the new exceptional the
/// coefficient a_i + a_j - 1, until every intersecting pair of components
/// sums below 1. The result classifies terminal, satisfies the exact crepant
/// pullback identity, and keeps all coefficients in the grid. The scan
/// order changes intermediate steps but not the endpoint class or the
/// multiset of exceptional coefficients.
TerminalizeResult terminalize(const LogPair& pair,
                              ScanOrder order = ScanOrder::Ascending);

struct MmpStep {
  DivisorId contracted{};
  std::string label;
  Rational pair_degree;        // (K+boundary).C at contraction time, < 0
  Rational self_intersection;  // C.C < 0
  Rational discrepancy;        // pair_degree / C.C over the immediate target
};

struct MmpTrace {
  std::vector<MmpStep> steps;
  LogPair final_pair;
  ModelMorphism morphism;  // source = input model, target = final model
  NefResult final_nef;     // K + boundary against tracked curves at the end
};

/// Declared justification for running the contraction loop: an explicit
/// certificate (validated against the input pair) or the caller's
/// assumption. The run itself is purely numerical either way.
struct BignessAssumption {
  std::optional<BignessCertificate> certificate;
  bool assume = false;

  static BignessAssumption assumed() { return {std::nullopt, true}; }
  static BignessAssumption certified(BignessCertificate cert) {
    return {std::move(cert), false};
  }
};

/// Contracts, while one exists, the tracked curve with C.C < 0 and
/// (K+boundary).C < 0 that is lexicographically smallest by
/// ((K+boundary).C, id); terminates in at most size() steps. The final
/// pair's nef status against tracked curves is recorded with certificate.
MmpTrace run_mmp(const LogPair& pair, const BignessAssumption& bigness);

struct ContractedDiscrepancy {
  DivisorId id{};
  std::string label;
  Rational discrepancy;  // over the final pair
};

/// True discrepancies of all contracted curves over the final pair,
/// computed by re-solving the crepant pullback system on the input model.
std::vector<ContractedDiscrepancy> discrepancies_over_final(
    const MmpTrace& trace);

/// Number of contracted curves with negative discrepancy over the final
/// pair. For a terminal input this is bounded by the number of components
/// of the input boundary.
std::size_t count_negative_discrepancy(const MmpTrace& trace);

/// Divisor-level transfer identity along a morphism: checks
///   pushforward(floor(m * pullback(d)) + e) == floor(m * d)
/// for an effective exceptional e and integer m >= 1. True for every valid
/// input; false indicates an implementation bug in the calculus.
bool check_projection_formula(const ModelMorphism& morphism, const QDivisor& d,
                              long multiple, const QDivisor& e);

/// Greedily removes whole components of the boundary, in descending id
/// order, while the oracle still certifies K + remaining big; returns the
/// removed part. Maximal with respect to the greedy order only (a maximal
/// redundant part is not unique in general). Throws domain_error when the
/// oracle cannot certify the input pair itself.
QDivisor redundant_part(const LogPair& pair, const BignessOracle& oracle);

}  // namespace logsurf
