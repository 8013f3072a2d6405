#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "logsurf/divisor.hpp"
#include "logsurf/rational.hpp"

namespace logsurf {

/// Combinatorial model of a projective surface: an ordered set of tracked
/// prime divisors together with their exact symmetric intersection form and
/// the intersection numbers K.D_i against the canonical class.
///
/// The model is numerically complete by convention: nef, bigness and
/// contraction decisions consult tracked divisors only, and every consumer
/// reports "relative to the tracked configuration". Intersection points are
/// not first class; a transverse point of D_i and D_j is addressed through
/// the pair (i,j) and consumes one unit of form[i,j].
class SurfaceModel {
 public:
  /// Builds a model with divisors labeled `labels`, ids assigned 0..n-1 in
  /// order. Validates symmetry, nonnegative off-diagonal entries, and
  /// adjunction parity (K.C + C.C even whenever both are integers).
  static SurfaceModel make(std::vector<std::string> labels,
                           std::vector<std::vector<Rational>> form,
                           std::vector<Rational> canonical);
  /// Same, with explicit stable ids (used when reading back recorded
  /// intermediate models).
  static SurfaceModel make_with_ids(std::vector<DivisorId> ids,
                                    std::vector<std::string> labels,
                                    std::vector<std::vector<Rational>> form,
                                    std::vector<Rational> canonical);

  std::size_t size() const { return ids_.size(); }
  const std::vector<DivisorId>& ids() const { return ids_; }
  bool tracks(DivisorId id) const;
  std::size_t index_of(DivisorId id) const;  // throws domain_error if absent
  const std::string& label(DivisorId id) const;
  std::optional<DivisorId> id_of_label(const std::string& label) const;

  const Rational& form(DivisorId a, DivisorId b) const;
  /// K.D for a single tracked divisor.
  const Rational& canonical_degree(DivisorId id) const;
  /// K.D extended linearly to divisors.
  Rational canonical_degree(const QDivisor& d) const;

  /// Bilinear extension of the intersection form.
  Rational intersect(const QDivisor& a, const QDivisor& b) const;
  Rational intersect(const QDivisor& a, DivisorId b) const;

  /// Observable equality: same ids, labels, form and canonical vector.
  friend bool operator==(const SurfaceModel& a, const SurfaceModel& b);

 private:
  friend struct ModelEditor;

  Rational& form_entry(std::size_t i, std::size_t j) {
    return form_[i * ids_.size() + j];
  }
  const Rational& form_entry(std::size_t i, std::size_t j) const {
    return form_[i * ids_.size() + j];
  }

  std::vector<DivisorId> ids_;       // creation order; ids never renumbered
  std::vector<std::string> labels_;  // unique within a model
  std::vector<Rational> form_;       // row-major size*size
  std::vector<Rational> canonical_;
  std::uint32_t next_id_ = 0;  // allocator state, excluded from equality
};

/// A surface model together with a boundary divisor on its tracked
/// divisors. Ordinary pairs carry coefficients in [0,1]; pairs built through
/// crepant pullback may carry negative coefficients ("sub-boundaries") and
/// are only legal inside discrepancy computations, never as pipeline input
/// or output.
class LogPair {
 public:
  LogPair() = default;  // empty pair; placeholder in aggregate records

  /// Coefficients restricted to [0,1]; support must be tracked.
  static LogPair boundary_pair(SurfaceModel model, QDivisor boundary);
  /// Coefficients unrestricted (sub-boundary); support must be tracked.
  static LogPair sub_boundary_pair(SurfaceModel model, QDivisor boundary);

  const SurfaceModel& model() const { return model_; }
  const QDivisor& boundary() const { return boundary_; }

  bool boundary_in_unit_range() const;
  /// Throws domain_error unless all coefficients lie in [0,1].
  void require_boundary_pair(const std::string& context) const;

  /// (K + boundary).C for one tracked divisor.
  Rational log_degree(DivisorId c) const;

  friend bool operator==(const LogPair& a, const LogPair& b) {
    return a.model_ == b.model_ && a.boundary_ == b.boundary_;
  }

 private:
  LogPair(SurfaceModel model, QDivisor boundary)
      : model_(std::move(model)), boundary_(std::move(boundary)) {}

  SurfaceModel model_;
  QDivisor boundary_;
};

/// Where to blow up: a transverse intersection point of two tracked
/// divisors, a point on exactly one tracked divisor, or a point on none.
struct BlowUpSpec {
  enum class Kind { IntersectionPoint, FreePoint, GeneralPoint };

  Kind kind = Kind::GeneralPoint;
  DivisorId first{};   // IntersectionPoint, FreePoint
  DivisorId second{};  // IntersectionPoint only

  static BlowUpSpec intersection_point(DivisorId i, DivisorId j) {
    return {Kind::IntersectionPoint, i, j};
  }
  static BlowUpSpec free_point(DivisorId i) {
    return {Kind::FreePoint, i, {}};
  }
  static BlowUpSpec general_point() { return {Kind::GeneralPoint, {}, {}}; }

  friend bool operator==(const BlowUpSpec&, const BlowUpSpec&) = default;
};

/// One elementary step of a birational morphism, stored in the downward
/// direction (a divisor disappears). Carries enough exact data to replay the
/// step in either direction.
struct MorphismStep {
  enum class Kind {
    BlowDown,            // inverse of an elementary blow-up
    MumfordContraction,  // numerical contraction of a negative curve
  };

  Kind kind = Kind::BlowDown;
  DivisorId id{};     // the divisor removed going down
  std::string label;  // its display label
  std::size_t position = 0;  // its index in the upper model's divisor order

  BlowUpSpec spec;  // BlowDown: where the inverse blow-up happens

  /// Coefficient assigned to `id` in the one-step crepant pullback of the
  /// lower pair actually transformed by the operation that produced this
  /// step. Bookkeeping for traces; replays recompute from the rule.
  Rational crepant_coefficient;

  // MumfordContraction payload: the removed curve's exact column.
  std::vector<QDivisor::Entry> column;  // intersections with survivors
  Rational self_intersection;           // C.C < 0
  Rational canonical_degree;            // K.C in the upper model
  Rational pair_degree;                 // (K+boundary).C at contraction time
  Rational discrepancy;                 // pair_degree / C.C
};

/// Ordered record of elementary blow-downs/contractions from a source model
/// (upstairs) to a target model (downstairs). Replaying the steps forward
/// from the source reproduces the target exactly, and replaying them
/// backward from the target reproduces the source exactly.
class ModelMorphism {
 public:
  static ModelMorphism identity(SurfaceModel model);
  static ModelMorphism make(SurfaceModel source, SurfaceModel target,
                            std::vector<MorphismStep> steps);

  const SurfaceModel& source() const { return source_; }
  const SurfaceModel& target() const { return target_; }
  const std::vector<MorphismStep>& steps() const { return steps_; }
  bool is_identity() const { return steps_.empty(); }

  /// Ids removed along the way (source minus target), in step order.
  std::vector<DivisorId> exceptional_ids() const;

 private:
  SurfaceModel source_;
  SurfaceModel target_;
  std::vector<MorphismStep> steps_;
};

/// upper: A -> B composed with lower: B -> C. Requires upper.target() ==
/// lower.source() (observable equality).
ModelMorphism compose(const ModelMorphism& upper, const ModelMorphism& lower);

struct BlowUpResult {
  LogPair pair;            // the blown-up pair (may be a sub-boundary pair)
  ModelMorphism morphism;  // source = new model, target = input model
  DivisorId exceptional;
};

/// Blows up one point described by `spec`. The new exceptional E gets
/// E.E = -1, K.E = -1; strict transforms lose one unit of intersection per
/// multiplicity and gain K-degree equal to the multiplicity; the boundary
/// coefficient of E is chosen crepantly: (sum of boundary multiplicities at
/// the point) - 1. A negative coefficient makes the result a sub-boundary
/// pair.
BlowUpResult blow_up(const LogPair& pair, const BlowUpSpec& spec);

/// Saved entries for undoing an in-place blow-up during enumeration.
struct BlowUpUndo {
  BlowUpSpec spec;
  DivisorId id{};
  std::uint32_t saved_next_id = 0;
  Rational saved_entries[5];  // kind-dependent subset used
};

/// In-place variant of blow_up used by enumeration loops and replays; same
/// calculus, no morphism record. Returns the new exceptional id. A label
/// override pins the label when re-running a recorded step.
DivisorId blow_up_in_place(SurfaceModel& model, QDivisor& boundary,
                           const BlowUpSpec& spec, BlowUpUndo* undo = nullptr,
                           const std::string* label_override = nullptr);
void undo_blow_up(SurfaceModel& model, QDivisor& boundary,
                  const BlowUpUndo& undo);

struct ContractResult {
  LogPair pair;            // the contracted pair
  ModelMorphism morphism;  // source = input model, target = new model
  MorphismStep step;       // the recorded contraction
};

/// Numerically contracts a tracked divisor C with C.C < 0 (Mumford
/// calculus): survivors get D_i.D_j - (D_i.C)(D_j.C)/C.C and
/// K.D_i - (K.C)(D_i.C)/C.C; the boundary forgets C. The recorded
/// discrepancy is the unique a with (K+boundary) - pullback = a*C, i.e.
/// ((K+boundary).C)/C.C.
ContractResult contract(const LogPair& pair, DivisorId c);

/// Divisor pullback along the morphism: the unique divisor on the source
/// with zero intersection against every divisor removed by the morphism and
/// pushforward equal to `d`. Computed by replaying steps upward.
QDivisor pullback(const ModelMorphism& morphism, const QDivisor& d);

/// Drops coefficients of removed divisors, keeps strict-transform ones.
QDivisor pushforward(const ModelMorphism& morphism, const QDivisor& d);

/// Boundary on the source making K_source + result the crepant pullback of
/// K_target + target_boundary: strict transform plus, at each step upward,
/// the step's crepant coefficient rule. May produce sub-boundary values.
QDivisor crepant_pullback_boundary(const ModelMorphism& morphism,
                                   const QDivisor& target_boundary);

/// Same divisor computed on the source model in one shot, by solving the
/// linear system (K_source + strict + sum g_t E_t).E_s = 0 against the
/// exceptional intersection submatrix. Independent route used to cross-check
/// the replay; throws domain_error when the submatrix is singular (cannot
/// happen for genuinely contracted negative curves).
QDivisor crepant_pullback_boundary_solved(const ModelMorphism& morphism,
                                          const QDivisor& target_boundary);

/// Reconstructs every intermediate model of a morphism, walking upward from
/// the target. levels()[0] is the target, levels().back() the source.
std::vector<SurfaceModel> morphism_levels(const ModelMorphism& morphism);

struct NefResult {
  bool nef = false;
  /// Tracked divisors with negative degree, with their values.
  std::vector<std::pair<DivisorId, Rational>> violations;
};

/// D.C >= 0 for every tracked C, with the violating curves as certificate.
NefResult is_nef_on_tracked(const SurfaceModel& model, const QDivisor& d);

/// (K + boundary).C >= 0 for every tracked C.
NefResult log_nef_on_tracked(const LogPair& pair);

/// Self-intersection of a divisor that is nef on tracked curves (the
/// surface-volume of such a divisor). Throws domain_error otherwise.
Rational volume_nef(const SurfaceModel& model, const QDivisor& d);

}  // namespace logsurf
