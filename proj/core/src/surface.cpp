#include "logsurf/surface.hpp"

#include <algorithm>
#include <utility>

#include "logsurf/errors.hpp"
#include "logsurf/linalg.hpp"

namespace logsurf {

namespace {
const Rational kZero{};
const Rational kOne{1};
const Rational kMinusOne{-1};

bool is_even_integer(const Rational& r) {
  return r.is_integer() && r.num() % 2 == 0;
}
}  // namespace

// Grants the free-function operations access to the model internals.
struct ModelEditor {
  static SurfaceModel build(std::vector<DivisorId> ids,
                            std::vector<std::string> labels,
                            std::vector<Rational> form,
                            std::vector<Rational> canonical) {
    SurfaceModel m;
    m.ids_ = std::move(ids);
    m.labels_ = std::move(labels);
    m.form_ = std::move(form);
    m.canonical_ = std::move(canonical);
    std::uint32_t next = 0;
    for (DivisorId id : m.ids_) next = std::max(next, id.value + 1);
    m.next_id_ = next;
    return m;
  }

  static std::uint32_t& next_id(SurfaceModel& m) { return m.next_id_; }
  static std::uint32_t next_id_of(const SurfaceModel& m) { return m.next_id_; }

  static std::string allocate_label(const SurfaceModel& m) {
    std::uint32_t k = m.next_id_;
    for (;;) {
      std::string candidate = "E" + std::to_string(k);
      if (!m.id_of_label(candidate)) return candidate;
      ++k;
    }
  }

  /// Appends a divisor with an explicit id and label; the new row and column
  /// of the form start as zero, K.E starts as zero.
  static std::size_t append(SurfaceModel& m, DivisorId id, std::string label) {
    if (m.tracks(id)) throw domain_error("divisor id already tracked");
    if (m.id_of_label(label)) throw domain_error("divisor label already used");
    const std::size_t n = m.size();
    std::vector<Rational> form((n + 1) * (n + 1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        form[i * (n + 1) + j] = std::move(m.form_[i * n + j]);
    m.form_ = std::move(form);
    m.ids_.push_back(id);
    m.labels_.push_back(std::move(label));
    m.canonical_.emplace_back();
    m.next_id_ = std::max(m.next_id_, id.value + 1);
    return n;
  }

  /// Removes the divisor at `index`, keeping the relative order of the rest.
  static void remove(SurfaceModel& m, std::size_t index) {
    const std::size_t n = m.size();
    std::vector<Rational> form((n - 1) * (n - 1));
    for (std::size_t i = 0, ti = 0; i < n; ++i) {
      if (i == index) continue;
      for (std::size_t j = 0, tj = 0; j < n; ++j) {
        if (j == index) continue;
        form[ti * (n - 1) + tj] = std::move(m.form_[i * n + j]);
        ++tj;
      }
      ++ti;
    }
    m.form_ = std::move(form);
    m.ids_.erase(m.ids_.begin() + static_cast<std::ptrdiff_t>(index));
    m.labels_.erase(m.labels_.begin() + static_cast<std::ptrdiff_t>(index));
    m.canonical_.erase(m.canonical_.begin() +
                       static_cast<std::ptrdiff_t>(index));
  }

  static Rational& form_at(SurfaceModel& m, std::size_t i, std::size_t j) {
    return m.form_entry(i, j);
  }
  static Rational& canonical_at(SurfaceModel& m, std::size_t i) {
    return m.canonical_[i];
  }
};

SurfaceModel SurfaceModel::make(std::vector<std::string> labels,
                                std::vector<std::vector<Rational>> form,
                                std::vector<Rational> canonical) {
  std::vector<DivisorId> ids(labels.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    ids[i] = DivisorId{static_cast<std::uint32_t>(i)};
  return make_with_ids(std::move(ids), std::move(labels), std::move(form),
                       std::move(canonical));
}

SurfaceModel SurfaceModel::make_with_ids(
    std::vector<DivisorId> ids, std::vector<std::string> labels,
    std::vector<std::vector<Rational>> form, std::vector<Rational> canonical) {
  const std::size_t n = ids.size();
  if (labels.size() != n || form.size() != n || canonical.size() != n)
    throw domain_error("model component sizes disagree");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i].empty()) throw domain_error("empty divisor label");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ids[i] == ids[j]) throw domain_error("duplicate divisor id");
      if (labels[i] == labels[j]) throw domain_error("duplicate divisor label");
    }
  }
  std::vector<Rational> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (form[i].size() != n)
      throw domain_error("intersection matrix is not square");
    for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = form[i][j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (flat[i * n + j] != flat[j * n + i])
        throw domain_error("intersection matrix is not symmetric at (" +
                           labels[i] + ", " + labels[j] + ")");
      if (flat[i * n + j].is_negative())
        throw domain_error(
            "distinct prime divisors need nonnegative intersection (" +
            labels[i] + ", " + labels[j] + ")");
    }
    // Adjunction parity for tracked curves on smooth models.
    const Rational sum = canonical[i] + flat[i * n + i];
    if (canonical[i].is_integer() && flat[i * n + i].is_integer() &&
        !is_even_integer(sum))
      throw domain_error("adjunction parity fails for divisor " + labels[i]);
  }
  return ModelEditor::build(std::move(ids), std::move(labels),
                            std::move(flat), std::move(canonical));
}

bool SurfaceModel::tracks(DivisorId id) const {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

std::size_t SurfaceModel::index_of(DivisorId id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end())
    throw domain_error("divisor #" + std::to_string(id.value) +
                       " is not tracked by this model");
  return static_cast<std::size_t>(it - ids_.begin());
}

const std::string& SurfaceModel::label(DivisorId id) const {
  return labels_[index_of(id)];
}

std::optional<DivisorId> SurfaceModel::id_of_label(
    const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return ids_[i];
  return std::nullopt;
}

const Rational& SurfaceModel::form(DivisorId a, DivisorId b) const {
  return form_entry(index_of(a), index_of(b));
}

const Rational& SurfaceModel::canonical_degree(DivisorId id) const {
  return canonical_[index_of(id)];
}

Rational SurfaceModel::canonical_degree(const QDivisor& d) const {
  Rational acc;
  for (const QDivisor::Entry& e : d.entries())
    acc += e.coeff * canonical_[index_of(e.id)];
  return acc;
}

Rational SurfaceModel::intersect(const QDivisor& a, const QDivisor& b) const {
  Rational acc;
  for (const QDivisor::Entry& ea : a.entries()) {
    const std::size_t i = index_of(ea.id);
    for (const QDivisor::Entry& eb : b.entries())
      acc += ea.coeff * eb.coeff * form_entry(i, index_of(eb.id));
  }
  return acc;
}

Rational SurfaceModel::intersect(const QDivisor& a, DivisorId b) const {
  Rational acc;
  const std::size_t j = index_of(b);
  for (const QDivisor::Entry& ea : a.entries())
    acc += ea.coeff * form_entry(index_of(ea.id), j);
  return acc;
}

bool operator==(const SurfaceModel& a, const SurfaceModel& b) {
  return a.ids_ == b.ids_ && a.labels_ == b.labels_ && a.form_ == b.form_ &&
         a.canonical_ == b.canonical_;
}

LogPair LogPair::boundary_pair(SurfaceModel model, QDivisor boundary) {
  for (const QDivisor::Entry& e : boundary.entries()) {
    model.index_of(e.id);  // throws when untracked
    if (e.coeff.is_negative() || e.coeff > kOne)
      throw domain_error("boundary coefficient " + e.coeff.str() +
                         " outside [0,1] on divisor " + model.label(e.id));
  }
  return LogPair(std::move(model), std::move(boundary));
}

LogPair LogPair::sub_boundary_pair(SurfaceModel model, QDivisor boundary) {
  for (const QDivisor::Entry& e : boundary.entries())
    model.index_of(e.id);
  return LogPair(std::move(model), std::move(boundary));
}

bool LogPair::boundary_in_unit_range() const {
  return std::all_of(boundary_.begin(), boundary_.end(),
                     [](const QDivisor::Entry& e) {
                       return !e.coeff.is_negative() && e.coeff <= kOne;
                     });
}

void LogPair::require_boundary_pair(const std::string& context) const {
  if (!boundary_in_unit_range())
    throw domain_error(context +
                       ": sub-boundary pair where a boundary pair (all "
                       "coefficients in [0,1]) is required");
}

Rational LogPair::log_degree(DivisorId c) const {
  return model_.canonical_degree(c) + model_.intersect(boundary_, c);
}

ModelMorphism ModelMorphism::identity(SurfaceModel model) {
  ModelMorphism m;
  m.source_ = model;
  m.target_ = std::move(model);
  return m;
}

ModelMorphism ModelMorphism::make(SurfaceModel source, SurfaceModel target,
                                  std::vector<MorphismStep> steps) {
  ModelMorphism m;
  m.source_ = std::move(source);
  m.target_ = std::move(target);
  m.steps_ = std::move(steps);
  return m;
}

std::vector<DivisorId> ModelMorphism::exceptional_ids() const {
  std::vector<DivisorId> ids;
  ids.reserve(steps_.size());
  for (const MorphismStep& s : steps_) ids.push_back(s.id);
  return ids;
}

ModelMorphism compose(const ModelMorphism& upper, const ModelMorphism& lower) {
  if (!(upper.target() == lower.source()))
    throw domain_error("morphism composition: middle models disagree");
  std::vector<MorphismStep> steps = upper.steps();
  steps.insert(steps.end(), lower.steps().begin(), lower.steps().end());
  return ModelMorphism::make(upper.source(), lower.target(), std::move(steps));
}

namespace {

void validate_spec(const SurfaceModel& m, const BlowUpSpec& spec) {
  switch (spec.kind) {
    case BlowUpSpec::Kind::IntersectionPoint: {
      if (spec.first == spec.second)
        throw domain_error("intersection-point blow-up needs two divisors");
      if (m.form(spec.first, spec.second) < kOne)
        throw domain_error(
            "no intersection point left between " + m.label(spec.first) +
            " and " + m.label(spec.second));
      return;
    }
    case BlowUpSpec::Kind::FreePoint:
      m.index_of(spec.first);
      return;
    case BlowUpSpec::Kind::GeneralPoint:
      return;
  }
  throw domain_error("unknown blow-up kind");
}

}  // namespace

DivisorId blow_up_in_place(SurfaceModel& model, QDivisor& boundary,
                           const BlowUpSpec& spec, BlowUpUndo* undo,
                           const std::string* label_override) {
  validate_spec(model, spec);
  const DivisorId id{ModelEditor::next_id(model)};
  if (undo) {
    undo->spec = spec;
    undo->id = id;
    undo->saved_next_id = ModelEditor::next_id(model);
  }
  std::string label =
      label_override ? *label_override : ModelEditor::allocate_label(model);
  const std::size_t e = ModelEditor::append(model, id, std::move(label));
  ModelEditor::form_at(model, e, e) = kMinusOne;
  ModelEditor::canonical_at(model, e) = kMinusOne;

  Rational crepant = kMinusOne;  // (sum of multiplicities * coefficients) - 1
  switch (spec.kind) {
    case BlowUpSpec::Kind::IntersectionPoint: {
      const std::size_t i = model.index_of(spec.first);
      const std::size_t j = model.index_of(spec.second);
      if (undo) {
        undo->saved_entries[0] = model.form(spec.first, spec.first);
        undo->saved_entries[1] = model.form(spec.second, spec.second);
        undo->saved_entries[2] = model.form(spec.first, spec.second);
        undo->saved_entries[3] = model.canonical_degree(spec.first);
        undo->saved_entries[4] = model.canonical_degree(spec.second);
      }
      ModelEditor::form_at(model, i, i) -= kOne;
      ModelEditor::form_at(model, j, j) -= kOne;
      ModelEditor::form_at(model, i, j) -= kOne;
      ModelEditor::form_at(model, j, i) -= kOne;
      ModelEditor::form_at(model, i, e) = kOne;
      ModelEditor::form_at(model, e, i) = kOne;
      ModelEditor::form_at(model, j, e) = kOne;
      ModelEditor::form_at(model, e, j) = kOne;
      ModelEditor::canonical_at(model, i) += kOne;
      ModelEditor::canonical_at(model, j) += kOne;
      crepant += boundary.coefficient(spec.first);
      crepant += boundary.coefficient(spec.second);
      break;
    }
    case BlowUpSpec::Kind::FreePoint: {
      const std::size_t i = model.index_of(spec.first);
      if (undo) {
        undo->saved_entries[0] = model.form(spec.first, spec.first);
        undo->saved_entries[3] = model.canonical_degree(spec.first);
      }
      ModelEditor::form_at(model, i, i) -= kOne;
      ModelEditor::form_at(model, i, e) = kOne;
      ModelEditor::form_at(model, e, i) = kOne;
      ModelEditor::canonical_at(model, i) += kOne;
      crepant += boundary.coefficient(spec.first);
      break;
    }
    case BlowUpSpec::Kind::GeneralPoint:
      break;
  }
  boundary.set_coefficient(id, std::move(crepant));
  return id;
}

void undo_blow_up(SurfaceModel& model, QDivisor& boundary,
                  const BlowUpUndo& undo) {
  boundary.set_coefficient(undo.id, kZero);
  const std::size_t e = model.index_of(undo.id);
  ModelEditor::remove(model, e);
  switch (undo.spec.kind) {
    case BlowUpSpec::Kind::IntersectionPoint: {
      const std::size_t i = model.index_of(undo.spec.first);
      const std::size_t j = model.index_of(undo.spec.second);
      ModelEditor::form_at(model, i, i) = undo.saved_entries[0];
      ModelEditor::form_at(model, j, j) = undo.saved_entries[1];
      ModelEditor::form_at(model, i, j) = undo.saved_entries[2];
      ModelEditor::form_at(model, j, i) = undo.saved_entries[2];
      ModelEditor::canonical_at(model, i) = undo.saved_entries[3];
      ModelEditor::canonical_at(model, j) = undo.saved_entries[4];
      break;
    }
    case BlowUpSpec::Kind::FreePoint: {
      const std::size_t i = model.index_of(undo.spec.first);
      ModelEditor::form_at(model, i, i) = undo.saved_entries[0];
      ModelEditor::canonical_at(model, i) = undo.saved_entries[3];
      break;
    }
    case BlowUpSpec::Kind::GeneralPoint:
      break;
  }
  ModelEditor::next_id(model) = undo.saved_next_id;
}

BlowUpResult blow_up(const LogPair& pair, const BlowUpSpec& spec) {
  SurfaceModel model = pair.model();
  QDivisor boundary = pair.boundary();
  const DivisorId id = blow_up_in_place(model, boundary, spec);

  MorphismStep step;
  step.kind = MorphismStep::Kind::BlowDown;
  step.id = id;
  step.label = model.label(id);
  step.position = model.size() - 1;
  step.spec = spec;
  step.crepant_coefficient = boundary.coefficient(id);

  ModelMorphism morphism =
      ModelMorphism::make(model, pair.model(), {std::move(step)});
  return BlowUpResult{LogPair::sub_boundary_pair(std::move(model),
                                                 std::move(boundary)),
                      std::move(morphism), id};
}

ContractResult contract(const LogPair& pair, DivisorId c) {
  const SurfaceModel& m = pair.model();
  const std::size_t ci = m.index_of(c);
  const Rational& self = m.form(c, c);
  if (!self.is_negative())
    throw domain_error("only negative curves contract numerically (" +
                       m.label(c) + " has self-intersection " + self.str() +
                       ")");

  MorphismStep step;
  step.kind = MorphismStep::Kind::MumfordContraction;
  step.id = c;
  step.label = m.label(c);
  step.position = ci;
  step.self_intersection = self;
  step.canonical_degree = m.canonical_degree(c);
  step.pair_degree = pair.log_degree(c);
  step.discrepancy = step.pair_degree / self;
  step.crepant_coefficient =
      pair.boundary().coefficient(c) - step.discrepancy;

  const std::size_t n = m.size();
  std::vector<DivisorId> ids;
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> form;
  std::vector<Rational> canonical;
  ids.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == ci) continue;
    const DivisorId di = m.ids()[i];
    ids.push_back(di);
    labels.push_back(m.label(di));
    const Rational& ic = m.form(di, c);
    if (!ic.is_zero()) step.column.push_back({di, ic});
    canonical.push_back(m.canonical_degree(di) -
                        step.canonical_degree * ic / self);
    std::vector<Rational> row;
    row.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == ci) continue;
      const DivisorId dj = m.ids()[j];
      row.push_back(m.form(di, dj) - ic * m.form(dj, c) / self);
    }
    form.push_back(std::move(row));
  }

  SurfaceModel target = ModelEditor::build(
      std::move(ids), std::move(labels),
      [&] {
        std::vector<Rational> flat;
        flat.reserve((n - 1) * (n - 1));
        for (auto& row : form)
          for (auto& x : row) flat.push_back(std::move(x));
        return flat;
      }(),
      std::move(canonical));
  // Carry over the id allocator so later blow-ups never reuse c's id.
  ModelEditor::next_id(target) = std::max(ModelEditor::next_id_of(target),
                                          ModelEditor::next_id_of(m));

  QDivisor boundary = pair.boundary();
  boundary.set_coefficient(c, kZero);

  ModelMorphism morphism = ModelMorphism::make(pair.model(), target, {step});
  return ContractResult{
      LogPair::sub_boundary_pair(std::move(target), std::move(boundary)),
      std::move(morphism), std::move(step)};
}

namespace {

void require_supported(const SurfaceModel& m, const QDivisor& d,
                       const char* what) {
  for (const QDivisor::Entry& e : d.entries())
    if (!m.tracks(e.id))
      throw domain_error(std::string(what) +
                         ": divisor not supported on the expected model");
}

Rational column_dot(const std::vector<QDivisor::Entry>& column,
                    const QDivisor& d) {
  Rational acc;
  for (const QDivisor::Entry& e : column) acc += e.coeff * d.coefficient(e.id);
  return acc;
}

}  // namespace

QDivisor pullback(const ModelMorphism& morphism, const QDivisor& d) {
  require_supported(morphism.target(), d, "pullback");
  QDivisor v = d;
  const auto& steps = morphism.steps();
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const MorphismStep& s = *it;
    if (s.kind == MorphismStep::Kind::BlowDown) {
      Rational mult;
      switch (s.spec.kind) {
        case BlowUpSpec::Kind::IntersectionPoint:
          mult = v.coefficient(s.spec.first) + v.coefficient(s.spec.second);
          break;
        case BlowUpSpec::Kind::FreePoint:
          mult = v.coefficient(s.spec.first);
          break;
        case BlowUpSpec::Kind::GeneralPoint:
          break;
      }
      v.set_coefficient(s.id, std::move(mult));
    } else {
      // (v + t*C).C = 0 determines the correction along the contracted curve.
      Rational t = -column_dot(s.column, v) / s.self_intersection;
      v.set_coefficient(s.id, std::move(t));
    }
  }
  return v;
}

QDivisor pushforward(const ModelMorphism& morphism, const QDivisor& d) {
  require_supported(morphism.source(), d, "pushforward");
  QDivisor v = d;
  for (const MorphismStep& s : morphism.steps())
    v.set_coefficient(s.id, kZero);
  return v;
}

QDivisor crepant_pullback_boundary(const ModelMorphism& morphism,
                                   const QDivisor& target_boundary) {
  require_supported(morphism.target(), target_boundary, "crepant pullback");
  QDivisor b = target_boundary;
  const auto& steps = morphism.steps();
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const MorphismStep& s = *it;
    Rational coeff;
    if (s.kind == MorphismStep::Kind::BlowDown) {
      coeff = kMinusOne;
      switch (s.spec.kind) {
        case BlowUpSpec::Kind::IntersectionPoint:
          coeff += b.coefficient(s.spec.first);
          coeff += b.coefficient(s.spec.second);
          break;
        case BlowUpSpec::Kind::FreePoint:
          coeff += b.coefficient(s.spec.first);
          break;
        case BlowUpSpec::Kind::GeneralPoint:
          break;
      }
    } else {
      // (K + b + g*C).C = 0 in the upper model.
      coeff = -(s.canonical_degree + column_dot(s.column, b)) /
              s.self_intersection;
    }
    b.set_coefficient(s.id, std::move(coeff));
  }
  return b;
}

QDivisor crepant_pullback_boundary_solved(const ModelMorphism& morphism,
                                          const QDivisor& target_boundary) {
  require_supported(morphism.target(), target_boundary, "crepant pullback");
  const SurfaceModel& src = morphism.source();
  const std::vector<DivisorId> exc = morphism.exceptional_ids();
  if (exc.empty()) return target_boundary;

  const std::size_t k = exc.size();
  RationalMatrix gram(k, std::vector<Rational>(k));
  std::vector<Rational> rhs(k);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t t = 0; t < k; ++t) gram[s][t] = src.form(exc[s], exc[t]);
    rhs[s] = -(src.canonical_degree(exc[s]) +
               src.intersect(target_boundary, exc[s]));
  }
  auto gamma = solve_square(std::move(gram), std::move(rhs));
  if (!gamma)
    throw domain_error(
        "crepant pullback: exceptional intersection submatrix is singular");
  QDivisor b = target_boundary;
  for (std::size_t t = 0; t < k; ++t)
    b.set_coefficient(exc[t], std::move((*gamma)[t]));
  return b;
}

std::vector<SurfaceModel> morphism_levels(const ModelMorphism& morphism) {
  std::vector<SurfaceModel> levels;
  levels.push_back(morphism.target());
  const auto& steps = morphism.steps();
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const MorphismStep& s = *it;
    SurfaceModel up = levels.back();
    if (s.kind == MorphismStep::Kind::BlowDown) {
      QDivisor dummy;
      // Re-run the recorded blow-up; id and label are pinned by the record.
      ModelEditor::next_id(up) = s.id.value;
      DivisorId created = blow_up_in_place(up, dummy, s.spec, nullptr,
                                           &s.label);
      if (created != s.id || up.size() - 1 != s.position ||
          up.label(created) != s.label)
        throw domain_error("morphism replay: blow-up record out of order");
      ModelEditor::next_id(up) = std::max(ModelEditor::next_id_of(up),
                                          ModelEditor::next_id_of(levels.back()));
    } else {
      // Un-contract: re-insert the stored column at its original position.
      const std::size_t n = up.size();
      std::vector<DivisorId> ids = up.ids();
      std::vector<std::string> labels;
      labels.reserve(n);
      for (DivisorId id : ids) labels.push_back(up.label(id));
      std::vector<std::vector<Rational>> form(n + 1,
                                              std::vector<Rational>(n + 1));
      std::vector<Rational> canonical(n + 1);
      auto upper_index = [&](std::size_t lower) {
        return lower < s.position ? lower : lower + 1;
      };
      QDivisor column;
      for (const QDivisor::Entry& e : s.column)
        column.set_coefficient(e.id, e.coeff);
      for (std::size_t i = 0; i < n; ++i) {
        const DivisorId di = ids[i];
        const Rational ci = column.coefficient(di);
        canonical[upper_index(i)] =
            up.canonical_degree(di) +
            s.canonical_degree * ci / s.self_intersection;
        for (std::size_t j = 0; j < n; ++j) {
          const DivisorId dj = ids[j];
          form[upper_index(i)][upper_index(j)] =
              up.form(di, dj) +
              ci * column.coefficient(dj) / s.self_intersection;
        }
        form[upper_index(i)][s.position] = ci;
        form[s.position][upper_index(i)] = ci;
      }
      form[s.position][s.position] = s.self_intersection;
      canonical[s.position] = s.canonical_degree;

      std::vector<DivisorId> new_ids;
      std::vector<std::string> new_labels;
      new_ids.reserve(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == s.position) {
          new_ids.push_back(s.id);
          new_labels.push_back(s.label);
        } else {
          const std::size_t lower = i < s.position ? i : i - 1;
          new_ids.push_back(ids[lower]);
          new_labels.push_back(labels[lower]);
        }
      }
      std::vector<Rational> flat;
      flat.reserve((n + 1) * (n + 1));
      for (auto& row : form)
        for (auto& x : row) flat.push_back(std::move(x));
      SurfaceModel raised = ModelEditor::build(
          std::move(new_ids), std::move(new_labels), std::move(flat),
          std::move(canonical));
      ModelEditor::next_id(raised) =
          std::max(ModelEditor::next_id(raised), ModelEditor::next_id(up));
      up = std::move(raised);
    }
    levels.push_back(std::move(up));
  }
  return levels;
}

NefResult is_nef_on_tracked(const SurfaceModel& model, const QDivisor& d) {
  require_supported(model, d, "nef check");
  NefResult out;
  out.nef = true;
  for (DivisorId c : model.ids()) {
    Rational v = model.intersect(d, c);
    if (v.is_negative()) {
      out.nef = false;
      out.violations.emplace_back(c, std::move(v));
    }
  }
  return out;
}

NefResult log_nef_on_tracked(const LogPair& pair) {
  NefResult out;
  out.nef = true;
  for (DivisorId c : pair.model().ids()) {
    Rational v = pair.log_degree(c);
    if (v.is_negative()) {
      out.nef = false;
      out.violations.emplace_back(c, std::move(v));
    }
  }
  return out;
}

Rational volume_nef(const SurfaceModel& model, const QDivisor& d) {
  NefResult nef = is_nef_on_tracked(model, d);
  if (!nef.nef)
    throw domain_error(
        "volume is only defined here for divisors nef on tracked curves");
  return model.intersect(d, d);
}

}  // namespace logsurf
