#include "logsurf/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "logsurf/errors.hpp"
#include "logsurf/sampling.hpp"

namespace logsurf {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1";

// --- field access with path reporting --------------------------------------

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object())
    throw parse_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw parse_error(join(path, key), "missing field");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw parse_error(path, "expected a string");
  return j.get<std::string>();
}

bool bool_at(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw parse_error(path, "expected a boolean");
  return j.get<bool>();
}

Rational rational_at(const Json& j, const std::string& path) {
  if (!j.is_string())
    throw parse_error(path, "expected a rational encoded as \"p/q\" or \"p\"");
  auto r = Rational::parse(j.get<std::string>());
  if (!r)
    throw parse_error(path,
                      "malformed rational \"" + j.get<std::string>() + "\"");
  return *r;
}

BigInt bigint_at(const Json& j, const std::string& path) {
  if (j.is_number_unsigned())
    return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    auto r = Rational::parse(j.get<std::string>());
    if (r && r->is_integer()) return r->num();
  }
  throw parse_error(path, "expected an integer (number or decimal string)");
}

std::size_t size_at(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw parse_error(path, "expected a count");
  return j.get<std::size_t>();
}

Json bigint_json(const BigInt& v) {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  if (v >= lo && v <= hi) return Json(static_cast<std::int64_t>(v));
  return Json(v.str());
}

Json rational_json(const Rational& r) { return Json(r.str()); }

DivisorId id_at(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) throw parse_error(path, "expected a divisor id");
  return DivisorId{j.get<std::uint32_t>()};
}

// --- models, divisors, pairs ------------------------------------------------

Json model_json(const SurfaceModel& m, bool with_ids) {
  Json j = Json::object();
  Json divisors = Json::array();
  for (DivisorId id : m.ids()) {
    if (with_ids)
      divisors.push_back(Json{{"id", id.value}, {"label", m.label(id)}});
    else
      divisors.push_back(m.label(id));
  }
  j["divisors"] = std::move(divisors);
  Json rows = Json::array();
  for (DivisorId a : m.ids()) {
    Json row = Json::array();
    for (DivisorId b : m.ids()) row.push_back(rational_json(m.form(a, b)));
    rows.push_back(std::move(row));
  }
  j["intersection"] = std::move(rows);
  Json canonical = Json::array();
  for (DivisorId a : m.ids())
    canonical.push_back(rational_json(m.canonical_degree(a)));
  j["canonical"] = std::move(canonical);
  return j;
}

SurfaceModel model_at(const Json& j, const std::string& path, bool with_ids) {
  const Json& jd = field(j, "divisors", path);
  if (!jd.is_array()) throw parse_error(join(path, "divisors"), "expected an array");
  std::vector<DivisorId> ids;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    const std::string ipath = join(path, "divisors[" + std::to_string(i) + "]");
    if (with_ids) {
      ids.push_back(id_at(field(jd[i], "id", ipath), join(ipath, "id")));
      labels.push_back(string_at(field(jd[i], "label", ipath),
                                 join(ipath, "label")));
    } else {
      ids.push_back(DivisorId{static_cast<std::uint32_t>(i)});
      labels.push_back(string_at(jd[i], ipath));
    }
  }
  const Json& jm = field(j, "intersection", path);
  if (!jm.is_array() || jm.size() != ids.size())
    throw parse_error(join(path, "intersection"),
                      "expected one matrix row per divisor");
  std::vector<std::vector<Rational>> form;
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string rpath =
        join(path, "intersection[" + std::to_string(i) + "]");
    if (!jm[i].is_array() || jm[i].size() != ids.size())
      throw parse_error(rpath, "expected one entry per divisor");
    std::vector<Rational> row;
    for (std::size_t k = 0; k < jm[i].size(); ++k)
      row.push_back(rational_at(jm[i][k], rpath + "[" + std::to_string(k) + "]"));
    form.push_back(std::move(row));
  }
  const Json& jc = field(j, "canonical", path);
  if (!jc.is_array() || jc.size() != ids.size())
    throw parse_error(join(path, "canonical"),
                      "expected one entry per divisor");
  std::vector<Rational> canonical;
  for (std::size_t i = 0; i < jc.size(); ++i)
    canonical.push_back(
        rational_at(jc[i], join(path, "canonical[" + std::to_string(i) + "]")));
  try {
    return SurfaceModel::make_with_ids(std::move(ids), std::move(labels),
                                       std::move(form), std::move(canonical));
  } catch (const domain_error& e) {
    throw parse_error(path, e.what());
  }
}

Json divisor_json(const QDivisor& d, const SurfaceModel& m) {
  Json j = Json::object();
  // Keyed by label in the model's divisor order.
  for (DivisorId id : m.ids()) {
    const Rational& c = d.coefficient(id);
    if (!c.is_zero()) j[m.label(id)] = rational_json(c);
  }
  return j;
}

QDivisor divisor_at(const Json& j, const SurfaceModel& m,
                    const std::string& path) {
  if (!j.is_object()) throw parse_error(path, "expected a coefficient map");
  QDivisor d;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto id = m.id_of_label(it.key());
    if (!id)
      throw parse_error(join(path, it.key()), "unknown divisor label");
    d.set_coefficient(*id, rational_at(*it, join(path, it.key())));
  }
  return d;
}

Json pair_json(const LogPair& p) {
  return Json{{"model", model_json(p.model(), true)},
              {"boundary", divisor_json(p.boundary(), p.model())}};
}

LogPair pair_at(const Json& j, const std::string& path) {
  SurfaceModel m = model_at(field(j, "model", path), join(path, "model"), true);
  QDivisor b =
      divisor_at(field(j, "boundary", path), m, join(path, "boundary"));
  try {
    return LogPair::sub_boundary_pair(std::move(m), std::move(b));
  } catch (const domain_error& e) {
    throw parse_error(path, e.what());
  }
}

// --- specs, steps, morphisms -------------------------------------------------

Json spec_json(const BlowUpSpec& s) {
  switch (s.kind) {
    case BlowUpSpec::Kind::IntersectionPoint:
      return Json{{"kind", "intersection-point"},
                  {"first", s.first.value},
                  {"second", s.second.value}};
    case BlowUpSpec::Kind::FreePoint:
      return Json{{"kind", "free-point"}, {"first", s.first.value}};
    case BlowUpSpec::Kind::GeneralPoint:
      return Json{{"kind", "general-point"}};
  }
  throw std::logic_error("unreachable blow-up kind");
}

BlowUpSpec spec_at(const Json& j, const std::string& path) {
  const std::string kind = string_at(field(j, "kind", path), join(path, "kind"));
  if (kind == "intersection-point")
    return BlowUpSpec::intersection_point(
        id_at(field(j, "first", path), join(path, "first")),
        id_at(field(j, "second", path), join(path, "second")));
  if (kind == "free-point")
    return BlowUpSpec::free_point(
        id_at(field(j, "first", path), join(path, "first")));
  if (kind == "general-point") return BlowUpSpec::general_point();
  throw parse_error(join(path, "kind"), "unknown blow-up kind \"" + kind + "\"");
}

Json step_json(const MorphismStep& s) {
  Json j = Json::object();
  j["kind"] = s.kind == MorphismStep::Kind::BlowDown ? "blow-down"
                                                     : "contraction";
  j["id"] = s.id.value;
  j["label"] = s.label;
  j["position"] = s.position;
  j["crepant_coefficient"] = rational_json(s.crepant_coefficient);
  if (s.kind == MorphismStep::Kind::BlowDown) {
    j["spec"] = spec_json(s.spec);
  } else {
    Json column = Json::array();
    for (const QDivisor::Entry& e : s.column)
      column.push_back(Json::array({Json(e.id.value), rational_json(e.coeff)}));
    j["column"] = std::move(column);
    j["self_intersection"] = rational_json(s.self_intersection);
    j["canonical_degree"] = rational_json(s.canonical_degree);
    j["pair_degree"] = rational_json(s.pair_degree);
    j["discrepancy"] = rational_json(s.discrepancy);
  }
  return j;
}

MorphismStep step_at(const Json& j, const std::string& path) {
  MorphismStep s;
  const std::string kind = string_at(field(j, "kind", path), join(path, "kind"));
  if (kind == "blow-down")
    s.kind = MorphismStep::Kind::BlowDown;
  else if (kind == "contraction")
    s.kind = MorphismStep::Kind::MumfordContraction;
  else
    throw parse_error(join(path, "kind"), "unknown step kind \"" + kind + "\"");
  s.id = id_at(field(j, "id", path), join(path, "id"));
  s.label = string_at(field(j, "label", path), join(path, "label"));
  s.position = size_at(field(j, "position", path), join(path, "position"));
  s.crepant_coefficient = rational_at(field(j, "crepant_coefficient", path),
                                      join(path, "crepant_coefficient"));
  if (s.kind == MorphismStep::Kind::BlowDown) {
    s.spec = spec_at(field(j, "spec", path), join(path, "spec"));
  } else {
    const Json& jc = field(j, "column", path);
    if (!jc.is_array())
      throw parse_error(join(path, "column"), "expected an array");
    for (std::size_t i = 0; i < jc.size(); ++i) {
      const std::string epath =
          join(path, "column[" + std::to_string(i) + "]");
      if (!jc[i].is_array() || jc[i].size() != 2)
        throw parse_error(epath, "expected [id, value]");
      s.column.push_back({id_at(jc[i][0], epath),
                          rational_at(jc[i][1], epath)});
    }
    s.self_intersection = rational_at(field(j, "self_intersection", path),
                                      join(path, "self_intersection"));
    s.canonical_degree = rational_at(field(j, "canonical_degree", path),
                                     join(path, "canonical_degree"));
    s.pair_degree =
        rational_at(field(j, "pair_degree", path), join(path, "pair_degree"));
    s.discrepancy =
        rational_at(field(j, "discrepancy", path), join(path, "discrepancy"));
  }
  return s;
}

Json morphism_json(const ModelMorphism& m) {
  Json steps = Json::array();
  for (const MorphismStep& s : m.steps()) steps.push_back(step_json(s));
  return Json{{"source", model_json(m.source(), true)},
              {"target", model_json(m.target(), true)},
              {"steps", std::move(steps)}};
}

ModelMorphism morphism_at(const Json& j, const std::string& path) {
  SurfaceModel source =
      model_at(field(j, "source", path), join(path, "source"), true);
  SurfaceModel target =
      model_at(field(j, "target", path), join(path, "target"), true);
  const Json& js = field(j, "steps", path);
  if (!js.is_array()) throw parse_error(join(path, "steps"), "expected an array");
  std::vector<MorphismStep> steps;
  for (std::size_t i = 0; i < js.size(); ++i)
    steps.push_back(
        step_at(js[i], join(path, "steps[" + std::to_string(i) + "]")));
  return ModelMorphism::make(std::move(source), std::move(target),
                             std::move(steps));
}

Json nef_json(const NefResult& r) {
  Json v = Json::array();
  for (const auto& [id, value] : r.violations)
    v.push_back(Json::array({Json(id.value), rational_json(value)}));
  return Json{{"nef", r.nef}, {"violations", std::move(v)}};
}

NefResult nef_at(const Json& j, const std::string& path) {
  NefResult r;
  r.nef = bool_at(field(j, "nef", path), join(path, "nef"));
  const Json& jv = field(j, "violations", path);
  if (!jv.is_array())
    throw parse_error(join(path, "violations"), "expected an array");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const std::string vpath =
        join(path, "violations[" + std::to_string(i) + "]");
    if (!jv[i].is_array() || jv[i].size() != 2)
      throw parse_error(vpath, "expected [id, value]");
    r.violations.emplace_back(id_at(jv[i][0], vpath),
                              rational_at(jv[i][1], vpath));
  }
  return r;
}

// --- singularity reports ------------------------------------------------------

const char* location_name(DiscrepancyWitness::Location l) {
  switch (l) {
    case DiscrepancyWitness::Location::FreePoint:
      return "free-point";
    case DiscrepancyWitness::Location::IntersectionPoint:
      return "intersection-point";
    case DiscrepancyWitness::Location::GeneralPoint:
      return "general-point";
  }
  return "unknown";
}

Json witness_json(const DiscrepancyWitness& w) {
  Json j = Json::object();
  j["location"] = location_name(w.location);
  if (w.location != DiscrepancyWitness::Location::GeneralPoint)
    j["first"] = w.first.value;
  if (w.location == DiscrepancyWitness::Location::IntersectionPoint)
    j["second"] = w.second.value;
  j["discrepancy"] = rational_json(w.discrepancy);
  return j;
}

DiscrepancyWitness witness_at(const Json& j, const std::string& path) {
  DiscrepancyWitness w;
  const std::string loc =
      string_at(field(j, "location", path), join(path, "location"));
  if (loc == "free-point")
    w.location = DiscrepancyWitness::Location::FreePoint;
  else if (loc == "intersection-point")
    w.location = DiscrepancyWitness::Location::IntersectionPoint;
  else if (loc == "general-point")
    w.location = DiscrepancyWitness::Location::GeneralPoint;
  else
    throw parse_error(join(path, "location"), "unknown location");
  if (w.location != DiscrepancyWitness::Location::GeneralPoint)
    w.first = id_at(field(j, "first", path), join(path, "first"));
  if (w.location == DiscrepancyWitness::Location::IntersectionPoint)
    w.second = id_at(field(j, "second", path), join(path, "second"));
  w.discrepancy =
      rational_at(field(j, "discrepancy", path), join(path, "discrepancy"));
  return w;
}

SingularityClass classification_at(const Json& j, const std::string& path) {
  const std::string s = string_at(j, path);
  if (s == "terminal") return SingularityClass::Terminal;
  if (s == "canonical") return SingularityClass::Canonical;
  if (s == "klt-not-canonical") return SingularityClass::KltNotCanonical;
  if (s == "lc-not-klt") return SingularityClass::LcNotKlt;
  if (s == "not-lc") return SingularityClass::NotLc;
  throw parse_error(path, "unknown classification \"" + s + "\"");
}

Json report_section_json(const SingularityReport& r) {
  Json min = Json::object();
  min["bounded"] = r.min_exceptional.bounded;
  if (r.min_exceptional.bounded)
    min["value"] = rational_json(r.min_exceptional.value);
  Json min_witnesses = Json::array();
  for (const DiscrepancyWitness& w : r.min_exceptional.witnesses)
    min_witnesses.push_back(witness_json(w));
  min["witnesses"] = std::move(min_witnesses);

  Json j = Json::object();
  j["classification"] = to_string(r.classification);
  j["epsilon_klt_threshold"] = r.epsilon_klt_threshold
                                   ? rational_json(*r.epsilon_klt_threshold)
                                   : Json(nullptr);
  j["min_exceptional"] = std::move(min);
  Json witnesses = Json::array();
  for (const DiscrepancyWitness& w : r.witnesses)
    witnesses.push_back(witness_json(w));
  j["witnesses"] = std::move(witnesses);
  return j;
}

SingularityReport report_section_at(const Json& j, const std::string& path) {
  SingularityReport r;
  r.classification = classification_at(field(j, "classification", path),
                                       join(path, "classification"));
  const Json& jt = field(j, "epsilon_klt_threshold", path);
  if (!jt.is_null())
    r.epsilon_klt_threshold =
        rational_at(jt, join(path, "epsilon_klt_threshold"));
  const Json& jm = field(j, "min_exceptional", path);
  const std::string mpath = join(path, "min_exceptional");
  r.min_exceptional.bounded =
      bool_at(field(jm, "bounded", mpath), join(mpath, "bounded"));
  if (r.min_exceptional.bounded)
    r.min_exceptional.value =
        rational_at(field(jm, "value", mpath), join(mpath, "value"));
  const Json& jw = field(jm, "witnesses", mpath);
  for (std::size_t i = 0; i < jw.size(); ++i)
    r.min_exceptional.witnesses.push_back(
        witness_at(jw[i], join(mpath, "witnesses[" + std::to_string(i) + "]")));
  const Json& jw2 = field(j, "witnesses", path);
  for (std::size_t i = 0; i < jw2.size(); ++i)
    r.witnesses.push_back(
        witness_at(jw2[i], join(path, "witnesses[" + std::to_string(i) + "]")));
  return r;
}

// --- bigness -------------------------------------------------------------------

Json bigness_certificate_json(const BignessCertificate& c,
                              const SurfaceModel& m) {
  return Json{{"nef", divisor_json(c.nef_part, m)},
              {"effective", divisor_json(c.effective_part, m)}};
}

BignessCertificate bigness_certificate_at(const Json& j, const SurfaceModel& m,
                                          const std::string& path) {
  BignessCertificate c;
  c.nef_part = divisor_at(field(j, "nef", path), m, join(path, "nef"));
  c.effective_part =
      divisor_at(field(j, "effective", path), m, join(path, "effective"));
  return c;
}

Json bigness_witness_json(const BignessWitness& w) {
  Json contracted = Json::array();
  for (DivisorId id : w.contracted) contracted.push_back(id.value);
  return Json{{"pair", pair_json(w.pair)},
              {"certificate",
               bigness_certificate_json(w.certificate, w.pair.model())},
              {"after_contractions", w.after_contractions},
              {"contracted", std::move(contracted)}};
}

BignessWitness bigness_witness_at(const Json& j, const std::string& path) {
  BignessWitness w;
  w.pair = pair_at(field(j, "pair", path), join(path, "pair"));
  w.certificate = bigness_certificate_at(field(j, "certificate", path),
                                         w.pair.model(),
                                         join(path, "certificate"));
  w.after_contractions = bool_at(field(j, "after_contractions", path),
                                 join(path, "after_contractions"));
  const Json& jc = field(j, "contracted", path);
  for (std::size_t i = 0; i < jc.size(); ++i)
    w.contracted.push_back(
        id_at(jc[i], join(path, "contracted[" + std::to_string(i) + "]")));
  return w;
}

// --- traces ---------------------------------------------------------------------

Json trace_json(const MmpTrace& t) {
  Json steps = Json::array();
  for (const MmpStep& s : t.steps)
    steps.push_back(Json{{"id", s.contracted.value},
                         {"label", s.label},
                         {"pair_degree", rational_json(s.pair_degree)},
                         {"self_intersection",
                          rational_json(s.self_intersection)},
                         {"discrepancy", rational_json(s.discrepancy)}});
  return Json{{"steps", std::move(steps)},
              {"final", pair_json(t.final_pair)},
              {"morphism", morphism_json(t.morphism)},
              {"final_nef", nef_json(t.final_nef)}};
}

MmpTrace trace_at(const Json& j, const std::string& path) {
  MmpTrace t;
  const Json& js = field(j, "steps", path);
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string spath = join(path, "steps[" + std::to_string(i) + "]");
    MmpStep s;
    s.contracted = id_at(field(js[i], "id", spath), join(spath, "id"));
    s.label = string_at(field(js[i], "label", spath), join(spath, "label"));
    s.pair_degree = rational_at(field(js[i], "pair_degree", spath),
                                join(spath, "pair_degree"));
    s.self_intersection =
        rational_at(field(js[i], "self_intersection", spath),
                    join(spath, "self_intersection"));
    s.discrepancy = rational_at(field(js[i], "discrepancy", spath),
                                join(spath, "discrepancy"));
    t.steps.push_back(std::move(s));
  }
  LogPair final_pair = pair_at(field(j, "final", path), join(path, "final"));
  try {
    t.final_pair = LogPair::boundary_pair(final_pair.model(),
                                          final_pair.boundary());
  } catch (const domain_error& e) {
    throw parse_error(join(path, "final"), e.what());
  }
  t.morphism = morphism_at(field(j, "morphism", path), join(path, "morphism"));
  t.final_nef = nef_at(field(j, "final_nef", path), join(path, "final_nef"));
  return t;
}

// --- bound inputs and certificates ------------------------------------------------

Json inputs_json(const BoundInputs& in) {
  Json j = Json::object();
  j["delta"] = rational_json(in.delta);
  j["epsilon"] = rational_json(in.epsilon);
  j["A"] = bigint_json(in.component_bound);
  j["N_cartier"] =
      in.cartier_bound ? bigint_json(*in.cartier_bound) : Json("compute-concrete");
  return j;
}

BoundInputs inputs_at(const Json& j, const std::string& path) {
  BoundInputs in;
  in.delta = rational_at(field(j, "delta", path), join(path, "delta"));
  in.epsilon = rational_at(field(j, "epsilon", path), join(path, "epsilon"));
  in.component_bound = bigint_at(field(j, "A", path), join(path, "A"));
  const Json& jn = field(j, "N_cartier", path);
  if (jn.is_string() && jn.get<std::string>() == "compute-concrete")
    in.cartier_bound = std::nullopt;
  else
    in.cartier_bound = bigint_at(jn, join(path, "N_cartier"));
  return in;
}

Json certificate_json(const BoundCertificate& c) {
  const SurfaceModel& input_model = c.input.model();
  Json stages = Json::array();
  {
    Json map = Json::array();
    for (const auto& [from, to] : c.round.map)
      map.push_back(Json::array({rational_json(from), rational_json(to)}));
    stages.push_back(Json{
        {"stage", "round"},
        {"delta", rational_json(c.round.delta)},
        {"grid", bigint_json(c.round.grid)},
        {"map", std::move(map)},
        {"boundary_before", divisor_json(c.round.boundary_before, input_model)},
        {"boundary_after", divisor_json(c.round.boundary_after, input_model)}});
  }
  stages.push_back(Json{{"stage", "bigness"},
                        {"supplied", c.bigness.supplied},
                        {"margin_pair", pair_json(c.bigness.margin_pair)},
                        {"witness", bigness_witness_json(c.bigness.witness)}});
  stages.push_back(Json{{"stage", "redundant-part"},
                        {"removed", divisor_json(c.redundant.removed,
                                                 input_model)},
                        {"result", pair_json(c.redundant.result)},
                        {"witness", bigness_witness_json(c.redundant.witness)}});
  stages.push_back(Json{{"stage", "terminalize"},
                        {"morphism",
                         morphism_json(c.terminalization.morphism)},
                        {"result", pair_json(c.terminalization.result)}});
  stages.push_back(Json{{"stage", "epsilon-klt"},
                        {"epsilon", rational_json(c.epsilon_klt.epsilon)},
                        {"report",
                         report_section_json(c.epsilon_klt.report)}});
  stages.push_back(Json{{"stage", "mmp"},
                        {"bigness_assumed", c.mmp.bigness_assumed},
                        {"trace", trace_json(c.mmp.trace)}});
  {
    Json discs = Json::array();
    for (const ContractedDiscrepancy& d : c.negative_count.discrepancies)
      discs.push_back(Json{{"id", d.id.value},
                           {"label", d.label},
                           {"discrepancy", rational_json(d.discrepancy)}});
    stages.push_back(
        Json{{"stage", "negative-count"},
             {"count", c.negative_count.count},
             {"components_at_mmp_input",
              c.negative_count.components_at_mmp_input},
             {"discrepancies", std::move(discs)}});
  }
  stages.push_back(Json{
      {"stage", "cartier"},
      {"mode", c.cartier.concrete ? "concrete" : "declared"},
      {"value", bigint_json(c.cartier.value)},
      {"crepant_pullback",
       divisor_json(c.cartier.crepant_pullback,
                    c.mmp.trace.morphism.source())}});
  stages.push_back(Json{{"stage", "threshold"},
                        {"n", bigint_json(c.threshold.n)},
                        {"n_replaced", bigint_json(c.threshold.n_replaced)},
                        {"m0", bigint_json(c.threshold.m0)}});

  Json caveats = Json::array();
  for (const std::string& s : c.caveats) caveats.push_back(s);
  return Json{{"input", pair_json(c.input)},
              {"inputs", inputs_json(c.inputs)},
              {"m0", bigint_json(c.m0)},
              {"caveats", std::move(caveats)},
              {"stages", std::move(stages)}};
}

const Json& stage_at(const Json& stages, const char* name,
                     const std::string& path) {
  for (const Json& s : stages)
    if (s.is_object() && s.contains("stage") && s["stage"] == name) return s;
  throw parse_error(path, std::string("missing stage \"") + name + "\"");
}

BoundCertificate certificate_at(const Json& j, const std::string& path) {
  BoundCertificate c;
  {
    LogPair input = pair_at(field(j, "input", path), join(path, "input"));
    try {
      c.input = LogPair::boundary_pair(input.model(), input.boundary());
    } catch (const domain_error& e) {
      throw parse_error(join(path, "input"), e.what());
    }
  }
  c.inputs = inputs_at(field(j, "inputs", path), join(path, "inputs"));
  c.m0 = bigint_at(field(j, "m0", path), join(path, "m0"));
  const Json& jc = field(j, "caveats", path);
  for (const Json& s : jc)
    c.caveats.push_back(string_at(s, join(path, "caveats[]")));

  const Json& stages = field(j, "stages", path);
  const std::string spath = join(path, "stages");
  const SurfaceModel& input_model = c.input.model();
  {
    const Json& s = stage_at(stages, "round", spath);
    const std::string p = join(spath, "round");
    c.round.delta = rational_at(field(s, "delta", p), join(p, "delta"));
    c.round.grid = bigint_at(field(s, "grid", p), join(p, "grid"));
    const Json& jm = field(s, "map", p);
    for (std::size_t i = 0; i < jm.size(); ++i) {
      const std::string mp = join(p, "map[" + std::to_string(i) + "]");
      if (!jm[i].is_array() || jm[i].size() != 2)
        throw parse_error(mp, "expected [from, to]");
      c.round.map.emplace_back(rational_at(jm[i][0], mp),
                               rational_at(jm[i][1], mp));
    }
    c.round.boundary_before = divisor_at(field(s, "boundary_before", p),
                                         input_model,
                                         join(p, "boundary_before"));
    c.round.boundary_after = divisor_at(field(s, "boundary_after", p),
                                        input_model,
                                        join(p, "boundary_after"));
  }
  {
    const Json& s = stage_at(stages, "bigness", spath);
    const std::string p = join(spath, "bigness");
    c.bigness.supplied = bool_at(field(s, "supplied", p), join(p, "supplied"));
    LogPair margin = pair_at(field(s, "margin_pair", p), join(p, "margin_pair"));
    c.bigness.margin_pair = LogPair::sub_boundary_pair(margin.model(),
                                                       margin.boundary());
    c.bigness.witness =
        bigness_witness_at(field(s, "witness", p), join(p, "witness"));
  }
  {
    const Json& s = stage_at(stages, "redundant-part", spath);
    const std::string p = join(spath, "redundant-part");
    c.redundant.removed =
        divisor_at(field(s, "removed", p), input_model, join(p, "removed"));
    LogPair result = pair_at(field(s, "result", p), join(p, "result"));
    try {
      c.redundant.result =
          LogPair::boundary_pair(result.model(), result.boundary());
    } catch (const domain_error& e) {
      throw parse_error(join(p, "result"), e.what());
    }
    c.redundant.witness =
        bigness_witness_at(field(s, "witness", p), join(p, "witness"));
  }
  {
    const Json& s = stage_at(stages, "terminalize", spath);
    const std::string p = join(spath, "terminalize");
    c.terminalization.morphism =
        morphism_at(field(s, "morphism", p), join(p, "morphism"));
    LogPair result = pair_at(field(s, "result", p), join(p, "result"));
    try {
      c.terminalization.result =
          LogPair::boundary_pair(result.model(), result.boundary());
    } catch (const domain_error& e) {
      throw parse_error(join(p, "result"), e.what());
    }
  }
  {
    const Json& s = stage_at(stages, "epsilon-klt", spath);
    const std::string p = join(spath, "epsilon-klt");
    c.epsilon_klt.epsilon =
        rational_at(field(s, "epsilon", p), join(p, "epsilon"));
    c.epsilon_klt.report =
        report_section_at(field(s, "report", p), join(p, "report"));
  }
  {
    const Json& s = stage_at(stages, "mmp", spath);
    const std::string p = join(spath, "mmp");
    c.mmp.bigness_assumed =
        bool_at(field(s, "bigness_assumed", p), join(p, "bigness_assumed"));
    c.mmp.trace = trace_at(field(s, "trace", p), join(p, "trace"));
  }
  {
    const Json& s = stage_at(stages, "negative-count", spath);
    const std::string p = join(spath, "negative-count");
    c.negative_count.count =
        size_at(field(s, "count", p), join(p, "count"));
    c.negative_count.components_at_mmp_input =
        size_at(field(s, "components_at_mmp_input", p),
                join(p, "components_at_mmp_input"));
    const Json& jd = field(s, "discrepancies", p);
    for (std::size_t i = 0; i < jd.size(); ++i) {
      const std::string dp =
          join(p, "discrepancies[" + std::to_string(i) + "]");
      ContractedDiscrepancy d;
      d.id = id_at(field(jd[i], "id", dp), join(dp, "id"));
      d.label = string_at(field(jd[i], "label", dp), join(dp, "label"));
      d.discrepancy =
          rational_at(field(jd[i], "discrepancy", dp), join(dp, "discrepancy"));
      c.negative_count.discrepancies.push_back(std::move(d));
    }
  }
  {
    const Json& s = stage_at(stages, "cartier", spath);
    const std::string p = join(spath, "cartier");
    const std::string mode = string_at(field(s, "mode", p), join(p, "mode"));
    if (mode != "concrete" && mode != "declared")
      throw parse_error(join(p, "mode"), "unknown cartier mode");
    c.cartier.concrete = mode == "concrete";
    c.cartier.value = bigint_at(field(s, "value", p), join(p, "value"));
    c.cartier.crepant_pullback =
        divisor_at(field(s, "crepant_pullback", p),
                   c.mmp.trace.morphism.source(), join(p, "crepant_pullback"));
  }
  {
    const Json& s = stage_at(stages, "threshold", spath);
    const std::string p = join(spath, "threshold");
    c.threshold.n = bigint_at(field(s, "n", p), join(p, "n"));
    c.threshold.n_replaced =
        bigint_at(field(s, "n_replaced", p), join(p, "n_replaced"));
    c.threshold.m0 = bigint_at(field(s, "m0", p), join(p, "m0"));
  }
  return c;
}

// --- semigroup and oracle sections ---------------------------------------------

Json semigroup_json(const SemigroupSection& s) {
  Json queries = Json::array();
  for (const SemigroupQuery& q : s.queries) {
    Json parts = Json::array();
    for (const BigInt& p : q.result.parts) parts.push_back(bigint_json(p));
    queries.push_back(Json{{"n", bigint_json(q.n)},
                           {"m", bigint_json(q.m)},
                           {"representable", q.result.representable},
                           {"parts", std::move(parts)}});
  }
  return Json{{"queries", std::move(queries)}};
}

SemigroupSection semigroup_at(const Json& j, const std::string& path) {
  SemigroupSection s;
  const Json& jq = field(j, "queries", path);
  for (std::size_t i = 0; i < jq.size(); ++i) {
    const std::string qpath = join(path, "queries[" + std::to_string(i) + "]");
    SemigroupQuery q;
    q.n = bigint_at(field(jq[i], "n", qpath), join(qpath, "n"));
    q.m = bigint_at(field(jq[i], "m", qpath), join(qpath, "m"));
    q.result.representable = bool_at(field(jq[i], "representable", qpath),
                                     join(qpath, "representable"));
    const Json& jp = field(jq[i], "parts", qpath);
    for (std::size_t k = 0; k < jp.size(); ++k)
      q.result.parts.push_back(
          bigint_at(jp[k], join(qpath, "parts[" + std::to_string(k) + "]")));
    s.queries.push_back(std::move(q));
  }
  return s;
}

Json oracle_json(const OracleSection& o) {
  Json mismatches = Json::array();
  for (const std::string& s : o.mismatches) mismatches.push_back(s);
  return Json{{"seed", o.seed},
              {"cases", o.cases},
              {"depth", o.depth},
              {"semigroup_n", bigint_json(o.semigroup_n)},
              {"sweep_from", bigint_json(o.sweep_from)},
              {"sweep_to", bigint_json(o.sweep_to)},
              {"mismatches", std::move(mismatches)},
              {"agreed", o.agreed}};
}

OracleSection oracle_at(const Json& j, const std::string& path) {
  OracleSection o;
  o.seed = field(j, "seed", path).get<std::uint64_t>();
  o.cases = field(j, "cases", path).get<int>();
  o.depth = field(j, "depth", path).get<int>();
  o.semigroup_n = bigint_at(field(j, "semigroup_n", path),
                            join(path, "semigroup_n"));
  o.sweep_from =
      bigint_at(field(j, "sweep_from", path), join(path, "sweep_from"));
  o.sweep_to = bigint_at(field(j, "sweep_to", path), join(path, "sweep_to"));
  for (const Json& s : field(j, "mismatches", path))
    o.mismatches.push_back(string_at(s, join(path, "mismatches[]")));
  o.agreed = bool_at(field(j, "agreed", path), join(path, "agreed"));
  return o;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("", e.what());
  }
}

void check_schema_version(const Json& j) {
  const std::string v =
      string_at(field(j, "schema_version", ""), "schema_version");
  if (v != kSchemaVersion)
    throw parse_error("schema_version",
                      "unrecognized schema version \"" + v + "\"");
}

}  // namespace

CaseDocument parse_case(const std::string& text) {
  const Json j = parse_json_text(text);
  check_schema_version(j);
  CaseDocument doc;
  doc.model = model_at(field(j, "model", ""), "model", false);
  doc.boundary =
      divisor_at(field(j, "boundary", ""), doc.model, "boundary");
  for (const QDivisor::Entry& e : doc.boundary.entries())
    if (e.coeff.is_negative() || e.coeff > Rational(1))
      throw parse_error("boundary." + doc.model.label(e.id),
                        "boundary coefficient outside [0,1]");
  doc.inputs = inputs_at(field(j, "inputs", ""), "inputs");
  if (const Json* cert = optional_field(j, "bigness_certificate"))
    doc.bigness_certificate =
        bigness_certificate_at(*cert, doc.model, "bigness_certificate");
  return doc;
}

std::string emit_case(const CaseDocument& doc) {
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["model"] = model_json(doc.model, false);
  j["boundary"] = divisor_json(doc.boundary, doc.model);
  j["inputs"] = inputs_json(doc.inputs);
  if (doc.bigness_certificate)
    j["bigness_certificate"] =
        bigness_certificate_json(*doc.bigness_certificate, doc.model);
  return j.dump(2) + "\n";
}

std::string emit_report(const ReportDocument& report) {
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["command"] = report.command;
  if (report.case_doc) {
    j["case"] = parse_json_text(emit_case(*report.case_doc));
  }
  if (report.singularity)
    j["singularity"] = report_section_json(*report.singularity);
  if (report.terminalization)
    j["terminalization"] =
        Json{{"morphism", morphism_json(report.terminalization->morphism)},
             {"result", pair_json(report.terminalization->pair)}};
  if (report.mmp) j["mmp"] = trace_json(*report.mmp);
  if (report.certificate)
    j["certificate"] = certificate_json(*report.certificate);
  if (report.semigroup) j["semigroup"] = semigroup_json(*report.semigroup);
  if (report.oracle) j["oracle"] = oracle_json(*report.oracle);
  return j.dump(2) + "\n";
}

ReportDocument parse_report(const std::string& text) {
  const Json j = parse_json_text(text);
  check_schema_version(j);
  ReportDocument report;
  report.command = string_at(field(j, "command", ""), "command");
  if (const Json* jc = optional_field(j, "case")) {
    // Re-parse through the case reader to share its validation.
    Json wrapped = *jc;
    report.case_doc = parse_case(wrapped.dump());
  }
  if (const Json* js = optional_field(j, "singularity"))
    report.singularity = report_section_at(*js, "singularity");
  if (const Json* jt = optional_field(j, "terminalization")) {
    TerminalizeResult t;
    t.morphism = morphism_at(field(*jt, "morphism", "terminalization"),
                             "terminalization.morphism");
    LogPair result = pair_at(field(*jt, "result", "terminalization"),
                             "terminalization.result");
    t.pair = LogPair::boundary_pair(result.model(), result.boundary());
    report.terminalization = std::move(t);
  }
  if (const Json* jm = optional_field(j, "mmp"))
    report.mmp = trace_at(*jm, "mmp");
  if (const Json* jc = optional_field(j, "certificate"))
    report.certificate = certificate_at(*jc, "certificate");
  if (const Json* js = optional_field(j, "semigroup"))
    report.semigroup = semigroup_at(*js, "semigroup");
  if (const Json* jo = optional_field(j, "oracle"))
    report.oracle = oracle_at(*jo, "oracle");
  return report;
}

void verify_report(const ReportDocument& report) {
  if (report.command != "pipeline" || !report.certificate)
    throw domain_error(
        "verify expects a pipeline report carrying a certificate");
  if (!report.case_doc)
    throw verify_error("case", "report does not embed its input case");
  verify_certificate(*report.certificate);
  if (!(report.case_doc->pair() == report.certificate->input))
    throw verify_error("case",
                       "embedded case and certificate input disagree");
  if (!(report.case_doc->inputs == report.certificate->inputs))
    throw verify_error("case",
                       "embedded inputs and certificate inputs disagree");

  BoundCertificate recomputed =
      run_pipeline(report.case_doc->pair(), report.case_doc->inputs,
                   report.case_doc->bigness_certificate);
  ReportDocument fresh;
  fresh.command = "pipeline";
  fresh.case_doc = report.case_doc;
  fresh.certificate = std::move(recomputed);
  if (emit_report(fresh) != emit_report(report))
    throw verify_error("determinism",
                       "deterministic recompute does not reproduce the "
                       "recorded report");
}

OracleSection run_oracle_suites(const OracleRunConfig& config) {
  OracleSection out;
  out.seed = config.seed;
  out.cases = config.cases;
  out.depth = config.depth;

  PairSampler sampler(config.seed);
  for (int i = 0; i < config.cases; ++i) {
    const std::size_t components = sampler.pick(2, 4);
    const std::uint64_t k = sampler.pick(2, 6);
    const LogPair pair = sampler.klt_pair(components, k, 2);
    const MinDiscrepancy closed = min_discrepancy_snc(pair);
    const Rational enumerated =
        brute_force_min_discrepancy(pair, config.depth);
    if (!closed.bounded || closed.value != enumerated)
      out.mismatches.push_back(
          "discrepancy case " + std::to_string(i) + ": closed form " +
          (closed.bounded ? closed.value.str() : std::string("-inf")) +
          " vs enumerated " + enumerated.str());
  }

  out.semigroup_n = config.semigroup_n.value_or(BigInt(5));
  const BigInt threshold = out.semigroup_n * out.semigroup_n + 1;
  out.sweep_from = config.sweep ? config.sweep->first : threshold;
  out.sweep_to =
      config.sweep ? config.sweep->second : threshold + 200;
  const std::size_t limit = static_cast<std::size_t>(out.sweep_to);
  const std::vector<bool> table =
      semigroup_membership_dp(out.semigroup_n, limit);
  for (BigInt m = out.sweep_from; m <= out.sweep_to; ++m) {
    const SemigroupDecomposition dec =
        semigroup_decompose(out.semigroup_n, m);
    if (dec.representable) {
      BigInt sum{0};
      for (const BigInt& q : dec.parts) sum += q * out.semigroup_n + 1;
      if (sum != m)
        out.mismatches.push_back("semigroup m=" + m.str() +
                                 ": parts sum to " + sum.str());
    }
    const bool member = table[static_cast<std::size_t>(m)];
    if (member && !dec.representable)
      out.mismatches.push_back("semigroup m=" + m.str() +
                               ": table member but not decomposed");
    if (m >= threshold && !(dec.representable && member))
      out.mismatches.push_back("semigroup m=" + m.str() +
                               ": expected membership above the threshold");
  }
  out.agreed = out.mismatches.empty();
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw domain_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw domain_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw domain_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

BatchResult run_batch(const std::filesystem::path& input_dir,
                      const std::filesystem::path& output_dir, int jobs) {
  if (!std::filesystem::is_directory(input_dir))
    throw domain_error("batch input is not a directory: " +
                       input_dir.string());
  std::filesystem::create_directories(output_dir);

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(input_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  BatchResult result;
  result.cases.resize(files.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      BatchCaseResult& r = result.cases[i];
      r.case_file = files[i].filename().string();
      r.report_file = files[i].stem().string() + ".report.json";
      try {
        const CaseDocument doc = parse_case(read_file(files[i]));
        ReportDocument report;
        report.command = "pipeline";
        report.case_doc = doc;
        report.certificate =
            run_pipeline(doc.pair(), doc.inputs, doc.bigness_certificate);
        r.m0 = report.certificate->m0;
        write_file_atomic(output_dir / r.report_file, emit_report(report));
        r.status = "ok";
      } catch (const parse_error& e) {
        r.status = "parse-error";
        r.error = e.what();
      } catch (const domain_error& e) {
        r.status = "domain-error";
        r.error = e.what();
      }
    }
  };

  const int thread_count =
      std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  for (const BatchCaseResult& r : result.cases)
    if (r.status != "ok") result.all_ok = false;
  write_file_atomic(output_dir / "index.json", emit_batch_index(result));
  return result;
}

std::string emit_batch_index(const BatchResult& result) {
  Json cases = Json::array();
  for (const BatchCaseResult& r : result.cases) {
    Json entry = Json::object();
    entry["case"] = r.case_file;
    entry["report"] = r.status == "ok" ? Json(r.report_file) : Json(nullptr);
    entry["status"] = r.status;
    if (!r.error.empty()) entry["error"] = r.error;
    if (r.m0) entry["m0"] = bigint_json(*r.m0);
    cases.push_back(std::move(entry));
  }
  Json j = Json::object();
  j["schema_version"] = kSchemaVersion;
  j["all_ok"] = result.all_ok;
  j["cases"] = std::move(cases);
  return j.dump(2) + "\n";
}

}  // namespace logsurf
