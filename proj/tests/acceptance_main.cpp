// Acceptance suite. Each criterion prints one pass/fail line with its
// runtime; the process exits nonzero if any requested criterion fails.
// Run with --criterion N for a single criterion, or no arguments for all.

#include <json.hpp>

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "logsurf/bounds.hpp"
#include "logsurf/errors.hpp"
#include "logsurf/io.hpp"
#include "logsurf/sampling.hpp"

using namespace logsurf;
using logsurf::testing::q;

namespace {

struct Criterion {
  int index;
  const char* name;
  std::function<bool(std::string&)> run;
};

bool expect(bool condition, std::string& detail, const std::string& message) {
  if (!condition && detail.empty()) detail = message;
  return condition;
}

// ---------------------------------------------------------------- 1 ------
// Blow-up discrepancies on a crossed configuration with one negative
// coefficient: exactly 1-a1-b, 1-a2-b, or 1-b depending on the point.
bool criterion_blow_up_values(std::string& detail) {
  PairSampler sampler(1001);
  const SurfaceModel base = logsurf::testing::triple_crossing_model();
  const DivisorId d1 = base.ids()[0], d2 = base.ids()[1], d = base.ids()[2];
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    const Rational a1{BigInt(sampler.pick(0, 23)), BigInt(24)};
    const Rational a2{BigInt(sampler.pick(0, 23)), BigInt(24)};
    const Rational b = -Rational(BigInt(sampler.pick(1, 36)),
                                 BigInt(sampler.pick(1, 12)));
    QDivisor boundary;
    boundary.set_coefficient(d1, a1);
    boundary.set_coefficient(d2, a2);
    boundary.set_coefficient(d, b);
    const LogPair pair = LogPair::sub_boundary_pair(base, boundary);

    const auto disc = [&](const BlowUpSpec& spec) {
      BlowUpResult res = blow_up(pair, spec);
      return -res.pair.boundary().coefficient(res.exceptional);
    };
    ok = ok &&
         expect(disc(BlowUpSpec::intersection_point(d, d1)) == q(1) - a1 - b,
                detail, "discrepancy at a point of D and D1") &&
         expect(disc(BlowUpSpec::intersection_point(d, d2)) == q(1) - a2 - b,
                detail, "discrepancy at a point of D and D2") &&
         expect(disc(BlowUpSpec::free_point(d)) == q(1) - b, detail,
                "discrepancy at a free point of D") &&
         expect((q(1) - a1 - b).is_positive() &&
                    (q(1) - a2 - b).is_positive() &&
                    (q(1) - b).is_positive(),
                detail, "positivity of the three values");
  }
  return ok;
}

// ---------------------------------------------------------------- 2 ------
bool criterion_round_trips(std::string& detail) {
  PairSampler sampler(1002);
  for (int i = 0; i < 1000; ++i) {
    const LogPair pair =
        sampler.klt_pair(2 + sampler.pick(0, 3), 2 + sampler.pick(0, 4), 2);
    const auto& ids = pair.model().ids();
    std::vector<BlowUpSpec> specs{BlowUpSpec::general_point()};
    for (std::size_t a = 0; a < ids.size(); ++a) {
      specs.push_back(BlowUpSpec::free_point(ids[a]));
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        if (pair.model().form(ids[a], ids[b]) >= q(1))
          specs.push_back(BlowUpSpec::intersection_point(ids[a], ids[b]));
    }
    const BlowUpResult up =
        blow_up(pair, specs[sampler.pick(0, specs.size() - 1)]);
    const ContractResult down = contract(up.pair, up.exceptional);
    if (!expect(down.pair == pair && down.pair.model() == pair.model(),
                detail, "round trip failed at sample " + std::to_string(i)))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- 3 ------
bool criterion_terminalization(std::string& detail) {
  PairSampler sampler(1003);
  for (std::uint64_t k = 2; k <= 6; ++k) {
    for (int i = 0; i < 200; ++i) {
      const LogPair pair = sampler.klt_pair(2 + sampler.pick(0, 3), k, 2);
      const TerminalizeResult t = terminalize(pair);
      if (!expect(classify(t.pair).classification ==
                      SingularityClass::Terminal,
                  detail, "not terminal (grid " + std::to_string(k) + ")"))
        return false;
      const QDivisor replayed =
          crepant_pullback_boundary(t.morphism, pair.boundary());
      if (!expect(replayed == t.pair.boundary(), detail,
                  "crepant replay mismatch"))
        return false;
      if (!expect(crepant_pullback_boundary_solved(
                      t.morphism, pair.boundary()) == t.pair.boundary(),
                  detail, "crepant solve mismatch"))
        return false;
      for (const auto& e : t.pair.boundary().entries())
        if (!expect((Rational(BigInt(k)) * e.coeff).is_integer(), detail,
                    "coefficient left the grid"))
          return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- 4 ------
bool criterion_oracle_equivalence(std::string& detail) {
  PairSampler sampler(1004);
  for (int i = 0; i < 200; ++i) {
    const LogPair pair =
        sampler.klt_pair(2 + sampler.pick(0, 2), 2 + sampler.pick(0, 4), 2);
    const MinDiscrepancy closed = min_discrepancy_snc(pair);
    const Rational enumerated = brute_force_min_discrepancy(pair, 4);
    if (!expect(closed.bounded && closed.value == enumerated, detail,
                "closed form " + closed.value.str() + " vs enumerated " +
                    enumerated.str() + " at sample " + std::to_string(i)))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- 5 ------
bool criterion_rounding(std::string& detail) {
  PairSampler sampler(1005);
  const Rational one{1};
  for (int i = 0; i < 10000; ++i) {
    std::vector<Rational> elems;
    const int count = static_cast<int>(sampler.pick(1, 6));
    for (int k = 0; k < count; ++k) {
      Rational x = sampler.rational_in_unit(30);
      if (x.is_zero()) x = Rational(BigInt(1), BigInt(30));
      elems.push_back(x);
    }
    Rational delta{BigInt(sampler.pick(1, 29)), BigInt(30)};
    const CoefficientSet set = CoefficientSet::make(elems);
    const RoundedCoefficients rounded = round_coefficients(set, delta);
    if (!expect(rounded.grid ==
                    (one / (set.min_nonzero() * delta)).ceil(),
                detail, "grid constant mismatch"))
      return false;
    for (const auto& [from, to] : rounded.map) {
      if (!expect((one - delta) * from < to && to <= from, detail,
                  "margin inequality failed for " + from.str()))
        return false;
      if (!expect((Rational(rounded.grid) * to).is_integer(), detail,
                  "rounded value off the grid"))
        return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- 6 ------
bool criterion_semigroup(std::string& detail) {
  for (long long n = 1; n <= 30; ++n) {
    const std::size_t limit = static_cast<std::size_t>(n * n + 500);
    const std::vector<bool> table = semigroup_membership_dp(n, limit);
    for (std::size_t m = static_cast<std::size_t>(n * n + 1); m <= limit;
         ++m) {
      const SemigroupDecomposition dec = semigroup_decompose(n, BigInt(m));
      if (!expect(dec.representable, detail,
                  "no decomposition for n=" + std::to_string(n) +
                      " m=" + std::to_string(m)))
        return false;
      BigInt sum{0};
      for (const BigInt& part : dec.parts) {
        sum += part * n + 1;
        if (!expect(part >= 1, detail, "nonpositive part")) return false;
      }
      if (!expect(sum == m, detail,
                  "parts sum to " + sum.str() + " instead of " +
                      std::to_string(m)))
        return false;
      if (!expect(table[m], detail,
                  "membership table disagrees at n=" + std::to_string(n) +
                      " m=" + std::to_string(m)))
        return false;
    }
  }
  return expect(!semigroup_decompose(2, 4).representable, detail,
                "n=2, m=4 must not be representable");
}

// ---------------------------------------------------------------- 7 ------
bool criterion_negative_count(std::string& detail) {
  PairSampler sampler(1007);
  for (int i = 0; i < 200; ++i) {
    const LogPair pair =
        sampler.terminal_pair(3 + sampler.pick(0, 3), 2 + sampler.pick(0, 4),
                              2);
    const MmpTrace trace = run_mmp(pair, BignessAssumption::assumed());
    const std::size_t count = count_negative_discrepancy(trace);
    if (!expect(count <= pair.boundary().component_count(), detail,
                "count " + std::to_string(count) + " exceeds components at " +
                    std::to_string(i)))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- 8 ------
bool criterion_projection_formula(std::string& detail) {
  PairSampler sampler(1008);
  for (int i = 0; i < 500; ++i) {
    const ModelMorphism chain = logsurf::testing::random_chain(sampler);
    const QDivisor d =
        logsurf::testing::random_divisor(sampler, chain.target());
    QDivisor e;
    for (DivisorId id : chain.exceptional_ids())
      if (sampler.pick(0, 1))
        e.set_coefficient(id, q(static_cast<long long>(sampler.pick(0, 3))));
    const long m = static_cast<long>(sampler.pick(1, 7));
    if (!expect(check_projection_formula(chain, d, m, e), detail,
                "transfer identity failed at sample " + std::to_string(i)))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- 9 ------
const char* kGoldenCases[] = {
    "case_minimal.json",
    "case_worked_pair.json",
    "case_contraction.json",
    "case_redundant.json",
};

std::filesystem::path golden_dir() { return LOGSURF_GOLDEN_DIR; }

std::string golden_report_name(const std::string& case_name) {
  return case_name.substr(0, case_name.size() - 5) + ".report.json";
}

bool criterion_golden_pipeline(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path dir = golden_dir();

  // Determinism in process and against the stored bytes.
  for (const char* name : kGoldenCases) {
    const CaseDocument doc = parse_case(read_file(dir / name));
    ReportDocument report;
    report.command = "pipeline";
    report.case_doc = doc;
    report.certificate =
        run_pipeline(doc.pair(), doc.inputs, doc.bigness_certificate);
    const std::string bytes = emit_report(report);
    report.certificate =
        run_pipeline(doc.pair(), doc.inputs, doc.bigness_certificate);
    if (!expect(emit_report(report) == bytes, detail,
                std::string(name) + ": two in-process runs disagree"))
      return false;
    const std::string stored = read_file(dir / golden_report_name(name));
    if (!expect(bytes == stored, detail,
                std::string(name) + ": bytes differ from the stored report"))
      return false;
    try {
      verify_report(parse_report(stored));
    } catch (const std::exception& e) {
      return expect(false, detail,
                    std::string(name) + ": verify rejected the report: " +
                        e.what());
    }
  }

  // Batch runs give byte-identical reports for every job count.
  const fs::path scratch = fs::temp_directory_path() / "logsurf_acceptance";
  fs::remove_all(scratch);
  const fs::path in_dir = scratch / "cases";
  fs::create_directories(in_dir);
  for (const char* name : kGoldenCases)
    fs::copy_file(dir / name, in_dir / name);
  for (int jobs : {1, 4}) {
    const fs::path out = scratch / ("out" + std::to_string(jobs));
    const BatchResult batch = run_batch(in_dir, out, jobs);
    if (!expect(batch.all_ok, detail, "batch run failed")) return false;
    for (const char* name : kGoldenCases) {
      const std::string produced = read_file(out / golden_report_name(name));
      const std::string stored = read_file(dir / golden_report_name(name));
      if (!expect(produced == stored, detail,
                  std::string(name) + ": batch bytes differ (jobs=" +
                      std::to_string(jobs) + ")"))
        return false;
    }
  }
  fs::remove_all(scratch);

  // Twenty systematic tampers, each rejected by verify.
  using Json = nlohmann::ordered_json;
  const std::string worked =
      read_file(dir / golden_report_name("case_worked_pair.json"));
  const std::string contraction =
      read_file(dir / golden_report_name("case_contraction.json"));
  struct Tamper {
    const char* description;
    const std::string* base;
    std::function<void(Json&)> apply;
  };
  const std::string* w = &worked;
  const std::string* c = &contraction;
  const std::vector<Tamper> tampers = {
      {"threshold off by one", w,
       [](Json& j) { j["certificate"]["m0"] = 2918; }},
      {"stage threshold m0", w,
       [](Json& j) { j["certificate"]["stages"][8]["m0"] = 2918; }},
      {"replacement constant", w,
       [](Json& j) { j["certificate"]["stages"][8]["n_replaced"] = 55; }},
      {"threshold constant", w,
       [](Json& j) { j["certificate"]["stages"][8]["n"] = 4; }},
      {"cartier value", w,
       [](Json& j) { j["certificate"]["stages"][7]["value"] = 6; }},
      {"cartier pullback coefficient", c,
       [](Json& j) {
         j["certificate"]["stages"][7]["crepant_pullback"]["C"] = "-1/3";
       }},
      {"negative count", w,
       [](Json& j) { j["certificate"]["stages"][6]["count"] = 1; }},
      {"component count at contraction input", w,
       [](Json& j) {
         j["certificate"]["stages"][6]["components_at_mmp_input"] = 9;
       }},
      {"drop the contraction step", c,
       [](Json& j) {
         j["certificate"]["stages"][5]["trace"]["steps"] =
             Json::array();
       }},
      {"contraction degree", c,
       [](Json& j) {
         j["certificate"]["stages"][5]["trace"]["steps"][0]["pair_degree"] =
             "-1/3";
       }},
      {"classification flip", w,
       [](Json& j) {
         j["certificate"]["stages"][4]["report"]["classification"] =
             "canonical";
       }},
      {"klt level", w,
       [](Json& j) { j["certificate"]["stages"][4]["epsilon"] = "1/5"; }},
      {"terminal boundary coefficient", w,
       [](Json& j) {
         j["certificate"]["stages"][3]["result"]["boundary"]["E1"] = "2/3";
       }},
      {"drop a blow-up step", w,
       [](Json& j) {
         auto& steps = j["certificate"]["stages"][3]["morphism"]["steps"];
         steps.erase(steps.size() - 1);
       }},
      {"redundant witness coefficient", w,
       [](Json& j) {
         j["certificate"]["stages"][2]["witness"]["certificate"]["nef"]
          ["D1"] = "1";
       }},
      {"bigness nef part", w,
       [](Json& j) {
         j["certificate"]["stages"][1]["witness"]["certificate"]["nef"]
          ["D1"] = "2";
       }},
      {"rounding grid", w,
       [](Json& j) { j["certificate"]["stages"][0]["grid"] = 6; }},
      {"rounding map image", w,
       [](Json& j) {
         j["certificate"]["stages"][0]["map"][0][1] = "1/3";
       }},
      {"certificate input boundary", w,
       [](Json& j) {
         j["certificate"]["input"]["boundary"]["D1"] = "1/3";
       }},
      {"declared component bound", w,
       [](Json& j) { j["case"]["inputs"]["A"] = 9; }},
  };
  if (!expect(tampers.size() == 20, detail, "expected 20 tampers"))
    return false;
  for (const Tamper& t : tampers) {
    Json j = Json::parse(*t.base);
    t.apply(j);
    bool rejected = false;
    try {
      verify_report(parse_report(j.dump(2) + "\n"));
    } catch (const verify_error&) {
      rejected = true;
    } catch (const parse_error&) {
      rejected = false;  // must stay schema-valid; a parse error is a bug
    }
    if (!expect(rejected, detail,
                std::string("tamper not rejected: ") + t.description))
      return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "blow-up discrepancy values on crossed configurations",
       criterion_blow_up_values},
      {2, "blow-up/contract round trips are bit-exact", criterion_round_trips},
      {3, "terminalization: terminal, crepant, grid-stable",
       criterion_terminalization},
      {4, "closed-form minimal discrepancy equals depth-4 enumeration",
       criterion_oracle_equivalence},
      {5, "coefficient rounding margin inequality", criterion_rounding},
      {6, "semigroup decomposition threshold and membership table",
       criterion_semigroup},
      {7, "negative-discrepancy count bounded by boundary components",
       criterion_negative_count},
      {8, "divisor-level transfer identity along random chains",
       criterion_projection_formula},
      {9, "golden pipeline determinism and certificate verification",
       criterion_golden_pipeline},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);

  bool all_pass = true;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.index != only) continue;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const auto seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    std::ostringstream line;
    line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << c.index << ": "
         << c.name << " (" << seconds << "s)";
    if (!pass && !detail.empty()) line << " -- " << detail;
    std::cout << line.str() << std::endl;
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
