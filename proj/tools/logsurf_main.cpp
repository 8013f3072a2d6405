// Command line front end: exact combinatorial calculus for log surface
// pairs. Subcommands mirror the library operations; all documents are
// UTF-8 JSON with rationals encoded as "p/q" strings.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "logsurf/errors.hpp"
#include "logsurf/io.hpp"

namespace {

using namespace logsurf;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitVerify = 2;
constexpr int kExitParse = 3;

std::pair<BigInt, BigInt> parse_sweep(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos)
    throw domain_error("sweep must look like A..B");
  const auto a = Rational::parse(text.substr(0, sep));
  const auto b = Rational::parse(text.substr(sep + 2));
  if (!a || !b || !a->is_integer() || !b->is_integer() || a->num() > b->num())
    throw domain_error("sweep must be an integer range A..B with A <= B");
  return {a->num(), b->num()};
}

void emit_output(const ReportDocument& report, const std::string& output) {
  const std::string bytes = emit_report(report);
  if (output.empty())
    std::cout << bytes;
  else
    write_file_atomic(output, bytes);
}

void write_timing_sidecar(const std::string& output, const std::string& name,
                          std::chrono::steady_clock::duration elapsed) {
  if (output.empty()) return;
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  write_file_atomic(output + ".timing.json",
                    std::string("{\n  \"command\": \"") + name +
                        "\",\n  \"wall_ms\": " + std::to_string(ms) +
                        "\n}\n");
}

int run_case_command(const std::string& command, const std::string& input,
                     const std::string& output) {
  const CaseDocument doc = parse_case(read_file(input));
  ReportDocument report;
  report.command = command;
  report.case_doc = doc;
  if (command == "classify") {
    report.singularity = classify(doc.pair());
  } else if (command == "terminalize") {
    report.terminalization = terminalize(doc.pair());
  } else {
    const LogPair pair = doc.pair();
    BignessAssumption assumption = BignessAssumption::assumed();
    if (auto cert = build_bigness_certificate(pair))
      assumption = BignessAssumption::certified(std::move(*cert));
    report.mmp = run_mmp(pair, assumption);
  }
  emit_output(report, output);
  return kExitOk;
}

int run_semigroup(const BigInt& n, const std::optional<BigInt>& m,
                  const std::optional<std::pair<BigInt, BigInt>>& sweep,
                  const std::string& output) {
  SemigroupSection section;
  if (m) {
    section.queries.push_back({n, *m, semigroup_decompose(n, *m)});
  } else if (sweep) {
    for (BigInt v = sweep->first; v <= sweep->second; ++v)
      section.queries.push_back({n, v, semigroup_decompose(n, v)});
  } else {
    throw domain_error("semigroup needs --m or --sweep");
  }
  for (const SemigroupQuery& q : section.queries) {
    std::cout << "n=" << q.n.str() << " m=" << q.m.str() << ": ";
    if (!q.result.representable) {
      std::cout << "not-representable\n";
      continue;
    }
    std::cout << "[";
    for (std::size_t i = 0; i < q.result.parts.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << q.result.parts[i].str();
    }
    std::cout << "]\n";
  }
  if (!output.empty()) {
    ReportDocument report;
    report.command = "semigroup";
    report.semigroup = std::move(section);
    emit_output(report, output);
  }
  return kExitOk;
}

int run_pipeline_command(const std::string& input, const std::string& output,
                         int jobs, bool timings) {
  const auto start = std::chrono::steady_clock::now();
  if (std::filesystem::is_directory(input)) {
    if (output.empty())
      throw domain_error("batch mode needs --output DIRECTORY");
    const BatchResult batch = run_batch(input, output, jobs);
    for (const BatchCaseResult& r : batch.cases) {
      std::cout << r.case_file << ": " << r.status;
      if (r.m0) std::cout << " m0=" << r.m0->str();
      if (!r.error.empty()) std::cout << " (" << r.error << ")";
      std::cout << "\n";
    }
    if (timings)
      write_timing_sidecar(output + "/index.json", "pipeline",
                           std::chrono::steady_clock::now() - start);
    return batch.all_ok ? kExitOk : kExitDomain;
  }
  const CaseDocument doc = parse_case(read_file(input));
  ReportDocument report;
  report.command = "pipeline";
  report.case_doc = doc;
  report.certificate =
      run_pipeline(doc.pair(), doc.inputs, doc.bigness_certificate);
  emit_output(report, output);
  std::cout << "m0=" << report.certificate->m0.str() << "\n";
  if (timings)
    write_timing_sidecar(output, "pipeline",
                         std::chrono::steady_clock::now() - start);
  return kExitOk;
}

int run_verify(const std::string& input) {
  const ReportDocument report = parse_report(read_file(input));
  verify_report(report);
  std::cout << "verified: certificate replays and recompute matches\n";
  return kExitOk;
}

int run_oracle(std::uint64_t seed, int cases, int depth,
               const std::optional<BigInt>& n,
               const std::optional<std::pair<BigInt, BigInt>>& sweep,
               const std::string& output) {
  OracleRunConfig config;
  config.seed = seed;
  config.cases = cases;
  config.depth = depth;
  config.semigroup_n = n;
  config.sweep = sweep;
  const OracleSection section = run_oracle_suites(config);
  for (const std::string& m : section.mismatches)
    std::cout << "mismatch: " << m << "\n";
  std::cout << (section.agreed ? "oracle suites agree"
                               : "oracle suites found mismatches")
            << " (discrepancy cases=" << section.cases
            << " depth=" << section.depth
            << ", semigroup n=" << section.semigroup_n.str() << " sweep="
            << section.sweep_from.str() << ".." << section.sweep_to.str()
            << ")\n";
  if (!output.empty()) {
    ReportDocument report;
    report.command = "oracle";
    report.oracle = section;
    emit_output(report, output);
  }
  return section.agreed ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact intersection calculus and effectivity pipeline for "
               "log surface pairs"};
  app.require_subcommand(1);

  std::string input, output, sweep_text;
  std::uint64_t n_value = 0, m_value = 0;
  bool has_n = false, has_m = false;
  std::uint64_t seed = 1;
  int jobs = 1, depth = 3, cases = 50;
  bool timings = false;

  auto* classify_cmd = app.add_subcommand(
      "classify", "classify the singularities of a pair");
  classify_cmd->add_option("--input", input, "case document")->required();
  classify_cmd->add_option("--output", output, "report path");

  auto* terminalize_cmd = app.add_subcommand(
      "terminalize", "crepant terminalization of a klt pair");
  terminalize_cmd->add_option("--input", input, "case document")->required();
  terminalize_cmd->add_option("--output", output, "report path");

  auto* mmp_cmd = app.add_subcommand(
      "mmp", "contract negative curves to a minimal model");
  mmp_cmd->add_option("--input", input, "case document")->required();
  mmp_cmd->add_option("--output", output, "report path");

  auto* semigroup_cmd = app.add_subcommand(
      "semigroup", "decompose m over the generators q*n+1");
  semigroup_cmd->add_option("--n", n_value, "semigroup constant n >= 1")
      ->required();
  semigroup_cmd->add_option("--m", m_value, "value to decompose");
  semigroup_cmd->add_option("--sweep", sweep_text, "integer range A..B");
  semigroup_cmd->add_option("--output", output, "report path");

  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "run the staged effectivity pipeline");
  pipeline_cmd->add_option("--input", input, "case document or directory")
      ->required();
  pipeline_cmd->add_option("--output", output, "report path or directory");
  pipeline_cmd->add_option("--jobs", jobs, "parallel cases in batch mode");
  pipeline_cmd->add_flag("--timings", timings,
                         "write wall-clock sidecar files");

  auto* verify_cmd = app.add_subcommand(
      "verify", "replay a pipeline report and its certificate");
  verify_cmd->add_option("--input", input, "report document")->required();

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "cross-check closed forms against exhaustive suites");
  oracle_cmd->add_option("--seed", seed, "random seed");
  oracle_cmd->add_option("--count", cases, "number of random pairs");
  oracle_cmd->add_option("--depth", depth, "enumeration depth");
  oracle_cmd->add_option("--n", n_value, "semigroup constant");
  oracle_cmd->add_option("--sweep", sweep_text, "semigroup range A..B");
  oracle_cmd->add_option("--output", output, "report path");

  CLI11_PARSE(app, argc, argv);
  semigroup_cmd->count("--m") && (has_m = true);
  (semigroup_cmd->count("--n") || oracle_cmd->count("--n")) && (has_n = true);

  try {
    if (*classify_cmd) return run_case_command("classify", input, output);
    if (*terminalize_cmd)
      return run_case_command("terminalize", input, output);
    if (*mmp_cmd) return run_case_command("mmp", input, output);
    if (*semigroup_cmd) {
      std::optional<BigInt> m;
      if (has_m) m = BigInt(m_value);
      std::optional<std::pair<BigInt, BigInt>> sweep;
      if (!sweep_text.empty()) sweep = parse_sweep(sweep_text);
      return run_semigroup(BigInt(n_value), m, sweep, output);
    }
    if (*pipeline_cmd)
      return run_pipeline_command(input, output, jobs, timings);
    if (*verify_cmd) return run_verify(input);
    if (*oracle_cmd) {
      std::optional<BigInt> n;
      if (has_n) n = BigInt(n_value);
      std::optional<std::pair<BigInt, BigInt>> sweep;
      if (!sweep_text.empty()) sweep = parse_sweep(sweep_text);
      return run_oracle(seed, cases, depth, n, sweep, output);
    }
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const verify_error& e) {
    std::cerr << "verification mismatch: " << e.what() << "\n";
    return kExitVerify;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitDomain;
}
