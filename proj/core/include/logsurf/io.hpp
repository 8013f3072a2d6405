#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "logsurf/bounds.hpp"

namespace logsurf {

/// One worked case: a model, a boundary, the external constants, and an
/// optional bigness certificate for the margin pair
/// (model, (1-delta)*boundary).
struct CaseDocument {
  SurfaceModel model;
  QDivisor boundary;
  BoundInputs inputs;
  std::optional<BignessCertificate> bigness_certificate;

  LogPair pair() const { return LogPair::boundary_pair(model, boundary); }
};

/// Exact parse of a UTF-8 case document; rationals are read from "p/q" or
/// integer strings with no precision loss. Throws parse_error with the JSON
/// field path on malformed input or an unrecognized schema_version.
CaseDocument parse_case(const std::string& text);
std::string emit_case(const CaseDocument& doc);

struct SemigroupQuery {
  BigInt n{1};
  BigInt m{1};
  SemigroupDecomposition result;
};

struct SemigroupSection {
  std::vector<SemigroupQuery> queries;
};

struct OracleSection {
  std::uint64_t seed = 0;
  int cases = 0;
  int depth = 0;
  BigInt semigroup_n{0};  // 0 = semigroup suite not run
  BigInt sweep_from{0};
  BigInt sweep_to{0};
  std::vector<std::string> mismatches;
  bool agreed = true;
};

/// Emitted result of one command. Exactly one section besides `command`
/// and (when applicable) the embedded case is populated. Reports are
/// byte-deterministic for identical inputs; wall-clock timing never enters
/// a report (the CLI can write it to a sidecar file instead).
struct ReportDocument {
  std::string command;
  std::optional<CaseDocument> case_doc;
  std::optional<SingularityReport> singularity;
  std::optional<TerminalizeResult> terminalization;
  std::optional<MmpTrace> mmp;
  std::optional<BoundCertificate> certificate;
  std::optional<SemigroupSection> semigroup;
  std::optional<OracleSection> oracle;
};

std::string emit_report(const ReportDocument& report);
ReportDocument parse_report(const std::string& text);

/// Replays a pipeline report: structural identity checks on the embedded
/// certificate, then a full deterministic recompute from the embedded case
/// compared byte-for-byte. Throws verify_error naming the failing stage,
/// domain_error when the report carries no certificate.
void verify_report(const ReportDocument& report);

/// Runs the randomized cross-check suites: closed-form minimal
/// discrepancies against exhaustive blow-up enumeration, and constructive
/// semigroup decomposition against the membership table.
struct OracleRunConfig {
  std::uint64_t seed = 1;
  int cases = 50;
  int depth = 3;
  std::optional<BigInt> semigroup_n;  // default: a small fixed sweep
  std::optional<std::pair<BigInt, BigInt>> sweep;
};
OracleSection run_oracle_suites(const OracleRunConfig& config);

std::string read_file(const std::filesystem::path& path);
/// Write-temp-then-rename; no partial output files on failure.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes);

struct BatchCaseResult {
  std::string case_file;    // file name within the input directory
  std::string report_file;  // file name within the output directory
  std::string status;       // "ok", "domain-error", "parse-error"
  std::string error;        // populated on failure
  std::optional<BigInt> m0;
};

struct BatchResult {
  std::vector<BatchCaseResult> cases;  // sorted by case_file
  bool all_ok = true;
};

/// Runs the pipeline over every *.json case in a directory, writing one
/// report per case plus an index.json summary. Cases are independent; with
/// jobs > 1 they run concurrently, and outputs are byte-identical to a
/// serial run.
BatchResult run_batch(const std::filesystem::path& input_dir,
                      const std::filesystem::path& output_dir, int jobs);
std::string emit_batch_index(const BatchResult& result);

}  // namespace logsurf
