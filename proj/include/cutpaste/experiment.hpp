#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cutpaste/serialize.hpp"

namespace cutpaste {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

// Process exit codes of the runner.
enum ExitCode : int {
  kExitOk = 0,            // every row PASS or WARN
  kExitVerdict = 1,       // some row FAIL or NOT-APPLICABLE
  kExitInvalidConfig = 2,
  kExitCertification = 3,
  kExitBudget = 4,
};

const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  std::string experiment;
  std::uint32_t q = 7;
  unsigned m = 3;
  std::vector<std::uint64_t> seeds{1, 2};
  std::vector<unsigned> ext_degrees{1};
  std::uint64_t budget = Budget::default_limit();
  unsigned workers = 1;
  std::string out;
  std::string shared_from;  // pencil JSON whose (G, F) every run reuses
  unsigned k_sing = kDefaultKSing;
  std::uint64_t samples = 10000;  // phi round trips per pencil

  // Throws InvalidArgument.
  void validate() const;
  Json to_json() const;
};

// Consecutive seeds pair up; an odd trailing seed s pairs with s + 1.
std::vector<std::pair<std::uint64_t, std::uint64_t>> seed_pairs(const std::vector<std::uint64_t>& seeds);

struct Report {
  Json doc;  // {schema_version, artifact_version, experiment, config, rows, timings, error?}
  int exit_code = kExitOk;

  // Without timings: what two runs of the same config must agree on.
  Json stable() const;
  std::string dump() const { return doc.dump(2) + "\n"; }
};

// Runs an experiment. Invalid configs throw InvalidArgument; certification
// failures and budget overruns end the run early and are recorded in the
// report with their own exit codes.
Report run(const ExperimentConfig& config);

// Differences in verdicts and outputs, one line each; empty when the rows
// agree. Timings are ignored. Throws InvalidArgument for reports of
// different experiments.
std::vector<std::string> report_diff(const Json& a, const Json& b);

// Count tables of a report as CSV (rows carrying a "counts" list).
std::string report_csv(const Json& report);

}  // namespace cutpaste
