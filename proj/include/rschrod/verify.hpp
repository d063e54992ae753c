#pragma once

#include <string>
#include <vector>

#include "rschrod/base.hpp"

// Verification suites behind `verify --suite NAME` and the acceptance
// criteria. Every tolerance is pinned here in code; the reports are
// machine-checkable JSON.

namespace rschrod {

struct VerifyCase {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCase> cases;
  bool pass = true;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Known suite names, excluding "all".
const std::vector<std::string>& verification_suites();

// Runs the named suites ("all" expands to every suite). Unknown names throw.
// An empty list yields an empty passing report.
VerifyReport run_verification(const std::vector<std::string>& suites, std::uint64_t seed,
                              const std::string& config_hash);

// Acceptance criteria 1..12 as stated, sharing the suite machinery where the
// procedures coincide. (Criterion 13 exercises the CLI binary itself and
// lives in the acceptance driver.)
std::vector<VerifyCase> criterion_cases(int criterion, std::uint64_t seed);

std::string report_to_json(const VerifyReport& report);

}  // namespace rschrod
