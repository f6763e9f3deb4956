#pragma once

// Self-checks against independent oracles and the recovery and
// reproduction suites. Shared by the CLI `verify` verb and the acceptance
// runner.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace switchvol {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240607;
  std::filesystem::path data_dir = "data";
  std::filesystem::path work_dir = "verify_work";
  std::string cli;  // path to the switchvol executable, used by check 10

  int replications = 20;
  int recovery_iterations = 3000;
  int recovery_burn_in = 1000;
};

/// Number of checks; ids run from 1.
inline constexpr int kCheckCount = 10;

/// Checks 1-6 are the fast oracle suites run by `switchvol verify`.
inline constexpr int kOracleCheckCount = 6;

std::string check_name(int id);

/// Runs one check. Exceptions from the library become a failed result.
CheckResult run_check(int id, const VerifyOptions& opts);

/// "PASS  3  filter vs enumeration  (1.2 s)  detail".
std::string format_result(const CheckResult& r);

}  // namespace switchvol
