#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "run_config.hpp"

namespace mvcorr::cli {

enum ExitCode : int { kSuccess = 0, kViolation = 1, kUsage = 2, kIoError = 3 };

/// Raised by self-checks (covcheck, boundcheck) when an invariant fails.
class Violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int cmd_simulate(const Section& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_train(const Section& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_eval(const Section& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_covcheck(const Section& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_boundcheck(const Section& cfg, const std::filesystem::path& out, std::ostream& log);

struct CovcheckConfig {
  int batches_identity = 500;
  int batches_bound = 1000;
  int batches_identical = 50;
  std::uint64_t seed = 7;
  bool inject_asymmetry = false;  ///< negative control: corrupt one R_b entry
};

struct CovcheckReport {
  int identity_batches = 0;
  int bound_batches = 0;
  int identical_batches = 0;
  double max_identity_residual = 0.0;
  double max_asymmetry = 0.0;
  double max_rho = 0.0;
  double max_rho_gev_diff = 0.0;
  double max_identical_deviation = 0.0;
  std::vector<nlohmann::json> failures;

  bool passed() const { return failures.empty(); }
  nlohmann::json to_json() const;
};

CovcheckReport run_covcheck(const CovcheckConfig& cfg);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& log, std::ostream& err);

}  // namespace mvcorr::cli
