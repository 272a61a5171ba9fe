// Command-line front end: every pipeline behind a subcommand over JSON
// configs, emitting CSV/JSON artifacts plus a run manifest.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace eqsim::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;   // overrides the config seed
  std::optional<long long> shots;      // overrides the config shots
  double broaden_mev = 0.0;            // display broadening, spectrum only
};

// Exit codes: 0 success, 2 config/validation error, 3 numeric failure.
int cmd_coupling(const CommonOptions& opt);
int cmd_spectrum(const CommonOptions& opt);
int cmd_t1(const CommonOptions& opt);
int cmd_t2(const CommonOptions& opt);
int cmd_tomography(const CommonOptions& opt);
int cmd_superradiance(const CommonOptions& opt);
int cmd_oracle_check(const CommonOptions& opt);

/// Full argv entry point (used by main and by the CLI tests).
int run_cli(int argc, const char* const* argv);

}  // namespace eqsim::cli
