#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lureobs/config_io.hpp"

namespace lureobs {

/// Options shared by the CLI subcommands. Unset optionals fall back to the
/// per-command defaults documented in the README.
struct CliOptions {
  std::string system_path;  // empty -> bundled config
  std::string gains_path;
  std::optional<double> step, horizon, beta, gamma, epsilon;
  std::optional<std::string> sign_mode;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double box_radius = 5.0;
  double u_radius = 8.0;
  int samples = 1000;
};

/// Exit codes: 0 success (all requested checks pass), 1 check failed,
/// 2 input error (bad flags, unparsable files, I/O failures).
int cmd_example1(const CliOptions& opt);
int cmd_example2(const CliOptions& opt);
int cmd_check(const CliOptions& opt);
int cmd_reduced_demo(const CliOptions& opt);

/// Bundled demo systems, constructed programmatically (the CLI loads the
/// equivalent config files; tests cross-check the two).
LureSystem example1_system();
Vec example1_x0();

LureSystem example2_system();
LipschitzBounds example2_bounds();
ObserverGains example2_gains();
Vec example2_x0();
Vec example2_xhat0();

LureSystem reduced_demo_system();
LipschitzBounds reduced_demo_bounds();
ReducedGains reduced_demo_gains();
int reduced_demo_q();
Vec reduced_demo_x0();
Vec reduced_demo_zhat0();

/// Absolute path of a bundled config file.
std::string bundled_config(const std::string& filename);

}  // namespace lureobs
