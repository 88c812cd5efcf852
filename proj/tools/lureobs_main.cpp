#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "lureobs/experiments.hpp"

namespace {

void add_common_flags(CLI::App* cmd, lureobs::CliOptions& opt) {
  cmd->add_option("--system", opt.system_path,
                  "System definition file (default: bundled config)");
  cmd->add_option("--gains", opt.gains_path,
                  "Gains file (default: bundled config)");
  cmd->add_option("--step", opt.step, "Integration step size");
  cmd->add_option("--horizon", opt.horizon, "Simulation end time");
  cmd->add_option("--sign-mode", opt.sign_mode,
                  "exact | sigmoid:EPS:abs|sqrt | guided:K1:K2:M:N");
  cmd->add_option("--beta", opt.beta, "Override the switching gain beta");
  cmd->add_option("--gamma", opt.gamma, "Override gamma for design checks");
  cmd->add_option("--epsilon", opt.epsilon, "Override the margin epsilon");
  cmd->add_option("--out", opt.out_dir, "Output directory (default: out)");
  cmd->add_option("--seed", opt.seed, "Seed for sample boxes");
  cmd->add_option("--box-radius", opt.box_radius,
                  "State sample box half-width");
  cmd->add_option("--u-radius", opt.u_radius, "Input sample box half-width");
  cmd->add_option("--samples", opt.samples, "Sample count for checks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-valued Lur'e systems: sliding-mode observer toolbox"};
  app.require_subcommand(1);

  lureobs::CliOptions opt;
  CLI::App* ex1 = app.add_subcommand(
      "example1", "Scalar sliding-mode demo comparing Sign realizations");
  CLI::App* ex2 = app.add_subcommand(
      "example2", "Full-order observer demo: checks, certificates, run");
  CLI::App* chk = app.add_subcommand(
      "check", "Verify design conditions for a system/gains pair");
  CLI::App* red = app.add_subcommand(
      "reduced-demo", "Reduced-order observer demo on the bundled 2-D system");
  for (CLI::App* cmd : {ex1, ex2, chk, red}) add_common_flags(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(ex1)) return lureobs::cmd_example1(opt);
    if (app.got_subcommand(ex2)) return lureobs::cmd_example2(opt);
    if (app.got_subcommand(chk)) return lureobs::cmd_check(opt);
    if (app.got_subcommand(red)) return lureobs::cmd_reduced_demo(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}
