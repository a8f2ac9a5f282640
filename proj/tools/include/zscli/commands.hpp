#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zscli/config.hpp"
#include "zsspec/boutroux.hpp"
#include "zsspec/equilibrium.hpp"
#include "zsspec/sweep.hpp"

namespace zscli {

enum ExitCode : int { kPass = 0, kError = 1, kDegenerate = 2 };

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CommandResult {
  int exit_code = kPass;
  std::string summary;             // human-readable, printed by the binary
  std::vector<std::string> files;  // written under the job directory
  std::vector<CheckResult> checks;
  std::vector<std::string> degeneracies;

  // Structured results, for callers that skip the files.
  std::optional<zs::QuadraticDifferential> qd;
  std::optional<zs::EnergyReport> energy;
  zs::PolyContinuum spectrum;
  std::optional<zs::CrossoverReport> crossover;
};

/// Boutroux solve, trace, equilibrium on the spectrum and the three intensities.
CommandResult cmd_solve(const JobConfig& cfg);
/// Equilibrium and intensity report on the explicit arcs.
CommandResult cmd_energy(const JobConfig& cfg);
/// Verification suite on the traced reference, or on the explicit candidate arcs against it.
CommandResult cmd_verify(const JobConfig& cfg);
/// Class energies along the configured anchor family and their crossover.
CommandResult cmd_compare_classes(const JobConfig& cfg);

/// Dispatch on cfg.command; library errors become kError with the message in the summary.
CommandResult run_command(const JobConfig& cfg);

/// Command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zscli
