#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "zscli/commands.hpp"

namespace zscli {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<double> tol_boutroux, tol_bc, tol_traj, tol_energy;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<bool> svg;

  void apply(JobConfig& c) const {
    if (out) c.out = *out;
    if (tol_boutroux) c.tol.boutroux = *tol_boutroux;
    if (tol_bc) c.tol.bc = *tol_bc;
    if (tol_traj) c.tol.traj = *tol_traj;
    if (tol_energy) c.tol.energy = *tol_energy;
    if (samples) c.samples = *samples;
    if (seed) c.seed = *seed;
    if (svg) c.svg = *svg;
  }
};

void add_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON job configuration")->required();
  sub->add_option("--out", o.out, "job directory");
  sub->add_option("--tol-boutroux", o.tol_boutroux, "tolerance on imaginary periods");
  sub->add_option("--tol-bc", o.tol_bc, "boundary residual of the equilibrium solve");
  sub->add_option("--tol-traj", o.tol_traj, "trajectory level drift");
  sub->add_option("--tol-energy", o.tol_energy, "intensity agreement and energy margins");
  sub->add_option("--samples", o.samples, "samples per arc for the verification checks");
  sub->add_option("--seed", o.seed, "seed for randomized sampling");
  sub->add_flag("--svg,!--no-svg", o.svg, "write SVG overlays");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-energy spectral supports of soliton condensates"};
  app.require_subcommand(1);
  Overrides o;
  for (const char* name : {"solve", "energy", "verify", "compare-classes"}) {
    static const std::map<std::string, std::string> help{
        {"solve", "Boutroux differential, traced spectrum and intensities"},
        {"energy", "equilibrium measure and intensities of explicit arcs"},
        {"verify", "S-property, Schiffer, Jenkins, energy and stagnation checks"},
        {"compare-classes", "class energies along an anchor family and their crossover"}};
    add_flags(app.add_subcommand(name, help.at(name)), o);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  CommandResult res;
  try {
    JobConfig cfg = load_config(o.config);
    cfg.command = command;
    o.apply(cfg);
    cfg.validate();
    res = run_command(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  (res.exit_code == kError ? err : out) << res.summary;
  return res.exit_code;
}

}  // namespace zscli
