#include <CLI11.hpp>

#include "bubbly_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sub-wavelength band structures and envelopes of bubbly crystals"};
  app.require_subcommand(1);

  std::string config_path;
  bubbly::cli::RunOptions options;
  std::string out_dir = "out";
  bubbly::cli::FieldOverrides field;
  double epsilon = 0.0;
  std::string band;
  std::string lattice;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Config file or manifest.json of an earlier run")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", options.seed, "Seed for randomized probes");
  };
  CLI::App* bands = app.add_subcommand("bands", "Band structure along a Brillouin-zone path");
  CLI::App* dirac = app.add_subcommand("dirac", "Dirac point report and cone fit");
  CLI::App* fieldcmd = app.add_subcommand("field", "Bloch eigenfunction on a grid and an x-axis line cut");
  CLI::App* envelope = app.add_subcommand("envelope", "Envelope spatial frequency against frequency shift");
  CLI::App* compare = app.add_subcommand("compare", "Honeycomb and square envelope laws side by side");
  for (CLI::App* sub : {bands, dirac, fieldcmd, envelope, compare}) common(sub);
  CLI::Option* eps_opt = fieldcmd->add_option("--epsilon", epsilon, "Frequency shift omega - omega*");
  CLI::Option* band_opt = fieldcmd->add_option("--band", band, "upper, lower or first");
  CLI::Option* lattice_opt = envelope->add_option("--lattice", lattice, "honeycomb or square");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  options.out_dir = out_dir;
  if (*eps_opt) field.epsilon = epsilon;
  if (*band_opt) field.band = band;
  std::optional<std::string> kind;
  if (*lattice_opt) kind = lattice;
  const std::string name = app.get_subcommands().front()->get_name();
  return bubbly::cli::run_command(name, config_path, options, field, kind);
}
