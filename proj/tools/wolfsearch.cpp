#include "wolfsearch/commands.hpp"
#include "wolfsearch/oracle.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// Exit codes are part of the scripting contract.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

} // namespace

int main(int argc, char** argv)
{
  using namespace wolfsearch;
  CLI::App app{"wolfsearch: latent-space master-sample search and evaluation"};
  app.require_subcommand(1);

  commands::Manifest manifest;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string setting;
  std::string master;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Override the experiment seed");
  };
  auto* synth_cmd = app.add_subcommand("synth", "Sample a synthetic enrollment database");
  add_common(synth_cmd);
  auto* lve_cmd = app.add_subcommand("lve", "Run latent variable evolution");
  add_common(lve_cmd);
  lve_cmd->add_option("--setting", setting, "Named setting from the config");
  auto* eval_cmd = app.add_subcommand("eval", "Normal test vs master sample test");
  add_common(eval_cmd);
  eval_cmd->add_option("--master", master, "Master embedding (CSV or result.json)")->required();
  auto* density_cmd = app.add_subcommand("density", "Density percentile of a master embedding");
  add_common(density_cmd);
  density_cmd->add_option("--master", master, "Master embedding (CSV or result.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  manifest.config = config_path;
  if (!out_dir.empty())
    manifest.out = out_dir;
  for (auto* cmd : {synth_cmd, lve_cmd, eval_cmd, density_cmd}) {
    if (cmd->parsed() && cmd->count("--seed") > 0)
      manifest.seed = seed;
  }
  if (!setting.empty())
    manifest.setting = setting;
  if (!master.empty())
    manifest.master = master;

  try {
    if (synth_cmd->parsed()) {
      const auto r = commands::cmd_synth(manifest);
      std::cout << "wrote synthetic sets to " << r.dir.string() << " (dev identities "
                << r.dev_identities << ", eval identities " << r.eval_identities << ")\n";
    } else if (lve_cmd->parsed()) {
      const auto r = commands::cmd_lve(manifest);
      std::cout << "best score " << r.result.best_score << " at iteration "
                << r.result.best_iteration + 1 << " of " << r.config.iterations << '\n';
      if (r.conflict && !r.conflict->flagged.empty()) {
        std::cout << "conflict: systems below their single-setting FMR:";
        for (const auto& name : r.conflict->flagged)
          std::cout << ' ' << name;
        std::cout << '\n';
      }
    } else if (eval_cmd->parsed()) {
      const auto r = commands::cmd_eval(manifest);
      std::cout << "threshold " << r.threshold.threshold << " (EER " << r.threshold.eer
                << ")\nnormal FMR dev/eval " << r.normal_fmr_dev << " / " << r.normal_fmr_eval
                << "\nmaster FMR dev/eval " << r.master_fmr_dev << " / " << r.master_fmr_eval
                << "\nmatched identities " << r.n_matched << "\nsuccess "
                << (r.success ? "true" : "false") << '\n';
    } else if (density_cmd->parsed()) {
      const auto r = commands::cmd_density(manifest);
      std::cout << "density percentile " << r.percentile << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
