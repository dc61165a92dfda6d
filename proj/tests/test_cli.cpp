#include "helpers.hpp"

#include "wolfsearch/csv.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using nlohmann::json;

namespace {

struct CliRun
{
  int code;
  std::string output;
};

CliRun run_cli(const std::string& args, const testing::TempDir& dir)
{
  const auto log = dir / "cli.log";
  const std::string cmd = std::string("\"") + WOLFSEARCH_CLI + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

json small_config(std::size_t systems)
{
  json cfg = json::parse(R"({
    "seed": 4,
    "synth": {"embed_dim": 6, "identities": 12, "items_per_identity": 2,
              "within_identity_sigma": 0.05, "surrogate_identities": 12,
              "layout": {"count": 2, "offset_norm": 1.0, "spread": 0.6, "sigma": 0.3,
                         "weights": [0.7, 0.3]}},
    "generator": {"kind": "identity", "latent_dim": 6, "embed_dim": 6},
    "lve": {"population": 8, "iterations": 12},
    "eval": {"dev": "data/dev.csv", "eval": "data/eval.csv", "reference": "data/enrollment.csv"}
  })");
  cfg["systems"] = json::array();
  cfg["systems"].push_back({{"name", "cos"}, {"matcher", {{"kind", "cosine"}}},
                            {"enrollment", "data/surrogate.csv"}});
  if (systems > 1)
    cfg["systems"].push_back({{"name", "euc"}, {"matcher", {{"kind", "neg_euclidean"}}},
                              {"enrollment", "data/dev.csv"}});
  return cfg;
}

std::string write_config(const testing::TempDir& dir, const json& cfg)
{
  const auto path = dir / "config.json";
  std::ofstream(path) << cfg.dump(2);
  return path.string();
}

std::size_t count_lines(const std::string& text)
{
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("cli: synth, lve, eval and density end to end")
{
  testing::TempDir dir("cli");
  const std::string cfg = write_config(dir, small_config(1));
  const std::string data = (dir / "data").string();

  auto r = run_cli("synth --config " + cfg + " --out " + data, dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  for (const char* f : {"enrollment.csv", "dev.csv", "eval.csv", "surrogate.csv", "provenance.json"})
    CHECK(std::filesystem::exists(dir / "data" / f));

  r = run_cli("lve --config " + cfg + " --out " + (dir / "run").string(), dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const std::string trace = wolfsearch::csv::read_file(dir / "run" / "trace.csv");
  CHECK(count_lines(trace) == 1 + 12);
  CHECK(trace.starts_with("iteration,best_score,system_1_mean,system_1_fmr\n"));
  const json result = json::parse(wolfsearch::csv::read_file(dir / "run" / "result.json"));
  CHECK(result["iteration_bests"].size() == 12);
  CHECK(result["best"]["embedding"].size() == 6);

  const std::string master = (dir / "run" / "result.json").string();
  r = run_cli("eval --config " + cfg + " --out " + (dir / "eval").string() + " --master " + master, dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const json report = json::parse(wolfsearch::csv::read_file(dir / "eval" / "eval_report.json"));
  CHECK(report.contains("success"));

  r = run_cli("density --config " + cfg + " --out " + (dir / "density").string() + " --master " +
                (dir / "run" / "master.csv").string(),
              dir);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const std::string points = wolfsearch::csv::read_file(dir / "density" / "density_points.csv");
  CHECK(count_lines(points) == 1 + 24 + 1);
}

TEST_CASE("cli: lve output is byte-identical across reruns")
{
  testing::TempDir dir("rerun");
  const std::string cfg = write_config(dir, small_config(2));
  REQUIRE(run_cli("synth --config " + cfg + " --out " + (dir / "data").string(), dir).code == 0);
  REQUIRE(run_cli("lve --config " + cfg + " --out " + (dir / "a").string(), dir).code == 0);
  REQUIRE(run_cli("lve --config " + cfg + " --out " + (dir / "b").string(), dir).code == 0);
  for (const char* f : {"result.json", "trace.csv", "master.csv"}) {
    CHECK(wolfsearch::csv::read_file(dir / "a" / f) == wolfsearch::csv::read_file(dir / "b" / f));
  }
  // two systems: one mean and one fmr column each
  const std::string trace = wolfsearch::csv::read_file(dir / "a" / "trace.csv");
  CHECK(trace.starts_with(
    "iteration,best_score,system_1_mean,system_1_fmr,system_2_mean,system_2_fmr\n"));
  const json result = json::parse(wolfsearch::csv::read_file(dir / "a" / "result.json"));
  CHECK(result.contains("conflict"));
  CHECK(result["conflict"]["systems"].size() == 2);
}

TEST_CASE("cli: exit codes")
{
  testing::TempDir dir("codes");
  json cfg = small_config(1);
  cfg.erase("synth");
  const std::string path = write_config(dir, cfg);

  auto r = run_cli("synth --config " + path + " --out " + (dir / "d").string(), dir);
  CHECK(r.code == 1);
  CHECK(r.output.find("no 'synth' section") != std::string::npos);

  r = run_cli("bogus", dir);
  CHECK(r.code == 1);
  r = run_cli("lve", dir); // missing --config
  CHECK(r.code == 1);

  // enrollment file does not exist
  r = run_cli("lve --config " + path + " --out " + (dir / "x").string(), dir);
  CHECK(r.code == 1);

  // oracle failure maps to the runtime exit code
  json ext = small_config(1);
  ext["generator"] = {{"kind", "external"},
                      {"latent_dim", 6},
                      {"embed_dim", 6},
                      {"oracle", {{"command", {WOLFSEARCH_ORACLE_DOUBLE, "err"}}}}};
  const std::string ext_path = write_config(dir, ext);
  REQUIRE(run_cli("synth --config " + ext_path + " --out " + (dir / "data").string(), dir).code == 0);
  r = run_cli("lve --config " + ext_path + " --out " + (dir / "y").string(), dir);
  CHECK(r.code == 2);
  CHECK(r.output.find("bad dim") != std::string::npos);
}
