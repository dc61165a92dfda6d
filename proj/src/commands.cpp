#include "wolfsearch/commands.hpp"

#include "wolfsearch/csv.hpp"
#include "wolfsearch/oracle.hpp"
#include "wolfsearch/reports.hpp"

#include <map>

namespace wolfsearch::commands {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

fs::path output_dir(const Manifest& manifest, const config::Experiment& ex)
{
  fs::path dir;
  if (manifest.out)
    dir = *manifest.out;
  else if (ex.output.dir)
    dir = ex.resolve(*ex.output.dir);
  else
    throw ConfigError("no output directory: pass --out or set output.dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_json(const fs::path& path, const ordered_json& j, int indent)
{
  csv::write_file(path, j.dump(indent) + "\n");
}

MatcherSpec matcher_spec(MatcherKind kind,
                         const std::optional<oracle::Endpoint>& endpoint,
                         std::size_t embed_dim)
{
  MatcherSpec spec;
  spec.kind = kind;
  spec.embed_dim = embed_dim;
  if (endpoint) {
    spec.external = *endpoint;
    spec.external->embed_dim = embed_dim;
  }
  return spec;
}

const config::EvalSection& require_eval(const config::Experiment& ex)
{
  if (!ex.eval)
    throw ConfigError("config has no 'eval' section");
  return *ex.eval;
}

ordered_json mixture_json(const synth::MixtureSpec& spec)
{
  ordered_json clusters = ordered_json::array();
  for (const auto& c : spec.clusters) {
    clusters.push_back(
      {{"center", reports::vector_json(c.center)}, {"sigma", c.sigma}, {"weight", c.weight}});
  }
  return {{"embed_dim", spec.embed_dim},
          {"identities", spec.identities},
          {"items_per_identity", spec.items_per_identity},
          {"within_identity_sigma", spec.within_identity_sigma},
          {"seed", spec.seed},
          {"clusters", std::move(clusters)}};
}

} // namespace

SynthOutput cmd_synth(const Manifest& manifest)
{
  const auto ex = config::load_experiment(manifest.config);
  if (!ex.synth)
    throw ConfigError("config has no 'synth' section");
  const auto& syn = *ex.synth;
  const std::uint64_t seed = manifest.seed.value_or(ex.seed);
  const fs::path dir = output_dir(manifest, ex);

  const synth::MixtureSpec mixture = syn.mixture(seed);
  const EnrollmentSet full = synth::sample_enrollment(mixture, "enrollment");
  const DevEvalSplit split = split_dev_eval(full, syn.dev_fraction, seed + config::seed_offset::split);
  save_enrollment(full, dir / "enrollment.csv");
  save_enrollment(split.dev, dir / "dev.csv");
  save_enrollment(split.eval, dir / "eval.csv");

  ordered_json prov;
  prov["seed"] = seed;
  prov["derived_seeds"] = {{"mixture", seed + config::seed_offset::mixture},
                           {"layout", seed + config::seed_offset::layout},
                           {"split", seed + config::seed_offset::split},
                           {"surrogate", seed + config::seed_offset::surrogate}};
  prov["mixture"] = mixture_json(mixture);
  prov["dev_fraction"] = syn.dev_fraction;
  prov["files"] = {{"enrollment.csv", full.size()},
                   {"dev.csv", split.dev.size()},
                   {"eval.csv", split.eval.size()}};

  if (syn.surrogate_identities > 0) {
    synth::MixtureSpec surrogate = mixture;
    surrogate.identities = syn.surrogate_identities;
    surrogate.seed = seed + config::seed_offset::surrogate;
    const EnrollmentSet s = synth::sample_enrollment(surrogate, "surrogate");
    save_enrollment(s, dir / "surrogate.csv");
    prov["files"]["surrogate.csv"] = s.size();
  }
  write_json(dir / "provenance.json", prov, ex.output.indent);
  return {dir, split.dev.identities().size(), split.eval.identities().size()};
}

lve::LveConfig build_lve_config(const config::Experiment& ex,
                                const std::optional<std::string>& setting,
                                std::uint64_t seed)
{
  if (!ex.generator)
    throw ConfigError("config has no 'generator' section");
  const auto sections = ex.systems_for(setting);
  if (sections.empty())
    throw ConfigError("config has no 'systems'");

  lve::LveConfig cfg;
  cfg.generator = *ex.generator;
  cfg.population = ex.lve.population;
  cfg.iterations = ex.lve.iterations;
  cfg.sigma0 = ex.lve.sigma0;
  cfg.threads = ex.lve.threads;
  cfg.seed = seed + config::seed_offset::optimizer;

  std::map<fs::path, std::shared_ptr<const EnrollmentSet>> cache;
  std::vector<double> thresholds;
  for (const auto& s : sections) {
    const fs::path path = ex.resolve(s.enrollment);
    auto& set = cache[path];
    if (!set)
      set = std::make_shared<const EnrollmentSet>(load_enrollment(path));
    lve::SystemSpec spec{s.name, matcher_spec(s.matcher_kind, s.oracle, set->embed_dim()), set,
                         s.weight};
    if (ex.lve.fmr_trace) {
      if (s.threshold) {
        thresholds.push_back(*s.threshold);
      } else {
        const Matcher matcher(spec.matcher);
        const PairSet pairs = genuine_impostor_pairs(
          *set, {ex.lve.max_pairs, seed + config::seed_offset::pairs});
        const auto scores = eval::score_pairs(*set, pairs, matcher);
        if (scores.genuine.empty() || scores.impostor.empty())
          throw ConfigError("system '" + s.name +
                            "': cannot derive an EER threshold (needs genuine and impostor "
                            "pairs); set 'threshold' explicitly");
        thresholds.push_back(eval::eer_threshold(scores.genuine, scores.impostor).threshold);
      }
    }
    cfg.systems.push_back(std::move(spec));
  }
  if (ex.lve.fmr_trace)
    cfg.fmr_thresholds = std::move(thresholds);
  return cfg;
}

LveOutput cmd_lve(const Manifest& manifest)
{
  const auto ex = config::load_experiment(manifest.config);
  const std::uint64_t seed = manifest.seed.value_or(ex.seed);
  const fs::path dir = output_dir(manifest, ex);

  lve::LveConfig config = build_lve_config(ex, manifest.setting, seed);
  lve::LveResult result = lve::run_lve(config);
  LveOutput out{std::move(config), std::move(result), std::nullopt};
  if (out.config.systems.size() > 1 && ex.lve.conflict_probe && out.config.fmr_thresholds)
    out.conflict = lve::conflict_probe(out.config, out.result);

  reports::LveRunInfo info{manifest.setting.value_or("all"), seed, {}};
  write_json(dir / "result.json", reports::lve_result_json(out.config, out.result, info, out.conflict),
             ex.output.indent);
  csv::write_file(dir / "trace.csv", reports::trace_csv(out.result));
  const EnrollmentSet master("master", out.result.best_embedding.dim(),
                             {{"master", "0", out.result.best_embedding}});
  save_enrollment(master, dir / "master.csv");
  return out;
}

Embedding load_master(const fs::path& path)
{
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(csv::read_file(path));
      return RealVector(doc.at("best").at("embedding").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": cannot read best.embedding: " + e.what());
    }
  }
  const EnrollmentSet set = load_enrollment(path);
  if (set.empty())
    throw ConfigError(path.string() + ": no embedding rows");
  return set[0].embedding;
}

eval::EvalReport cmd_eval(const Manifest& manifest)
{
  const auto ex = config::load_experiment(manifest.config);
  const auto& ev = require_eval(ex);
  if (!ev.dev || !ev.eval)
    throw ConfigError("eval: 'dev' and 'eval' paths are required");
  if (!manifest.master)
    throw ConfigError("eval: --master is required");
  const std::uint64_t seed = manifest.seed.value_or(ex.seed);
  const fs::path dir = output_dir(manifest, ex);

  const EnrollmentSet dev = load_enrollment(ex.resolve(*ev.dev));
  const EnrollmentSet eval_set = load_enrollment(ex.resolve(*ev.eval));
  require_same_dim(dev.embed_dim(), eval_set.embed_dim(), "eval: dev vs eval");
  const Embedding master = load_master(*manifest.master);
  require_same_dim(master.dim(), dev.embed_dim(), "eval: master vs enrollment");

  const Matcher matcher(matcher_spec(ev.matcher_kind, ev.oracle, dev.embed_dim()));
  const PairOptions pairs{ev.max_pairs, seed + config::seed_offset::pairs};
  const eval::EvalReport report = eval::evaluate_master(master, dev, eval_set, matcher, pairs);

  const auto dev_scores = eval::score_pairs(dev, genuine_impostor_pairs(dev, pairs), matcher);
  csv::write_scores(dir / "dev_genuine_scores.csv", dev_scores.genuine);
  csv::write_scores(dir / "dev_impostor_scores.csv", dev_scores.impostor);
  write_json(dir / "eval_report.json", reports::eval_report_json(report), ex.output.indent);
  return report;
}

synth::DensityReport cmd_density(const Manifest& manifest)
{
  const auto ex = config::load_experiment(manifest.config);
  const auto& ev = require_eval(ex);
  if (!ev.reference)
    throw ConfigError("eval: 'reference' path is required for density analysis");
  if (!manifest.master)
    throw ConfigError("density: --master is required");
  const fs::path dir = output_dir(manifest, ex);

  const EnrollmentSet reference = load_enrollment(ex.resolve(*ev.reference));
  Embedding master = load_master(*manifest.master);
  require_same_dim(master.dim(), reference.embed_dim(), "density: master vs reference");

  const bool normalize = ev.normalize.value_or(ev.matcher_kind == MatcherKind::cosine);
  std::vector<RealVector> points = reference.embeddings();
  if (normalize) {
    for (auto& p : points)
      p = l2_normalize(p);
    master = l2_normalize(master);
  }
  const synth::DensityReport report = synth::density_analysis(master, points, ev.bandwidth);

  write_json(dir / "density.json", reports::density_report_json(report, normalize),
             ex.output.indent);
  std::string rows = "kind,identity,item,pc1,pc2,density\n";
  for (std::size_t i = 0; i < reference.size(); ++i) {
    rows += "reference," + csv::quote(reference[i].identity) + "," +
            csv::quote(reference[i].item_id) + "," +
            oracle::format_double(report.reference_xy[i][0]) + "," +
            oracle::format_double(report.reference_xy[i][1]) + "," +
            oracle::format_double(report.reference_density[i]) + "\n";
  }
  rows += "master,master,0," + oracle::format_double(report.query_xy[0]) + "," +
          oracle::format_double(report.query_xy[1]) + "," +
          oracle::format_double(report.query_density) + "\n";
  csv::write_file(dir / "density_points.csv", rows);
  return report;
}

} // namespace wolfsearch::commands
