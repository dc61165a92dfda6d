#include "wolfsearch/reports.hpp"

#include "wolfsearch/oracle.hpp"

#include <cmath>

namespace wolfsearch::reports {

ordered_json number(double x)
{
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  return x;
}

ordered_json vector_json(const RealVector& v)
{
  return ordered_json(v.as_vector());
}

namespace {

const char* generator_kind_name(GeneratorKind k)
{
  switch (k) {
    case GeneratorKind::identity: return "identity";
    case GeneratorKind::affine: return "affine";
    case GeneratorKind::cluster_warp: return "cluster_warp";
    case GeneratorKind::external: return "external";
  }
  return "unknown";
}

const char* matcher_kind_name(MatcherKind k)
{
  switch (k) {
    case MatcherKind::cosine: return "cosine";
    case MatcherKind::neg_euclidean: return "neg_euclidean";
    case MatcherKind::external: return "external";
  }
  return "unknown";
}

} // namespace

ordered_json lve_result_json(const lve::LveConfig& config,
                             const lve::LveResult& result,
                             const LveRunInfo& info,
                             const std::optional<lve::ConflictReport>& conflict)
{
  ordered_json j;
  j["setting"] = info.setting;
  j["seed"] = info.seed;
  j["population"] = config.population;
  j["iterations"] = config.iterations;
  j["sigma0"] = config.sigma0;
  j["generator"] = {{"kind", generator_kind_name(config.generator.kind)},
                    {"latent_dim", config.generator.latent_dim},
                    {"embed_dim", config.generator.embed_dim}};

  ordered_json systems = ordered_json::array();
  for (std::size_t k = 0; k < config.systems.size(); ++k) {
    const auto& s = config.systems[k];
    ordered_json sj;
    sj["name"] = s.name;
    sj["matcher"] = matcher_kind_name(s.matcher.kind);
    sj["weight"] = s.weight;
    sj["templates"] = k < info.template_counts.size() ? info.template_counts[k]
                                                      : s.enrollment->size();
    if (config.fmr_thresholds)
      sj["threshold"] = number((*config.fmr_thresholds)[k]);
    sj["final_mean"] = result.final_system_means[k];
    if (result.final_system_fmrs)
      sj["final_fmr"] = (*result.final_system_fmrs)[k];
    systems.push_back(std::move(sj));
  }
  j["systems"] = std::move(systems);

  j["best"] = {{"score", result.best_score},
               {"iteration", result.best_iteration + 1},
               {"latent", vector_json(result.best_latent)},
               {"embedding", vector_json(result.best_embedding)}};

  ordered_json bests = ordered_json::array();
  for (const auto& b : result.iteration_bests)
    bests.push_back({{"score", b.score}, {"latent", vector_json(b.latent)}});
  j["iteration_bests"] = std::move(bests);

  if (conflict) {
    ordered_json cs = ordered_json::array();
    for (const auto& c : conflict->systems) {
      cs.push_back({{"name", c.name},
                    {"single_fmr", c.single_fmr},
                    {"combined_fmr", c.combined_fmr},
                    {"below_single", c.below_single}});
    }
    j["conflict"] = {{"systems", std::move(cs)}, {"flagged", conflict->flagged}};
  }
  return j;
}

std::string trace_csv(const lve::LveResult& result)
{
  const std::size_t k_systems = result.system_score_traces.size();
  const bool with_fmr = result.system_fmr_traces.has_value();
  std::string out = "iteration,best_score";
  for (std::size_t k = 0; k < k_systems; ++k) {
    const std::string prefix = ",system_" + std::to_string(k + 1);
    out += prefix + "_mean";
    if (with_fmr)
      out += prefix + "_fmr";
  }
  out += '\n';
  for (std::size_t it = 0; it < result.iteration_bests.size(); ++it) {
    out += std::to_string(it + 1);
    out += ',';
    out += oracle::format_double(result.iteration_bests[it].score);
    for (std::size_t k = 0; k < k_systems; ++k) {
      out += ',';
      out += oracle::format_double(result.system_score_traces[k][it]);
      if (with_fmr) {
        out += ',';
        out += oracle::format_double((*result.system_fmr_traces)[k][it]);
      }
    }
    out += '\n';
  }
  return out;
}

ordered_json eval_report_json(const eval::EvalReport& r)
{
  ordered_json j;
  j["threshold"] = {{"threshold", number(r.threshold.threshold)},
                    {"eer", r.threshold.eer},
                    {"fmr_at_threshold", r.threshold.fmr_at_threshold},
                    {"fnmr_at_threshold", r.threshold.fnmr_at_threshold}};
  j["normal_fmr_dev"] = r.normal_fmr_dev;
  j["normal_fmr_eval"] = r.normal_fmr_eval;
  j["master_fmr_dev"] = r.master_fmr_dev;
  j["master_fmr_eval"] = r.master_fmr_eval;
  j["comparisons_dev"] = r.comparisons_dev;
  j["comparisons_eval"] = r.comparisons_eval;
  ordered_json matched = ordered_json::array();
  for (const auto& m : r.matched_identities)
    matched.push_back({{"identity", m.identity}, {"max_score", m.max_score}});
  j["matched_identities"] = std::move(matched);
  j["n_matched"] = r.n_matched;
  j["n_matched_dev"] = r.n_matched_dev;
  j["n_matched_eval"] = r.n_matched_eval;
  j["success_dev"] = r.success_dev;
  j["success_eval"] = r.success_eval;
  j["success"] = r.success;
  return j;
}

ordered_json density_report_json(const synth::DensityReport& r, bool normalized)
{
  ordered_json j;
  j["percentile"] = r.percentile;
  j["query_density"] = r.query_density;
  j["bandwidth"] = {r.bandwidth[0], r.bandwidth[1]};
  j["explained_variance_ratio"] = r.explained_ratio;
  j["query_xy"] = {r.query_xy[0], r.query_xy[1]};
  j["n_reference"] = r.reference_xy.size();
  j["normalized"] = normalized;
  return j;
}

} // namespace wolfsearch::reports
