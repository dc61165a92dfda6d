#include "wolfsearch/lve.hpp"

#include "parallel.hpp"
#include "wolfsearch/oracle.hpp"

#include <cmath>
#include <numeric>

namespace wolfsearch::lve {

namespace {

[[noreturn]] void rethrow_with_context(const std::string& context)
{
  try {
    throw;
  } catch (const oracle::OracleError& e) {
    throw oracle::OracleError(context + ": " + e.what(), e.transcript());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(context + ": " + e.what());
  }
}

double fraction_at_or_above(const Matcher& matcher,
                            const Embedding& probe,
                            const std::vector<Embedding>& templates,
                            double threshold)
{
  std::size_t hits = 0;
  for (const auto& t : templates) {
    if (matcher.match(probe, t) >= threshold)
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(templates.size());
}

} // namespace

void LveConfig::validate() const
{
  generator.validate();
  if (systems.empty())
    throw ConfigError("lve: at least one system is required");
  if (population < 2)
    throw ConfigError("lve: population must be >= 2");
  if (iterations == 0)
    throw ConfigError("lve: iterations must be positive");
  for (const auto& s : systems) {
    if (!s.enrollment || s.enrollment->empty())
      throw ConfigError("lve: system '" + s.name + "' has no enrollment templates");
    s.matcher.validate();
    if (s.matcher.embed_dim != s.enrollment->embed_dim())
      throw ConfigError("lve: system '" + s.name + "' matcher/enrollment embed_dim mismatch");
    if (s.matcher.embed_dim != generator.embed_dim)
      throw ConfigError("lve: system '" + s.name + "' embed_dim differs from the generator's");
    if (!(s.weight > 0.0) || !std::isfinite(s.weight))
      throw ConfigError("lve: system '" + s.name + "' weight must be positive");
  }
  if (fmr_thresholds && fmr_thresholds->size() != systems.size())
    throw ConfigError("lve: need one fmr threshold per system");
  optimizer_config().validate();
}

cmaes::Config LveConfig::optimizer_config() const
{
  cmaes::Config c;
  c.dim = generator.latent_dim;
  c.lambda = population;
  c.sigma0 = sigma0;
  c.mean0 = mean0;
  c.max_generations = iterations;
  c.seed = seed;
  return c;
}

std::vector<double> aggregate(const std::vector<std::vector<double>>& per_system_means,
                              const std::vector<double>& weights)
{
  if (per_system_means.empty())
    throw Error("aggregate: no systems");
  if (per_system_means.size() != weights.size())
    throw DimensionError("aggregate: " + std::to_string(per_system_means.size()) +
                         " score vectors but " + std::to_string(weights.size()) + " weights");
  const std::size_t m = per_system_means.front().size();
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k]))
      throw Error("aggregate: weight " + std::to_string(k) + " must be positive");
    if (per_system_means[k].size() != m)
      throw DimensionError("aggregate: score vector " + std::to_string(k) + " has length " +
                           std::to_string(per_system_means[k].size()) + ", expected " +
                           std::to_string(m));
    total += weights[k];
  }
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double w = weights[k] / total;
    for (std::size_t i = 0; i < m; ++i)
      out[i] += w * per_system_means[k][i];
  }
  return out;
}

BestFace get_best_face(const std::vector<double>& scores)
{
  if (scores.empty())
    throw Error("get_best_face: no candidates");
  BestFace best{0, scores[0]};
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > best.score)
      best = {i, scores[i]};
  }
  return best;
}

LveResult run_lve(const LveConfig& config)
{
  config.validate();
  const Generator generator(config.generator);
  const std::size_t k_systems = config.systems.size();
  std::vector<Matcher> matchers;
  std::vector<std::vector<Embedding>> templates;
  std::vector<double> weights;
  for (const auto& s : config.systems) {
    matchers.emplace_back(s.matcher);
    templates.push_back(s.enrollment->embeddings());
    weights.push_back(s.weight);
  }

  cmaes::Optimizer optimizer(config.optimizer_config());
  const std::size_t m = config.population;
  const std::size_t n = config.iterations;

  std::vector<IterationBest> bests;
  bests.reserve(n);
  std::vector<std::vector<double>> population_scores;
  population_scores.reserve(n);
  std::vector<std::vector<double>> score_traces(k_systems);
  std::optional<std::vector<std::vector<double>>> fmr_traces;
  if (config.fmr_thresholds)
    fmr_traces.emplace(k_systems);

  for (std::size_t it = 0; it < n; ++it) {
    const std::vector<LatentVector> latents = optimizer.ask();
    std::vector<std::optional<Embedding>> faces(m);
    std::vector<std::vector<double>> means(k_systems, std::vector<double>(m, 0.0));

    detail::parallel_for(m, config.threads, [&](std::size_t i) {
      try {
        faces[i].emplace(generator.generate(latents[i]));
        for (std::size_t k = 0; k < k_systems; ++k)
          means[k][i] = matchers[k].mean_score(*faces[i], templates[k]);
      } catch (...) {
        rethrow_with_context("iteration " + std::to_string(it) + ", candidate " +
                             std::to_string(i));
      }
    });

    std::vector<double> scores = aggregate(means, weights);
    const BestFace best = get_best_face(scores);
    bests.push_back({best.score, latents[best.index], *faces[best.index]});
    for (std::size_t k = 0; k < k_systems; ++k) {
      score_traces[k].push_back(means[k][best.index]);
      if (fmr_traces) {
        (*fmr_traces)[k].push_back(fraction_at_or_above(
          matchers[k], *faces[best.index], templates[k], (*config.fmr_thresholds)[k]));
      }
    }

    std::vector<double> fitness(m);
    for (std::size_t i = 0; i < m; ++i)
      fitness[i] = -scores[i];
    optimizer.tell(latents, fitness);
    population_scores.push_back(std::move(scores));
  }

  std::size_t best_it = 0;
  for (std::size_t it = 1; it < n; ++it) {
    if (bests[it].score > bests[best_it].score)
      best_it = it;
  }

  LveResult result{bests[best_it].latent,
                   bests[best_it].embedding,
                   bests[best_it].score,
                   best_it,
                   std::move(bests),
                   std::move(population_scores),
                   std::move(score_traces),
                   std::move(fmr_traces),
                   {},
                   std::nullopt};
  for (std::size_t k = 0; k < k_systems; ++k)
    result.final_system_means.push_back(result.system_score_traces[k][best_it]);
  if (result.system_fmr_traces) {
    result.final_system_fmrs.emplace();
    for (std::size_t k = 0; k < k_systems; ++k)
      result.final_system_fmrs->push_back((*result.system_fmr_traces)[k][best_it]);
  }
  return result;
}

ConflictReport conflict_probe(const LveConfig& combined, const LveResult& combined_result)
{
  if (!combined.fmr_thresholds || !combined_result.final_system_fmrs)
    throw ConfigError("conflict probe: fmr thresholds are required");
  ConflictReport report;
  for (std::size_t k = 0; k < combined.systems.size(); ++k) {
    LveConfig single = combined;
    single.systems = {combined.systems[k]};
    single.fmr_thresholds = std::vector<double>{(*combined.fmr_thresholds)[k]};
    const LveResult r = run_lve(single);
    SystemConflict c{combined.systems[k].name, (*r.final_system_fmrs)[0],
                     (*combined_result.final_system_fmrs)[k], false};
    c.below_single = c.combined_fmr < c.single_fmr;
    if (c.below_single)
      report.flagged.push_back(c.name);
    report.systems.push_back(std::move(c));
  }
  return report;
}

} // namespace wolfsearch::lve
