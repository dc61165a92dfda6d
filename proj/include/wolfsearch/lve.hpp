#pragma once

#include "wolfsearch/cmaes.hpp"
#include "wolfsearch/core.hpp"
#include "wolfsearch/enrollment.hpp"
#include "wolfsearch/generator.hpp"
#include "wolfsearch/matcher.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wolfsearch::lve {

//! One (matcher, enrollment database) pair scored during the search.
struct SystemSpec
{
  std::string name;
  MatcherSpec matcher;
  std::shared_ptr<const EnrollmentSet> enrollment;
  double weight = 1.0;
};

struct LveConfig
{
  GeneratorSpec generator;
  std::vector<SystemSpec> systems;
  std::size_t population = 22;
  std::size_t iterations = 1000;
  double sigma0 = 0.5;
  std::optional<RealVector> mean0;
  std::uint64_t seed = 0;
  //! Per-system match thresholds; when set, FMR of every iteration's best
  //! candidate is recorded for each system.
  std::optional<std::vector<double>> fmr_thresholds;
  //! Worker threads for candidate scoring. Results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
  cmaes::Config optimizer_config() const;
};

struct IterationBest
{
  double score;
  LatentVector latent;
  Embedding embedding;
};

struct LveResult
{
  LatentVector best_latent;
  Embedding best_embedding;
  double best_score;
  std::size_t best_iteration; // 0-based
  std::vector<IterationBest> iteration_bests;
  //! [iteration][candidate] aggregated scores, kept for re-checking.
  std::vector<std::vector<double>> population_scores;
  //! [system][iteration] mean score of that iteration's best candidate.
  std::vector<std::vector<double>> system_score_traces;
  //! [system][iteration], present when thresholds were configured.
  std::optional<std::vector<std::vector<double>>> system_fmr_traces;
  //! Per-system mean score of the global best.
  std::vector<double> final_system_means;
  //! Per-system FMR of the global best, when thresholds were configured.
  std::optional<std::vector<double>> final_system_fmrs;
};

//! s_i = sum_k w_k s_i^(k) / sum_k w_k, with weights normalized first so
//! that one system, or equal systems, reproduce the input exactly.
std::vector<double> aggregate(const std::vector<std::vector<double>>& per_system_means,
                              const std::vector<double>& weights);

struct BestFace
{
  std::size_t index;
  double score;
};

//! argmax; ties go to the lowest index.
BestFace get_best_face(const std::vector<double>& scores);

//! The latent variable evolution loop. Runs exactly config.iterations
//! generations and is deterministic in config.seed.
LveResult run_lve(const LveConfig& config);

struct SystemConflict
{
  std::string name;
  double single_fmr;
  double combined_fmr;
  bool below_single;
};

struct ConflictReport
{
  std::vector<SystemConflict> systems;
  std::vector<std::string> flagged;
};

//! Reruns every system of a multi-system config on its own (same seed and
//! generator) and flags systems whose final FMR under the combination falls
//! below their single-setting FMR. Requires fmr_thresholds.
ConflictReport conflict_probe(const LveConfig& combined, const LveResult& combined_result);

} // namespace wolfsearch::lve
