#pragma once

#include "wolfsearch/core.hpp"
#include "wolfsearch/enrollment.hpp"
#include "wolfsearch/matcher.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wolfsearch::eval {

struct ThresholdReport
{
  double threshold = 0;
  double eer = 0;
  double fmr_at_threshold = 0;
  double fnmr_at_threshold = 0;
};

//! Exhaustive scan over the sorted unique scores of both lists plus -inf
//! and +inf. A score s matches at threshold t iff s >= t. Picks the t that
//! minimizes |FMR - FNMR|; ties go to the smallest t.
ThresholdReport eer_threshold(const std::vector<double>& genuine,
                              const std::vector<double>& impostor);

//! Fraction of impostor scores >= threshold.
double fmr(const std::vector<double>& impostor_scores, double threshold);
//! Fraction of genuine scores < threshold.
double fnmr(const std::vector<double>& genuine_scores, double threshold);

struct IdentityMatch
{
  std::string identity;
  double max_score;
};

struct MasterTest
{
  double fmr = 0;
  std::vector<IdentityMatch> matched;
  std::size_t comparisons = 0;
};

//! Pairs the master embedding with every enrolled template. matched lists
//! identities whose best template score reaches the threshold, in
//! enrollment order.
MasterTest master_face_test(const Embedding& master,
                            const EnrollmentSet& enrollment,
                            const Matcher& matcher,
                            double threshold);

//! True iff master_fmr > normal_fmr.
bool attack_success(double master_fmr, double normal_fmr);

struct PairScores
{
  std::vector<double> genuine;
  std::vector<double> impostor;
};

PairScores score_pairs(const EnrollmentSet& set, const PairSet& pairs, const Matcher& matcher);

struct EvalReport
{
  ThresholdReport threshold;
  double normal_fmr_dev = 0;
  double normal_fmr_eval = 0;
  double master_fmr_dev = 0;
  double master_fmr_eval = 0;
  std::vector<IdentityMatch> matched_identities; // dev then eval
  std::size_t n_matched = 0;
  std::size_t n_matched_dev = 0;
  std::size_t n_matched_eval = 0;
  std::size_t comparisons_dev = 0;
  std::size_t comparisons_eval = 0;
  bool success_dev = false;
  bool success_eval = false;
  bool success = false; // both partitions
};

//! Normal test vs master face test: threshold at the EER of the dev pair
//! protocol, then both FMRs on dev and eval at that threshold.
EvalReport evaluate_master(const Embedding& master,
                           const EnrollmentSet& dev,
                           const EnrollmentSet& eval,
                           const Matcher& matcher,
                           const PairOptions& pair_options = {});

} // namespace wolfsearch::eval
