#include "wolfsearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace wolfsearch::eval {

namespace {

void require_nonempty_finite(const std::vector<double>& v, const char* what)
{
  if (v.empty())
    throw Error(std::string(what) + ": score list is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw Error(std::string(what) + ": non-finite score at index " + std::to_string(i));
  }
}

} // namespace

ThresholdReport eer_threshold(const std::vector<double>& genuine,
                              const std::vector<double>& impostor)
{
  require_nonempty_finite(genuine, "eer_threshold genuine");
  require_nonempty_finite(impostor, "eer_threshold impostor");

  std::vector<double> gen = genuine;
  std::vector<double> imp = impostor;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> candidates;
  candidates.reserve(gen.size() + imp.size() + 2);
  candidates.push_back(-std::numeric_limits<double>::infinity());
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(), std::back_inserter(candidates));
  candidates.push_back(std::numeric_limits<double>::infinity());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const auto n_gen = static_cast<std::int64_t>(gen.size());
  const auto n_imp = static_cast<std::int64_t>(imp.size());
  // |FMR - FNMR| compared exactly as |false_matches*n_gen - false_non_matches*n_imp|
  std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
  std::int64_t best_fm = 0;
  std::int64_t best_fnm = 0;
  double best_t = candidates.front();

  std::size_t gi = 0; // genuine scores < t
  std::size_t ii = 0; // impostor scores < t
  for (double t : candidates) {
    while (gi < gen.size() && gen[gi] < t)
      ++gi;
    while (ii < imp.size() && imp[ii] < t)
      ++ii;
    const std::int64_t false_matches = n_imp - static_cast<std::int64_t>(ii);
    const std::int64_t false_non_matches = static_cast<std::int64_t>(gi);
    const std::int64_t gap = std::abs(false_matches * n_gen - false_non_matches * n_imp);
    if (gap < best_gap) {
      best_gap = gap;
      best_fm = false_matches;
      best_fnm = false_non_matches;
      best_t = t;
    }
  }

  ThresholdReport r;
  r.threshold = best_t;
  r.fmr_at_threshold = static_cast<double>(best_fm) / static_cast<double>(n_imp);
  r.fnmr_at_threshold = static_cast<double>(best_fnm) / static_cast<double>(n_gen);
  r.eer = 0.5 * (r.fmr_at_threshold + r.fnmr_at_threshold);
  return r;
}

double fmr(const std::vector<double>& impostor_scores, double threshold)
{
  if (impostor_scores.empty())
    throw Error("fmr: score list is empty");
  const auto hits = std::count_if(impostor_scores.begin(), impostor_scores.end(),
                                  [&](double s) { return s >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(impostor_scores.size());
}

double fnmr(const std::vector<double>& genuine_scores, double threshold)
{
  if (genuine_scores.empty())
    throw Error("fnmr: score list is empty");
  const auto misses = std::count_if(genuine_scores.begin(), genuine_scores.end(),
                                    [&](double s) { return s < threshold; });
  return static_cast<double>(misses) / static_cast<double>(genuine_scores.size());
}

MasterTest master_face_test(const Embedding& master,
                            const EnrollmentSet& enrollment,
                            const Matcher& matcher,
                            double threshold)
{
  if (enrollment.empty())
    throw Error("master_face_test: enrollment '" + enrollment.name() + "' is empty");
  require_same_dim(master.dim(), enrollment.embed_dim(), "master_face_test");

  MasterTest out;
  std::vector<std::string> order;
  std::unordered_map<std::string, double> best;
  std::size_t hits = 0;
  for (const auto& t : enrollment.templates()) {
    const double s = matcher.match(master, t.embedding);
    ++out.comparisons;
    if (s >= threshold)
      ++hits;
    auto [it, inserted] = best.try_emplace(t.identity, s);
    if (inserted)
      order.push_back(t.identity);
    else
      it->second = std::max(it->second, s);
  }
  out.fmr = static_cast<double>(hits) / static_cast<double>(out.comparisons);
  for (const auto& id : order) {
    if (best[id] >= threshold)
      out.matched.push_back({id, best[id]});
  }
  return out;
}

bool attack_success(double master_fmr, double normal_fmr)
{
  auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!in_unit(master_fmr) || !in_unit(normal_fmr))
    throw Error("attack_success: rates must lie in [0,1]");
  return master_fmr > normal_fmr;
}

PairScores score_pairs(const EnrollmentSet& set, const PairSet& pairs, const Matcher& matcher)
{
  PairScores out;
  out.genuine.reserve(pairs.genuine.size());
  out.impostor.reserve(pairs.impostor.size());
  for (const auto& p : pairs.genuine)
    out.genuine.push_back(matcher.match(set[p.first].embedding, set[p.second].embedding));
  for (const auto& p : pairs.impostor)
    out.impostor.push_back(matcher.match(set[p.first].embedding, set[p.second].embedding));
  return out;
}

EvalReport evaluate_master(const Embedding& master,
                           const EnrollmentSet& dev,
                           const EnrollmentSet& eval,
                           const Matcher& matcher,
                           const PairOptions& pair_options)
{
  const PairScores dev_scores = score_pairs(dev, genuine_impostor_pairs(dev, pair_options), matcher);
  if (dev_scores.genuine.empty() || dev_scores.impostor.empty())
    throw ConfigError("evaluate: dev set '" + dev.name() +
                      "' needs at least one genuine and one impostor pair");
  const PairScores eval_scores =
    score_pairs(eval, genuine_impostor_pairs(eval, pair_options), matcher);
  if (eval_scores.impostor.empty())
    throw ConfigError("evaluate: eval set '" + eval.name() + "' has no impostor pairs");

  EvalReport r;
  r.threshold = eer_threshold(dev_scores.genuine, dev_scores.impostor);
  const double t = r.threshold.threshold;
  r.normal_fmr_dev = fmr(dev_scores.impostor, t);
  r.normal_fmr_eval = fmr(eval_scores.impostor, t);

  const MasterTest on_dev = master_face_test(master, dev, matcher, t);
  const MasterTest on_eval = master_face_test(master, eval, matcher, t);
  r.master_fmr_dev = on_dev.fmr;
  r.master_fmr_eval = on_eval.fmr;
  r.comparisons_dev = on_dev.comparisons;
  r.comparisons_eval = on_eval.comparisons;
  r.n_matched_dev = on_dev.matched.size();
  r.n_matched_eval = on_eval.matched.size();
  r.matched_identities = on_dev.matched;
  r.matched_identities.insert(r.matched_identities.end(), on_eval.matched.begin(),
                              on_eval.matched.end());
  r.n_matched = r.matched_identities.size();
  r.success_dev = attack_success(r.master_fmr_dev, r.normal_fmr_dev);
  r.success_eval = attack_success(r.master_fmr_eval, r.normal_fmr_eval);
  r.success = r.success_dev && r.success_eval;
  return r;
}

} // namespace wolfsearch::eval
