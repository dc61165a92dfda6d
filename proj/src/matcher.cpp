#include "wolfsearch/matcher.hpp"

#include <algorithm>
#include <cmath>

namespace wolfsearch {

void MatcherSpec::validate() const
{
  if (embed_dim == 0)
    throw ConfigError("matcher: embed_dim must be >= 1");
  if (kind == MatcherKind::external) {
    if (!external)
      throw ConfigError("matcher: external kind requires an oracle endpoint");
    external->validate();
    if (!external->supports(oracle::Verb::match))
      throw ConfigError("matcher: oracle endpoint must declare MATCH");
    if (external->embed_dim != embed_dim)
      throw ConfigError("matcher: oracle embed_dim does not match matcher embed_dim");
  }
}

double cosine_similarity(const Embedding& a, const Embedding& b)
{
  require_same_dim(a.dim(), b.dim(), "cosine");
  const double s = dot(l2_normalize(a), l2_normalize(b));
  return std::clamp(s, -1.0, 1.0);
}

Matcher::Matcher(MatcherSpec spec)
  : spec_(std::move(spec))
{
  spec_.validate();
  if (spec_.kind == MatcherKind::external)
    pool_ = std::make_shared<oracle::Pool>(*spec_.external);
}

double Matcher::match(const Embedding& probe, const Embedding& tmpl) const
{
  require_same_dim(probe.dim(), spec_.embed_dim, "match: probe");
  require_same_dim(tmpl.dim(), spec_.embed_dim, "match: template");
  switch (spec_.kind) {
    case MatcherKind::cosine:
      return cosine_similarity(probe, tmpl);
    case MatcherKind::neg_euclidean: {
      double sq = 0.0;
      for (std::size_t i = 0; i < probe.dim(); ++i) {
        const double d = probe[i] - tmpl[i];
        sq += d * d;
      }
      return -std::sqrt(sq);
    }
    case MatcherKind::external:
      return pool_->match(probe, tmpl);
  }
  throw Error("matcher: unknown kind");
}

double Matcher::mean_score(const Embedding& probe, const std::vector<Embedding>& templates) const
{
  if (templates.empty())
    throw Error("mean_score: empty template list");
  std::vector<double> scores;
  scores.reserve(templates.size());
  for (const auto& t : templates)
    scores.push_back(match(probe, t));
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double mean = compensated_sum(scores) / static_cast<double>(templates.size());
  // rounding in the final division must not push the mean outside the data
  return std::clamp(mean, *lo, *hi);
}

} // namespace wolfsearch
