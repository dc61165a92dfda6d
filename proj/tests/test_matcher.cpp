#include "helpers.hpp"

#include "wolfsearch/matcher.hpp"

#include <algorithm>

using namespace wolfsearch;

namespace {

Matcher make(MatcherKind kind, std::size_t dim)
{
  MatcherSpec s;
  s.kind = kind;
  s.embed_dim = dim;
  return Matcher(s);
}

} // namespace

TEST_CASE("cosine examples")
{
  const Matcher m = make(MatcherKind::cosine, 2);
  CHECK(m.match(RealVector{1, 0}, RealVector{1, 0}) == 1.0);
  CHECK(m.match(RealVector{1, 0}, RealVector{0, 1}) == 0.0);
  CHECK_THROWS(m.match(RealVector{0, 0}, RealVector{1, 0}));
  CHECK_THROWS_AS(m.match(RealVector{1, 0, 0}, RealVector{1, 0, 0}), DimensionError);
}

TEST_CASE("neg_euclidean: self-distance is zero, otherwise negative")
{
  const Matcher m = make(MatcherKind::neg_euclidean, 3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const RealVector v = testing::random_vector(rng, 3);
    CHECK(m.match(v, v) == 0.0);
  }
  CHECK(m.match(RealVector{0, 0, 0}, RealVector{3, 4, 0}) == -5.0);
}

TEST_CASE("mean_score examples")
{
  const Matcher m = make(MatcherKind::cosine, 2);
  CHECK(m.mean_score(RealVector{1, 0}, {RealVector{1, 0}, RealVector{0, 1}}) == 0.5);
  const RealVector p{0.3, -0.7}, t{2, 1};
  CHECK(m.mean_score(p, {t}) == m.match(p, t));
  CHECK_THROWS(m.mean_score(p, {}));
}

TEST_CASE("mean_score of 100 random templates equals brute-force sum / 100")
{
  std::mt19937_64 rng(10);
  const Matcher m = make(MatcherKind::cosine, 16);
  const RealVector probe = testing::random_vector(rng, 16);
  std::vector<Embedding> templates;
  for (int i = 0; i < 100; ++i)
    templates.push_back(testing::random_vector(rng, 16));
  // oracle: explicit normalization and summation, no library helpers
  long double total = 0.0L;
  for (const auto& t : templates) {
    long double pp = 0, tt = 0, pt = 0;
    for (std::size_t i = 0; i < 16; ++i) {
      pp += (long double)probe[i] * probe[i];
      tt += (long double)t[i] * t[i];
      pt += (long double)probe[i] * t[i];
    }
    total += pt / std::sqrt(pp * tt);
  }
  CHECK(std::abs(m.mean_score(probe, templates) - static_cast<double>(total / 100)) <= 1e-12);
}

TEST_CASE("property: cosine symmetric and scale invariant; mean within [min, max]")
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> alpha(1e-3, 1e3);
  std::uniform_int_distribution<int> count(1, 30);
  const Matcher cos = make(MatcherKind::cosine, 9);
  const Matcher euc = make(MatcherKind::neg_euclidean, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const RealVector a = testing::random_vector(rng, 9);
    const RealVector b = testing::random_vector(rng, 9);
    CHECK(std::abs(cos.match(a, b) - cos.match(b, a)) <= 1e-12);
    const double s = alpha(rng);
    std::vector<double> scaled(a.begin(), a.end());
    for (double& x : scaled)
      x *= s;
    CHECK(std::abs(cos.match(RealVector(scaled), b) - cos.match(a, b)) <= 1e-9);

    std::vector<Embedding> ts;
    const int n = count(rng);
    for (int i = 0; i < n; ++i)
      ts.push_back(testing::random_vector(rng, 9));
    for (const Matcher* m : {&cos, &euc}) {
      std::vector<double> scores;
      for (const auto& t : ts)
        scores.push_back(m->match(a, t));
      const double mean = m->mean_score(a, ts);
      CHECK(mean >= *std::min_element(scores.begin(), scores.end()));
      CHECK(mean <= *std::max_element(scores.begin(), scores.end()));
    }
  }
}

TEST_CASE("matcher spec validation")
{
  MatcherSpec s;
  s.embed_dim = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.embed_dim = 2;
  s.kind = MatcherKind::external;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
