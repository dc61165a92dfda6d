#include "helpers.hpp"

#include "wolfsearch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace wolfsearch;
using namespace wolfsearch::eval;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// oracle: try every candidate threshold and compare with long double
// arithmetic, independent of the integer cross-multiplication used inside.
ThresholdReport brute_eer(const std::vector<double>& g, const std::vector<double>& im)
{
  std::vector<double> cand = {-inf, inf};
  cand.insert(cand.end(), g.begin(), g.end());
  cand.insert(cand.end(), im.begin(), im.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  ThresholdReport best;
  long double best_gap = 10;
  for (double t : cand) {
    long double fa = 0, fr = 0;
    for (double s : im)
      fa += s >= t;
    for (double s : g)
      fr += s < t;
    fa /= im.size();
    fr /= g.size();
    const long double gap = std::fabs(fa - fr);
    if (gap < best_gap - 1e-15L) {
      best_gap = gap;
      best = {t, double((fa + fr) / 2), double(fa), double(fr)};
    }
  }
  return best;
}

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n, double mean, bool discrete)
{
  std::normal_distribution<double> normal(mean, 1.0);
  std::vector<double> out(n);
  for (double& x : out)
    x = discrete ? std::round(normal(rng) * 2) / 2 : normal(rng);
  return out;
}

EnrollmentSet tiny_set()
{
  return EnrollmentSet("t", 2,
                       {{"a", "0", RealVector{1, 0}},
                        {"a", "1", RealVector{1, 0.1}},
                        {"b", "0", RealVector{0, 1}},
                        {"c", "0", RealVector{-1, 0}}});
}

Matcher cosine(std::size_t dim)
{
  MatcherSpec s;
  s.embed_dim = dim;
  return Matcher(s);
}

} // namespace

TEST_CASE("eer: perfectly separable lists")
{
  const auto r = eer_threshold({0.9, 0.8}, {0.1, 0.2});
  CHECK(r.eer == 0.0);
  CHECK(r.fmr_at_threshold == 0.0);
  CHECK(r.fnmr_at_threshold == 0.0);
  // smallest separating candidate is the lowest genuine score
  CHECK(r.threshold == 0.8);
}

TEST_CASE("eer: identical lists sit at 0.5")
{
  const std::vector<double> s = {0.1, 0.2, 0.3, 0.4};
  const auto r = eer_threshold(s, s);
  CHECK(r.eer == 0.5);
}

TEST_CASE("eer: rejects empty input and non-finite scores")
{
  CHECK_THROWS_AS(eer_threshold({}, {0.1}), Error);
  CHECK_THROWS_AS(eer_threshold({0.1}, {}), Error);
  CHECK_THROWS_AS(eer_threshold({0.1, std::nan("")}, {0.1}), Error);
}

TEST_CASE("fmr and fnmr examples")
{
  CHECK(fmr({0.1, 0.5, 0.9}, 0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(fnmr({0.1, 0.5, 0.9}, 0.5) == doctest::Approx(1.0 / 3.0));
  CHECK(fmr({0.1}, -inf) == 1.0);
  CHECK(fmr({0.1}, inf) == 0.0);
  CHECK(fnmr({0.1}, inf) == 1.0);
  CHECK_THROWS(fmr({}, 0.0));
}

TEST_CASE("fmr of 1000 uniform scores")
{
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = (i + 0.5) / 1000.0;
  CHECK(fmr(s, 0.75) == 0.25);
  CHECK(fmr(s, 0.0) == 1.0);
}

TEST_CASE("eer matches the brute-force scan on random instances")
{
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> size(1, 200);
  std::uniform_real_distribution<double> shift(-1.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const bool discrete = trial % 2 == 0;
    const auto g = random_scores(rng, size(rng), shift(rng), discrete);
    const auto im = random_scores(rng, size(rng), 0.0, discrete);
    const auto got = eer_threshold(g, im);
    const auto want = brute_eer(g, im);
    CHECK(got.threshold == want.threshold);
    CHECK(got.eer == doctest::Approx(want.eer).epsilon(1e-12));
    CHECK(got.fmr_at_threshold == fmr(im, got.threshold));
    CHECK(got.fnmr_at_threshold == fnmr(g, got.threshold));
  }
}

TEST_CASE("property: eer <= 0.5 when genuine scores dominate impostor scores")
{
  // Only holds for stochastically ordered lists; for inverted lists the
  // equal-error point can exceed 0.5.
  std::mt19937_64 rng(78);
  std::uniform_int_distribution<std::size_t> size(1, 100);
  std::uniform_real_distribution<double> shift(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto im = random_scores(rng, size(rng), 0.0, false);
    // genuine = impostor quantiles shifted up: a dominance construction
    std::vector<double> g = im;
    const double d = shift(rng);
    for (double& x : g)
      x += d;
    CHECK(eer_threshold(g, im).eer <= 0.5);
  }
}

TEST_CASE("property: eer invariant under strictly increasing transforms")
{
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_scores(rng, 50, 1.0, trial % 2 == 0);
    const auto im = random_scores(rng, 60, 0.0, trial % 2 == 0);
    auto tg = g, tim = im;
    for (double& x : tg)
      x = std::exp(x) * 3 + 1;
    for (double& x : tim)
      x = std::exp(x) * 3 + 1;
    const auto a = eer_threshold(g, im);
    const auto b = eer_threshold(tg, tim);
    CHECK(a.eer == b.eer);
    CHECK(a.fmr_at_threshold == b.fmr_at_threshold);
  }
}

TEST_CASE("property: fmr non-increasing and fnmr non-decreasing in the threshold")
{
  std::mt19937_64 rng(80);
  const auto s = random_scores(rng, 300, 0.0, true);
  std::vector<double> ts = s;
  ts.push_back(-inf);
  ts.push_back(inf);
  std::sort(ts.begin(), ts.end());
  for (std::size_t i = 1; i < ts.size(); ++i) {
    CHECK(fmr(s, ts[i]) <= fmr(s, ts[i - 1]));
    CHECK(fnmr(s, ts[i]) >= fnmr(s, ts[i - 1]));
  }
}

TEST_CASE("master face test examples")
{
  const EnrollmentSet set = tiny_set();
  const Matcher m = cosine(2);
  const auto r = master_face_test(RealVector{1, 0}, set, m, 0.5);
  CHECK(r.comparisons == 4);
  CHECK(r.fmr == 0.5);
  REQUIRE(r.matched.size() == 1);
  CHECK(r.matched[0].identity == "a");
  CHECK(r.matched[0].max_score == 1.0);

  const auto all = master_face_test(RealVector{1, 0}, set, m, -inf);
  CHECK(all.fmr == 1.0);
  CHECK(all.matched.size() == 3);
  CHECK(master_face_test(RealVector{1, 0}, set, m, inf).fmr == 0.0);
}

TEST_CASE("attack success is strict")
{
  CHECK(attack_success(0.3, 0.02));
  CHECK(!attack_success(0.02, 0.02));
  CHECK(!attack_success(0.01, 0.02));
  CHECK_THROWS(attack_success(1.5, 0.0));
}

TEST_CASE("evaluate_master on a small example")
{
  const EnrollmentSet dev = tiny_set();
  const EnrollmentSet ev("e", 2,
                         {{"d", "0", RealVector{0.9, 0.2}},
                          {"d", "1", RealVector{0.8, 0.3}},
                          {"e", "0", RealVector{0, -1}}});
  const auto report = evaluate_master(RealVector{1, 0.05}, dev, ev, cosine(2));
  // dev genuine: (a0,a1); impostor: the other five pairs
  const auto manual = eer_threshold({cosine_similarity(RealVector{1, 0}, RealVector{1, 0.1})},
                                    {0.0, -1.0, cosine_similarity(RealVector{1, 0.1}, RealVector{0, 1}),
                                     cosine_similarity(RealVector{1, 0.1}, RealVector{-1, 0}), 0.0});
  CHECK(report.threshold.threshold == manual.threshold);
  CHECK(report.comparisons_dev == 4);
  CHECK(report.comparisons_eval == 3);
  CHECK(report.master_fmr_dev ==
        master_face_test(RealVector{1, 0.05}, dev, cosine(2), manual.threshold).fmr);
  CHECK(report.n_matched == report.n_matched_dev + report.n_matched_eval);
  CHECK(report.success == (report.success_dev && report.success_eval));
}
