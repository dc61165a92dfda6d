#include "helpers.hpp"

#include "wolfsearch/synth.hpp"

#include <cmath>

using namespace wolfsearch;
using namespace wolfsearch::synth;

namespace {

MixtureSpec spec_with(std::vector<double> weights, std::size_t identities, std::uint64_t seed)
{
  MixtureSpec s;
  s.embed_dim = 3;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    std::vector<double> c(3, 0.0);
    c[k % 3] = 5.0 * (1 + k / 3);
    s.clusters.push_back({RealVector(c), 0.5, weights[k]});
  }
  s.identities = identities;
  s.items_per_identity = 2;
  s.within_identity_sigma = 0.05;
  s.seed = seed;
  return s;
}

std::vector<RealVector> gaussian_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim)
{
  std::vector<RealVector> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(testing::random_vector(rng, dim));
  return out;
}

} // namespace

TEST_CASE("mixture sample has the requested shape and labels")
{
  const auto set = sample_mixture(spec_with({0.5, 0.5}, 7, 1));
  CHECK(set.enrollment.size() == 14);
  CHECK(set.enrollment.identities().size() == 7);
  CHECK(set.enrollment[0].identity == "id_0000");
  CHECK(set.enrollment[13].identity == "id_0006");
  CHECK(set.identity_cluster.size() == 7);
  CHECK(set.identity_centers.size() == 7);
}

TEST_CASE("mixture sampling is seed-deterministic")
{
  const auto a = sample_enrollment(spec_with({0.3, 0.7}, 20, 5));
  const auto b = sample_enrollment(spec_with({0.3, 0.7}, 20, 5));
  const auto c = sample_enrollment(spec_with({0.3, 0.7}, 20, 6));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].embedding == b[i].embedding);
  CHECK(!(a[0].embedding == c[0].embedding));
}

TEST_CASE("cluster occupancy follows the weights")
{
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  const auto set = sample_mixture(spec_with(w, 40000, 2));
  std::vector<double> count(4, 0.0);
  for (auto k : set.identity_cluster)
    count[k] += 1;
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::abs(count[k] / 40000.0 - w[k]) <= 0.05 * w[k]);
}

TEST_CASE("items stay close to their identity center")
{
  const auto set = sample_mixture(spec_with({1.0}, 50, 3));
  for (std::size_t i = 0; i < set.enrollment.size(); ++i) {
    const auto& t = set.enrollment[i];
    const auto& c = set.identity_centers[i / 2];
    double d2 = 0;
    for (std::size_t j = 0; j < 3; ++j)
      d2 += (t.embedding[j] - c[j]) * (t.embedding[j] - c[j]);
    CHECK(std::sqrt(d2) < 0.05 * 6); // six sigma in three dimensions
  }
}

TEST_CASE("mixture validation")
{
  auto s = spec_with({0.5, 0.4}, 10, 1);
  CHECK_THROWS_AS(s.validate(), ConfigError); // weights sum to 0.9
  s = spec_with({1.0}, 10, 1);
  s.within_identity_sigma = 0.5;
  CHECK_THROWS_AS(s.validate(), ConfigError); // not below the cluster sigma
  s = spec_with({1.0}, 0, 1);
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("make_clusters: shared offset plus spread")
{
  ClusterLayout layout;
  layout.count = 3;
  layout.offset_norm = 2.0;
  layout.spread = 0.0;
  const auto clusters = make_clusters(layout, 5, 7);
  REQUIRE(clusters.size() == 3);
  for (const auto& c : clusters) {
    CHECK(l2_norm(c.center) == doctest::Approx(2.0));
    CHECK(c.center == clusters[0].center); // no spread: identical centers
    CHECK(c.weight == doctest::Approx(1.0 / 3.0));
  }
  layout.spread = 1.0;
  layout.offset_norm = 0.0;
  for (const auto& c : make_clusters(layout, 5, 7))
    CHECK(l2_norm(c.center) == doctest::Approx(1.0));
  layout.weights = {0.5};
  CHECK_THROWS_AS(make_clusters(layout, 5, 7), ConfigError);
}

TEST_CASE("pca: reference mean projects to the origin; axes ordered by variance")
{
  std::mt19937_64 rng(11);
  std::vector<RealVector> ref;
  for (int i = 0; i < 200; ++i) {
    const RealVector g = testing::random_vector(rng, 4);
    ref.push_back(RealVector{5 + 3 * g[0], -2 + g[1], 0.1 * g[2], 0.1 * g[3]});
  }
  const Pca2d pca(ref);
  std::vector<double> mean(4, 0.0);
  for (const auto& p : ref)
    for (std::size_t j = 0; j < 4; ++j)
      mean[j] += p[j] / 200.0;
  const auto origin = pca.project(RealVector(mean));
  CHECK(std::abs(origin[0]) < 1e-12);
  CHECK(std::abs(origin[1]) < 1e-12);
  CHECK(pca.explained_variance()[0] >= pca.explained_variance()[1]);
  CHECK(pca.explained_ratio() > 0.99);
}

TEST_CASE("pca: degenerate references are rejected")
{
  std::vector<RealVector> line;
  for (int i = 0; i < 20; ++i)
    line.push_back(RealVector{double(i), 2.0 * i, -1.0 * i});
  CHECK_THROWS_AS(Pca2d{line}, ConfigError);
  CHECK_THROWS_AS(Pca2d({RealVector{1, 2}, RealVector{3, 4}}), ConfigError);
}

TEST_CASE("density: 2-D KDE with fixed bandwidth matches a direct evaluation")
{
  // PCA is a rigid motion of a 2-D cloud, so the isotropic KDE evaluated
  // in raw coordinates is an independent oracle for the query density.
  std::mt19937_64 rng(12);
  const auto ref = gaussian_cloud(rng, 60, 2);
  const RealVector q{0.3, -0.4};
  const double h = 0.5;
  double acc = 0;
  for (const auto& p : ref) {
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    acc += std::exp(-0.5 * (dx * dx + dy * dy) / (h * h));
  }
  const double expected = acc / (60 * 2 * M_PI * h * h);
  const auto r = density_analysis(q, ref, h);
  CHECK(r.query_density == doctest::Approx(expected).epsilon(1e-10));
  CHECK(r.reference_xy.size() == 60);
}

TEST_CASE("density: bandwidth follows Scott's rule per axis")
{
  std::mt19937_64 rng(13);
  std::vector<RealVector> ref;
  for (int i = 0; i < 500; ++i) {
    const RealVector g = testing::random_vector(rng, 2);
    ref.push_back(RealVector{4 * g[0], g[1]});
  }
  const auto r = density_analysis(RealVector{0, 0}, ref);
  const double factor = std::pow(500.0, -1.0 / 6.0);
  CHECK(r.bandwidth[0] / factor == doctest::Approx(4.0).epsilon(0.1));
  CHECK(r.bandwidth[1] / factor == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("density percentile examples: mode vs far tail")
{
  std::mt19937_64 rng(14);
  const auto ref = gaussian_cloud(rng, 400, 5);
  CHECK(density_percentile(RealVector{0, 0, 0, 0, 0}, ref) >= 0.9);
  CHECK(density_percentile(RealVector{20, 20, 20, 20, 20}, ref) == 0.0);
  CHECK_THROWS_AS(density_percentile(RealVector{0, 0}, gaussian_cloud(rng, 5, 2)), ConfigError);
  CHECK_THROWS_AS(density_percentile(RealVector{0, 0}, gaussian_cloud(rng, 20, 2), 0.0), ConfigError);
}

TEST_CASE("property: percentile invariant under translation and in [0, 1]")
{
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ref = gaussian_cloud(rng, 50, 3);
    const RealVector q = testing::random_vector(rng, 3);
    const RealVector shift = testing::random_vector(rng, 3, 10.0);
    auto moved = ref;
    for (auto& p : moved)
      p = RealVector{p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]};
    const RealVector mq{q[0] + shift[0], q[1] + shift[1], q[2] + shift[2]};
    const double a = density_percentile(q, ref);
    const double b = density_percentile(mq, moved);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    // translation only perturbs rounding; allow one rank of slack
    CHECK(std::abs(a - b) <= 1.0 / 50 + 1e-12);
  }
}
