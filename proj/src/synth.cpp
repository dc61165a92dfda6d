#include "wolfsearch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace wolfsearch::synth {

namespace {

std::vector<double> gaussian_around(std::span<const double> center,
                                    double sigma,
                                    std::mt19937_64& rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(center.begin(), center.end());
  for (double& x : out)
    x += sigma * normal(rng);
  return out;
}

std::string zero_padded(std::size_t value, std::size_t width)
{
  std::string s = std::to_string(value);
  if (s.size() < width)
    s.insert(0, width - s.size(), '0');
  return s;
}

Eigen::Map<const Eigen::VectorXd> as_eigen(const RealVector& v)
{
  return {v.values().data(), static_cast<Eigen::Index>(v.dim())};
}

} // namespace

void MixtureSpec::validate() const
{
  if (embed_dim == 0)
    throw ConfigError("synth: embed_dim must be positive");
  if (clusters.empty())
    throw ConfigError("synth: at least one cluster is required");
  if (identities == 0 || items_per_identity == 0)
    throw ConfigError("synth: identities and items_per_identity must be positive");
  if (!(within_identity_sigma > 0.0))
    throw ConfigError("synth: within_identity_sigma must be positive");
  double wsum = 0.0;
  double min_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const auto& c = clusters[k];
    require_same_dim(c.center.dim(), embed_dim, "synth: cluster center");
    if (!(c.sigma > 0.0) || !(c.weight > 0.0))
      throw ConfigError("synth: cluster " + std::to_string(k) +
                        " needs positive sigma and weight");
    wsum += c.weight;
    min_sigma = std::min(min_sigma, c.sigma);
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw ConfigError("synth: cluster weights must sum to 1 (got " + std::to_string(wsum) + ")");
  if (!(within_identity_sigma < min_sigma))
    throw ConfigError("synth: within_identity_sigma must be below every cluster sigma");
}

SyntheticSet sample_mixture(const MixtureSpec& spec, std::string name)
{
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<double> weights;
  for (const auto& c : spec.clusters)
    weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  const std::size_t id_width = std::max<std::size_t>(4, std::to_string(spec.identities - 1).size());
  std::vector<Template> templates;
  templates.reserve(spec.identities * spec.items_per_identity);
  std::vector<std::size_t> assignment;
  std::vector<RealVector> centers;
  for (std::size_t id = 0; id < spec.identities; ++id) {
    const std::size_t k = pick(rng);
    const Cluster& cluster = spec.clusters[k];
    RealVector center(gaussian_around(cluster.center.values(), cluster.sigma, rng));
    const std::string label = "id_" + zero_padded(id, id_width);
    for (std::size_t item = 0; item < spec.items_per_identity; ++item) {
      templates.push_back({label, std::to_string(item),
                           RealVector(gaussian_around(center.values(),
                                                      spec.within_identity_sigma, rng))});
    }
    assignment.push_back(k);
    centers.push_back(std::move(center));
  }
  return {EnrollmentSet(std::move(name), spec.embed_dim, std::move(templates)),
          std::move(assignment), std::move(centers)};
}

EnrollmentSet sample_enrollment(const MixtureSpec& spec, std::string name)
{
  return sample_mixture(spec, std::move(name)).enrollment;
}

std::vector<Cluster> make_clusters(const ClusterLayout& layout,
                                   std::size_t embed_dim,
                                   std::uint64_t seed)
{
  if (layout.count == 0 || embed_dim == 0)
    throw ConfigError("cluster layout: count and embed_dim must be positive");
  if (!layout.weights.empty() && layout.weights.size() != layout.count)
    throw ConfigError("cluster layout: need one weight per cluster");
  std::mt19937_64 rng(seed);
  const std::vector<double> origin(embed_dim, 0.0);
  auto unit = [&] { return l2_normalize(RealVector(gaussian_around(origin, 1.0, rng))); };

  const RealVector shared = unit();
  std::vector<Cluster> out;
  for (std::size_t k = 0; k < layout.count; ++k) {
    const RealVector g = unit();
    std::vector<double> c(embed_dim);
    for (std::size_t i = 0; i < embed_dim; ++i)
      c[i] = layout.offset_norm * shared[i] + layout.spread * g[i];
    const double w = layout.weights.empty() ? 1.0 / static_cast<double>(layout.count)
                                            : layout.weights[k];
    out.push_back({RealVector(std::move(c)), layout.sigma, w});
  }
  return out;
}

Pca2d::Pca2d(const std::vector<RealVector>& reference)
{
  if (reference.size() < 3)
    throw ConfigError("pca: need at least 3 reference points");
  const std::size_t d = reference.front().dim();
  if (d < 2)
    throw ConfigError("pca: embeddings must have at least 2 dimensions");
  Eigen::MatrixXd data(static_cast<Eigen::Index>(reference.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < reference.size(); ++i) {
    require_same_dim(reference[i].dim(), d, "pca: reference point");
    data.row(static_cast<Eigen::Index>(i)) = as_eigen(reference[i]).transpose();
  }
  mean_ = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - mean_.transpose();
  const Eigen::MatrixXd cov =
    centered.transpose() * centered / static_cast<double>(reference.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error("pca: eigendecomposition failed");
  const auto& eig = solver.eigenvalues(); // ascending
  const Eigen::Index top = eig.size() - 1;
  const double total = std::max(eig.sum(), 0.0);
  if (!(eig(top - 1) > 1e-12 * std::max(eig(top), 1e-300))) {
    throw ConfigError("pca: reference cloud has rank < 2; add dimensions or jitter the points");
  }
  axes_.resize(2, static_cast<Eigen::Index>(d));
  axes_.row(0) = solver.eigenvectors().col(top).transpose();
  axes_.row(1) = solver.eigenvectors().col(top - 1).transpose();
  // fix the sign so the projection is reproducible across platforms
  for (Eigen::Index r = 0; r < 2; ++r) {
    Eigen::Index arg = 0;
    axes_.row(r).cwiseAbs().maxCoeff(&arg);
    if (axes_(r, arg) < 0)
      axes_.row(r) *= -1.0;
  }
  variance_ = {eig(top), eig(top - 1)};
  ratio_ = total > 0 ? (eig(top) + eig(top - 1)) / total : 0.0;
}

std::array<double, 2> Pca2d::project(const RealVector& v) const
{
  require_same_dim(v.dim(), static_cast<std::size_t>(mean_.size()), "pca: project");
  const Eigen::Vector2d p = axes_ * (as_eigen(v) - mean_);
  return {p(0), p(1)};
}

namespace {

double kde(const std::array<double, 2>& at,
           const std::vector<std::array<double, 2>>& points,
           const std::array<double, 2>& h)
{
  double acc = 0.0;
  for (const auto& p : points) {
    const double u = (at[0] - p[0]) / h[0];
    const double v = (at[1] - p[1]) / h[1];
    acc += std::exp(-0.5 * (u * u + v * v));
  }
  return acc / (static_cast<double>(points.size()) * 2.0 * M_PI * h[0] * h[1]);
}

} // namespace

DensityReport density_analysis(const RealVector& point,
                               const std::vector<RealVector>& reference,
                               std::optional<double> bandwidth)
{
  if (reference.size() < 10)
    throw ConfigError("density: need at least 10 reference points, got " +
                      std::to_string(reference.size()));
  if (bandwidth && !(*bandwidth > 0.0))
    throw ConfigError("density: bandwidth must be positive");
  const Pca2d pca(reference);

  DensityReport r;
  r.explained_ratio = pca.explained_ratio();
  r.query_xy = pca.project(point);
  r.reference_xy.reserve(reference.size());
  for (const auto& v : reference)
    r.reference_xy.push_back(pca.project(v));

  if (bandwidth) {
    r.bandwidth = {*bandwidth, *bandwidth};
  } else {
    const double n = static_cast<double>(reference.size());
    const double scott = std::pow(n, -1.0 / 6.0);
    for (int axis = 0; axis < 2; ++axis) {
      double mean = 0.0;
      for (const auto& p : r.reference_xy)
        mean += p[axis];
      mean /= n;
      double var = 0.0;
      for (const auto& p : r.reference_xy)
        var += (p[axis] - mean) * (p[axis] - mean);
      r.bandwidth[axis] = scott * std::sqrt(var / (n - 1.0));
    }
  }

  r.query_density = kde(r.query_xy, r.reference_xy, r.bandwidth);
  std::size_t below = 0;
  r.reference_density.reserve(reference.size());
  for (const auto& p : r.reference_xy) {
    const double d = kde(p, r.reference_xy, r.bandwidth);
    r.reference_density.push_back(d);
    if (d <= r.query_density)
      ++below;
  }
  r.percentile = static_cast<double>(below) / static_cast<double>(reference.size());
  return r;
}

double density_percentile(const RealVector& point,
                          const std::vector<RealVector>& reference,
                          std::optional<double> bandwidth)
{
  return density_analysis(point, reference, bandwidth).percentile;
}

} // namespace wolfsearch::synth
