#pragma once

#include "wolfsearch/core.hpp"
#include "wolfsearch/enrollment.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace wolfsearch::synth {

struct Cluster
{
  RealVector center;
  double sigma;
  double weight;
};

//! Gaussian mixture over identity centers; items scatter tightly around
//! their identity center.
struct MixtureSpec
{
  std::size_t embed_dim = 0;
  std::vector<Cluster> clusters;
  std::size_t identities = 0;
  std::size_t items_per_identity = 0;
  double within_identity_sigma = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticSet
{
  EnrollmentSet enrollment;
  std::vector<std::size_t> identity_cluster;
  std::vector<RealVector> identity_centers;
};

SyntheticSet sample_mixture(const MixtureSpec& spec, std::string name = "synthetic");
EnrollmentSet sample_enrollment(const MixtureSpec& spec, std::string name = "synthetic");

//! Cluster centers built as `offset_norm * u + spread * g_k`, with u and g_k
//! seeded random unit vectors: clusters share a common direction, as
//! embeddings of real recognition networks do.
struct ClusterLayout
{
  std::size_t count = 4;
  double offset_norm = 1.0;
  double spread = 0.5;
  double sigma = 0.25;
  std::vector<double> weights; // empty = uniform
};

std::vector<Cluster> make_clusters(const ClusterLayout& layout,
                                   std::size_t embed_dim,
                                   std::uint64_t seed);

//! Principal-component projection onto the top two axes of a reference
//! cloud.
class Pca2d
{
public:
  //! Throws when the reference spans fewer than two dimensions.
  explicit Pca2d(const std::vector<RealVector>& reference);

  std::array<double, 2> project(const RealVector& v) const;
  std::array<double, 2> explained_variance() const { return variance_; }
  //! Fraction of total variance captured by the two axes.
  double explained_ratio() const { return ratio_; }

private:
  Eigen::VectorXd mean_;
  Eigen::Matrix<double, 2, Eigen::Dynamic> axes_;
  std::array<double, 2> variance_{};
  double ratio_ = 0;
};

struct DensityReport
{
  double percentile = 0;
  double query_density = 0;
  std::array<double, 2> bandwidth{};
  double explained_ratio = 0;
  std::array<double, 2> query_xy{};
  std::vector<std::array<double, 2>> reference_xy;
  std::vector<double> reference_density;
};

//! Fits PCA on the reference, estimates a 2-D Gaussian KDE and returns the
//! fraction of reference points whose density is <= the query's. Without
//! an explicit bandwidth, Scott's rule is applied per axis.
DensityReport density_analysis(const RealVector& point,
                               const std::vector<RealVector>& reference,
                               std::optional<double> bandwidth = std::nullopt);

double density_percentile(const RealVector& point,
                          const std::vector<RealVector>& reference,
                          std::optional<double> bandwidth = std::nullopt);

} // namespace wolfsearch::synth
