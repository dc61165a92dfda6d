#pragma once

#include "wolfsearch/core.hpp"
#include "wolfsearch/oracle.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

namespace wolfsearch {

enum class GeneratorKind
{
  identity,
  affine,
  cluster_warp,
  external
};

struct AffineMap
{
  Eigen::MatrixXd matrix; // embed_dim x latent_dim
  Eigen::VectorXd bias;   // embed_dim
};

struct ClusterWarp
{
  std::vector<RealVector> centroids;
  double tau = 0.0;
};

struct GeneratorSpec
{
  GeneratorKind kind = GeneratorKind::identity;
  std::size_t latent_dim = 0;
  std::size_t embed_dim = 0;
  //! Used by affine and cluster_warp. When absent, the identity map is used
  //! (requires latent_dim == embed_dim).
  std::optional<AffineMap> affine;
  std::optional<ClusterWarp> warp;
  std::optional<oracle::Endpoint> external;

  void validate() const;
};

//! Maps latent vectors to identity-space embeddings. Synthetic kinds are
//! pure functions; the external kind forwards to an oracle process pool.
class Generator
{
public:
  explicit Generator(GeneratorSpec spec);

  Embedding generate(const LatentVector& z) const;

  const GeneratorSpec& spec() const { return spec_; }
  std::size_t latent_dim() const { return spec_.latent_dim; }
  std::size_t embed_dim() const { return spec_.embed_dim; }

private:
  Eigen::VectorXd linear_part(const LatentVector& z) const;

  GeneratorSpec spec_;
  std::vector<Eigen::VectorXd> unit_centroids_;
  std::shared_ptr<oracle::Pool> pool_;
};

} // namespace wolfsearch
