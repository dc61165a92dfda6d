#include "wolfsearch/generator.hpp"

#include <cmath>
#include <string>

namespace wolfsearch {

void GeneratorSpec::validate() const
{
  if (latent_dim == 0 || embed_dim == 0)
    throw ConfigError("generator: latent_dim and embed_dim must be positive");
  const bool needs_linear = kind == GeneratorKind::affine || kind == GeneratorKind::cluster_warp;
  if (kind == GeneratorKind::identity && latent_dim != embed_dim)
    throw ConfigError("generator: identity kind requires latent_dim == embed_dim");
  if (needs_linear) {
    if (affine) {
      if (affine->matrix.rows() != static_cast<Eigen::Index>(embed_dim) ||
          affine->matrix.cols() != static_cast<Eigen::Index>(latent_dim)) {
        throw ConfigError("generator: affine matrix must be embed_dim x latent_dim (" +
                          std::to_string(embed_dim) + "x" + std::to_string(latent_dim) + ")");
      }
      if (affine->bias.size() != static_cast<Eigen::Index>(embed_dim))
        throw ConfigError("generator: affine bias must have embed_dim entries");
      if (!affine->matrix.allFinite() || !affine->bias.allFinite())
        throw ConfigError("generator: affine payload must be finite");
    } else if (latent_dim != embed_dim) {
      throw ConfigError("generator: affine payload required when latent_dim != embed_dim");
    }
  }
  if (kind == GeneratorKind::cluster_warp) {
    if (!warp || warp->centroids.empty())
      throw ConfigError("generator: cluster_warp requires at least one centroid");
    if (!(warp->tau >= 0.0 && warp->tau <= 1.0))
      throw ConfigError("generator: tau must lie in [0,1]");
    for (std::size_t j = 0; j < warp->centroids.size(); ++j) {
      require_same_dim(warp->centroids[j].dim(), embed_dim, "generator: centroid");
      if (l2_norm(warp->centroids[j]) == 0.0)
        throw ConfigError("generator: centroid " + std::to_string(j) + " is the zero vector");
    }
  }
  if (kind == GeneratorKind::external) {
    if (!external)
      throw ConfigError("generator: external kind requires an oracle endpoint");
    external->validate();
    if (!external->supports(oracle::Verb::gen))
      throw ConfigError("generator: oracle endpoint must declare GEN");
    if (external->latent_dim != latent_dim || external->embed_dim != embed_dim)
      throw ConfigError("generator: oracle dims do not match generator dims");
  }
}

Generator::Generator(GeneratorSpec spec)
  : spec_(std::move(spec))
{
  spec_.validate();
  if (spec_.kind == GeneratorKind::cluster_warp) {
    for (const auto& c : spec_.warp->centroids) {
      const RealVector u = l2_normalize(c);
      unit_centroids_.emplace_back(
        Eigen::Map<const Eigen::VectorXd>(u.values().data(), static_cast<Eigen::Index>(u.dim())));
    }
  }
  if (spec_.kind == GeneratorKind::external)
    pool_ = std::make_shared<oracle::Pool>(*spec_.external);
}

Eigen::VectorXd Generator::linear_part(const LatentVector& z) const
{
  Eigen::Map<const Eigen::VectorXd> zv(z.values().data(), static_cast<Eigen::Index>(z.dim()));
  if (!spec_.affine)
    return zv;
  return spec_.affine->matrix * zv + spec_.affine->bias;
}

Embedding Generator::generate(const LatentVector& z) const
{
  require_same_dim(z.dim(), spec_.latent_dim, "generate: latent");
  switch (spec_.kind) {
    case GeneratorKind::identity:
      return z;
    case GeneratorKind::affine: {
      const Eigen::VectorXd r = linear_part(z);
      return RealVector(std::vector<double>(r.data(), r.data() + r.size()));
    }
    case GeneratorKind::cluster_warp: {
      const Eigen::VectorXd r = linear_part(z);
      const double tau = spec_.warp->tau;
      const double r_norm = r.norm();
      Eigen::VectorXd out = r;
      if (r_norm > 0.0 && tau > 0.0) {
        std::size_t best = 0;
        double best_cos = -2.0;
        for (std::size_t j = 0; j < unit_centroids_.size(); ++j) {
          const double c = unit_centroids_[j].dot(r) / r_norm;
          if (c > best_cos) {
            best_cos = c;
            best = j;
          }
        }
        out = (1.0 - tau) * r + tau * r_norm * unit_centroids_[best];
      }
      return RealVector(std::vector<double>(out.data(), out.data() + out.size()));
    }
    case GeneratorKind::external:
      return pool_->gen(z);
  }
  throw Error("generator: unknown kind");
}

} // namespace wolfsearch
