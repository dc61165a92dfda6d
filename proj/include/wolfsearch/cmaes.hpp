#pragma once

#include "wolfsearch/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace wolfsearch::cmaes {

struct Config
{
  std::size_t dim = 0;
  std::size_t lambda = 22;
  double sigma0 = 0.5;
  //! Defaults to the origin when unset.
  std::optional<RealVector> mean0;
  std::size_t max_generations = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

//! Recombination weights and learning rates derived from (dim, lambda).
struct Strategy
{
  std::size_t mu = 0;
  std::vector<double> weights;
  double mu_eff = 0;
  double c_sigma = 0;
  double d_sigma = 0;
  double c_c = 0;
  double c_1 = 0;
  double c_mu = 0;
  double chi_n = 0;

  static Strategy standard(std::size_t dim, std::size_t lambda);
};

struct Best
{
  RealVector x;
  double fitness;
};

//! Full-covariance CMA-ES with cumulative step-size adaptation.
//! Minimizes. ask() and tell() must alternate and are not thread-safe.
class Optimizer
{
public:
  explicit Optimizer(const Config& config);

  std::vector<RealVector> ask();
  void tell(const std::vector<RealVector>& candidates,
            const std::vector<double>& fitnesses);

  const Config& config() const { return config_; }
  const Strategy& strategy() const { return strategy_; }
  RealVector mean() const;
  double sigma() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::VectorXd& path_sigma() const { return path_sigma_; }
  const Eigen::VectorXd& path_c() const { return path_c_; }
  std::size_t generation() const { return generation_; }
  const std::optional<Best>& best_so_far() const { return best_; }

  //! sigma * sqrt(max eigenvalue of C): the largest sampling std-dev.
  double max_std() const;
  //! True once max_std() < 1e-14; further progress is numerically impossible.
  bool exhausted() const;

private:
  void decompose();

  Config config_;
  Strategy strategy_;
  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd axis_lengths_;
  Eigen::VectorXd path_sigma_;
  Eigen::VectorXd path_c_;
  std::size_t generation_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::optional<Best> best_;
  bool asked_ = false;
};

using Objective = std::function<double(const RealVector&)>;

struct MinimizeResult
{
  RealVector x;
  double fitness;
  std::size_t generations;
  std::size_t evaluations;
};

//! Runs ask/tell for config.max_generations generations, or until the
//! search distribution collapses, or until the best fitness drops below
//! `target` when one is given.
MinimizeResult minimize(const Objective& objective,
                        const Config& config,
                        std::optional<double> target = std::nullopt);

} // namespace wolfsearch::cmaes
