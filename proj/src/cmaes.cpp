#include "wolfsearch/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wolfsearch::cmaes {

namespace {

Eigen::VectorXd to_eigen(const RealVector& v)
{
  return Eigen::Map<const Eigen::VectorXd>(v.values().data(),
                                           static_cast<Eigen::Index>(v.dim()));
}

RealVector from_eigen(const Eigen::VectorXd& v)
{
  return RealVector(std::vector<double>(v.data(), v.data() + v.size()));
}

} // namespace

void Config::validate() const
{
  if (dim == 0)
    throw ConfigError("cmaes: dim must be positive");
  if (lambda < 2)
    throw ConfigError("cmaes: lambda must be >= 2, got " + std::to_string(lambda));
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
    throw ConfigError("cmaes: sigma0 must be positive and finite");
  if (max_generations == 0)
    throw ConfigError("cmaes: max_generations must be positive");
  if (mean0 && mean0->dim() != dim) {
    throw ConfigError("cmaes: mean0 has dim " + std::to_string(mean0->dim()) +
                      ", expected " + std::to_string(dim));
  }
}

Strategy Strategy::standard(std::size_t dim, std::size_t lambda)
{
  Strategy s;
  const double n = static_cast<double>(dim);
  s.mu = lambda / 2;
  s.weights.resize(s.mu);
  for (std::size_t i = 0; i < s.mu; ++i)
    s.weights[i] = std::log(s.mu + 0.5) - std::log(static_cast<double>(i + 1));
  const double wsum = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  double wsq = 0.0;
  for (double& w : s.weights) {
    w /= wsum;
    wsq += w * w;
  }
  s.mu_eff = 1.0 / wsq;

  s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
  s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) +
              s.c_sigma;
  s.c_c = (4.0 + s.mu_eff / n) / (n + 4.0 + 2.0 * s.mu_eff / n);
  s.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + s.mu_eff);
  s.c_mu = std::min(1.0 - s.c_1,
                    2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) /
                      ((n + 2.0) * (n + 2.0) + s.mu_eff));
  s.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  return s;
}

Optimizer::Optimizer(const Config& config)
  : config_(config)
{
  config_.validate();
  const auto n = static_cast<Eigen::Index>(config_.dim);
  strategy_ = Strategy::standard(config_.dim, config_.lambda);
  mean_ = config_.mean0 ? to_eigen(*config_.mean0) : Eigen::VectorXd::Zero(n);
  sigma_ = config_.sigma0;
  cov_ = Eigen::MatrixXd::Identity(n, n);
  basis_ = Eigen::MatrixXd::Identity(n, n);
  axis_lengths_ = Eigen::VectorXd::Ones(n);
  path_sigma_ = Eigen::VectorXd::Zero(n);
  path_c_ = Eigen::VectorXd::Zero(n);
  rng_.seed(config_.seed);
}

RealVector Optimizer::mean() const
{
  return from_eigen(mean_);
}

double Optimizer::max_std() const
{
  return sigma_ * axis_lengths_.maxCoeff();
}

bool Optimizer::exhausted() const
{
  return max_std() < 1e-14;
}

std::vector<RealVector> Optimizer::ask()
{
  const auto n = static_cast<Eigen::Index>(config_.dim);
  std::vector<RealVector> out;
  out.reserve(config_.lambda);
  Eigen::VectorXd z(n);
  for (std::size_t k = 0; k < config_.lambda; ++k) {
    for (Eigen::Index i = 0; i < n; ++i)
      z(i) = normal_(rng_);
    const Eigen::VectorXd y = basis_ * axis_lengths_.cwiseProduct(z);
    out.push_back(from_eigen(mean_ + sigma_ * y));
  }
  asked_ = true;
  return out;
}

void Optimizer::tell(const std::vector<RealVector>& candidates,
                     const std::vector<double>& fitnesses)
{
  if (!asked_)
    throw Error("cmaes: tell() called without a preceding ask()");
  if (candidates.size() != config_.lambda || fitnesses.size() != config_.lambda) {
    throw DimensionError("cmaes: expected " + std::to_string(config_.lambda) +
                         " candidates and fitnesses, got " +
                         std::to_string(candidates.size()) + " and " +
                         std::to_string(fitnesses.size()));
  }
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    if (!std::isfinite(fitnesses[i]))
      throw Error("cmaes: non-finite fitness for candidate " + std::to_string(i));
    require_same_dim(candidates[i].dim(), config_.dim, "cmaes: candidate");
  }

  std::vector<std::size_t> order(config_.lambda);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fitnesses[a] < fitnesses[b];
  });

  if (!best_ || fitnesses[order[0]] < best_->fitness)
    best_ = Best{candidates[order[0]], fitnesses[order[0]]};

  const auto n = static_cast<Eigen::Index>(config_.dim);
  const Strategy& s = strategy_;
  const Eigen::VectorXd old_mean = mean_;

  Eigen::MatrixXd steps(n, static_cast<Eigen::Index>(s.mu));
  Eigen::VectorXd step_w = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < s.mu; ++i) {
    steps.col(static_cast<Eigen::Index>(i)) =
      (to_eigen(candidates[order[i]]) - old_mean) / sigma_;
    step_w += s.weights[i] * steps.col(static_cast<Eigen::Index>(i));
  }
  mean_ = old_mean + sigma_ * step_w;

  // C^{-1/2} from the decomposition used to sample this generation
  const Eigen::MatrixXd inv_sqrt_cov =
    basis_ * axis_lengths_.cwiseInverse().asDiagonal() * basis_.transpose();
  path_sigma_ = (1.0 - s.c_sigma) * path_sigma_ +
                std::sqrt(s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff) *
                  (inv_sqrt_cov * step_w);

  const double ps_norm = path_sigma_.norm();
  const double decay =
    1.0 - std::pow(1.0 - s.c_sigma, 2.0 * static_cast<double>(generation_ + 1));
  const bool hsig = ps_norm / std::sqrt(decay) / s.chi_n <
                    1.4 + 2.0 / (static_cast<double>(config_.dim) + 1.0);

  path_c_ = (1.0 - s.c_c) * path_c_;
  if (hsig)
    path_c_ += std::sqrt(s.c_c * (2.0 - s.c_c) * s.mu_eff) * step_w;

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < s.mu; ++i) {
    const auto col = steps.col(static_cast<Eigen::Index>(i));
    rank_mu.noalias() += s.weights[i] * (col * col.transpose());
  }
  const double hsig_correction = hsig ? 0.0 : s.c_c * (2.0 - s.c_c);
  cov_ = (1.0 - s.c_1 - s.c_mu) * cov_ +
         s.c_1 * (path_c_ * path_c_.transpose() + hsig_correction * cov_) +
         s.c_mu * rank_mu;

  sigma_ *= std::exp((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1.0));
  if (!std::isfinite(sigma_) || !(sigma_ > 0.0))
    throw Error("cmaes: step size left the positive finite range");

  ++generation_;
  asked_ = false;
  decompose();
}

void Optimizer::decompose()
{
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
  if (solver.info() != Eigen::Success)
    throw Error("covariance not positive definite (eigendecomposition failed)");
  const Eigen::VectorXd& eig = solver.eigenvalues();
  if (!(eig.minCoeff() > 0.0) || !eig.allFinite())
    throw Error("covariance not positive definite (min eigenvalue " +
                std::to_string(eig.minCoeff()) + ")");
  basis_ = solver.eigenvectors();
  axis_lengths_ = eig.cwiseSqrt();
}

MinimizeResult minimize(const Objective& objective,
                        const Config& config,
                        std::optional<double> target)
{
  Optimizer opt(config);
  std::size_t evaluations = 0;
  std::size_t generations = 0;
  while (generations < config.max_generations) {
    auto candidates = opt.ask();
    std::vector<double> fitnesses(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
      fitnesses[i] = objective(candidates[i]);
    evaluations += candidates.size();
    opt.tell(candidates, fitnesses);
    ++generations;
    if (opt.exhausted())
      break;
    if (target && opt.best_so_far()->fitness < *target)
      break;
  }
  const Best& best = *opt.best_so_far();
  return {best.x, best.fitness, generations, evaluations};
}

} // namespace wolfsearch::cmaes
