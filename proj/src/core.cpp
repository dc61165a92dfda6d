#include "wolfsearch/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wolfsearch {

RealVector::RealVector(std::vector<double> values)
  : values_(std::move(values))
{
  validate();
}

RealVector::RealVector(std::initializer_list<double> values)
  : values_(values)
{
  validate();
}

RealVector::RealVector(std::span<const double> values)
  : values_(values.begin(), values.end())
{
  validate();
}

RealVector RealVector::zeros(std::size_t dim)
{
  return RealVector(std::vector<double>(dim, 0.0));
}

RealVector RealVector::filled(std::size_t dim, double value)
{
  return RealVector(std::vector<double>(dim, value));
}

void RealVector::validate() const
{
  if (values_.empty())
    throw DimensionError("vector must have dim >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw Error("non-finite vector element at index " + std::to_string(i));
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what)
{
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

double dot(std::span<const double> a, std::span<const double> b)
{
  require_same_dim(a.size(), b.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i] * b[i];
  return acc;
}

double dot(const RealVector& a, const RealVector& b)
{
  return dot(a.values(), b.values());
}

double l2_norm(const RealVector& v)
{
  return std::sqrt(dot(v, v));
}

RealVector l2_normalize(const RealVector& v)
{
  // scale first so that huge or tiny entries do not overflow the squared norm
  double scale = 0.0;
  for (double x : v)
    scale = std::max(scale, std::abs(x));
  if (scale == 0.0)
    throw Error("cannot normalize zero vector");
  std::vector<double> out(v.begin(), v.end());
  double sq = 0.0;
  for (double& x : out) {
    x /= scale;
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  for (double& x : out)
    x /= norm;
  return RealVector(std::move(out));
}

double compensated_sum(std::span<const double> values)
{
  double sum = 0.0;
  double comp = 0.0;
  for (double x : values) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

} // namespace wolfsearch
