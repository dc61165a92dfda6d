#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wolfsearch {

//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Bad configuration, bad file contents, or a violated precondition that
//! the caller could have checked. The CLI maps it to exit code 1.
class ConfigError : public Error
{
public:
  using Error::Error;
};

class DimensionError : public Error
{
public:
  using Error::Error;
};

//! Immutable, non-empty vector of finite doubles.
class RealVector
{
public:
  RealVector(std::vector<double> values);
  RealVector(std::initializer_list<double> values);
  RealVector(std::span<const double> values);

  static RealVector zeros(std::size_t dim);
  static RealVector filled(std::size_t dim, double value);

  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& as_vector() const { return values_; }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool operator==(const RealVector& other) const = default;

private:
  void validate() const;
  std::vector<double> values_;
};

using LatentVector = RealVector;
using Embedding = RealVector;

void require_same_dim(std::size_t a, std::size_t b, const char* what);

double dot(const RealVector& a, const RealVector& b);
double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(const RealVector& v);
RealVector l2_normalize(const RealVector& v);

//! Sum with Neumaier compensation; used where mean scores are compared
//! against brute-force oracles.
double compensated_sum(std::span<const double> values);

} // namespace wolfsearch
