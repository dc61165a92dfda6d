#pragma once

#include "wolfsearch/core.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline wolfsearch::RealVector random_vector(std::mt19937_64& rng, std::size_t dim, double scale = 1.0)
{
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(dim);
  for (double& x : v)
    x = normal(rng);
  return wolfsearch::RealVector(std::move(v));
}

//! Fresh empty directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  explicit TempDir(const std::string& tag)
  {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("wolfsearch-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

} // namespace testing
