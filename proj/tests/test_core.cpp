#include "helpers.hpp"

#include "wolfsearch/core.hpp"

#include <cmath>
#include <limits>

using namespace wolfsearch;

TEST_CASE("dot examples")
{
  CHECK(dot(RealVector{1, 0}, RealVector{0, 1}) == 0.0);
  CHECK(dot(RealVector{1, 2}, RealVector{3, 4}) == 11.0);
  CHECK(dot(RealVector{2, 0, 0}, RealVector{2, 0, 0}) == 4.0);
}

TEST_CASE("dot rejects mismatched dims and names both")
{
  try {
    dot(RealVector{1, 2}, RealVector{1, 2, 3});
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }
}

TEST_CASE("l2_normalize examples")
{
  const RealVector u = l2_normalize(RealVector{3, 4});
  CHECK(u[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(u[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(l2_normalize(RealVector{1, 0, 0}) == RealVector{1, 0, 0});
  CHECK_THROWS_WITH_AS(l2_normalize(RealVector{0, 0}), "cannot normalize zero vector", Error);
}

TEST_CASE("RealVector rejects empty and non-finite values")
{
  CHECK_THROWS_AS(RealVector(std::vector<double>{}), DimensionError);
  CHECK_THROWS_AS(RealVector({1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  CHECK_THROWS_AS(RealVector({std::numeric_limits<double>::infinity()}), Error);
}

TEST_CASE("property: dot symmetric, self-dot non-negative, unit norm after normalize")
{
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dims(1, 64);
  std::uniform_real_distribution<double> log_scale(-150, 150);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = dims(rng);
    const double scale = std::pow(10.0, log_scale(rng));
    const RealVector a = testing::random_vector(rng, d, scale);
    const RealVector b = testing::random_vector(rng, d, 1.0);
    CHECK(dot(a, b) == dot(b, a));
    CHECK(dot(b, b) >= 0.0);
    const RealVector u = l2_normalize(a);
    double sq = 0.0;
    for (double x : u)
      sq += x * x;
    CHECK(std::abs(std::sqrt(sq) - 1.0) <= 1e-12);
  }
}

TEST_CASE("compensated_sum beats naive summation on cancellation")
{
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
}
