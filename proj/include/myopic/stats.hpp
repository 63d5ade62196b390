#pragma once

#include <cstddef>
#include <span>

namespace myopic {

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
};

// Score interval for a binomial proportion; z = 1.96 gives 95%.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

// Ordinary least-squares slope of ys on xs.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace myopic
