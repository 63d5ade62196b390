#include <cmath>
#include <limits>

#include "myopic/errors.hpp"
#include "myopic/geometry.hpp"

namespace myopic {

namespace {

// Modified Lentz evaluation of the standard continued fraction for I_x(a,b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DegenerateGeometry("log_ibeta: continued fraction did not converge");
}

}  // namespace

double log_ibeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ParameterError("log_ibeta: a and b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("log_ibeta: x must lie in [0,1]");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x == 1.0) return 0.0;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_front + std::log(beta_continued_fraction(a, b, x) / a);
  }
  const double log_complement = log_front + std::log(beta_continued_fraction(b, a, 1.0 - x) / b);
  return std::log1p(-std::exp(log_complement));
}

}  // namespace myopic
