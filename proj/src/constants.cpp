#include "zonal/constants.hpp"

#include <cmath>
#include <numbers>

namespace zonal {

double kappa(int j) {
  return std::pow(std::numbers::pi, 0.5 * j) / std::tgamma(0.5 * j + 1.0);
}

double omega(int j) { return j * kappa(j); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int m = 1; m <= k; ++m) r = r * (n - k + m) / m;
  return r;
}

}  // namespace zonal
