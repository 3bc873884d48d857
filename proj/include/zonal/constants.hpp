#pragma once

namespace zonal {

// Volume of the unit ball in R^j.
double kappa(int j);

// Surface area of the unit sphere S^{j-1}, equal to j * kappa(j).
double omega(int j);

double binomial(int n, int k);

}  // namespace zonal
