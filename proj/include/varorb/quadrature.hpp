#pragma once

#include <vector>

namespace varorb {

struct QuadratureNodes {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [a, b] (Newton on the three-term recurrence).
QuadratureNodes gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Fixed-order pairwise summation; the reduction tree depends only on the length.
double pairwise_sum(const double* x, long n);

} // namespace varorb
