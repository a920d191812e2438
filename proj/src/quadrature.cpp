#include "varorb/quadrature.hpp"

#include "varorb/errors.hpp"

#include <cmath>
#include <numbers>

namespace varorb {

QuadratureNodes gauss_legendre(int n, double a, double b)
{
    if (n < 1) {
        throw ParameterError("Gauss-Legendre rule needs at least one node");
    }
    QuadratureNodes rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi-style initial guess, then Newton on P_n.
        long double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1.0L;
            long double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(static_cast<double>(dx)) < 1e-17) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        long double p0 = 1.0L;
        long double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const long double p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0L);
        const double w = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));

        rule.nodes[i] = mid - half * static_cast<double>(x);
        rule.nodes[n - 1 - i] = mid + half * static_cast<double>(x);
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = mid;
    }
    return rule;
}

double pairwise_sum(const double* x, long n)
{
    if (n <= 16) {
        double s = 0.0;
        for (long i = 0; i < n; ++i) {
            s += x[i];
        }
        return s;
    }
    const long h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

} // namespace varorb
