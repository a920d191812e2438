#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library's basis tables or quadrature; loops are evaluated from their
// coefficients with closed-form formulas and integrals use composite Simpson.

#include "varorb/loop.hpp"
#include "varorb/potential.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

constexpr double pi = std::numbers::pi;

/// q(t) or q'(t) straight from the coefficient layout.
inline Eigen::VectorXd eval(const varorb::LoopPath& q, double t, int deriv = 0)
{
    const auto& d = q.discretization();
    const auto& X = q.coefficients();
    const int N = q.dim();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
    int row = 0;
    if (d.mode == varorb::ConstraintMode::HalfAntisymmetric) {
        const double s = t - std::floor(t);
        if (d.corner_mode) {
            const double z = deriv == 0 ? (s <= 0.5 ? 1 - 4 * s : 4 * s - 3) : (s < 0.5 ? -4.0 : 4.0);
            out += z * X.row(row++).transpose();
        }
        for (int j = 0; j < d.harmonics; ++j) {
            const double w = 2 * pi * (2 * j + 1);
            const double c = deriv == 0 ? std::cos(w * s) : -w * std::sin(w * s);
            const double sn = deriv == 0 ? std::sin(w * s) : w * std::cos(w * s);
            out += c * X.row(row++).transpose();
            out += sn * X.row(row++).transpose();
        }
    } else {
        if (d.corner_mode) {
            out += (deriv == 0 ? 2 * t : 2.0) * X.row(row++).transpose();
        }
        for (int j = 0; j < d.harmonics; ++j) {
            const double w = pi * (2 * j + 1);
            out += (deriv == 0 ? std::sin(w * t) : w * std::cos(w * t)) * X.row(row++).transpose();
        }
    }
    return out;
}

/// Composite Simpson on [a, b] with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    }
    return s * h / 3.0;
}

/// Simpson on both halves of [lo, lo + 1], inset by eps so one-sided values at kinks are used.
inline double halves(const std::function<double(double)>& f, double lo, int panels, double eps = 1e-13)
{
    const double mid = lo + 0.5;
    return simpson(f, lo + eps, mid - eps, panels) + simpson(f, mid + eps, lo + 1.0 - eps, panels);
}

/// Integral over one period, split at the mid-point so kinks sit on panel edges.
inline double period_integral(const varorb::LoopPath& q, const std::function<double(double)>& f, int panels = 20000)
{
    const bool half = q.discretization().mode == varorb::ConstraintMode::HalfAntisymmetric;
    return halves(f, half ? 0.0 : -0.5, panels);
}

inline double dirichlet(const varorb::LoopPath& q, int panels = 20000)
{
    return period_integral(q, [&](double t) { return eval(q, t, 1).squaredNorm(); }, panels);
}

/// f = 1/2 int|q'|^2 * int (H - V(q)) with Simpson quadrature.
inline double functional(const varorb::LoopPath& q, const varorb::Potential& p, double H, int panels = 20000)
{
    const double A = 0.5 * dirichlet(q, panels);
    const double B = period_integral(q, [&](double t) { return H - p.value(eval(q, t)); }, panels);
    return A * B;
}

/// Random feasible loop with decaying coefficients.
inline varorb::LoopPath random_loop(std::mt19937_64& rng, int dim, double R, const varorb::Discretization& d)
{
    std::normal_distribution<double> g(0.0, 1.0);
    auto basis = varorb::LoopBasis::make(d);
    Eigen::MatrixXd X(basis->size(), dim);
    for (int r = 0; r < X.rows(); ++r) {
        const int j = d.corner_mode ? std::max(0, r - 1) : r;
        const double scale = R / (1.0 + 0.5 * j * j);
        for (int c = 0; c < dim; ++c) {
            X(r, c) = scale * g(rng);
        }
    }
    varorb::LoopPath q(basis, R, X);
    varorb::endpoint_retract_inplace(q, R);
    return q;
}

inline Eigen::MatrixXd random_direction(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd h(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            h(r, c) = g(rng);
        }
    }
    return h / h.norm();
}

/// Central difference of f along h in coefficient space.
inline double directional_fd(const varorb::LoopPath& q, const Eigen::MatrixXd& h,
                             const std::function<double(const varorb::LoopPath&)>& f, double eps)
{
    const varorb::LoopPath qp(q.basis_ptr(), q.radius(), q.coefficients() + eps * h);
    const varorb::LoopPath qm(q.basis_ptr(), q.radius(), q.coefficients() - eps * h);
    return (f(qp) - f(qm)) / (2 * eps);
}

/// Truncated odd-harmonic zigzag (no corner mode) retracted to |q(0)| = 1:
/// Dirichlet energy sum_j w_j^2 a_j^2 / 2 from the closed-form coefficients.
inline double truncated_zigzag_energy(int K)
{
    std::vector<double> a(K);
    double q0 = 0.0;
    for (int j = 0; j < K; ++j) {
        a[j] = 8.0 / (pi * pi * (2 * j + 1) * (2 * j + 1));
        q0 += a[j];
    }
    a[0] += 1.0 - q0;
    double e = 0.0;
    for (int j = 0; j < K; ++j) {
        const double w = 2 * pi * (2 * j + 1);
        e += 0.5 * w * w * a[j] * a[j];
    }
    return e;
}

/// Minimum Dirichlet energy over K odd cosines with q(0) = R: R^2 / sum_j (2 / w_j^2).
inline double truncated_dirichlet_infimum(int K, double R)
{
    double s = 0.0;
    for (int j = 0; j < K; ++j) {
        const double w = 2 * pi * (2 * j + 1);
        s += 2.0 / (w * w);
    }
    return R * R / s;
}

} // namespace oracle
