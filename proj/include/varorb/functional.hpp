#pragma once

#include "varorb/loop.hpp"
#include "varorb/potential.hpp"

#include <Eigen/Dense>

namespace varorb {

/// f = A * B with A = 1/2 int |q'|^2 (exact, from coefficients) and
/// B = int (H - V(q)) (quadrature at the basis nodes).
struct FunctionalValue {
    double f = 0.0;
    double A = 0.0;
    double B = 0.0;
};

struct FunctionalEval {
    FunctionalValue value;
    Eigen::MatrixXd grad; ///< df/dX, same shape as the coefficient matrix
};

FunctionalValue eval_f(const LoopPath& q, const Potential& p, double H);

/// Product-rule derivative  df.h = B int (q', h') - A int (grad V(q), h),
/// i.e. grad = B G X - A Phi^T W grad V(Q) in coefficient space.
Eigen::MatrixXd eval_grad_f(const LoopPath& q, const Potential& p, double H);

/// Value and gradient from a single pass over the nodes.
FunctionalEval eval_f_grad(const LoopPath& q, const Potential& p, double H);

/// |<grad f, q> - |q|^2 int (H - V(q) - 1/2 (grad V(q), q))|, with the right-hand
/// integral evaluated pointwise, independently of the gradient assembly.
double pairing_identity_residual(const LoopPath& q, const Potential& p, double H);

/// |f_n(q) - f_2n(q)|: change in f when the quadrature node count is doubled.
double quadrature_refinement_gap(const LoopPath& q, const Potential& p, double H);

/// Frobenius inner product of coefficient matrices, accumulated in a fixed order.
double coef_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace varorb
