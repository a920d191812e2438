#include "varorb/functional.hpp"

#include "varorb/errors.hpp"
#include "varorb/quadrature.hpp"

#include <cmath>
#include <vector>

namespace varorb {

namespace {

void check_dims(const LoopPath& q, const Potential& p)
{
    if (q.dim() != p.dim()) {
        throw InputError("loop and potential dimensions differ");
    }
}

// B = sum_i w_i (H - V(q_i)); also fills W grad V(q_i) when requested.
double energy_integral(const LoopPath& q, const Potential& p, double H, const Eigen::MatrixXd& Q,
                       Eigen::MatrixXd* weighted_grad)
{
    const auto& w = q.basis().weights();
    const Eigen::Index n = Q.rows();
    std::vector<double> terms(n);
    Eigen::VectorXd x(Q.cols());
    Eigen::VectorXd g(Q.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        x = Q.row(i).transpose();
        terms[i] = w[i] * (H - p.value_unchecked(x));
        if (weighted_grad) {
            p.gradient_unchecked(x, g);
            weighted_grad->row(i) = w[i] * g.transpose();
        }
    }
    return pairwise_sum(terms.data(), static_cast<long>(n));
}

} // namespace

double coef_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    long double acc = 0.0L;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            acc += static_cast<long double>(a(r, c)) * b(r, c);
        }
    }
    return static_cast<double>(acc);
}

FunctionalValue eval_f(const LoopPath& q, const Potential& p, double H)
{
    check_dims(q, p);
    FunctionalValue v;
    v.A = 0.5 * dirichlet_energy(q);
    v.B = energy_integral(q, p, H, q.node_values(), nullptr);
    v.f = v.A * v.B;
    return v;
}

FunctionalEval eval_f_grad(const LoopPath& q, const Potential& p, double H)
{
    check_dims(q, p);
    const auto& basis = q.basis();
    const Eigen::MatrixXd Q = q.node_values();
    Eigen::MatrixXd WG(Q.rows(), Q.cols());

    FunctionalEval out;
    const Eigen::MatrixXd GX = basis.gram_apply(q.coefficients());
    out.value.A = 0.5 * coef_dot(q.coefficients(), GX);
    out.value.B = energy_integral(q, p, H, Q, &WG);
    out.value.f = out.value.A * out.value.B;
    out.grad = out.value.B * GX;
    out.grad.noalias() -= out.value.A * (basis.phi().transpose() * WG);
    return out;
}

Eigen::MatrixXd eval_grad_f(const LoopPath& q, const Potential& p, double H)
{
    return eval_f_grad(q, p, H).grad;
}

double pairing_identity_residual(const LoopPath& q, const Potential& p, double H)
{
    const auto ev = eval_f_grad(q, p, H);
    const double lhs = coef_dot(ev.grad, q.coefficients());

    const auto& basis = q.basis();
    const auto& t = basis.nodes();
    const auto& w = basis.weights();
    std::vector<double> terms(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const Eigen::VectorXd x = sample(q, t[i]);
        const Eigen::VectorXd g = p.gradient(x);
        terms[i] = w[i] * (H - p.value(x) - 0.5 * g.dot(x));
    }
    const double rhs = dirichlet_energy(q) * pairwise_sum(terms.data(), static_cast<long>(terms.size()));
    return std::abs(lhs - rhs);
}

double quadrature_refinement_gap(const LoopPath& q, const Potential& p, double H)
{
    const auto fine = LoopBasis::make(q.discretization().refined_quadrature());
    const LoopPath qf(fine, q.radius(), q.coefficients());
    return std::abs(eval_f(q, p, H).f - eval_f(qf, p, H).f);
}

} // namespace varorb
