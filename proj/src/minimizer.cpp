#include "varorb/minimizer.hpp"

#include "varorb/errors.hpp"

#include <cmath>
#include <future>
#include <random>
#include <sstream>

namespace varorb {

std::string to_string(StationarityMetric metric)
{
    return metric == StationarityMetric::Dirichlet ? "dirichlet" : "euclidean";
}

StationarityMetric stationarity_metric_from_string(const std::string& s)
{
    if (s == "dirichlet") {
        return StationarityMetric::Dirichlet;
    }
    if (s == "euclidean") {
        return StationarityMetric::Euclidean;
    }
    throw ParameterError("unknown stationarity metric '" + s + "'");
}

void MinimizeOptions::validate() const
{
    if (max_iter < 1) {
        throw ParameterError("max_iter must be positive");
    }
    if (!(grad_tol > 0.0)) {
        throw ParameterError("grad_tol must be positive");
    }
    if (!(shrink > 0.0 && shrink < 1.0)) {
        throw ParameterError("shrink must lie in (0, 1)");
    }
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
        throw ParameterError("sufficient_decrease must lie in (0, 1)");
    }
    if (!(initial_step > 0.0) || !(min_step > 0.0)) {
        throw ParameterError("step sizes must be positive");
    }
    if (restart_directions < 1) {
        throw ParameterError("restart_directions must be positive");
    }
}

namespace {

struct Direction {
    Eigen::MatrixXd d;  ///< descent direction (subtracted from X)
    double slope = 0.0; ///< <g, d>
    double norm = 0.0;  ///< stationarity measure
};

// Normal to {|q(a)| = R} at X is e u^T with u = q(a)/|q(a)|.
Direction tangent_direction(const LoopPath& q, const Eigen::MatrixXd& g, StationarityMetric metric)
{
    const auto& basis = q.basis();
    const Eigen::VectorXd& e = basis.endpoint_row();
    Eigen::VectorXd u = q.endpoint();
    const double un = u.norm();
    if (un > 0.0) {
        u /= un;
    }
    const Eigen::MatrixXd n = e * u.transpose();

    Direction dir;
    if (metric == StationarityMetric::Dirichlet) {
        const Eigen::MatrixXd Gg = basis.gram_solve(g);
        const Eigen::MatrixXd Gn = basis.gram_solve(n);
        const double nGn = coef_dot(n, Gn);
        dir.d = Gg;
        if (nGn > 0.0 && un > 0.0) {
            dir.d -= (coef_dot(n, Gg) / nGn) * Gn;
        }
        dir.slope = coef_dot(g, dir.d);
        dir.norm = std::sqrt(std::max(dir.slope, 0.0));
    } else {
        const double nn = coef_dot(n, n);
        dir.d = g;
        if (nn > 0.0 && un > 0.0) {
            dir.d -= (coef_dot(g, n) / nn) * n;
        }
        dir.slope = coef_dot(g, dir.d);
        dir.norm = std::sqrt(std::max(coef_dot(dir.d, dir.d), 0.0));
    }
    return dir;
}

struct RunResult {
    LoopPath q;
    FunctionalValue value;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string termination;
    std::vector<TraceRow> trace;
};

RunResult descend(LoopPath x, const Potential& p, double H, double R, const MinimizeOptions& opts)
{
    FunctionalEval ev = eval_f_grad(x, p, H);
    double step = opts.initial_step;
    double last_step = 0.0;
    std::string note;
    std::vector<TraceRow> trace;

    for (int it = 0;; ++it) {
        const Direction dir = tangent_direction(x, ev.grad, opts.metric);
        if (opts.record_trace) {
            trace.push_back({it, ev.value.f, ev.value.A, ev.value.B, dir.norm, last_step, note});
        }
        note.clear();
        if (dir.norm <= opts.grad_tol * (1.0 + std::abs(ev.value.f))) {
            return {std::move(x), ev.value, dir.norm, it, true, "converged", std::move(trace)};
        }
        if (it >= opts.max_iter) {
            return {std::move(x), ev.value, dir.norm, it, false, "max_iter", std::move(trace)};
        }

        Eigen::VectorXd u = x.endpoint();
        step *= 2.0;
        for (;;) {
            LoopPath trial(x.basis_ptr(), R, x.coefficients() - step * dir.d);
            bool reseeded = false;
            if (!(trial.endpoint().norm() > 0.0)) {
                reseeded = true;
            }
            endpoint_retract_inplace(trial, R, u);
            FunctionalEval tev = eval_f_grad(trial, p, H);
            if (std::isfinite(tev.value.f) &&
                tev.value.f <= ev.value.f - opts.sufficient_decrease * step * dir.slope) {
                x = std::move(trial);
                ev = std::move(tev);
                last_step = step;
                if (reseeded) {
                    note = "reseeded endpoint direction";
                }
                break;
            }
            step *= opts.shrink;
            if (step < opts.min_step) {
                return {std::move(x), ev.value, dir.norm, it, false, "line_search", std::move(trace)};
            }
        }
    }
}

} // namespace

double projected_grad_norm(const LoopPath& q, const Eigen::MatrixXd& grad, StationarityMetric metric)
{
    return tangent_direction(q, grad, metric).norm;
}

double projected_grad_norm(const LoopPath& q, const Potential& p, double H, double R, StationarityMetric metric)
{
    if (std::abs(q.endpoint().norm() - R) > 1e-8 * std::max(1.0, R)) {
        throw InputError("projected_grad_norm expects a loop with |q(anchor)| = R");
    }
    return projected_grad_norm(q, eval_grad_f(q, p, H), metric);
}

Eigen::MatrixXd restart_rotation(int dim, int k, std::uint64_t seed)
{
    if (k == 0) {
        return Eigen::MatrixXd::Identity(dim, dim);
    }
    if (dim == 1) {
        return Eigen::MatrixXd::Constant(1, 1, (k % 2 == 1) ? -1.0 : 1.0);
    }
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd A(dim, dim);
    for (int c = 0; c < dim; ++c) {
        for (int r = 0; r < dim; ++r) {
            A(r, c) = gauss(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Rm = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c) {
        if (Rm(c, c) < 0.0) {
            Q.col(c) *= -1.0;
        }
    }
    return Q;
}

MinimizeReport minimize(const LoopPath& q0, const Potential& p, double H, double R, const MinimizeOptions& opts)
{
    opts.validate();
    if (q0.dim() != p.dim()) {
        throw InputError("loop and potential dimensions differ");
    }
    if (!(R > 0.0)) {
        throw InputError("radius must be positive");
    }
    if (std::abs(q0.endpoint().norm() - R) > 1e-8 * std::max(1.0, R)) {
        std::ostringstream msg;
        msg << "initial loop is infeasible: |q(anchor)| = " << q0.endpoint().norm() << ", R = " << R;
        throw InputError(msg.str());
    }

    const int k = opts.restart_directions;
    auto run = [&](int idx) {
        const Eigen::MatrixXd Q = restart_rotation(q0.dim(), idx, opts.seed);
        LoopPath start(q0.basis_ptr(), R, q0.coefficients() * Q.transpose());
        endpoint_retract_inplace(start, R);
        return descend(std::move(start), p, H, R, opts);
    };

    std::vector<RunResult> results;
    results.reserve(k);
    if (opts.parallel_restarts && k > 1) {
        std::vector<std::future<RunResult>> futures;
        for (int i = 0; i < k; ++i) {
            futures.push_back(std::async(std::launch::async, run, i));
        }
        for (auto& fut : futures) {
            results.push_back(fut.get());
        }
    } else {
        for (int i = 0; i < k; ++i) {
            results.push_back(run(i));
        }
    }

    // Lowest f among converged runs; otherwise lowest f overall. Ties keep the earlier restart.
    int best = -1;
    for (int i = 0; i < k; ++i) {
        if (!results[i].converged) {
            continue;
        }
        if (best < 0 || results[i].value.f < results[best].value.f) {
            best = i;
        }
    }
    if (best < 0) {
        best = 0;
        for (int i = 1; i < k; ++i) {
            if (results[i].value.f < results[best].value.f) {
                best = i;
            }
        }
    }

    MinimizeReport report(results[best].q);
    report.f_final = results[best].value;
    report.grad_norm = results[best].grad_norm;
    report.iterations = results[best].iterations;
    report.converged = results[best].converged;
    report.termination = results[best].termination;
    report.trace = results[best].trace;
    report.best_restart = best;
    for (int i = 0; i < k; ++i) {
        report.restarts.push_back({i, results[i].value.f, results[i].grad_norm, results[i].iterations,
                                   results[i].converged, results[i].termination});
    }
    return report;
}

} // namespace varorb
