#pragma once

#include "varorb/functional.hpp"
#include "varorb/loop.hpp"
#include "varorb/potential.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace varorb {

/// Norm used to measure stationarity and to precondition the descent step.
///   Dirichlet: dual norm of the H^1 seminorm, sqrt(g^T P G^{-1} g); steps are
///              Sobolev gradients, so the iteration count does not grow with K.
///   Euclidean: plain coefficient-space norm of the tangent gradient.
enum class StationarityMetric { Dirichlet, Euclidean };

std::string to_string(StationarityMetric metric);
StationarityMetric stationarity_metric_from_string(const std::string& s);

struct MinimizeOptions {
    int max_iter = 20000;
    double grad_tol = 1e-8;            ///< relative: stop when norm <= grad_tol (1 + |f|)
    double shrink = 0.5;               ///< backtracking factor
    double sufficient_decrease = 1e-4; ///< Armijo constant
    double initial_step = 1.0;
    double min_step = 1e-14;
    int restart_directions = 4;        ///< restart 0 is q0 itself
    std::uint64_t seed = 1;
    StationarityMetric metric = StationarityMetric::Dirichlet;
    bool parallel_restarts = false;
    bool record_trace = true;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    double f = 0.0;
    double A = 0.0;
    double B = 0.0;
    double grad_norm = 0.0;
    double step = 0.0; ///< step that produced this iterate (0 for the start)
    std::string note;
};

struct RestartOutcome {
    int index = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string termination;
};

struct MinimizeReport {
    explicit MinimizeReport(LoopPath q) : q_R(std::move(q)) {}

    LoopPath q_R;
    FunctionalValue f_final;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string termination; ///< "converged", "max_iter", "line_search"
    std::vector<TraceRow> trace; ///< trace of the selected restart
    std::vector<RestartOutcome> restarts;
    int best_restart = 0;
};

/// Tangent-space stationarity measure at a feasible q (see StationarityMetric).
double projected_grad_norm(const LoopPath& q, const Potential& p, double H, double R,
                           StationarityMetric metric = StationarityMetric::Dirichlet);
double projected_grad_norm(const LoopPath& q, const Eigen::MatrixXd& grad,
                           StationarityMetric metric = StationarityMetric::Dirichlet);

/// Best-of-k projected descent with backtracking and endpoint retraction.
/// Throws InputError when q0 is infeasible or dimensions disagree.
MinimizeReport minimize(const LoopPath& q0, const Potential& p, double H, double R,
                        const MinimizeOptions& opts = {});

/// Orthogonal map used to seed restart k (k = 0 is the identity).
Eigen::MatrixXd restart_rotation(int dim, int k, std::uint64_t seed);

} // namespace varorb
