#include "varorb/continuation.hpp"

#include "varorb/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

namespace varorb {

std::vector<double> SweepPlan::geometric(double R0, int count)
{
    std::vector<double> radii;
    for (int k = 0; k < count; ++k) {
        radii.push_back(std::ldexp(R0, k));
    }
    return radii;
}

void SweepPlan::validate() const
{
    if (radii.empty()) {
        throw ParameterError("sweep plan has no radii");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
            throw ParameterError("sweep radii must be positive and finite");
        }
        if (i > 0 && !(radii[i] > radii[i - 1])) {
            throw ParameterError("sweep radii must be strictly increasing");
        }
    }
    if (marker_radius) {
        if (!(*marker_radius > 0.0)) {
            throw ParameterError("marker radius must be positive");
        }
        if (radii.size() > 1 && !(*marker_radius < radii[1])) {
            throw ParameterError("marker radius must be below every radius after the first");
        }
    }
    if (!(harmonics_per_radius >= 0.0)) {
        throw ParameterError("harmonics_per_radius must be non-negative");
    }
    if (margin < 0 || window_points < 2) {
        throw ParameterError("margin must be >= 0 and window_points >= 2");
    }
    if (direction && std::abs(direction->norm() - 1.0) > 1e-12) {
        throw ParameterError("sweep seed direction must be a unit vector");
    }
    discretization.validate();
    minimize.validate();
}

EscapeCheck escape_bound_check(const SweepRecord& record, const SweepPlan& plan, const Potential& p, double H)
{
    EscapeCheck c;
    if (!record.converged || !record.diagnostics || !record.orbit) {
        c.reason = "run did not converge";
        return c;
    }
    const auto& d = *record.diagnostics;
    if (!d.markers_defined) {
        c.reason = "markers undefined: " + d.marker_message;
        return c;
    }
    const double gap = record.orbit->domain_hi - d.t_plus;
    const double R = record.R;
    const double L = d.marker_radius;
    if (plan.profile == Profile::Positive) {
        c.lhs = std::sqrt(std::max(0.0, H - p.value_at_origin())) * (R - L);
        c.rhs = std::sqrt(2.0) * H * gap;
    } else {
        double bound = 0.0;
        for (int i = 0; i < record.orbit->size(); ++i) {
            const Eigen::VectorXd x = record.orbit->positions.row(i).transpose();
            bound = std::max(bound, std::abs(p.value(x)));
        }
        c.potential_bound = bound;
        c.lhs = std::sqrt(H) * (R - L);
        c.rhs = std::sqrt(2.0) * (H + bound) * gap;
    }
    c.slack = c.rhs - c.lhs;
    c.passed = c.slack >= -plan.escape_allowance * c.rhs;
    c.evaluated = true;
    return c;
}

double compact_window_diff(const PeriodicOrbit& a, const PeriodicOrbit& b, double tau, int points)
{
    if (!(tau >= 0.0) || points < 2) {
        throw DomainError("window half-width must be non-negative with at least two points");
    }
    for (const PeriodicOrbit* o : {&a, &b}) {
        const double slop = 1e-12 * std::max(1.0, o->period);
        if (-tau < o->domain_lo - slop || tau > o->domain_hi + slop) {
            std::ostringstream msg;
            msg << "window [-" << tau << ", " << tau << "] leaves the orbit domain [" << o->domain_lo << ", "
                << o->domain_hi << "]";
            throw DomainError(msg.str());
        }
    }
    if (a.dim() != b.dim()) {
        throw InputError("orbits have different dimensions");
    }
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = -tau + 2.0 * tau * static_cast<double>(i) / (points - 1);
        worst = std::max(worst, (a.position_at(t) - b.position_at(t)).norm());
    }
    return worst;
}

namespace {

struct RunOutput {
    std::optional<MinimizeReport> report;
    std::string error;
    double wall_time = 0.0;
};

int harmonics_for(const SweepPlan& plan, double R)
{
    const int K0 = plan.discretization.harmonics;
    return std::max(K0, static_cast<int>(std::ceil(plan.harmonics_per_radius * R - 1e-9)));
}

RunOutput run_one(const SweepPlan& plan, const Potential& p, double H, double R, const LoopPath& q0)
{
    RunOutput out;
    const auto start = std::chrono::steady_clock::now();
    try {
        out.report = minimize(q0, p, H, R, plan.minimize);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

LoopPath cold_start(const SweepPlan& plan, int dim, double R, const Discretization& disc)
{
    Eigen::VectorXd dir = plan.direction ? *plan.direction : Eigen::VectorXd(Eigen::VectorXd::Unit(dim, 0));
    return new_loop(dim, R, disc, dir, plan.seed_profile);
}

// Previous minimizer scaled by R/R_prev, padded to the new basis, retracted.
LoopPath warm_start(const LoopPath& prev, double R, const Discretization& disc)
{
    LoopPath q = resize_harmonics(prev, disc);
    q.coefficients() *= R / prev.radius();
    endpoint_retract_inplace(q, R, prev.endpoint());
    return q;
}

} // namespace

HyperbolicCandidate run_sweep(const SweepPlan& plan, const Potential& p, double H)
{
    plan.validate();
    if (plan.direction && plan.direction->size() != p.dim()) {
        throw ParameterError("sweep seed direction has the wrong dimension");
    }
    const int dim = p.dim();
    const std::size_t count = plan.radii.size();

    HyperbolicCandidate cand;
    cand.records.resize(count);
    std::vector<RunOutput> runs(count);

    // Phase 1: minimizations.
    if (plan.independent) {
        std::vector<std::future<RunOutput>> futures;
        for (std::size_t k = 0; k < count; ++k) {
            const double R = plan.radii[k];
            const Discretization disc = plan.discretization.with_harmonics(harmonics_for(plan, R));
            futures.push_back(std::async(std::launch::async, [&plan, &p, H, R, disc, dim] {
                return run_one(plan, p, H, R, cold_start(plan, dim, R, disc));
            }));
        }
        for (std::size_t k = 0; k < count; ++k) {
            runs[k] = futures[k].get();
        }
    } else {
        std::optional<LoopPath> prev;
        for (std::size_t k = 0; k < count; ++k) {
            const double R = plan.radii[k];
            const Discretization disc = plan.discretization.with_harmonics(harmonics_for(plan, R));
            const LoopPath q0 = prev ? warm_start(*prev, R, disc) : cold_start(plan, dim, R, disc);
            runs[k] = run_one(plan, p, H, R, q0);
            if (runs[k].report && runs[k].report->converged) {
                prev = runs[k].report->q_R;
            }
        }
    }

    // Phase 2: periods and orbits.
    for (std::size_t k = 0; k < count; ++k) {
        SweepRecord& rec = cand.records[k];
        rec.R = plan.radii[k];
        rec.harmonics = harmonics_for(plan, rec.R);
        rec.wall_time = runs[k].wall_time;
        rec.error = runs[k].error;
        rec.report = std::move(runs[k].report);
        if (!rec.report || !rec.report->converged) {
            continue;
        }
        try {
            rec.period = compute_period(*rec.report, p, H);
            rec.orbit = rescale(rec.report->q_R, rec.period, rec.report->q_R.discretization().samples);
            rec.converged = true;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    }

    std::vector<std::size_t> ok;
    for (std::size_t k = 0; k < count; ++k) {
        if (cand.records[k].converged) {
            ok.push_back(k);
        }
    }
    if (ok.size() < 2) {
        std::ostringstream msg;
        msg << "sweep produced " << ok.size() << " converged run(s); at least two are required";
        throw SweepFailedError(msg.str());
    }

    // Marker radius: fixed, or from the first converged run.
    if (plan.marker_radius) {
        cand.marker_radius = *plan.marker_radius;
    } else {
        const auto& first = cand.records[ok.front()];
        const double M0 = min_radius(*first.orbit).second;
        cand.marker_radius = std::max(2.0 * M0, 0.25 * first.R);
        cand.marker_auto = true;
        if (count > 1 && !(cand.marker_radius < plan.radii[1])) {
            throw SweepFailedError("automatic marker radius is not below the second radius; set it explicitly");
        }
    }

    // Phase 3: diagnostics.
    const double v_esc = std::sqrt(2.0 * H);
    for (std::size_t k : ok) {
        SweepRecord& rec = cand.records[k];
        rec.diagnostics = diagnose(*rec.orbit, p, H, cand.marker_radius, plan.margin);
        rec.centered = center_shift(*rec.orbit);
        rec.escape = escape_bound_check(rec, plan, p, H);
        if (rec.diagnostics->markers_defined) {
            rec.escape_time = rec.orbit->domain_hi - rec.diagnostics->t_plus;
        }
        const bool grew = k != ok.front();
        rec.diagnostics->classification = grew ? classify(rec.diagnostics->terminal_speed, true, plan.hyperbolic_tol)
                                               : Classification::Undetermined;
        cand.terminal_speed_trend.push_back(rec.diagnostics->terminal_speed);
        cand.min_radius_bound = std::max(cand.min_radius_bound, rec.diagnostics->min_radius_value);
    }

    // Compact-window convergence on a common window.
    cand.tau = std::numeric_limits<double>::infinity();
    for (std::size_t k : ok) {
        const auto& rec = cand.records[k];
        cand.tau = std::min(cand.tau, 0.5 * (0.5 * rec.period - std::abs(rec.diagnostics->min_radius_time)));
    }
    cand.tau = std::max(cand.tau, 0.0);
    for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
        cand.compact_convergence.push_back(compact_window_diff(*cand.records[ok[i]].centered,
                                                               *cand.records[ok[i + 1]].centered, cand.tau,
                                                               plan.window_points));
    }

    // (a) no monotone growth of M_obs over the last three converged runs.
    {
        const double floor = plan.radius_floor * cand.marker_radius;
        std::vector<double> m;
        for (std::size_t i = ok.size() >= 3 ? ok.size() - 3 : 0; i < ok.size(); ++i) {
            m.push_back(std::max(cand.records[ok[i]].diagnostics->min_radius_value, floor));
        }
        bool growing = m.size() >= 3;
        for (std::size_t i = 1; i < m.size(); ++i) {
            growing = growing && m[i] > m[i - 1];
        }
        std::ostringstream msg;
        msg << "max M_obs = " << cand.min_radius_bound << (growing ? "; grows over the last 3 runs" : "");
        cand.bounded_min_radius = {!growing, msg.str()};
    }

    // (b) T/2 - t_+ strictly increasing.
    {
        bool ok_b = true;
        std::ostringstream msg;
        double last = -std::numeric_limits<double>::infinity();
        for (std::size_t k : ok) {
            const auto& rec = cand.records[k];
            if (!rec.diagnostics->markers_defined) {
                ok_b = false;
                msg << "markers undefined at R=" << rec.R << "; ";
                continue;
            }
            if (!(rec.escape_time > last)) {
                ok_b = false;
                msg << "T/2 - t_+ did not increase at R=" << rec.R << "; ";
            }
            last = rec.escape_time;
        }
        if (ok_b) {
            msg << "T/2 - t_+ strictly increasing";
        }
        cand.escape_growth = {ok_b, msg.str()};
    }

    // (c) terminal speed near sqrt(2H) at the largest converged radius.
    bool slow = false;
    {
        const auto& rec = cand.records[ok.back()];
        const double speed = rec.diagnostics->terminal_speed;
        const double v_end = std::abs(p.value(rec.orbit->position_at(rec.orbit->domain_hi)));
        const double allowed = 2.0 * v_end / v_esc + plan.speed_tolerance * v_esc;
        const double err = std::abs(speed - v_esc);
        slow = speed < plan.hyperbolic_tol;
        std::ostringstream msg;
        msg << "speed " << speed << " vs sqrt(2H) " << v_esc << " (|diff| " << err << ", allowed " << allowed << ")";
        cand.terminal_speed = {err <= allowed && !slow, msg.str()};
    }

    // (d) compact-window differences non-increasing over the last three pairs.
    {
        const auto& cc = cand.compact_convergence;
        bool ok_d = true;
        const std::size_t from = cc.size() > 3 ? cc.size() - 3 : 0;
        for (std::size_t i = from + 1; i < cc.size(); ++i) {
            if (!(cc[i] <= std::max(cc[i - 1], plan.compact_floor))) {
                ok_d = false;
            }
        }
        std::ostringstream msg;
        msg << "tau " << cand.tau << ", last pairs";
        for (std::size_t i = from; i < cc.size(); ++i) {
            msg << " " << cc[i];
        }
        msg << " (floor " << plan.compact_floor << ")";
        cand.compact = {ok_d, msg.str()};
    }

    cand.escape_all_pass = true;
    for (std::size_t k : ok) {
        cand.escape_all_pass = cand.escape_all_pass && cand.records[k].escape.passed;
    }

    if (!cand.escape_growth.passed) {
        cand.verdict = Classification::Bounded;
    } else if (slow) {
        cand.verdict = Classification::Parabolic;
    } else if (cand.bounded_min_radius.passed && cand.terminal_speed.passed && cand.compact.passed) {
        cand.verdict = Classification::Hyperbolic;
    } else {
        cand.verdict = Classification::Undetermined;
    }
    return cand;
}

} // namespace varorb
