#include "doctest.h"

#include "varorb/continuation.hpp"
#include "varorb/errors.hpp"

#include <cmath>

using namespace varorb;

namespace {

Potential tb(double alpha, double beta, double rho, int dim)
{
    return Potential::three_body({alpha, beta, rho}, dim);
}

Discretization disc(int K, ConstraintMode mode = ConstraintMode::HalfAntisymmetric)
{
    Discretization d;
    d.harmonics = K;
    d.nodes = 8 * K;
    d.samples = 16 * K;
    d.mode = mode;
    return d;
}

// Record for the exact free zigzag, R = 1, H = 1, marker radius L.
SweepRecord zigzag_record(ConstraintMode mode, double L)
{
    const LoopPath q = new_loop(1, 1.0, disc(8, mode), Eigen::VectorXd::Ones(1), InitialProfile::Zigzag);
    SweepRecord rec;
    rec.R = 1.0;
    rec.converged = true;
    rec.period = compute_period(q, zero_potential(1), 1.0);
    rec.orbit = rescale(q, rec.period, 512);
    rec.diagnostics = diagnose(*rec.orbit, zero_potential(1), 1.0, L);
    return rec;
}

SweepPlan small_plan(Profile profile)
{
    SweepPlan plan;
    plan.radii = SweepPlan::geometric(2.0, 4);
    plan.profile = profile;
    plan.discretization = disc(32);
    plan.minimize.restart_directions = 1;
    return plan;
}

} // namespace

TEST_SUITE("continuation")
{
    TEST_CASE("plan validation")
    {
        const std::vector<double> g = SweepPlan::geometric(2.0, 7);
        REQUIRE(g.size() == 7);
        CHECK(g.front() == 2.0);
        CHECK(g.back() == 128.0);
        SweepPlan plan;
        CHECK_NOTHROW(plan.validate());
        plan.radii = {4.0, 2.0};
        CHECK_THROWS_AS(plan.validate(), ParameterError);
        plan.radii = {};
        CHECK_THROWS_AS(plan.validate(), ParameterError);
        plan = SweepPlan{};
        plan.marker_radius = 5.0;
        CHECK_THROWS_AS(plan.validate(), ParameterError);
        plan.marker_radius = -1.0;
        CHECK_THROWS_AS(plan.validate(), ParameterError);
        plan = SweepPlan{};
        plan.direction = Eigen::VectorXd::Constant(1, 2.0);
        CHECK_THROWS_AS(plan.validate(), ParameterError);
    }

    TEST_CASE("a single radius cannot make a sweep")
    {
        SweepPlan plan = small_plan(Profile::Positive);
        plan.radii = {2.0};
        CHECK_THROWS_AS(run_sweep(plan, tb(1, -1, 1, 1), 2.0), SweepFailedError);
    }

    TEST_CASE("compact window difference")
    {
        const Potential p = tb(1, -1, 1, 1);
        SweepPlan plan = small_plan(Profile::Positive);
        plan.radii = {2.0, 4.0};
        const HyperbolicCandidate c = run_sweep(plan, p, 2.0);
        REQUIRE(c.records.size() == 2);
        const PeriodicOrbit& o = *c.records[1].centered;
        CHECK(compact_window_diff(o, o, 1.0) == 0.0);
        CHECK(compact_window_diff(o, center_shift(o), 1.0) <= 1e-12);
        CHECK(compact_window_diff(*c.records[0].orbit, *c.records[0].orbit, 0.0, 2) == 0.0);
        CHECK_THROWS_AS(compact_window_diff(o, o, o.period), DomainError);
        CHECK_THROWS_AS(compact_window_diff(o, o, -1.0), DomainError);
        CHECK(compact_window_diff(*c.records[0].centered, o, c.tau) == doctest::Approx(c.compact_convergence.at(0)));
    }

    TEST_CASE("escape inequality on the exact zigzag")
    {
        SweepPlan plan;
        plan.profile = Profile::Negative;
        for (auto mode : {ConstraintMode::HalfAntisymmetric, ConstraintMode::OddAntisymmetric}) {
            SweepRecord rec = zigzag_record(mode, 0.5);
            const EscapeCheck e = escape_bound_check(rec, plan, zero_potential(1), 1.0);
            CHECK(e.evaluated);
            CHECK(e.lhs == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(e.rhs == doctest::Approx(0.5).epsilon(1e-10));
            CHECK(std::abs(e.slack) <= 1e-10);
            CHECK(e.passed);

            rec.diagnostics->t_plus = rec.orbit->domain_hi;
            const EscapeCheck bad = escape_bound_check(rec, plan, zero_potential(1), 1.0);
            CHECK(bad.evaluated);
            CHECK(bad.rhs == 0.0);
            CHECK_FALSE(bad.passed);
        }

        SweepRecord none;
        none.R = 2.0;
        const EscapeCheck skip = escape_bound_check(none, plan, zero_potential(1), 1.0);
        CHECK_FALSE(skip.evaluated);
        CHECK_FALSE(skip.reason.empty());
    }

    TEST_CASE("warm-started sweep in the positive profile")
    {
        const Potential p = tb(1, -1, 1, 1);
        const HyperbolicCandidate c = run_sweep(small_plan(Profile::Positive), p, 2.0);
        REQUIRE(c.records.size() == 4);
        CHECK(c.marker_auto);
        CHECK(c.marker_radius == doctest::Approx(0.5));
        CHECK(c.tau > 0.0);
        CHECK(c.compact_convergence.size() == 3);
        CHECK(c.terminal_speed_trend.size() == 4);
        const int expected_K[] = {32, 32, 32, 64};
        double prev_escape = -1.0;
        for (std::size_t i = 0; i < c.records.size(); ++i) {
            const SweepRecord& r = c.records[i];
            CHECK(r.converged);
            CHECK(r.harmonics == expected_K[i]);
            CHECK(r.escape.evaluated);
            CHECK(r.escape.passed);
            CHECK(r.escape_time > prev_escape);
            prev_escape = r.escape_time;
            CHECK(r.report->q_R.endpoint().norm() == doctest::Approx(r.R).epsilon(1e-12));
            CHECK(std::abs(min_radius(*r.centered).first) <= 1e-10);
        }
        CHECK(c.escape_all_pass);
        CHECK(c.escape_growth.passed);
        CHECK(c.bounded_min_radius.passed);

        SweepPlan cold = small_plan(Profile::Positive);
        cold.independent = true;
        const HyperbolicCandidate d = run_sweep(cold, p, 2.0);
        for (std::size_t i = 0; i < c.records.size(); ++i) {
            CHECK(d.records[i].report->f_final.f == doctest::Approx(c.records[i].report->f_final.f).epsilon(1e-6));
        }
    }

    TEST_CASE("negative profile sweep in the plane")
    {
        const Potential p = tb(1, 1, 1, 2);
        SweepPlan plan = small_plan(Profile::Negative);
        plan.direction = Eigen::Vector2d(0.0, 1.0);
        const HyperbolicCandidate c = run_sweep(plan, p, 1.0);
        for (const auto& r : c.records) {
            CHECK(r.converged);
            CHECK(r.escape.passed);
            CHECK(r.escape.potential_bound > 0.0);
        }
        const double speed = c.records.back().diagnostics->terminal_speed;
        CHECK(speed == doctest::Approx(std::sqrt(2 * (1.0 + 1 / std::sqrt(16.0 * 16.0 + 1)))).epsilon(1e-6));
    }
}
