#include "doctest.h"
#include "oracles.hpp"

#include "varorb/errors.hpp"
#include "varorb/functional.hpp"
#include "varorb/minimizer.hpp"

#include <cmath>
#include <random>

using namespace varorb;

namespace {

Discretization disc(int K, bool corner = true, ConstraintMode mode = ConstraintMode::HalfAntisymmetric)
{
    Discretization d;
    d.harmonics = K;
    d.nodes = 8 * K;
    d.samples = 16 * K;
    d.corner_mode = corner;
    d.mode = mode;
    return d;
}

Potential tb(double alpha, double beta, double rho, int dim)
{
    return Potential::three_body({alpha, beta, rho}, dim);
}

Eigen::VectorXd vec_of(const Eigen::MatrixXd& X)
{
    return Eigen::Map<const Eigen::VectorXd>(X.data(), X.size());
}

// Normal of the constraint |q(anchor)| = R in vectorized coefficient space.
Eigen::VectorXd constraint_normal(const LoopPath& q)
{
    const Eigen::MatrixXd n = q.basis().endpoint_row() * q.endpoint().normalized().transpose();
    return vec_of(n);
}

// Euclidean tangent gradient via an explicit orthonormal basis of the constraint's null space.
double brute_euclidean(const LoopPath& q, const Eigen::MatrixXd& g)
{
    const Eigen::MatrixXd J = constraint_normal(q).transpose();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
    const Eigen::MatrixXd T = svd.matrixV().rightCols(J.cols() - 1);
    return (T * (T.transpose() * vec_of(g))).norm();
}

// Dirichlet dual norm via the dense KKT system of min 1/2 d^T G d - g^T d subject to n^T d = 0.
double brute_dirichlet(const LoopPath& q, const Eigen::MatrixXd& g)
{
    const Eigen::MatrixXd G = q.basis().gram_dense();
    const int M = static_cast<int>(G.rows());
    const int N = q.dim();
    const int S = M * N;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(S + 1, S + 1);
    for (int c = 0; c < N; ++c) {
        K.block(c * M, c * M, M, M) = G;
    }
    const Eigen::VectorXd n = constraint_normal(q);
    K.block(0, S, S, 1) = n;
    K.block(S, 0, 1, S) = n.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S + 1);
    rhs.head(S) = vec_of(g);
    const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    return std::sqrt(vec_of(g).dot(sol.head(S)));
}

MinimizeOptions quiet_options()
{
    MinimizeOptions o;
    o.restart_directions = 1;
    return o;
}

} // namespace

TEST_SUITE("minimizer")
{
    TEST_CASE("free potential reaches the zigzag infimum")
    {
        const Potential z = zero_potential(1);
        const LoopPath q0 = new_loop(1, 1.0, disc(32), Eigen::VectorXd::Ones(1), InitialProfile::FirstHarmonic);
        const MinimizeReport r = minimize(q0, z, 1.0, 1.0);
        CHECK(r.converged);
        CHECK(r.termination == "converged");
        CHECK(r.f_final.f >= 8.0 - 1e-9);
        CHECK(r.f_final.f <= 8.1);
        CHECK(r.f_final.f == doctest::Approx(8.0).epsilon(1e-8));
        CHECK(r.restarts.size() == 4);

        // without the corner mode the truncated infimum is R^2 / sum 2/w_j^2
        const LoopPath p0 = new_loop(1, 1.0, disc(32, false), Eigen::VectorXd::Ones(1), InitialProfile::FirstHarmonic);
        const MinimizeReport rp = minimize(p0, z, 1.0, 1.0, quiet_options());
        CHECK(rp.converged);
        CHECK(rp.f_final.f == doctest::Approx(0.5 * oracle::truncated_dirichlet_infimum(32, 1.0)).epsilon(1e-8));
        CHECK(rp.f_final.f <= 8.1);

        // odd mode: the straight line 2Rt
        const LoopPath e0 = new_loop(2, 1.0, disc(16, true, ConstraintMode::OddAntisymmetric),
                                     Eigen::VectorXd::Unit(2, 0), InitialProfile::FirstHarmonic);
        const MinimizeReport re = minimize(e0, zero_potential(2), 1.0, 1.0, quiet_options());
        CHECK(re.converged);
        CHECK(re.f_final.f == doctest::Approx(2.0).epsilon(1e-8));
    }

    TEST_CASE("flat functional returns immediately")
    {
        const LoopPath q0 = new_loop(2, 1.0, disc(8), Eigen::VectorXd::Unit(2, 0), InitialProfile::FirstHarmonic);
        const MinimizeReport r = minimize(q0, constant_potential(2, 1.0), 1.0, 1.0);
        CHECK(r.converged);
        CHECK(r.iterations == 0);
        CHECK(r.f_final.f == 0.0);
        CHECK(r.q_R.coefficients() == q0.coefficients());
        CHECK(projected_grad_norm(q0, constant_potential(2, 1.0), 1.0, 1.0) <= 1e-12);
    }

    TEST_CASE("negative profile agreement across K and restarts")
    {
        const Potential p = tb(1, 1, 1, 2);
        const Eigen::VectorXd d = Eigen::VectorXd::Unit(2, 0);
        const MinimizeReport a = minimize(new_loop(2, 4.0, disc(32), d, InitialProfile::FirstHarmonic), p, 1.0, 4.0);
        const MinimizeReport b = minimize(new_loop(2, 4.0, disc(64), d, InitialProfile::FirstHarmonic), p, 1.0, 4.0);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        CHECK(std::abs(a.f_final.f - b.f_final.f) <= 1e-4 * a.f_final.f);
        for (const auto& r : a.restarts) {
            CHECK(r.converged);
            CHECK(std::abs(r.f - a.f_final.f) <= 1e-6 * a.f_final.f);
        }
        CHECK(dirichlet_energy(a.q_R) > 0.0);
        CHECK(a.q_R.endpoint().norm() == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(a.grad_norm <= 1e-8 * (1 + a.f_final.f));
        CHECK(projected_grad_norm(a.q_R, p, 1.0, 4.0) == doctest::Approx(a.grad_norm));
    }

    TEST_CASE("trace is monotone")
    {
        const Potential p = tb(1, -1, 1, 3);
        const MinimizeReport r = minimize(
            new_loop(3, 6.0, disc(24), Eigen::VectorXd::Unit(3, 2), InitialProfile::FirstHarmonic), p, 2.0, 6.0,
            quiet_options());
        REQUIRE(r.converged);
        REQUIRE(r.trace.size() >= 2);
        CHECK(r.trace.front().step == 0.0);
        for (std::size_t i = 1; i < r.trace.size(); ++i) {
            CHECK(r.trace[i].f <= r.trace[i - 1].f);
            CHECK(r.trace[i].iter == static_cast<int>(i));
        }
        CHECK(r.trace.back().f == r.f_final.f);
        CHECK(r.trace.back().grad_norm == r.grad_norm);
    }

    TEST_CASE("projection matches the brute-force tangent space")
    {
        std::mt19937_64 rng(77);
        for (auto mode : {ConstraintMode::HalfAntisymmetric, ConstraintMode::OddAntisymmetric}) {
            for (int dim : {1, 2, 3}) {
                const LoopPath q = oracle::random_loop(rng, dim, 1.5, disc(4, true, mode));
                const Potential p = tb(1, -1, 1, dim);
                const Eigen::MatrixXd g = eval_grad_f(q, p, 2.0);
                const double e = projected_grad_norm(q, p, 2.0, 1.5, StationarityMetric::Euclidean);
                CHECK(e == doctest::Approx(brute_euclidean(q, g)).epsilon(1e-10));
                const double d = projected_grad_norm(q, p, 2.0, 1.5, StationarityMetric::Dirichlet);
                CHECK(d == doctest::Approx(brute_dirichlet(q, g)).epsilon(1e-8));
                // free potential too
                const Eigen::MatrixXd g0 = eval_grad_f(q, zero_potential(dim), 1.0);
                CHECK(projected_grad_norm(q, g0, StationarityMetric::Euclidean) ==
                      doctest::Approx(brute_euclidean(q, g0)).epsilon(1e-10));
            }
        }
        const LoopPath q = oracle::random_loop(rng, 2, 1.0, disc(4));
        CHECK_THROWS_AS(projected_grad_norm(q, tb(1, -1, 1, 2), 2.0, 2.0), InputError);
    }

    TEST_CASE("euclidean metric approaches the same minimum")
    {
        const Potential p = tb(1, -1, 1, 2);
        MinimizeOptions o = quiet_options();
        o.metric = StationarityMetric::Euclidean;
        o.grad_tol = 1e-7;
        const LoopPath q0 = new_loop(2, 2.0, disc(8), Eigen::VectorXd::Unit(2, 0), InitialProfile::FirstHarmonic);
        const MinimizeReport e = minimize(q0, p, 2.0, 2.0, o);
        const MinimizeReport d = minimize(q0, p, 2.0, 2.0, quiet_options());
        // plain steepest descent is ill-conditioned in K and may exhaust max_iter,
        // but it descends to the same minimum
        REQUIRE(d.converged);
        CHECK(e.f_final.f >= d.f_final.f - 1e-8 * d.f_final.f);
        CHECK(e.f_final.f <= d.f_final.f * (1 + 1e-3));
        CHECK(e.f_final.f < e.trace.front().f);
        CHECK(10 * d.iterations < e.iterations);
    }

    TEST_CASE("reflection symmetry")
    {
        const Potential p = tb(1, -1, 1, 2);
        const Eigen::VectorXd d = Eigen::Vector2d(0.6, 0.8);
        const Eigen::VectorXd m = Eigen::Vector2d(0.6, -0.8);
        const MinimizeReport a = minimize(new_loop(2, 5.0, disc(20), d, InitialProfile::Zigzag), p, 2.0, 5.0, quiet_options());
        const MinimizeReport b = minimize(new_loop(2, 5.0, disc(20), m, InitialProfile::Zigzag), p, 2.0, 5.0, quiet_options());
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        CHECK(std::abs(a.f_final.f - b.f_final.f) <= 1e-8 * a.f_final.f);
    }

    TEST_CASE("termination reasons and input errors")
    {
        const Potential p = tb(1, -1, 1, 2);
        const LoopPath q0 = new_loop(2, 4.0, disc(16), Eigen::VectorXd::Unit(2, 0), InitialProfile::FirstHarmonic);
        MinimizeOptions o = quiet_options();
        o.max_iter = 1;
        const MinimizeReport r = minimize(q0, p, 2.0, 4.0, o);
        CHECK_FALSE(r.converged);
        CHECK(r.termination == "max_iter");
        CHECK(r.iterations == 1);

        o = quiet_options();
        o.min_step = 1e3;
        const MinimizeReport s = minimize(q0, p, 2.0, 4.0, o);
        CHECK_FALSE(s.converged);
        CHECK(s.termination == "line_search");

        CHECK_THROWS_AS(minimize(q0, p, 2.0, 3.0), InputError);
        CHECK_THROWS_AS(minimize(q0, tb(1, -1, 1, 3), 2.0, 4.0), InputError);
        o = quiet_options();
        o.shrink = 1.5;
        CHECK_THROWS_AS(minimize(q0, p, 2.0, 4.0, o), ParameterError);
        o = quiet_options();
        o.restart_directions = 0;
        CHECK_THROWS_AS(o.validate(), ParameterError);
    }

    TEST_CASE("restart rotations and parallel restarts")
    {
        CHECK(restart_rotation(3, 0, 5) == Eigen::MatrixXd::Identity(3, 3));
        CHECK(restart_rotation(1, 1, 5)(0, 0) == -1.0);
        CHECK(restart_rotation(3, 2, 5) == restart_rotation(3, 2, 5));
        CHECK((restart_rotation(3, 1, 5) - restart_rotation(3, 1, 6)).norm() > 1e-3);

        const Potential p = tb(1, -1, 1, 2);
        const LoopPath q0 = new_loop(2, 3.0, disc(16), Eigen::VectorXd::Unit(2, 0), InitialProfile::FirstHarmonic);
        MinimizeOptions seq;
        MinimizeOptions par;
        par.parallel_restarts = true;
        const MinimizeReport a = minimize(q0, p, 2.0, 3.0, seq);
        const MinimizeReport b = minimize(q0, p, 2.0, 3.0, par);
        CHECK(a.best_restart == b.best_restart);
        CHECK(a.q_R.coefficients() == b.q_R.coefficients());
        for (std::size_t i = 0; i < a.restarts.size(); ++i) {
            CHECK(a.restarts[i].f == b.restarts[i].f);
        }
    }

    TEST_CASE("metric names")
    {
        CHECK(stationarity_metric_from_string("dirichlet") == StationarityMetric::Dirichlet);
        CHECK(stationarity_metric_from_string(to_string(StationarityMetric::Euclidean)) == StationarityMetric::Euclidean);
        CHECK_THROWS_AS(stationarity_metric_from_string("manhattan"), ParameterError);
    }
}
