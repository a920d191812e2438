#include "varorb/orbit.hpp"

#include "varorb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varorb {

std::string to_string(Classification c)
{
    switch (c) {
    case Classification::Hyperbolic:
        return "Hyperbolic";
    case Classification::Parabolic:
        return "Parabolic";
    case Classification::Bounded:
        return "Bounded";
    case Classification::Undetermined:
        break;
    }
    return "Undetermined";
}

namespace {

// Loop parameter for orbit time t (in the orbit's own, possibly shifted, clock).
double parameter_of(const PeriodicOrbit& orbit, double t)
{
    const double s0 = orbit.source->mode() == ConstraintMode::HalfAntisymmetric ? 0.5 : 0.0;
    return (t + orbit.shift) / orbit.period + s0;
}

bool near_corner(const PeriodicOrbit& orbit, double t, double reach)
{
    for (double c : orbit.corner_times) {
        if (std::abs(t - c) <= reach) {
            return true;
        }
    }
    return false;
}

} // namespace

double PeriodicOrbit::spacing() const
{
    return times.size() > 1 ? (times[times.size() - 1] - times[0]) / (times.size() - 1) : 0.0;
}

Eigen::VectorXd PeriodicOrbit::position_at(double t) const
{
    if (source) {
        return sample(*source, parameter_of(*this, t));
    }
    const int m = size();
    const double h = spacing();
    double x = (t - times[0]) / h;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, m - 2);
    const double lam = x - i;
    return ((1.0 - lam) * positions.row(i) + lam * positions.row(i + 1)).transpose();
}

Eigen::VectorXd PeriodicOrbit::velocity_at(double t) const
{
    if (source) {
        return derivative_sample(*source, parameter_of(*this, t)) / period;
    }
    const int m = size();
    const double h = spacing();
    double x = (t - times[0]) / h;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, m - 2);
    const double lam = x - i;
    return ((1.0 - lam) * velocities.row(i) + lam * velocities.row(i + 1)).transpose();
}

PeriodicOrbit PeriodicOrbit::from_samples(Eigen::VectorXd times, Eigen::MatrixXd positions,
                                          Eigen::MatrixXd velocities, double period)
{
    if (times.size() < 2 || positions.rows() != times.size() || velocities.rows() != times.size() ||
        positions.cols() != velocities.cols()) {
        throw InputError("orbit samples have inconsistent shapes");
    }
    PeriodicOrbit o;
    o.period = period;
    o.domain_lo = times[0];
    o.domain_hi = times[times.size() - 1];
    o.radius = positions.row(positions.rows() - 1).norm();
    o.times = std::move(times);
    o.positions = std::move(positions);
    o.velocities = std::move(velocities);
    o.corner_times = {o.domain_lo, o.domain_hi};
    return o;
}

double compute_period(const LoopPath& q, const Potential& p, double H)
{
    const FunctionalValue v = eval_f(q, p, H);
    if (!(v.B > 0.0)) {
        throw EnergyConditionError("mean of H - V along the loop is not positive (B = " + std::to_string(v.B) + ")");
    }
    if (!(v.A > 0.0)) {
        throw EnergyConditionError("loop has zero Dirichlet energy");
    }
    return std::sqrt(v.A / v.B);
}

double compute_period(const MinimizeReport& report, const Potential& p, double H)
{
    return compute_period(report.q_R, p, H);
}

PeriodicOrbit rescale(const LoopPath& q, double T, int m)
{
    if (!(T > 0.0)) {
        throw InputError("period must be positive");
    }
    if (m < 8) {
        throw InputError("need at least 8 orbit samples");
    }
    PeriodicOrbit o;
    o.period = T;
    o.radius = q.radius();
    o.domain_lo = -0.5 * T;
    o.domain_hi = 0.5 * T;
    o.source = q;
    o.times.resize(m);
    o.positions.resize(m, q.dim());
    o.velocities.resize(m, q.dim());

    const auto& basis = q.basis();
    const double s0 = q.mode() == ConstraintMode::HalfAntisymmetric ? 0.5 : 0.0;
    const Eigen::MatrixXd Xt = q.coefficients().transpose();
    Eigen::VectorXd row(basis.size());
    for (int i = 0; i < m; ++i) {
        const double t = (i == m - 1) ? 0.5 * T : -0.5 * T + T * static_cast<double>(i) / (m - 1);
        o.times[i] = t;
        const double s = static_cast<double>(i) / (m - 1) + s0 - 0.5;
        basis.values(s, row);
        o.positions.row(i) = (Xt * row).transpose();
        basis.derivatives(s, row);
        o.velocities.row(i) = (Xt * row).transpose() / T;
    }
    for (double c : basis.corner_parameters()) {
        o.corner_times.push_back((c - s0) * T);
    }
    return o;
}

double energy_residual(const PeriodicOrbit& orbit, const Potential& p, double H, int margin)
{
    const double reach = (margin + 0.5) * orbit.spacing();
    double worst = 0.0;
    for (int i = 0; i < orbit.size(); ++i) {
        if (near_corner(orbit, orbit.times[i], reach)) {
            continue;
        }
        const Eigen::VectorXd x = orbit.positions.row(i).transpose();
        const double e = 0.5 * orbit.velocities.row(i).squaredNorm() + p.value(x) - H;
        worst = std::max(worst, std::abs(e));
    }
    return worst;
}

double ode_residual(const PeriodicOrbit& orbit, const Potential& p, int margin)
{
    const int m = orbit.size();
    if (m < 8) {
        throw InputError("ODE residual needs at least 8 samples");
    }
    const double h = orbit.spacing();
    const double reach = (margin + 0.5) * h;
    double worst = 0.0;
    for (int i = 1; i + 1 < m; ++i) {
        if (near_corner(orbit, orbit.times[i], reach)) {
            continue;
        }
        const Eigen::VectorXd x = orbit.positions.row(i).transpose();
        const Eigen::VectorXd d2 =
            (orbit.positions.row(i + 1) - 2.0 * orbit.positions.row(i) + orbit.positions.row(i - 1)).transpose() /
            (h * h);
        worst = std::max(worst, (d2 + p.gradient(x)).norm());
    }
    return worst;
}

std::pair<double, double> time_markers(const PeriodicOrbit& orbit, double L)
{
    const int m = orbit.size();
    std::vector<double> r(m);
    for (int i = 0; i < m; ++i) {
        r[i] = orbit.positions.row(i).norm();
    }
    int first = -1;
    int last = -1;
    for (int i = 0; i < m; ++i) {
        if (r[i] <= L) {
            if (first < 0) {
                first = i;
            }
            last = i;
        }
    }
    if (first < 0) {
        throw MarkerUndefinedError("orbit never enters the ball of radius " + std::to_string(L));
    }
    const auto& t = orbit.times;
    double t_minus = t[first];
    if (first > 0) {
        const double lam = (r[first - 1] - L) / (r[first - 1] - r[first]);
        t_minus = t[first - 1] + lam * (t[first] - t[first - 1]);
    }
    double t_plus = t[last];
    if (last < m - 1) {
        const double lam = (L - r[last]) / (r[last + 1] - r[last]);
        t_plus = t[last] + lam * (t[last + 1] - t[last]);
    }
    return {t_minus, t_plus};
}

std::pair<double, double> min_radius(const PeriodicOrbit& orbit)
{
    const int m = orbit.size();
    const double tie = 1e-10 * std::max(1.0, orbit.radius);
    double best = std::numeric_limits<double>::infinity();
    double best_t = orbit.times[0];
    for (int i = 0; i + 1 < m; ++i) {
        const Eigen::VectorXd a = orbit.positions.row(i).transpose();
        const Eigen::VectorXd d = (orbit.positions.row(i + 1) - orbit.positions.row(i)).transpose();
        const double dd = d.squaredNorm();
        double lam = dd > 0.0 ? std::clamp(-a.dot(d) / dd, 0.0, 1.0) : 0.0;
        const double dist = (a + lam * d).norm();
        if (dist < best - tie) {
            best = dist;
            best_t = orbit.times[i] + lam * (orbit.times[i + 1] - orbit.times[i]);
        }
    }
    return {best_t, best};
}

PeriodicOrbit center_shift(const PeriodicOrbit& orbit)
{
    const double t_star = min_radius(orbit).first;
    PeriodicOrbit o = orbit;
    o.shift = orbit.shift + t_star;
    o.times.array() -= t_star;
    o.domain_lo -= t_star;
    o.domain_hi -= t_star;
    for (double& c : o.corner_times) {
        c -= t_star;
    }
    return o;
}

double terminal_speed(const PeriodicOrbit& orbit, const Potential& p, double H)
{
    const Eigen::VectorXd end = orbit.source ? orbit.position_at(orbit.domain_hi)
                                             : Eigen::VectorXd(orbit.positions.row(orbit.size() - 1).transpose());
    return std::sqrt(std::max(0.0, 2.0 * (H - p.value(end))));
}

Classification classify(double speed, bool radius_grew, double hyperbolic_tol)
{
    if (!radius_grew) {
        return Classification::Bounded;
    }
    return speed >= hyperbolic_tol ? Classification::Hyperbolic : Classification::Parabolic;
}

OrbitDiagnostics diagnose(const PeriodicOrbit& orbit, const Potential& p, double H, double L, int margin)
{
    OrbitDiagnostics d;
    d.energy_residual_max = energy_residual(orbit, p, H, margin);
    d.ode_residual_max = ode_residual(orbit, p, margin);
    const auto [ts, M] = min_radius(orbit);
    d.min_radius_time = ts;
    d.min_radius_value = M;
    d.marker_radius = L;
    try {
        const auto [tm, tp] = time_markers(orbit, L);
        d.t_minus = tm;
        d.t_plus = tp;
        d.markers_defined = true;
    } catch (const MarkerUndefinedError& e) {
        d.markers_defined = false;
        d.marker_message = e.what();
    }
    d.terminal_speed = terminal_speed(orbit, p, H);
    d.classification = Classification::Undetermined;
    return d;
}

} // namespace varorb
