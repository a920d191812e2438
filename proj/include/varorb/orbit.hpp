#pragma once

#include "varorb/functional.hpp"
#include "varorb/loop.hpp"
#include "varorb/minimizer.hpp"
#include "varorb/potential.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varorb {

enum class Classification { Hyperbolic, Parabolic, Bounded, Undetermined };

std::string to_string(Classification c);

/// Sampled T-periodic solution u(t) = q(s(t)) on [-T/2, T/2] (before centering),
///   half mode: s = (t + T/2)/T,   odd mode: s = t/T.
/// After center_shift the stored times are t - shift, i.e. u*(t) = u(t + shift).
struct PeriodicOrbit {
    double period = 0.0;
    double radius = 0.0;
    double shift = 0.0;
    double domain_lo = 0.0;
    double domain_hi = 0.0;
    Eigen::VectorXd times;     ///< m uniform samples
    Eigen::MatrixXd positions; ///< m x N
    Eigen::MatrixXd velocities;
    /// Times (in this orbit's clock) where the velocity may jump.
    std::vector<double> corner_times;
    std::optional<LoopPath> source;

    int dim() const { return static_cast<int>(positions.cols()); }
    int size() const { return static_cast<int>(times.size()); }
    double spacing() const;

    /// Exact evaluation through the source loop; linear interpolation of the samples without one.
    Eigen::VectorXd position_at(double t) const;
    Eigen::VectorXd velocity_at(double t) const;

    /// Orbit built directly from samples (uniform times); corners default to the two ends.
    static PeriodicOrbit from_samples(Eigen::VectorXd times, Eigen::MatrixXd positions, Eigen::MatrixXd velocities,
                                      double period);
};

struct OrbitDiagnostics {
    double energy_residual_max = 0.0;
    double ode_residual_max = 0.0;
    bool markers_defined = false;
    std::string marker_message;
    double marker_radius = 0.0; ///< L (or l)
    double t_minus = 0.0;
    double t_plus = 0.0;
    double min_radius_value = 0.0; ///< M_obs
    double min_radius_time = 0.0;  ///< t*
    double terminal_speed = 0.0;
    Classification classification = Classification::Undetermined;
};

/// T = sqrt(A/B). Throws EnergyConditionError when B <= 0 or the Dirichlet energy vanishes.
double compute_period(const LoopPath& q, const Potential& p, double H);
double compute_period(const MinimizeReport& report, const Potential& p, double H);

/// Samples u and u' at m uniform times covering one period.
PeriodicOrbit rescale(const LoopPath& q, double T, int m);

/// max |1/2|u'|^2 + V(u) - H| over samples farther than `margin` intervals from every corner time.
double energy_residual(const PeriodicOrbit& orbit, const Potential& p, double H, int margin = 2);

/// max |D^2 u + grad V(u)| with the centered second difference, same exclusion rule.
double ode_residual(const PeriodicOrbit& orbit, const Potential& p, int margin = 2);

/// (t_-, t_+): first and last times with |u(t)| <= L, by linear interpolation of |u|.
/// Throws MarkerUndefinedError when no sample lies inside the ball.
std::pair<double, double> time_markers(const PeriodicOrbit& orbit, double L);

/// (t*, M_obs): earliest closest approach to the origin over the piecewise-linear sample path.
std::pair<double, double> min_radius(const PeriodicOrbit& orbit);

/// Re-origins the clock at t*, so that u*(t) = u(t + t*).
PeriodicOrbit center_shift(const PeriodicOrbit& orbit);

/// sqrt(2 (H - V(u(domain end)))), clamped at zero.
double terminal_speed(const PeriodicOrbit& orbit, const Potential& p, double H);

/// Sweep-context classification; `radius_grew` is whether the endpoint radius increased along the sweep.
Classification classify(double speed, bool radius_grew, double hyperbolic_tol = 1e-3);

/// All single-orbit diagnostics; markers failing is recorded rather than thrown.
OrbitDiagnostics diagnose(const PeriodicOrbit& orbit, const Potential& p, double H, double L, int margin = 2);

} // namespace varorb
