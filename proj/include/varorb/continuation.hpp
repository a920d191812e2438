#pragma once

#include "varorb/loop.hpp"
#include "varorb/minimizer.hpp"
#include "varorb/orbit.hpp"
#include "varorb/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varorb {

struct SweepPlan {
    std::vector<double> radii = geometric(2.0, 7);
    std::optional<double> marker_radius; ///< L; empty selects it after the first converged run
    MinimizeOptions minimize;
    Profile profile = Profile::Positive;
    Discretization discretization;       ///< base discretization (K0, n/K, m/K ratios)
    double harmonics_per_radius = 4.0;   ///< K_R = max(K0, ceil(c R))
    InitialProfile seed_profile = InitialProfile::FirstHarmonic;
    std::optional<Eigen::VectorXd> direction; ///< default e_1
    bool independent = false;            ///< cold starts, runs executed concurrently
    int margin = 2;
    double hyperbolic_tol = 1e-3;
    double escape_allowance = 0.05;      ///< pass when slack >= -allowance * RHS
    double speed_tolerance = 0.02;       ///< relative to sqrt(2H)
    double compact_floor = 1e-4;         ///< window differences below this are treated as converged
    double radius_floor = 1e-6;          ///< min radii below radius_floor * L count as zero
    int window_points = 401;

    static std::vector<double> geometric(double R0, int count);

    /// Throws ParameterError on an invalid plan.
    void validate() const;
};

struct EscapeCheck {
    bool evaluated = false;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double potential_bound = 0.0; ///< max |V| along the orbit (negative profile only)
    std::string reason;           ///< why the check was skipped
};

struct SweepRecord {
    double R = 0.0;
    int harmonics = 0;
    bool converged = false;
    std::string error; ///< non-empty when the run threw
    std::optional<MinimizeReport> report;
    double period = 0.0;
    std::optional<OrbitDiagnostics> diagnostics;
    std::optional<PeriodicOrbit> orbit;    ///< uncentered
    std::optional<PeriodicOrbit> centered; ///< u*(t) = u(t + t*)
    EscapeCheck escape;
    double escape_time = 0.0; ///< T/2 - t_+
    double wall_time = 0.0;   ///< seconds, not part of any deterministic output
};

struct VerdictCheck {
    bool passed = false;
    std::string detail;
};

struct HyperbolicCandidate {
    std::vector<SweepRecord> records;
    double marker_radius = 0.0;
    bool marker_auto = false;
    double tau = 0.0;
    std::vector<double> compact_convergence; ///< per consecutive converged pair
    std::vector<double> terminal_speed_trend;
    double min_radius_bound = 0.0; ///< max M_obs over converged runs
    VerdictCheck bounded_min_radius;
    VerdictCheck escape_growth;
    VerdictCheck terminal_speed;
    VerdictCheck compact;
    bool escape_all_pass = false;
    Classification verdict = Classification::Undetermined;
};

/// Runs the radius schedule. Individual failures are recorded; fewer than two
/// converged runs throws SweepFailedError.
HyperbolicCandidate run_sweep(const SweepPlan& plan, const Potential& p, double H);

/// The profile's escape-time inequality at one record, with observed quantities:
///   positive: sqrt(H - V(0)) (R - L) <= sqrt(2) H (T/2 - t_+)
///   negative: sqrt(H) (R - L)        <= sqrt(2) (H + max|V|) (T/2 - t_+)
EscapeCheck escape_bound_check(const SweepRecord& record, const SweepPlan& plan, const Potential& p, double H);

/// max over a uniform grid on [-tau, tau] of |u*_A(t) - u*_B(t)|.
/// Throws DomainError when the window leaves either orbit's domain.
double compact_window_diff(const PeriodicOrbit& a, const PeriodicOrbit& b, double tau, int points = 401);

} // namespace varorb
