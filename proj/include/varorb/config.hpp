#pragma once

#include "varorb/continuation.hpp"
#include "varorb/io.hpp"
#include "varorb/loop.hpp"
#include "varorb/minimizer.hpp"
#include "varorb/potential.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace varorb {

struct PotentialSpec {
    FamilyTag family = FamilyTag::ThreeBodyCharged;
    ThreeBodyChargedParams params{};
    std::string custom_name; ///< registered name for Custom
    double custom_value = 0.0;
};

/// One run, parsed from a schema-versioned JSON document. Layout:
///
///   { "schema": 1,
///     "potential": {"family": "ThreeBodyCharged", "alpha": "1", "beta": "-1", "rho": "1"}
///                | {"family": "Custom", "name": "zero", "value": "0"},
///     "dim": 1, "H": 2, "profile": "positive",
///     "discretization": {"K", "n", "m", "corner_mode", "quadrature", "constraint_mode"},
///     "minimize": {"max_iter", "grad_tol", "shrink", "sufficient_decrease", "initial_step",
///                  "min_step", "restart_directions", "metric", "parallel_restarts"},
///     "initial": {"profile": "first_harmonic", "direction": [1, 0, ...]},
///     "R": 8,
///     "sweep": {"radii" | ("R0", "count"), "marker_radius": "auto" | x, "harmonics_per_radius",
///               "independent", "compact_floor", "radius_floor", "speed_tolerance",
///               "escape_allowance", "window_points"},
///     "hypotheses": {"r_min", "r_max", "radial_count", "direction_count", "decay_tol"},
///     "diagnostics": {"margin", "hyperbolic_tol"},
///     "seed": 1, "output_dir": "out" }
///
/// Every section except "potential" and "H" is optional. Numbers may be given as
/// JSON numbers or decimal strings. Unknown keys are rejected.
struct RunConfig {
    PotentialSpec potential;
    int dim = 1;
    double H = 0.0;
    Profile profile = Profile::Positive;
    Discretization discretization;
    MinimizeOptions minimize;
    InitialProfile initial_profile = InitialProfile::FirstHarmonic;
    std::optional<Eigen::VectorXd> direction;
    std::optional<double> R;
    std::vector<double> radii = SweepPlan::geometric(2.0, 7);
    std::optional<double> marker_radius;
    double harmonics_per_radius = 4.0;
    bool independent = false;
    double compact_floor = 1e-4;
    double radius_floor = 1e-6;
    double speed_tolerance = 0.02;
    double escape_allowance = 0.05;
    int window_points = 401;
    SampleGrid grid;
    int margin = 2;
    double hyperbolic_tol = 1e-3;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    /// Propagates the seed into every consumer of randomness.
    void set_seed(std::uint64_t s);
};

/// Throws ConfigError naming the line (for syntax errors) or the field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Normalized echo of every effective setting.
json config_to_json(const RunConfig& cfg);

Potential build_potential(const RunConfig& cfg);
SweepPlan make_sweep_plan(const RunConfig& cfg);
Eigen::VectorXd initial_direction(const RunConfig& cfg);

enum class RunKind { Check, Minimize, Sweep };

/// Module preconditions for the requested run; throws ConfigError. A positive
/// profile with H <= V(0) fails with the message "energy below V(0)".
void validate_config(const RunConfig& cfg, RunKind kind);

} // namespace varorb
