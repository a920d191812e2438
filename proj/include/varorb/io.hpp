#pragma once

#include "varorb/continuation.hpp"
#include "varorb/loop.hpp"
#include "varorb/minimizer.hpp"
#include "varorb/orbit.hpp"
#include "varorb/potential.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace varorb {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

/// 17 significant digits, scientific.
std::string format_number(double x);

/// Flat loop record: {dim, K, n, R, constraint_mode, corner_mode, quadrature, coefficients (row-major, j-major)}.
json loop_to_json(const LoopPath& q);
LoopPath loop_from_json(const json& j);

json hypothesis_to_json(const HypothesisReport& r);
json diagnostics_to_json(const OrbitDiagnostics& d);
json restarts_to_json(const MinimizeReport& r);
json escape_to_json(const EscapeCheck& e);

/// Sweep summary (records, compact convergence, verdict). Excludes wall times.
json sweep_to_json(const HyperbolicCandidate& c);

/// Header t,u_1..u_N,speed,energy_residual.
void write_orbit_csv(const std::filesystem::path& path, const PeriodicOrbit& orbit, const Potential& p, double H);
/// Header iter,f,A,B,grad_norm,step.
void write_trace_csv(const std::filesystem::path& path, const MinimizeReport& report);
/// Header R,T_R,terminal_speed,M_obs,escape_time.
void write_plot_csv(const std::filesystem::path& path, const HyperbolicCandidate& c);

void write_text(const std::filesystem::path& path, const std::string& text);
/// Pretty JSON with a trailing newline; identical input gives identical bytes.
std::string dump_json(const json& j);

/// Structural check of an emitted summary ("kind": check | minimize | sweep).
/// Returns an empty string when valid, else the first problem found.
std::string validate_summary(const json& j);

} // namespace varorb
