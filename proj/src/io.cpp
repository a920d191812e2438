#include "varorb/io.hpp"

#include "varorb/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace varorb {

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

json loop_to_json(const LoopPath& q)
{
    const auto& d = q.discretization();
    json coef = json::array();
    const auto& X = q.coefficients();
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            coef.push_back(X(r, c));
        }
    }
    return json{{"dim", q.dim()},
                {"K", d.harmonics},
                {"n", d.nodes},
                {"m", d.samples},
                {"R", q.radius()},
                {"constraint_mode", to_string(d.mode)},
                {"corner_mode", d.corner_mode},
                {"quadrature", to_string(d.rule)},
                {"rows", X.rows()},
                {"coefficients", coef}};
}

LoopPath loop_from_json(const json& j)
{
    try {
        Discretization d;
        d.harmonics = j.at("K").get<int>();
        d.nodes = j.at("n").get<int>();
        d.samples = j.value("m", 16 * d.harmonics);
        d.mode = constraint_mode_from_string(j.at("constraint_mode").get<std::string>());
        d.corner_mode = j.at("corner_mode").get<bool>();
        d.rule = quadrature_rule_from_string(j.at("quadrature").get<std::string>());
        const int dim = j.at("dim").get<int>();
        const double R = j.at("R").get<double>();
        auto basis = LoopBasis::make(d);
        const auto& coef = j.at("coefficients");
        if (dim < 1 || static_cast<long>(coef.size()) != static_cast<long>(basis->size()) * dim) {
            throw InputError("loop record has the wrong number of coefficients");
        }
        Eigen::MatrixXd X(basis->size(), dim);
        for (int r = 0; r < basis->size(); ++r) {
            for (int c = 0; c < dim; ++c) {
                X(r, c) = coef.at(static_cast<std::size_t>(r) * dim + c).get<double>();
            }
        }
        return LoopPath(basis, R, X);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed loop record: ") + e.what());
    }
}

namespace {

json vector_json(const Eigen::VectorXd& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

json verdict_json(const HypothesisVerdict& v)
{
    return json{{"name", v.name},
                {"passed", v.passed},
                {"worst_violation", v.worst_violation},
                {"witness", vector_json(v.witness)}};
}

json check_json(const VerdictCheck& c)
{
    return json{{"passed", c.passed}, {"detail", c.detail}};
}

} // namespace

json hypothesis_to_json(const HypothesisReport& r)
{
    return json{{"profile", to_string(r.profile)},
                {"symmetric_sign", verdict_json(r.symmetric_sign)},
                {"virial_decay", verdict_json(r.virial_decay)},
                {"value_decay", verdict_json(r.value_decay)},
                {"energy", r.energy},
                {"value_at_origin", r.value_at_origin},
                {"energy_ok", r.energy_ok},
                {"energy_message", r.energy_message},
                {"decay_tolerance", r.decay_tolerance},
                {"sample_grid", r.sample_grid},
                {"all_passed", r.all_passed()}};
}

json diagnostics_to_json(const OrbitDiagnostics& d)
{
    json j{{"energy_residual", d.energy_residual_max},
           {"ode_residual", d.ode_residual_max},
           {"markers_defined", d.markers_defined},
           {"L", d.marker_radius},
           {"M_obs", d.min_radius_value},
           {"t_star", d.min_radius_time},
           {"terminal_speed", d.terminal_speed},
           {"classification", to_string(d.classification)}};
    if (d.markers_defined) {
        j["t_minus"] = d.t_minus;
        j["t_plus"] = d.t_plus;
    } else {
        j["t_minus"] = nullptr;
        j["t_plus"] = nullptr;
        j["marker_message"] = d.marker_message;
    }
    return j;
}

json restarts_to_json(const MinimizeReport& r)
{
    json a = json::array();
    for (const auto& o : r.restarts) {
        a.push_back(json{{"index", o.index},
                         {"f", o.f},
                         {"grad_norm", o.grad_norm},
                         {"iterations", o.iterations},
                         {"converged", o.converged},
                         {"termination", o.termination}});
    }
    return a;
}

json escape_to_json(const EscapeCheck& e)
{
    json j{{"evaluated", e.evaluated}, {"passed", e.passed}};
    if (e.evaluated) {
        j["lhs"] = e.lhs;
        j["rhs"] = e.rhs;
        j["slack"] = e.slack;
        j["potential_bound"] = e.potential_bound;
    } else {
        j["reason"] = e.reason;
    }
    return j;
}

json sweep_to_json(const HyperbolicCandidate& c)
{
    json records = json::array();
    for (const auto& r : c.records) {
        json j{{"R", r.R}, {"K", r.harmonics}, {"converged", r.converged}};
        if (!r.error.empty()) {
            j["error"] = r.error;
        }
        if (r.report) {
            j["f"] = r.report->f_final.f;
            j["A"] = r.report->f_final.A;
            j["B"] = r.report->f_final.B;
            j["grad_norm"] = r.report->grad_norm;
            j["iterations"] = r.report->iterations;
            j["termination"] = r.report->termination;
            j["best_restart"] = r.report->best_restart;
            j["restarts"] = restarts_to_json(*r.report);
        }
        if (r.converged) {
            j["T_R"] = r.period;
        }
        if (r.diagnostics) {
            j["diagnostics"] = diagnostics_to_json(*r.diagnostics);
            j["escape_time"] = r.escape_time;
            j["escape_check"] = escape_to_json(r.escape);
        }
        records.push_back(j);
    }
    return json{{"records", records},
                {"L", c.marker_radius},
                {"L_auto", c.marker_auto},
                {"tau", c.tau},
                {"compact_convergence", c.compact_convergence},
                {"terminal_speed_trend", c.terminal_speed_trend},
                {"min_radius_bound", c.min_radius_bound},
                {"checks",
                 json{{"bounded_min_radius", check_json(c.bounded_min_radius)},
                      {"escape_growth", check_json(c.escape_growth)},
                      {"terminal_speed", check_json(c.terminal_speed)},
                      {"compact_convergence", check_json(c.compact)},
                      {"escape_inequality_all", c.escape_all_pass}}},
                {"verdict", to_string(c.verdict)}};
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw ConfigError("failed writing " + path.string());
    }
}

std::string dump_json(const json& j)
{
    return j.dump(2) + "\n";
}

void write_orbit_csv(const std::filesystem::path& path, const PeriodicOrbit& orbit, const Potential& p, double H)
{
    std::string text = "t";
    for (int k = 0; k < orbit.dim(); ++k) {
        text += ",u_" + std::to_string(k + 1);
    }
    text += ",speed,energy_residual\n";
    for (int i = 0; i < orbit.size(); ++i) {
        const Eigen::VectorXd x = orbit.positions.row(i).transpose();
        const double speed = orbit.velocities.row(i).norm();
        text += format_number(orbit.times[i]);
        for (int k = 0; k < orbit.dim(); ++k) {
            text += "," + format_number(x[k]);
        }
        text += "," + format_number(speed) + "," + format_number(0.5 * speed * speed + p.value(x) - H) + "\n";
    }
    write_text(path, text);
}

void write_trace_csv(const std::filesystem::path& path, const MinimizeReport& report)
{
    std::string text = "iter,f,A,B,grad_norm,step\n";
    for (const auto& r : report.trace) {
        text += std::to_string(r.iter) + "," + format_number(r.f) + "," + format_number(r.A) + "," +
                format_number(r.B) + "," + format_number(r.grad_norm) + "," + format_number(r.step) + "\n";
    }
    write_text(path, text);
}

void write_plot_csv(const std::filesystem::path& path, const HyperbolicCandidate& c)
{
    std::string text = "R,T_R,terminal_speed,M_obs,escape_time\n";
    for (const auto& r : c.records) {
        if (!r.converged || !r.diagnostics) {
            continue;
        }
        text += format_number(r.R) + "," + format_number(r.period) + "," +
                format_number(r.diagnostics->terminal_speed) + "," + format_number(r.diagnostics->min_radius_value) +
                "," + format_number(r.escape_time) + "\n";
    }
    write_text(path, text);
}

namespace {

std::string require(const json& j, const char* key, json::value_t type, const std::string& where)
{
    if (!j.contains(key)) {
        return where + ": missing '" + key + "'";
    }
    const auto t = j.at(key).type();
    const bool numeric = type == json::value_t::number_float;
    const bool ok = numeric ? j.at(key).is_number() : (t == type || (type == json::value_t::number_integer &&
                                                                      t == json::value_t::number_unsigned));
    if (!ok) {
        return where + ": '" + key + "' has the wrong type";
    }
    return {};
}

} // namespace

std::string validate_summary(const json& j)
{
    using vt = json::value_t;
    if (!j.is_object()) {
        return "summary is not an object";
    }
    if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != kSchemaVersion) {
        return "unsupported or missing schema version";
    }
    if (auto e = require(j, "kind", vt::string, "summary"); !e.empty()) {
        return e;
    }
    if (auto e = require(j, "config", vt::object, "summary"); !e.empty()) {
        return e;
    }
    const std::string kind = j["kind"];
    if (kind == "check") {
        if (auto e = require(j, "report", vt::object, "check"); !e.empty()) {
            return e;
        }
        for (const char* k : {"symmetric_sign", "virial_decay", "value_decay"}) {
            if (auto e = require(j["report"], k, vt::object, "check.report"); !e.empty()) {
                return e;
            }
        }
        return require(j["report"], "energy_ok", vt::boolean, "check.report");
    }
    if (kind == "minimize") {
        for (const char* k : {"R", "f", "A", "B", "grad_norm"}) {
            if (auto e = require(j, k, vt::number_float, "minimize"); !e.empty()) {
                return e;
            }
        }
        for (const char* k : {"converged"}) {
            if (auto e = require(j, k, vt::boolean, "minimize"); !e.empty()) {
                return e;
            }
        }
        if (auto e = require(j, "restarts", vt::array, "minimize"); !e.empty()) {
            return e;
        }
        if (j["converged"].get<bool>()) {
            if (auto e = require(j, "T_R", vt::number_float, "minimize"); !e.empty()) {
                return e;
            }
            if (auto e = require(j, "diagnostics", vt::object, "minimize"); !e.empty()) {
                return e;
            }
            for (const char* k : {"energy_residual", "ode_residual", "M_obs", "t_star", "terminal_speed"}) {
                if (auto e = require(j["diagnostics"], k, vt::number_float, "minimize.diagnostics"); !e.empty()) {
                    return e;
                }
            }
        }
        return {};
    }
    if (kind == "sweep") {
        for (const char* k : {"records", "compact_convergence", "terminal_speed_trend"}) {
            if (auto e = require(j, k, vt::array, "sweep"); !e.empty()) {
                return e;
            }
        }
        if (auto e = require(j, "verdict", vt::string, "sweep"); !e.empty()) {
            return e;
        }
        const std::string v = j["verdict"];
        if (v != "Hyperbolic" && v != "Parabolic" && v != "Bounded" && v != "Undetermined") {
            return "sweep: unknown verdict '" + v + "'";
        }
        for (const auto& r : j["records"]) {
            if (auto e = require(r, "R", vt::number_float, "sweep.records[]"); !e.empty()) {
                return e;
            }
            if (auto e = require(r, "converged", vt::boolean, "sweep.records[]"); !e.empty()) {
                return e;
            }
        }
        return {};
    }
    return "unknown summary kind '" + kind + "'";
}

} // namespace varorb
