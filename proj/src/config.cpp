#include "varorb/config.hpp"

#include "varorb/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <set>
#include <sstream>

namespace varorb {

namespace {

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            fail("", "must be an object");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json& raw(const char* key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const char* key, double fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        return to_number(raw(key), key);
    }

    double required_number(const char* key)
    {
        if (!has(key)) {
            fail(key, "is required");
        }
        return to_number(raw(key), key);
    }

    long long integer(const char* key, long long fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (v.is_number_integer()) {
            return v.get<long long>();
        }
        const double x = to_number(v, key);
        if (x != std::floor(x) || std::abs(x) > 9.0e15) {
            fail(key, "must be an integer");
        }
        return static_cast<long long>(x);
    }

    bool boolean(const char* key, bool fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_boolean()) {
            fail(key, "must be true or false");
        }
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_string()) {
            fail(key, "must be a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const char* key)
    {
        const json& v = raw(key);
        if (!v.is_array()) {
            fail(key, "must be an array");
        }
        std::vector<double> out;
        for (const auto& x : v) {
            out.push_back(to_number(x, key));
        }
        return out;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                fail(it.key(), "is not a recognized field");
            }
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        std::string field = path_;
        if (!key.empty()) {
            field += field.empty() ? key : "." + key;
        }
        throw ConfigError("config field '" + (field.empty() ? std::string("<root>") : field) + "' " + what);
    }

private:
    double to_number(const json& v, const std::string& key) const
    {
        if (v.is_number()) {
            return v.get<double>();
        }
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            errno = 0;
            char* end = nullptr;
            const double x = std::strtod(s.c_str(), &end);
            if (!s.empty() && end == s.c_str() + s.size() && errno == 0 && std::isfinite(x)) {
                return x;
            }
        }
        fail(key, "must be a finite number or decimal string");
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void wrap_parameter_errors(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

void RunConfig::set_seed(std::uint64_t s)
{
    seed = s;
    minimize.seed = s;
    grid.seed = s;
}

RunConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
            }
        }
        std::ostringstream msg;
        msg << "config is not valid JSON (line " << line << "): " << e.what();
        throw ConfigError(msg.str());
    }

    RunConfig cfg;
    Section root(doc, "");
    const long long schema = root.integer("schema", -1);
    if (schema != kSchemaVersion) {
        root.fail("schema", "must be " + std::to_string(kSchemaVersion));
    }

    if (!root.has("potential")) {
        root.fail("potential", "is required");
    }
    {
        Section pot(root.raw("potential"), "potential");
        const std::string family = pot.string("family", "ThreeBodyCharged");
        if (family == "ThreeBodyCharged") {
            cfg.potential.family = FamilyTag::ThreeBodyCharged;
            cfg.potential.params.alpha = pot.number("alpha", 1.0);
            cfg.potential.params.beta = pot.number("beta", -1.0);
            cfg.potential.params.rho = pot.number("rho", 0.5);
        } else if (family == "Custom") {
            cfg.potential.family = FamilyTag::Custom;
            cfg.potential.custom_name = pot.string("name", "");
            cfg.potential.custom_value = pot.number("value", 0.0);
            if (cfg.potential.custom_name.empty()) {
                pot.fail("name", "is required for a Custom potential");
            }
        } else {
            pot.fail("family", "must be 'ThreeBodyCharged' or 'Custom'");
        }
        pot.finish();
    }

    cfg.dim = static_cast<int>(root.integer("dim", 1));
    cfg.H = root.required_number("H");
    {
        const std::string prof = root.string("profile", "positive");
        try {
            cfg.profile = profile_from_string(prof);
        } catch (const ParameterError&) {
            root.fail("profile", "must be 'positive' or 'negative'");
        }
    }

    if (root.has("discretization")) {
        Section s(root.raw("discretization"), "discretization");
        auto& d = cfg.discretization;
        d.harmonics = static_cast<int>(s.integer("K", d.harmonics));
        d.nodes = static_cast<int>(s.integer("n", 8LL * d.harmonics));
        d.samples = static_cast<int>(s.integer("m", 16LL * d.harmonics));
        d.corner_mode = s.boolean("corner_mode", d.corner_mode);
        try {
            d.rule = quadrature_rule_from_string(s.string("quadrature", to_string(d.rule)));
        } catch (const ParameterError&) {
            s.fail("quadrature", "must be 'gauss_panels' or 'trapezoid'");
        }
        try {
            d.mode = constraint_mode_from_string(s.string("constraint_mode", to_string(d.mode)));
        } catch (const ParameterError&) {
            s.fail("constraint_mode", "must be 'half_antisymmetric' or 'odd_antisymmetric'");
        }
        s.finish();
    }

    if (root.has("minimize")) {
        Section s(root.raw("minimize"), "minimize");
        auto& m = cfg.minimize;
        m.max_iter = static_cast<int>(s.integer("max_iter", m.max_iter));
        m.grad_tol = s.number("grad_tol", m.grad_tol);
        m.shrink = s.number("shrink", m.shrink);
        m.sufficient_decrease = s.number("sufficient_decrease", m.sufficient_decrease);
        m.initial_step = s.number("initial_step", m.initial_step);
        m.min_step = s.number("min_step", m.min_step);
        m.restart_directions = static_cast<int>(s.integer("restart_directions", m.restart_directions));
        m.parallel_restarts = s.boolean("parallel_restarts", m.parallel_restarts);
        try {
            m.metric = stationarity_metric_from_string(s.string("metric", to_string(m.metric)));
        } catch (const ParameterError&) {
            s.fail("metric", "must be 'dirichlet' or 'euclidean'");
        }
        s.finish();
    }

    if (root.has("initial")) {
        Section s(root.raw("initial"), "initial");
        try {
            cfg.initial_profile = initial_profile_from_string(s.string("profile", "first_harmonic"));
        } catch (const ParameterError&) {
            s.fail("profile", "must be 'first_harmonic' or 'zigzag'");
        }
        if (s.has("direction")) {
            const auto v = s.numbers("direction");
            Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i) {
                d[static_cast<Eigen::Index>(i)] = v[i];
            }
            cfg.direction = d;
        }
        s.finish();
    }

    if (root.has("R")) {
        cfg.R = root.required_number("R");
    }

    if (root.has("sweep")) {
        Section s(root.raw("sweep"), "sweep");
        if (s.has("radii")) {
            cfg.radii = s.numbers("radii");
            if (s.has("R0") || s.has("count")) {
                s.fail("radii", "cannot be combined with R0/count");
            }
        } else {
            const double R0 = s.number("R0", 2.0);
            const long long count = s.integer("count", 7);
            if (count < 1 || count > 40) {
                s.fail("count", "must lie in [1, 40]");
            }
            cfg.radii = SweepPlan::geometric(R0, static_cast<int>(count));
        }
        if (s.has("marker_radius")) {
            const json& v = s.raw("marker_radius");
            if (!(v.is_string() && v.get<std::string>() == "auto")) {
                cfg.marker_radius = s.number("marker_radius", 0.0);
            }
        }
        cfg.harmonics_per_radius = s.number("harmonics_per_radius", cfg.harmonics_per_radius);
        cfg.independent = s.boolean("independent", cfg.independent);
        cfg.compact_floor = s.number("compact_floor", cfg.compact_floor);
        cfg.radius_floor = s.number("radius_floor", cfg.radius_floor);
        cfg.speed_tolerance = s.number("speed_tolerance", cfg.speed_tolerance);
        cfg.escape_allowance = s.number("escape_allowance", cfg.escape_allowance);
        cfg.window_points = static_cast<int>(s.integer("window_points", cfg.window_points));
        s.finish();
    }

    if (root.has("hypotheses")) {
        Section s(root.raw("hypotheses"), "hypotheses");
        auto& g = cfg.grid;
        g.r_min = s.number("r_min", g.r_min);
        g.r_max = s.number("r_max", g.r_max);
        g.radial_count = static_cast<int>(s.integer("radial_count", g.radial_count));
        g.direction_count = static_cast<int>(s.integer("direction_count", g.direction_count));
        g.decay_tol = s.number("decay_tol", g.decay_tol);
        s.finish();
    }

    if (root.has("diagnostics")) {
        Section s(root.raw("diagnostics"), "diagnostics");
        cfg.margin = static_cast<int>(s.integer("margin", cfg.margin));
        cfg.hyperbolic_tol = s.number("hyperbolic_tol", cfg.hyperbolic_tol);
        s.finish();
    }

    std::uint64_t seed = 1;
    if (root.has("seed")) {
        const json& v = root.raw("seed");
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
            seed = v.get<std::uint64_t>();
        } else if (v.is_string()) {
            const std::string s = v.get<std::string>();
            char* end = nullptr;
            errno = 0;
            seed = std::strtoull(s.c_str(), &end, 10);
            if (s.empty() || end != s.c_str() + s.size() || errno != 0 || s[0] == '-') {
                root.fail("seed", "must be an unsigned 64-bit integer");
            }
        } else {
            root.fail("seed", "must be an unsigned 64-bit integer");
        }
    }
    cfg.set_seed(seed);
    cfg.output_dir = root.string("output_dir", cfg.output_dir);
    root.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

json config_to_json(const RunConfig& cfg)
{
    json pot;
    if (cfg.potential.family == FamilyTag::ThreeBodyCharged) {
        pot = {{"family", "ThreeBodyCharged"},
               {"alpha", cfg.potential.params.alpha},
               {"beta", cfg.potential.params.beta},
               {"rho", cfg.potential.params.rho}};
    } else {
        pot = {{"family", "Custom"}, {"name", cfg.potential.custom_name}, {"value", cfg.potential.custom_value}};
    }
    const auto& d = cfg.discretization;
    const auto& m = cfg.minimize;
    json j{{"schema", kSchemaVersion},
           {"potential", pot},
           {"dim", cfg.dim},
           {"H", cfg.H},
           {"profile", to_string(cfg.profile)},
           {"discretization",
            {{"K", d.harmonics},
             {"n", d.nodes},
             {"m", d.samples},
             {"corner_mode", d.corner_mode},
             {"quadrature", to_string(d.rule)},
             {"constraint_mode", to_string(d.mode)}}},
           {"minimize",
            {{"max_iter", m.max_iter},
             {"grad_tol", m.grad_tol},
             {"shrink", m.shrink},
             {"sufficient_decrease", m.sufficient_decrease},
             {"initial_step", m.initial_step},
             {"min_step", m.min_step},
             {"restart_directions", m.restart_directions},
             {"metric", to_string(m.metric)},
             {"parallel_restarts", m.parallel_restarts}}},
           {"sweep",
            {{"radii", cfg.radii},
             {"harmonics_per_radius", cfg.harmonics_per_radius},
             {"independent", cfg.independent},
             {"compact_floor", cfg.compact_floor},
             {"radius_floor", cfg.radius_floor},
             {"speed_tolerance", cfg.speed_tolerance},
             {"escape_allowance", cfg.escape_allowance},
             {"window_points", cfg.window_points}}},
           {"hypotheses",
            {{"r_min", cfg.grid.r_min},
             {"r_max", cfg.grid.r_max},
             {"radial_count", cfg.grid.radial_count},
             {"direction_count", cfg.grid.direction_count},
             {"decay_tol", cfg.grid.decay_tol}}},
           {"diagnostics", {{"margin", cfg.margin}, {"hyperbolic_tol", cfg.hyperbolic_tol}}},
           {"seed", cfg.seed}};
    json init{{"profile", to_string(cfg.initial_profile)}};
    if (cfg.direction) {
        init["direction"] = std::vector<double>(cfg.direction->data(), cfg.direction->data() + cfg.direction->size());
    }
    j["initial"] = init;
    if (cfg.marker_radius) {
        j["sweep"]["marker_radius"] = *cfg.marker_radius;
    } else {
        j["sweep"]["marker_radius"] = "auto";
    }
    if (cfg.R) {
        j["R"] = *cfg.R;
    }
    return j;
}

Potential build_potential(const RunConfig& cfg)
{
    if (cfg.potential.family == FamilyTag::ThreeBodyCharged) {
        return Potential::three_body(cfg.potential.params, cfg.dim);
    }
    return named_potential(cfg.potential.custom_name, cfg.dim, cfg.potential.custom_value);
}

Eigen::VectorXd initial_direction(const RunConfig& cfg)
{
    if (cfg.direction) {
        return *cfg.direction;
    }
    return Eigen::VectorXd::Unit(cfg.dim, 0);
}

SweepPlan make_sweep_plan(const RunConfig& cfg)
{
    SweepPlan plan;
    plan.radii = cfg.radii;
    plan.marker_radius = cfg.marker_radius;
    plan.minimize = cfg.minimize;
    plan.profile = cfg.profile;
    plan.discretization = cfg.discretization;
    plan.harmonics_per_radius = cfg.harmonics_per_radius;
    plan.seed_profile = cfg.initial_profile;
    plan.direction = initial_direction(cfg);
    plan.independent = cfg.independent;
    plan.margin = cfg.margin;
    plan.hyperbolic_tol = cfg.hyperbolic_tol;
    plan.escape_allowance = cfg.escape_allowance;
    plan.speed_tolerance = cfg.speed_tolerance;
    plan.compact_floor = cfg.compact_floor;
    plan.radius_floor = cfg.radius_floor;
    plan.window_points = cfg.window_points;
    return plan;
}

void validate_config(const RunConfig& cfg, RunKind kind)
{
    if (cfg.dim < 1 || cfg.dim > 64) {
        throw ConfigError("config field 'dim' must lie in [1, 64]");
    }
    if (!std::isfinite(cfg.H)) {
        throw ConfigError("config field 'H' must be finite");
    }
    std::optional<Potential> p;
    wrap_parameter_errors([&] { p = build_potential(cfg); });
    if (cfg.grid.radial_count < 2 || !(cfg.grid.r_min > 0.0) || !(cfg.grid.r_max > cfg.grid.r_min) ||
        cfg.grid.direction_count < 1 || !(cfg.grid.decay_tol > 0.0)) {
        throw ConfigError("config section 'hypotheses' is inconsistent (need 0 < r_min < r_max, counts >= 1)");
    }
    if (kind == RunKind::Check) {
        return;
    }

    // Energy condition for the chosen profile.
    if (cfg.profile == Profile::Positive && !(cfg.H > p->value_at_origin())) {
        throw ConfigError("energy below V(0)");
    }
    if (cfg.profile == Profile::Negative && !(cfg.H > 0.0)) {
        throw ConfigError("energy not positive");
    }

    wrap_parameter_errors([&] {
        cfg.discretization.validate();
        cfg.minimize.validate();
    });
    if (cfg.margin < 0 || !(cfg.hyperbolic_tol > 0.0)) {
        throw ConfigError("config section 'diagnostics' needs margin >= 0 and hyperbolic_tol > 0");
    }
    const Eigen::VectorXd dir = initial_direction(cfg);
    if (dir.size() != cfg.dim || std::abs(dir.norm() - 1.0) > 1e-12) {
        throw ConfigError("config field 'initial.direction' must be a unit vector of length dim");
    }
    if (kind == RunKind::Minimize) {
        if (!cfg.R) {
            throw ConfigError("config field 'R' is required for minimize");
        }
        if (!(*cfg.R > 0.0)) {
            throw ConfigError("config field 'R' must be positive");
        }
        if (cfg.marker_radius && !(*cfg.marker_radius > 0.0)) {
            throw ConfigError("config field 'sweep.marker_radius' must be positive");
        }
        return;
    }
    wrap_parameter_errors([&] { make_sweep_plan(cfg).validate(); });
}

} // namespace varorb
