#include "varorb/potential.hpp"

#include "varorb/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace varorb {

std::string to_string(Profile profile)
{
    return profile == Profile::Positive ? "positive" : "negative";
}

Profile profile_from_string(const std::string& name)
{
    if (name == "positive") {
        return Profile::Positive;
    }
    if (name == "negative") {
        return Profile::Negative;
    }
    throw ParameterError("unknown profile '" + name + "' (expected 'positive' or 'negative')");
}

Potential::Potential(int dim, FamilyTag family, std::string name, ValueFn value, GradFn gradient, bool radial)
    : dim_(dim), family_(family), name_(std::move(name)), value_(std::move(value)), grad_(std::move(gradient)),
      radial_(radial)
{
}

Potential Potential::three_body(const ThreeBodyChargedParams& params, int dim)
{
    if (dim < 1) {
        throw ParameterError("potential dimension must be positive");
    }
    if (!(params.alpha > 0.0 && params.alpha < 2.0)) {
        throw ParameterError("three-body exponent alpha must lie in (0, 2)");
    }
    if (!(params.rho > 0.0) || !std::isfinite(params.rho)) {
        throw ParameterError("three-body separation rho must be positive");
    }
    if (!std::isfinite(params.beta)) {
        throw ParameterError("three-body strength beta must be finite");
    }

    const double alpha = params.alpha;
    const double beta = params.beta;
    const double rho2 = params.rho * params.rho;

    auto value = [=](const Eigen::Ref<const Eigen::VectorXd>& x) {
        return -beta * std::pow(x.squaredNorm() + rho2, -0.5 * alpha);
    };
    auto grad = [=](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) {
        out = (alpha * beta * std::pow(x.squaredNorm() + rho2, -0.5 * (alpha + 2.0))) * x;
    };

    std::ostringstream name;
    name << "three_body_charged(alpha=" << alpha << ", beta=" << beta << ", rho=" << params.rho << ")";
    Potential p(dim, FamilyTag::ThreeBodyCharged, name.str(), value, grad, true);
    p.params_ = params;
    return p;
}

Potential Potential::custom(int dim, std::string name, ValueFn value, GradFn gradient)
{
    if (dim < 1) {
        throw ParameterError("potential dimension must be positive");
    }
    if (!value || !gradient) {
        throw ParameterError("custom potential '" + name + "' must supply both value and gradient");
    }
    return Potential(dim, FamilyTag::Custom, std::move(name), std::move(value), std::move(gradient), false);
}

void Potential::check_dim(Eigen::Index n) const
{
    if (n != dim_) {
        std::ostringstream msg;
        msg << "point has dimension " << n << ", potential expects " << dim_;
        throw InputError(msg.str());
    }
}

double Potential::value(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    check_dim(x.size());
    return value_(x);
}

Eigen::VectorXd Potential::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    check_dim(x.size());
    Eigen::VectorXd out(dim_);
    grad_(x, out);
    return out;
}

void Potential::gradient(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const
{
    check_dim(x.size());
    check_dim(out.size());
    grad_(x, out);
}

double Potential::value_at_origin() const
{
    return value_(Eigen::VectorXd::Zero(dim_));
}

Potential zero_potential(int dim)
{
    Potential p = Potential::custom(
        dim, "zero", [](const Eigen::Ref<const Eigen::VectorXd>&) { return 0.0; },
        [](const Eigen::Ref<const Eigen::VectorXd>&, Eigen::Ref<Eigen::VectorXd> out) { out.setZero(); });
    return p;
}

Potential constant_potential(int dim, double c)
{
    std::ostringstream name;
    name << "constant(" << c << ")";
    return Potential::custom(
        dim, name.str(), [c](const Eigen::Ref<const Eigen::VectorXd>&) { return c; },
        [](const Eigen::Ref<const Eigen::VectorXd>&, Eigen::Ref<Eigen::VectorXd> out) { out.setZero(); });
}

Potential quadratic_potential(int dim, double s)
{
    std::ostringstream name;
    name << "quadratic(" << s << ")";
    return Potential::custom(
        dim, name.str(), [s](const Eigen::Ref<const Eigen::VectorXd>& x) { return s * x.squaredNorm(); },
        [s](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) { out = (2.0 * s) * x; });
}

Potential named_potential(const std::string& name, int dim, double value)
{
    if (name == "zero") {
        return zero_potential(dim);
    }
    if (name == "constant") {
        return constant_potential(dim, value);
    }
    if (name == "quadratic") {
        return quadratic_potential(dim, value == 0.0 ? 1.0 : value);
    }
    if (name == "harmonic_repulsive") {
        return quadratic_potential(dim, -0.5);
    }
    throw ParameterError("unknown custom potential '" + name + "'");
}

std::vector<std::string> named_potentials()
{
    return {"zero", "constant", "quadratic", "harmonic_repulsive"};
}

std::string SampleGrid::describe() const
{
    std::ostringstream out;
    out << radial_count << " geometric shells on [" << r_min << ", " << r_max << "], " << direction_count
        << " directions per shell (seed " << seed << "), decay checked on the outer decade with tolerance "
        << decay_tol << " * max(|V(0)|, 1)";
    return out.str();
}

namespace {

std::vector<Eigen::VectorXd> sample_directions(int dim, const SampleGrid& grid)
{
    std::vector<Eigen::VectorXd> dirs;
    if (dim == 1) {
        dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
        dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
        return dirs;
    }
    for (int i = 0; i < dim && static_cast<int>(dirs.size()) < grid.direction_count; ++i) {
        dirs.push_back(Eigen::VectorXd::Unit(dim, i));
    }
    std::mt19937_64 rng(grid.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(dirs.size()) < std::max(grid.direction_count, dim)) {
        Eigen::VectorXd d(dim);
        for (int i = 0; i < dim; ++i) {
            d[i] = gauss(rng);
        }
        const double n = d.norm();
        if (n > 1e-12) {
            dirs.push_back(d / n);
        }
    }
    return dirs;
}

void record(HypothesisVerdict& v, double violation, bool failed, const Eigen::VectorXd& x)
{
    if (failed) {
        v.passed = false;
    }
    if (violation > v.worst_violation || (failed && v.witness.size() == 0)) {
        v.worst_violation = std::max(v.worst_violation, violation);
        v.witness = x;
    }
}

} // namespace

HypothesisReport check_hypotheses(const Potential& p, double H, Profile profile, const SampleGrid& grid)
{
    if (grid.radial_count < 2 || !(grid.r_min > 0.0) || !(grid.r_max > grid.r_min)) {
        throw ParameterError("sample grid needs at least two shells with 0 < r_min < r_max");
    }

    HypothesisReport report;
    report.profile = profile;
    report.energy = H;
    report.sample_grid = grid.describe();
    report.symmetric_sign.name = profile == Profile::Positive ? "even_positive_bounded_by_origin" : "even_negative";
    report.virial_decay.name = "virial_decay";
    report.value_decay.name = "value_decay";

    const int dim = p.dim();
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(dim);
    const double v0 = p.value(origin);
    report.value_at_origin = v0;
    const double scale = std::abs(v0) > 0.0 ? std::abs(v0) : 1.0;
    report.decay_tolerance = grid.decay_tol * scale;

    if (profile == Profile::Negative) {
        record(report.symmetric_sign, std::max(0.0, v0), !(v0 < 0.0), origin);
    } else {
        record(report.symmetric_sign, std::max(0.0, -v0), !(v0 > 0.0), origin);
    }

    const auto dirs = sample_directions(dim, grid);
    const double log_min = std::log(grid.r_min);
    const double log_max = std::log(grid.r_max);
    const double outer = grid.r_max / 10.0;
    Eigen::VectorXd g(dim);

    for (int k = 0; k < grid.radial_count; ++k) {
        const double r = std::exp(log_min + (log_max - log_min) * k / (grid.radial_count - 1));
        for (const auto& d : dirs) {
            const Eigen::VectorXd x = r * d;
            const double v = p.value(x);
            const double v_mirror = p.value(-x);

            const double asym = std::abs(v - v_mirror);
            const bool asym_failed = asym > 1e-12 * (1.0 + std::abs(v));
            record(report.symmetric_sign, asym, asym_failed, x);

            if (profile == Profile::Positive) {
                record(report.symmetric_sign, std::max(0.0, -v), !(v > 0.0), x);
                record(report.symmetric_sign, std::max(0.0, v - v0), v > v0, x);
            } else {
                record(report.symmetric_sign, std::max(0.0, v), !(v < 0.0), x);
            }

            if (r >= outer) {
                p.gradient(x, g);
                const double virial = std::abs(x.dot(g));
                record(report.virial_decay, virial, !(virial <= report.decay_tolerance), x);
                const double mag = std::abs(v);
                record(report.value_decay, mag, !(mag <= report.decay_tolerance), x);
            }
        }
    }

    if (profile == Profile::Positive) {
        report.energy_ok = H > v0;
        if (!report.energy_ok) {
            report.energy_message = "energy below V(0)";
        }
    } else {
        report.energy_ok = H > 0.0;
        if (!report.energy_ok) {
            report.energy_message = "energy not positive";
        }
    }
    return report;
}

} // namespace varorb
