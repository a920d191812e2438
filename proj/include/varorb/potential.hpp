#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace varorb {

enum class FamilyTag { ThreeBodyCharged, Custom };

/// Charged restricted three-body potential for the third mass,
///   V(x) = -beta / (|x|^2 + rho^2)^(alpha/2),
/// with beta = (m + 2 e e1) / m the effective strength and rho the
/// (frozen) distance from the centre of mass to either primary.
struct ThreeBodyChargedParams {
    double alpha = 1.0;
    double beta = -1.0;
    double rho = 0.5;
};

/// Sign regime a potential is checked against.
///   Positive: V even, 0 < V(x) <= V(0), admissible energies H > V(0).
///   Negative: V even, V(x) < 0, admissible energies H > 0.
/// Both regimes additionally require (x, grad V(x)) -> 0 and V(x) -> 0 at infinity.
enum class Profile { Positive, Negative };

std::string to_string(Profile profile);
Profile profile_from_string(const std::string& name);

/// Scalar field V on R^N together with its gradient. Immutable after
/// construction; safe to evaluate concurrently.
class Potential {
public:
    using ValueFn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;
    using GradFn = std::function<void(const Eigen::Ref<const Eigen::VectorXd>&, Eigen::Ref<Eigen::VectorXd>)>;

    /// Throws ParameterError unless alpha in (0,2), rho > 0, dim >= 1.
    static Potential three_body(const ThreeBodyChargedParams& params, int dim);

    /// User-supplied field. Both value and gradient are required.
    static Potential custom(int dim, std::string name, ValueFn value, GradFn gradient);

    int dim() const { return dim_; }
    FamilyTag family() const { return family_; }
    const std::string& name() const { return name_; }
    const ThreeBodyChargedParams& three_body_params() const { return params_; }

    /// True for families known to depend on |x| only.
    bool radially_symmetric() const { return radial_; }

    /// Throws InputError on dimension mismatch.
    double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    void gradient(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const;

    /// Unchecked fast paths used in quadrature loops.
    double value_unchecked(const Eigen::Ref<const Eigen::VectorXd>& x) const { return value_(x); }
    void gradient_unchecked(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const
    {
        grad_(x, out);
    }

    double value_at_origin() const;

private:
    Potential(int dim, FamilyTag family, std::string name, ValueFn value, GradFn gradient, bool radial);

    void check_dim(Eigen::Index n) const;

    int dim_ = 0;
    FamilyTag family_ = FamilyTag::Custom;
    std::string name_;
    ThreeBodyChargedParams params_{};
    ValueFn value_;
    GradFn grad_;
    bool radial_ = false;
};

// Built-in custom fields, also reachable by name from configuration.
Potential zero_potential(int dim);
Potential constant_potential(int dim, double c);
/// V(x) = s * |x|^2.
Potential quadratic_potential(int dim, double s);

/// Looks up a named custom potential ("zero", "constant", "quadratic",
/// "harmonic_repulsive"). `value` parameterizes "constant" (the level) and
/// "quadratic" (the coefficient). Throws ParameterError for unknown names.
Potential named_potential(const std::string& name, int dim, double value = 0.0);
std::vector<std::string> named_potentials();

/// Sampling grid used to test the structural hypotheses on a potential.
struct SampleGrid {
    double r_min = 1e-3;
    double r_max = 1e8;
    int radial_count = 97;   ///< geometric shells between r_min and r_max
    int direction_count = 16; ///< directions per shell (N >= 2); N = 1 uses +-1
    double decay_tol = 1e-3; ///< |V| <= decay_tol * max(|V(0)|, 1) on the outer decade
    std::uint64_t seed = 7;

    std::string describe() const;
};

struct HypothesisVerdict {
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;
    Eigen::VectorXd witness; ///< sample attaining the worst violation
};

struct HypothesisReport {
    Profile profile = Profile::Positive;
    HypothesisVerdict symmetric_sign; ///< evenness plus the regime's sign condition
    HypothesisVerdict virial_decay;   ///< (x, grad V(x)) -> 0
    HypothesisVerdict value_decay;    ///< V(x) -> 0
    bool energy_ok = false;
    double energy = 0.0;
    double value_at_origin = 0.0;
    std::string energy_message;
    std::string sample_grid;
    double decay_tolerance = 0.0;

    bool all_passed() const
    {
        return symmetric_sign.passed && virial_decay.passed && value_decay.passed && energy_ok;
    }
};

HypothesisReport check_hypotheses(const Potential& p, double H, Profile profile, const SampleGrid& grid = {});

} // namespace varorb
