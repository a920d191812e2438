#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace varorb {

/// Which symmetry class the loop lives in.
///   HalfAntisymmetric: q on [0,1], q(t + 1/2) = -q(t), |q(0)| = R.
///   OddAntisymmetric:  q on [-1/2,1/2], q(-t) = -q(t), |q(1/2)| = R.
enum class ConstraintMode { HalfAntisymmetric, OddAntisymmetric };

/// GaussPanels: Gauss-Legendre on each half of the parameter interval, so the
/// panels break exactly where the loop may have a velocity jump.
/// Trapezoid: uniform periodic rule.
enum class QuadratureRule { GaussPanels, Trapezoid };

enum class InitialProfile { FirstHarmonic, Zigzag };

std::string to_string(ConstraintMode mode);
std::string to_string(QuadratureRule rule);
std::string to_string(InitialProfile profile);
ConstraintMode constraint_mode_from_string(const std::string& s);
QuadratureRule quadrature_rule_from_string(const std::string& s);
InitialProfile initial_profile_from_string(const std::string& s);

struct Discretization {
    int harmonics = 32;  ///< K
    int nodes = 256;     ///< n, quadrature nodes per period
    int samples = 512;   ///< m, orbit samples
    /// Augment the trigonometric basis with the piecewise-linear corner mode,
    /// which represents the velocity jump of minimizers at the constraint points.
    bool corner_mode = true;
    QuadratureRule rule = QuadratureRule::GaussPanels;
    ConstraintMode mode = ConstraintMode::HalfAntisymmetric;

    /// Throws ParameterError: K >= 1, n >= max(8, 4K), m >= max(8, 4K), n even for panels.
    void validate() const;

    /// Same node/sample density per harmonic at a different K.
    Discretization with_harmonics(int K) const;
    /// Quadrature at twice the node count (refinement self-check).
    Discretization refined_quadrature() const;
};

/// Immutable basis tables shared by every loop with the same discretization.
///
/// Coefficient rows are ordered
///   HalfAntisymmetric: [corner], a_0, b_0, a_1, b_1, ...   (cos / sin of 2pi(2j+1)t)
///   OddAntisymmetric:  [corner], s_0, s_1, ...             (sin of pi(2j+1)t)
/// where the corner is z(t) = 1 - 4t on [0,1/2], 4t - 3 on [1/2,1] (half mode)
/// or l(t) = 2t (odd mode).
class LoopBasis {
public:
    static std::shared_ptr<const LoopBasis> make(const Discretization& disc);

    const Discretization& discretization() const { return disc_; }
    ConstraintMode mode() const { return disc_.mode; }
    int harmonics() const { return disc_.harmonics; }
    int size() const { return size_; }
    bool has_corner() const { return disc_.corner_mode; }
    int fourier_offset() const { return disc_.corner_mode ? 1 : 0; }
    /// Row carrying the endpoint correction (first cosine, or first sine in odd mode).
    int retraction_row() const { return fourier_offset(); }
    double frequency(int j) const { return freq_[j]; }

    /// Parameter where the radius constraint is imposed: 0 (half) or 1/2 (odd).
    double anchor() const;
    /// Parameter interval [lo, hi] of one period.
    double domain_lo() const;
    double domain_hi() const;
    /// Parameters (within the domain) where the corner mode has a kink.
    std::vector<double> corner_parameters() const;

    /// Basis values at the anchor: q(anchor) = e^T X.
    const Eigen::VectorXd& endpoint_row() const { return endpoint_; }

    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    /// Basis values at the quadrature nodes, n x M.
    const Eigen::MatrixXd& phi() const { return phi_; }
    /// Basis derivatives at the quadrature nodes, n x M.
    const Eigen::MatrixXd& dphi() const { return dphi_; }

    void values(double t, Eigen::Ref<Eigen::VectorXd> out) const;
    void derivatives(double t, Eigen::Ref<Eigen::VectorXd> out) const;
    void second_derivatives(double t, Eigen::Ref<Eigen::VectorXd> out) const;

    /// Dirichlet Gram matrix G_kl = int phi_k' phi_l' applied to the columns of X.
    Eigen::MatrixXd gram_apply(const Eigen::MatrixXd& X) const;
    /// G^{-1} Y via the arrow (Schur complement) structure.
    Eigen::MatrixXd gram_solve(const Eigen::MatrixXd& Y) const;
    /// Dense Gram matrix (tests, small K).
    Eigen::MatrixXd gram_dense() const;

private:
    explicit LoopBasis(const Discretization& disc);

    double wrap(double t) const;

    Discretization disc_;
    int size_ = 0;
    std::vector<double> freq_;
    Eigen::VectorXd endpoint_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd phi_;
    Eigen::MatrixXd dphi_;
    // Arrow form: [g00 c^T; c diag(d)] restricted to the corner row + Fourier rows.
    double g00_ = 0.0;
    Eigen::VectorXd coupling_;
    Eigen::VectorXd diag_;
    double schur_ = 0.0;
};

/// Discretized loop: an M x N coefficient matrix over a shared basis, plus the
/// radius it is constrained to.
class LoopPath {
public:
    LoopPath(std::shared_ptr<const LoopBasis> basis, int dim, double R);
    LoopPath(std::shared_ptr<const LoopBasis> basis, double R, Eigen::MatrixXd coefficients);

    int dim() const { return static_cast<int>(coef_.cols()); }
    double radius() const { return radius_; }
    void set_radius(double R) { radius_ = R; }
    const LoopBasis& basis() const { return *basis_; }
    const std::shared_ptr<const LoopBasis>& basis_ptr() const { return basis_; }
    const Discretization& discretization() const { return basis_->discretization(); }
    ConstraintMode mode() const { return basis_->mode(); }
    int harmonics() const { return basis_->harmonics(); }

    const Eigen::MatrixXd& coefficients() const { return coef_; }
    Eigen::MatrixXd& coefficients() { return coef_; }

    /// q at the anchor parameter (0 or 1/2).
    Eigen::VectorXd endpoint() const;

    /// Loop values at every quadrature node, n x N.
    Eigen::MatrixXd node_values() const;

private:
    std::shared_ptr<const LoopBasis> basis_;
    double radius_ = 0.0;
    Eigen::MatrixXd coef_;
};

/// Builds the initial loop R * direction * (profile) and retracts it.
/// Throws InputError for bad dimensions or a non-unit direction.
LoopPath new_loop(int dim, double R, const Discretization& disc, const Eigen::VectorXd& direction,
                  InitialProfile profile);

/// Exact evaluation; half mode extends periodically, odd mode evaluates the formula.
Eigen::VectorXd sample(const LoopPath& q, double t);
Eigen::VectorXd derivative_sample(const LoopPath& q, double t);
Eigen::VectorXd second_derivative_sample(const LoopPath& q, double t);

/// int |q'|^2 over one period, from the coefficients.
double dirichlet_energy(const LoopPath& q);

/// Adds (R q(a)/|q(a)| - q(a)) times the retraction mode so that |q(a)| = R.
/// When q(a) = 0 the fallback direction is used; without one, throws DegenerateEndpointError.
LoopPath endpoint_retract(const LoopPath& q, double R, const std::optional<Eigen::VectorXd>& fallback = std::nullopt);
void endpoint_retract_inplace(LoopPath& q, double R, const std::optional<Eigen::VectorXd>& fallback = std::nullopt);

/// Same coefficients on a basis with more (or fewer) harmonics; extra modes are zero.
LoopPath resize_harmonics(const LoopPath& q, const Discretization& disc);

} // namespace varorb
