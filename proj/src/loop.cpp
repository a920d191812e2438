#include "varorb/loop.hpp"

#include "varorb/errors.hpp"
#include "varorb/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace varorb {

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

std::string to_string(ConstraintMode mode)
{
    return mode == ConstraintMode::HalfAntisymmetric ? "half_antisymmetric" : "odd_antisymmetric";
}

std::string to_string(QuadratureRule rule)
{
    return rule == QuadratureRule::GaussPanels ? "gauss_panels" : "trapezoid";
}

std::string to_string(InitialProfile profile)
{
    return profile == InitialProfile::FirstHarmonic ? "first_harmonic" : "zigzag";
}

ConstraintMode constraint_mode_from_string(const std::string& s)
{
    if (s == "half_antisymmetric") {
        return ConstraintMode::HalfAntisymmetric;
    }
    if (s == "odd_antisymmetric") {
        return ConstraintMode::OddAntisymmetric;
    }
    throw ParameterError("unknown constraint mode '" + s + "'");
}

QuadratureRule quadrature_rule_from_string(const std::string& s)
{
    if (s == "gauss_panels") {
        return QuadratureRule::GaussPanels;
    }
    if (s == "trapezoid") {
        return QuadratureRule::Trapezoid;
    }
    throw ParameterError("unknown quadrature rule '" + s + "'");
}

InitialProfile initial_profile_from_string(const std::string& s)
{
    if (s == "first_harmonic") {
        return InitialProfile::FirstHarmonic;
    }
    if (s == "zigzag") {
        return InitialProfile::Zigzag;
    }
    throw ParameterError("unknown initial profile '" + s + "'");
}

void Discretization::validate() const
{
    std::ostringstream msg;
    if (harmonics < 1) {
        msg << "harmonics must be >= 1 (got " << harmonics << ")";
    } else if (nodes < 8 || nodes < 4 * harmonics) {
        msg << "quadrature nodes must be >= max(8, 4K) (got n=" << nodes << ", K=" << harmonics << ")";
    } else if (rule == QuadratureRule::GaussPanels && nodes % 2 != 0) {
        msg << "Gauss panels need an even node count (got " << nodes << ")";
    } else if (samples < 8 || samples < 4 * harmonics) {
        msg << "orbit samples must be >= max(8, 4K) (got m=" << samples << ", K=" << harmonics << ")";
    } else {
        return;
    }
    throw ParameterError(msg.str());
}

Discretization Discretization::with_harmonics(int K) const
{
    Discretization d = *this;
    const double node_ratio = static_cast<double>(nodes) / harmonics;
    const double sample_ratio = static_cast<double>(samples) / harmonics;
    d.harmonics = K;
    d.nodes = static_cast<int>(std::lround(node_ratio * K));
    if (d.rule == QuadratureRule::GaussPanels && d.nodes % 2 != 0) {
        ++d.nodes;
    }
    d.samples = static_cast<int>(std::lround(sample_ratio * K));
    return d;
}

Discretization Discretization::refined_quadrature() const
{
    Discretization d = *this;
    d.nodes *= 2;
    return d;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const LoopBasis> LoopBasis::make(const Discretization& disc)
{
    disc.validate();
    return std::shared_ptr<const LoopBasis>(new LoopBasis(disc));
}

LoopBasis::LoopBasis(const Discretization& disc) : disc_(disc)
{
    const int K = disc.harmonics;
    const bool half = disc.mode == ConstraintMode::HalfAntisymmetric;
    const int off = fourier_offset();
    const int nf = half ? 2 * K : K;
    size_ = off + nf;

    freq_.resize(K);
    for (int j = 0; j < K; ++j) {
        freq_[j] = (half ? 2.0 * pi : pi) * (2 * j + 1);
    }

    // Arrow-form Gram matrix.
    coupling_ = Eigen::VectorXd::Zero(nf);
    diag_.resize(nf);
    if (half) {
        for (int j = 0; j < K; ++j) {
            diag_[2 * j] = diag_[2 * j + 1] = 0.5 * freq_[j] * freq_[j];
            coupling_[2 * j] = 16.0;
        }
        g00_ = 16.0;
    } else {
        for (int j = 0; j < K; ++j) {
            diag_[j] = 0.5 * freq_[j] * freq_[j];
            coupling_[j] = (j % 2 == 0) ? 4.0 : -4.0;
        }
        g00_ = 4.0;
    }
    if (disc.corner_mode) {
        long double s = g00_;
        for (int k = 0; k < nf; ++k) {
            s -= static_cast<long double>(coupling_[k]) * coupling_[k] / diag_[k];
        }
        schur_ = static_cast<double>(s);
    }

    endpoint_.resize(size_);
    values(anchor(), endpoint_);

    // Quadrature nodes and weights over one period (weights sum to 1).
    const int n = disc.nodes;
    nodes_.resize(n);
    weights_.resize(n);
    const double lo = domain_lo();
    const double hi = domain_hi();
    if (disc.rule == QuadratureRule::GaussPanels) {
        const double mid = 0.5 * (lo + hi);
        const auto left = gauss_legendre(n / 2, lo, mid);
        const auto right = gauss_legendre(n / 2, mid, hi);
        for (int i = 0; i < n / 2; ++i) {
            nodes_[i] = left.nodes[i];
            weights_[i] = left.weights[i];
            nodes_[n / 2 + i] = right.nodes[i];
            weights_[n / 2 + i] = right.weights[i];
        }
    } else {
        for (int i = 0; i < n; ++i) {
            nodes_[i] = lo + static_cast<double>(i) / n;
            weights_[i] = 1.0 / n;
        }
    }

    phi_.resize(n, size_);
    dphi_.resize(n, size_);
    Eigen::VectorXd row(size_);
    for (int i = 0; i < n; ++i) {
        values(nodes_[i], row);
        phi_.row(i) = row.transpose();
        derivatives(nodes_[i], row);
        dphi_.row(i) = row.transpose();
    }
}

double LoopBasis::anchor() const
{
    return disc_.mode == ConstraintMode::HalfAntisymmetric ? 0.0 : 0.5;
}

double LoopBasis::domain_lo() const
{
    return disc_.mode == ConstraintMode::HalfAntisymmetric ? 0.0 : -0.5;
}

double LoopBasis::domain_hi() const
{
    return disc_.mode == ConstraintMode::HalfAntisymmetric ? 1.0 : 0.5;
}

std::vector<double> LoopBasis::corner_parameters() const
{
    if (disc_.mode == ConstraintMode::HalfAntisymmetric) {
        return {0.0, 0.5, 1.0};
    }
    return {-0.5, 0.5};
}

double LoopBasis::wrap(double t) const
{
    if (disc_.mode != ConstraintMode::HalfAntisymmetric) {
        return t;
    }
    double s = t - std::floor(t);
    if (s >= 1.0) {
        s = 0.0;
    }
    return s;
}

void LoopBasis::values(double t, Eigen::Ref<Eigen::VectorXd> out) const
{
    const int K = disc_.harmonics;
    const int off = fourier_offset();
    const double s = wrap(t);
    if (disc_.mode == ConstraintMode::HalfAntisymmetric) {
        if (off) {
            out[0] = s <= 0.5 ? 1.0 - 4.0 * s : 4.0 * s - 3.0;
        }
        for (int j = 0; j < K; ++j) {
            out[off + 2 * j] = std::cos(freq_[j] * s);
            out[off + 2 * j + 1] = std::sin(freq_[j] * s);
        }
    } else {
        if (off) {
            out[0] = 2.0 * s;
        }
        for (int j = 0; j < K; ++j) {
            out[off + j] = std::sin(freq_[j] * s);
        }
    }
}

void LoopBasis::derivatives(double t, Eigen::Ref<Eigen::VectorXd> out) const
{
    const int K = disc_.harmonics;
    const int off = fourier_offset();
    const double s = wrap(t);
    if (disc_.mode == ConstraintMode::HalfAntisymmetric) {
        if (off) {
            out[0] = s < 0.5 ? -4.0 : 4.0;
        }
        for (int j = 0; j < K; ++j) {
            const double w = freq_[j];
            out[off + 2 * j] = -w * std::sin(w * s);
            out[off + 2 * j + 1] = w * std::cos(w * s);
        }
    } else {
        if (off) {
            out[0] = 2.0;
        }
        for (int j = 0; j < K; ++j) {
            out[off + j] = freq_[j] * std::cos(freq_[j] * s);
        }
    }
}

void LoopBasis::second_derivatives(double t, Eigen::Ref<Eigen::VectorXd> out) const
{
    const int K = disc_.harmonics;
    const int off = fourier_offset();
    const double s = wrap(t);
    if (off) {
        out[0] = 0.0;
    }
    if (disc_.mode == ConstraintMode::HalfAntisymmetric) {
        for (int j = 0; j < K; ++j) {
            const double w2 = freq_[j] * freq_[j];
            out[off + 2 * j] = -w2 * std::cos(freq_[j] * s);
            out[off + 2 * j + 1] = -w2 * std::sin(freq_[j] * s);
        }
    } else {
        for (int j = 0; j < K; ++j) {
            out[off + j] = -freq_[j] * freq_[j] * std::sin(freq_[j] * s);
        }
    }
}

Eigen::MatrixXd LoopBasis::gram_apply(const Eigen::MatrixXd& X) const
{
    const int off = fourier_offset();
    const int nf = static_cast<int>(diag_.size());
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        for (int k = 0; k < nf; ++k) {
            out(off + k, c) = diag_[k] * X(off + k, c);
        }
        if (off) {
            long double acc = static_cast<long double>(g00_) * X(0, c);
            for (int k = 0; k < nf; ++k) {
                acc += static_cast<long double>(coupling_[k]) * X(off + k, c);
                out(off + k, c) += coupling_[k] * X(0, c);
            }
            out(0, c) = static_cast<double>(acc);
        }
    }
    return out;
}

Eigen::MatrixXd LoopBasis::gram_solve(const Eigen::MatrixXd& Y) const
{
    const int off = fourier_offset();
    const int nf = static_cast<int>(diag_.size());
    Eigen::MatrixXd out(Y.rows(), Y.cols());
    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        double y0 = 0.0;
        if (off) {
            long double num = Y(0, c);
            for (int k = 0; k < nf; ++k) {
                num -= static_cast<long double>(coupling_[k]) * Y(off + k, c) / diag_[k];
            }
            y0 = static_cast<double>(num / schur_);
            out(0, c) = y0;
        }
        for (int k = 0; k < nf; ++k) {
            out(off + k, c) = (Y(off + k, c) - coupling_[k] * y0) / diag_[k];
        }
    }
    return out;
}

Eigen::MatrixXd LoopBasis::gram_dense() const
{
    return gram_apply(Eigen::MatrixXd::Identity(size_, size_));
}

// ---------------------------------------------------------------------------

LoopPath::LoopPath(std::shared_ptr<const LoopBasis> basis, int dim, double R)
    : basis_(std::move(basis)), radius_(R), coef_(Eigen::MatrixXd::Zero(basis_->size(), dim))
{
    if (dim < 1) {
        throw InputError("loop dimension must be positive");
    }
}

LoopPath::LoopPath(std::shared_ptr<const LoopBasis> basis, double R, Eigen::MatrixXd coefficients)
    : basis_(std::move(basis)), radius_(R), coef_(std::move(coefficients))
{
    if (coef_.rows() != basis_->size() || coef_.cols() < 1) {
        std::ostringstream msg;
        msg << "coefficient matrix is " << coef_.rows() << "x" << coef_.cols() << ", basis expects "
            << basis_->size() << " rows";
        throw InputError(msg.str());
    }
}

Eigen::VectorXd LoopPath::endpoint() const
{
    return coef_.transpose() * basis_->endpoint_row();
}

Eigen::MatrixXd LoopPath::node_values() const
{
    return basis_->phi() * coef_;
}

LoopPath new_loop(int dim, double R, const Discretization& disc, const Eigen::VectorXd& direction,
                  InitialProfile profile)
{
    if (dim < 1) {
        throw InputError("loop dimension must be positive");
    }
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw InputError("loop radius must be positive and finite");
    }
    if (direction.size() != dim) {
        throw InputError("direction has the wrong dimension");
    }
    if (std::abs(direction.norm() - 1.0) > 1e-12) {
        throw InputError("direction must be a unit vector");
    }
    try {
        disc.validate();
    } catch (const ParameterError& e) {
        throw InputError(e.what());
    }

    auto basis = LoopBasis::make(disc);
    LoopPath q(basis, dim, R);
    auto& X = q.coefficients();
    const int off = basis->fourier_offset();
    const bool half = disc.mode == ConstraintMode::HalfAntisymmetric;

    if (profile == InitialProfile::FirstHarmonic) {
        X.row(basis->retraction_row()) = R * direction.transpose();
    } else if (disc.corner_mode) {
        X.row(0) = R * direction.transpose();
    } else {
        // Truncated expansion of the unit zigzag (half) or of 2t (odd).
        for (int j = 0; j < disc.harmonics; ++j) {
            const double c = 8.0 / (pi * pi * (2 * j + 1) * (2 * j + 1));
            if (half) {
                X.row(off + 2 * j) = (R * c) * direction.transpose();
            } else {
                X.row(off + j) = (R * ((j % 2 == 0) ? c : -c)) * direction.transpose();
            }
        }
    }
    endpoint_retract_inplace(q, R, direction);
    return q;
}

Eigen::VectorXd sample(const LoopPath& q, double t)
{
    Eigen::VectorXd row(q.basis().size());
    q.basis().values(t, row);
    return q.coefficients().transpose() * row;
}

Eigen::VectorXd derivative_sample(const LoopPath& q, double t)
{
    Eigen::VectorXd row(q.basis().size());
    q.basis().derivatives(t, row);
    return q.coefficients().transpose() * row;
}

Eigen::VectorXd second_derivative_sample(const LoopPath& q, double t)
{
    Eigen::VectorXd row(q.basis().size());
    q.basis().second_derivatives(t, row);
    return q.coefficients().transpose() * row;
}

double dirichlet_energy(const LoopPath& q)
{
    const Eigen::MatrixXd GX = q.basis().gram_apply(q.coefficients());
    long double acc = 0.0L;
    const auto& X = q.coefficients();
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            acc += static_cast<long double>(X(r, c)) * GX(r, c);
        }
    }
    return static_cast<double>(acc);
}

void endpoint_retract_inplace(LoopPath& q, double R, const std::optional<Eigen::VectorXd>& fallback)
{
    const Eigen::VectorXd a = q.endpoint();
    const double norm = a.norm();
    Eigen::VectorXd target;
    if (norm > 0.0) {
        target = (R / norm) * a;
    } else {
        if (!fallback || fallback->size() != a.size() || !(fallback->norm() > 0.0)) {
            throw DegenerateEndpointError("loop endpoint vanished; no direction to retract along");
        }
        target = (R / fallback->norm()) * (*fallback);
    }
    q.coefficients().row(q.basis().retraction_row()) += (target - a).transpose();
    q.set_radius(R);
}

LoopPath endpoint_retract(const LoopPath& q, double R, const std::optional<Eigen::VectorXd>& fallback)
{
    LoopPath out = q;
    endpoint_retract_inplace(out, R, fallback);
    return out;
}

LoopPath resize_harmonics(const LoopPath& q, const Discretization& disc)
{
    const auto& from = q.discretization();
    if (from.corner_mode != disc.corner_mode || from.mode != disc.mode) {
        throw ParameterError("cannot transfer coefficients between different basis layouts");
    }
    auto basis = LoopBasis::make(disc);
    LoopPath out(basis, q.dim(), q.radius());
    const int rows = std::min(basis->size(), q.basis().size());
    out.coefficients().topRows(rows) = q.coefficients().topRows(rows);
    return out;
}

} // namespace varorb
