#include "pdiss/quantum.hpp"

#include "pdiss/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <set>

namespace pdiss::quantum {

HilbertSpace::HilbertSpace(std::vector<ModeSpec> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw InvalidArgument("HilbertSpace: at least one mode required");
    std::set<std::string> seen;
    for (const auto& m : modes_) {
        if (m.dim < 2) throw InvalidArgument("HilbertSpace: mode '" + m.label + "' has dim < 2");
        if (!seen.insert(m.label).second) {
            throw InvalidArgument("HilbertSpace: duplicate mode label '" + m.label + "'");
        }
        total_dim_ *= m.dim;
    }
}

bool HilbertSpace::has_mode(const std::string& label) const {
    return std::any_of(modes_.begin(), modes_.end(), [&](const ModeSpec& m) { return m.label == label; });
}

std::size_t HilbertSpace::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].label == label) return i;
    }
    throw InvalidArgument("unknown mode label '" + label + "'");
}

SpacePtr make_space(std::vector<ModeSpec> modes) {
    return std::make_shared<const HilbertSpace>(std::move(modes));
}

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* context) {
    if (!(a == b)) throw InvalidArgument(std::string(context) + ": operands live on different spaces");
}

// ---------------------------------------------------------------------------

Operator::Operator(SpacePtr space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (!space_) throw InvalidArgument("Operator: null space");
    const auto n = static_cast<Eigen::Index>(space_->total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw InvalidArgument("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + ", space dim is " + std::to_string(n));
    }
}

Operator Operator::zero(SpacePtr space) {
    const auto n = static_cast<Eigen::Index>(space->total_dim());
    return Operator(std::move(space), Matrix::Zero(n, n));
}

Operator Operator::identity(SpacePtr space) {
    const auto n = static_cast<Eigen::Index>(space->total_dim());
    return Operator(std::move(space), Matrix::Identity(n, n));
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint()); }

double Operator::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

bool Operator::is_hermitian(double tol) const { return hermiticity_error() <= tol; }

bool Operator::is_unitary(double tol) const {
    const Matrix id = Matrix::Identity(matrix_.rows(), matrix_.cols());
    return (matrix_.adjoint() * matrix_ - id).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& other) {
    require_same_space(*space_, *other.space_, "operator+");
    matrix_ += other.matrix_;
    return *this;
}

Operator& Operator::operator-=(const Operator& other) {
    require_same_space(*space_, *other.space_, "operator-");
    matrix_ -= other.matrix_;
    return *this;
}

Operator& Operator::operator*=(Complex scale) {
    matrix_ *= scale;
    return *this;
}

Operator operator+(Operator a, const Operator& b) { return a += b; }
Operator operator-(Operator a, const Operator& b) { return a -= b; }

Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(*a.space(), *b.space(), "operator*");
    return Operator(a.space(), a.matrix() * b.matrix());
}

Operator operator*(Complex s, Operator a) { return a *= s; }
Operator operator*(Operator a, Complex s) { return a *= s; }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------

RealVector hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

DensityMatrix::DensityMatrix(SpacePtr space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (!space_) throw InvalidArgument("DensityMatrix: null space");
    const auto n = static_cast<Eigen::Index>(space_->total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw InvalidArgument("DensityMatrix: dimension does not match space");
    }
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermiticityTol) {
        throw InvalidArgument("DensityMatrix: not hermitian (max deviation " + std::to_string(herm) + ")");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
        throw InvalidArgument("DensityMatrix: trace " + std::to_string(tr.real()) + " differs from 1");
    }
    const double min_eig = hermitian_eigenvalues(matrix_).minCoeff();
    if (min_eig < -kPositivityTol) {
        throw InvalidArgument("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
    }
}

DensityMatrix DensityMatrix::pure(SpacePtr space, const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (norm == 0.0) throw InvalidArgument("DensityMatrix::pure: zero vector");
    const Eigen::VectorXcd v = psi / norm;
    return DensityMatrix(std::move(space), v * v.adjoint());
}

DensityMatrix DensityMatrix::basis_state(SpacePtr space, const std::vector<std::size_t>& levels) {
    const auto& modes = space->modes();
    if (levels.size() != modes.size()) {
        throw InvalidArgument("basis_state: expected one level per mode");
    }
    std::size_t index = 0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (levels[k] >= modes[k].dim) {
            throw InvalidArgument("basis_state: level out of range for mode '" + modes[k].label + "'");
        }
        index = index * modes[k].dim + levels[k];
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space->total_dim()));
    psi(static_cast<Eigen::Index>(index)) = 1.0;
    return pure(std::move(space), psi);
}

// ---------------------------------------------------------------------------

Matrix local_lowering(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
    return m;
}

Operator embed(SpacePtr space, const std::string& mode_label, const Matrix& local) {
    const std::size_t target = space->index_of(mode_label);
    const auto& modes = space->modes();
    const auto local_dim = static_cast<Eigen::Index>(modes[target].dim);
    if (local.rows() != local_dim || local.cols() != local_dim) {
        throw InvalidArgument("embed: local matrix for '" + mode_label + "' must be " + std::to_string(local_dim) +
                              "x" + std::to_string(local_dim));
    }
    Matrix result = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const auto d = static_cast<Eigen::Index>(modes[k].dim);
        const Matrix factor = (k == target) ? local : Matrix::Identity(d, d);
        Matrix next = Eigen::kroneckerProduct(result, factor).eval();
        result = std::move(next);
    }
    return Operator(std::move(space), std::move(result));
}

Operator annihilation(SpacePtr space, const std::string& mode_label) {
    const ModeSpec& m = space->mode(mode_label);
    if (m.kind != ModeKind::bosonic) {
        throw InvalidArgument("annihilation: mode '" + mode_label + "' is not bosonic");
    }
    return embed(std::move(space), mode_label, local_lowering(m.dim));
}

Operator creation(SpacePtr space, const std::string& mode_label) {
    return annihilation(std::move(space), mode_label).adjoint();
}

Operator number(SpacePtr space, const std::string& mode_label) {
    const ModeSpec& m = space->mode(mode_label);
    const auto n = static_cast<Eigen::Index>(m.dim);
    Matrix local = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) local(k, k) = static_cast<double>(k);
    return embed(std::move(space), mode_label, local);
}

Operator few_level_op(SpacePtr space, const std::string& mode_label, FewLevelOp which) {
    const ModeSpec& m = space->mode(mode_label);
    if (m.kind != ModeKind::few_level) {
        throw InvalidArgument("few_level_op: mode '" + mode_label + "' is not a few-level mode");
    }
    const auto n = static_cast<Eigen::Index>(m.dim);
    const Matrix lower = local_lowering(m.dim);
    Matrix local;
    switch (which) {
        case FewLevelOp::lower: local = lower; break;
        case FewLevelOp::raise: local = lower.adjoint(); break;
        case FewLevelOp::number: local = lower.adjoint() * lower; break;
        case FewLevelOp::sigma_z:
            // 1 - 2n: diag(+1, -1) for two levels; for more levels every
            // transition frequency is shifted equally by a sigma_z drive.
            local = Matrix::Identity(n, n) - 2.0 * lower.adjoint() * lower;
            break;
    }
    return embed(std::move(space), mode_label, local);
}

Complex expectation(const Matrix& rho, const Operator& op) {
    if (rho.rows() != op.matrix().rows()) throw InvalidArgument("expectation: dimension mismatch");
    // Tr(rho O) = sum_ij rho_ij O_ji
    return (rho.transpose().cwiseProduct(op.matrix())).sum();
}

Complex expectation(const DensityMatrix& state, const Operator& op) {
    require_same_space(*state.space(), *op.space(), "expectation");
    return expectation(state.matrix(), op);
}

double top_levels_population(const Matrix& rho, const HilbertSpace& space, const std::string& mode_label) {
    const std::size_t target = space.index_of(mode_label);
    const auto& modes = space.modes();
    std::size_t stride = 1;
    for (std::size_t k = target + 1; k < modes.size(); ++k) stride *= modes[k].dim;
    const std::size_t dim = modes[target].dim;
    double top = 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        const double p = rho(i, i).real();
        total += p;
        const std::size_t level = (static_cast<std::size_t>(i) / stride) % dim;
        if (level + 2 >= dim) top += p;
    }
    return total > 0.0 ? top / total : 0.0;
}

Eigen::VectorXcd coherent_amplitudes(Complex alpha, std::size_t cutoff) {
    Eigen::VectorXcd c(static_cast<Eigen::Index>(cutoff));
    Complex term = std::exp(-0.5 * std::norm(alpha));
    for (std::size_t n = 0; n < cutoff; ++n) {
        if (n > 0) term *= alpha / std::sqrt(static_cast<double>(n));
        c(static_cast<Eigen::Index>(n)) = term;
    }
    return c / c.norm();
}

}  // namespace pdiss::quantum
