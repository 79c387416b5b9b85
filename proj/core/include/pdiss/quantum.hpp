#pragma once

// Labeled tensor-product Hilbert spaces and dense operator algebra.
//
// Mode order is fixed when a HilbertSpace is built and every Kronecker
// product follows it: the first mode is the most significant index.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace pdiss::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

enum class ModeKind { bosonic, few_level };

struct ModeSpec {
    std::string label;
    ModeKind kind = ModeKind::bosonic;
    std::size_t dim = 2;  // Fock cutoff for bosonic modes, level count otherwise
};

inline bool operator==(const ModeSpec& a, const ModeSpec& b) {
    return a.label == b.label && a.kind == b.kind && a.dim == b.dim;
}

class HilbertSpace {
public:
    explicit HilbertSpace(std::vector<ModeSpec> modes);

    const std::vector<ModeSpec>& modes() const { return modes_; }
    std::size_t total_dim() const { return total_dim_; }
    std::size_t mode_count() const { return modes_.size(); }

    bool has_mode(const std::string& label) const;
    std::size_t index_of(const std::string& label) const;
    const ModeSpec& mode(const std::string& label) const { return modes_[index_of(label)]; }

    bool operator==(const HilbertSpace& other) const { return modes_ == other.modes_; }

private:
    std::vector<ModeSpec> modes_;
    std::size_t total_dim_ = 1;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

SpacePtr make_space(std::vector<ModeSpec> modes);

class Operator {
public:
    Operator(SpacePtr space, Matrix matrix);

    static Operator zero(SpacePtr space);
    static Operator identity(SpacePtr space);

    const SpacePtr& space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

    Operator adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;
    bool is_unitary(double tol = 1e-12) const;
    // max |M - M^dagger|
    double hermiticity_error() const;

    Operator& operator+=(const Operator& other);
    Operator& operator-=(const Operator& other);
    Operator& operator*=(Complex scale);

private:
    SpacePtr space_;
    Matrix matrix_;
};

Operator operator+(Operator a, const Operator& b);
Operator operator-(Operator a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, Operator a);
Operator operator*(Operator a, Complex s);
Operator commutator(const Operator& a, const Operator& b);

void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* context);

// Density matrix with validated physical invariants.
class DensityMatrix {
public:
    static constexpr double kHermiticityTol = 1e-10;
    static constexpr double kTraceTol = 1e-9;
    static constexpr double kPositivityTol = 1e-9;

    // Throws InvalidArgument when the matrix is not a valid state.
    DensityMatrix(SpacePtr space, Matrix matrix);

    static DensityMatrix pure(SpacePtr space, const Eigen::VectorXcd& psi);
    // Product of per-mode basis states, indexed in the space's mode order.
    static DensityMatrix basis_state(SpacePtr space, const std::vector<std::size_t>& levels);

    const SpacePtr& space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }

private:
    SpacePtr space_;
    Matrix matrix_;
};

// Eigenvalues of a hermitian matrix (ascending).
RealVector hermitian_eigenvalues(const Matrix& m);

// Lowering operator a with sqrt(n) on the first superdiagonal.
Operator annihilation(SpacePtr space, const std::string& mode_label);
Operator creation(SpacePtr space, const std::string& mode_label);
Operator number(SpacePtr space, const std::string& mode_label);

enum class FewLevelOp { raise, lower, sigma_z, number };

// For dim 2, sigma_z = diag(+1, -1) so |g> (index 0) is the +1 eigenstate.
// For dim > 2, sigma_z = 1 - 2n.
Operator few_level_op(SpacePtr space, const std::string& mode_label, FewLevelOp which);

// Identity on all other modes, Kronecker-ordered by the space's mode order.
Operator embed(SpacePtr space, const std::string& mode_label, const Matrix& local);

Complex expectation(const DensityMatrix& state, const Operator& op);
Complex expectation(const Matrix& rho, const Operator& op);

// Local (single-mode) matrices, useful for tests and model construction.
Matrix local_lowering(std::size_t dim);

// Population of the top two levels of a mode, relative to the trace.
double top_levels_population(const Matrix& rho, const HilbertSpace& space, const std::string& mode_label);

// Cutoff validity rule: the top two Fock levels must carry < 1e-6 of the total.
inline constexpr double kCutoffPopulationLimit = 1e-6;

// Coherent state |alpha> truncated to `cutoff` levels (renormalized).
Eigen::VectorXcd coherent_amplitudes(Complex alpha, std::size_t cutoff);

}  // namespace pdiss::quantum
