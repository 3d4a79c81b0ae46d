#pragma once

// Fourier-Galerkin discretisation of the periodic variational problem
//
//   a_k(v, psi) = int_{Q_h} [grad v . conj(grad psi) - 2ik (theta~ . grad~ v) conj(psi)
//                            - k^2 (q - sin^2 theta1) v conj(psi)]
//               - 4pi^2 sum_n i beta_n (v_n^+ conj(psi_n^+) + v_n^- conj(psi_n^-))
//
// with v = sum_n v_n(x3) e^{i n.x~}. The common factor 4pi^2 is divided out of
// every stored matrix and vector. Unknowns are nodal depth values per Fourier
// order, ordered block by block: row = ModeSet::index(n) * M + j.

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <vector>

#include "biperiodic/depth_basis.hpp"
#include "biperiodic/medium.hpp"
#include "biperiodic/qp_core.hpp"

namespace biperiodic {

struct Discretization {
    int N = 0;   ///< transverse truncation |n|_inf <= N
    int M = 32;  ///< depth points on [-h, h]
    DepthScheme depth_scheme = DepthScheme::chebyshev;

    void check() const;
    int blocks() const { return (2 * N + 1) * (2 * N + 1); }
    int unknowns() const { return blocks() * M; }
};

/// The medium projected onto the depth basis: mass matrices weighted by the
/// Fourier coefficients of the contrast q - 1.
class LayerDiscretization {
public:
    LayerDiscretization(const MediumModel& medium, const Discretization& disc);

    const Discretization& disc() const { return disc_; }
    const MediumModel& medium() const { return medium_; }
    std::shared_ptr<const DepthBasis> basis() const { return basis_; }
    const ModeSet& modes() const { return modes_; }
    const Eigen::MatrixXd& stiffness() const { return basis_->stiffness(); }
    const Eigen::MatrixXd& mass() const { return basis_->full_mass(); }

    /// sum over depth cells of (q_m - delta_{m0}) int_cell l_i l_j, for |m|_inf <= 2N.
    const Eigen::MatrixXcd& contrast(const ModeIndex& m) const;
    bool transversally_constant() const { return medium_.transversally_constant(); }

private:
    MediumModel medium_;
    Discretization disc_;
    ModeSet modes_;
    ModeSet differences_;
    std::shared_ptr<const DepthBasis> basis_;
    std::vector<Eigen::MatrixXcd> contrast_;
    Eigen::MatrixXcd zero_;
};

class DiscreteOperator {
public:
    DiscreteOperator(Eigen::MatrixXcd matrix, Incidence inc, std::shared_ptr<const LayerDiscretization> layer);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const Incidence& incidence() const { return inc_; }
    const Discretization& disc() const { return layer_->disc(); }
    const ModeSet& modes() const { return layer_->modes(); }
    const DepthBasis& basis() const { return *layer_->basis(); }
    std::shared_ptr<const LayerDiscretization> layer() const { return layer_; }
    bool block_diagonal() const { return layer_->transversally_constant(); }

    int dim() const { return static_cast<int>(matrix_.rows()); }
    int row(const ModeIndex& n, int j) const { return modes().index(n) * disc().M + j; }

    /// Gram matrix of the discrete X inner product for Fourier block b.
    const Eigen::MatrixXd& gram_block(int b) const { return gram_[static_cast<std::size_t>(b)]; }
    Eigen::MatrixXd gram() const;

private:
    Eigen::MatrixXcd matrix_;
    Incidence inc_;
    std::shared_ptr<const LayerDiscretization> layer_;
    std::vector<Eigen::MatrixXd> gram_;
};

/// Block Cholesky factor of the X Gram matrix, G = R^H R. Maps fields into
/// coordinates where the X inner product is Euclidean.
class GramFactor {
public:
    explicit GramFactor(const DiscreteOperator& op);

    Eigen::VectorXcd apply_R(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd solve_R(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd solve_RH(const Eigen::VectorXcd& v) const;
    /// R^{-H} A R^{-1}
    Eigen::MatrixXcd scale(const Eigen::MatrixXcd& A) const;
    Eigen::MatrixXcd scale_block(const Eigen::MatrixXcd& A_block, int b_row, int b_col) const;
    double norm(const Eigen::VectorXcd& v) const { return apply_R(v).norm(); }
    Complex inner(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w) const
    {
        return apply_R(w).dot(apply_R(v));  // <v, w>_X = w^H G v
    }

private:
    int M_;
    std::vector<Eigen::MatrixXcd> R_;
};

/// Discrete field v(x3) per Fourier order, nodal layout of DiscreteOperator.
struct DiscreteField {
    ModeSet modes{0};
    std::shared_ptr<const DepthBasis> basis;
    Eigen::VectorXcd values;

    int M() const { return basis->size(); }
    Eigen::VectorXcd profile(const ModeIndex& n) const { return values.segment(modes.index(n) * M(), M()); }
    Complex top(const ModeIndex& n) const { return values(modes.index(n) * M() + DepthBasis::top()); }
    Complex bottom(const ModeIndex& n) const { return values(modes.index(n) * M() + basis->bottom()); }
    Complex at(const ModeIndex& n, double x3) const { return basis->evaluate(profile(n), x3); }
};

struct RayleighData {
    ModeCoefficients u_plus;
    ModeCoefficients u_minus;
    std::map<ModeIndex, double> efficiency_plus;   ///< propagating orders only
    std::map<ModeIndex, double> efficiency_minus;
    double balance_residual = 0;

    double total_efficiency() const;
};

struct SolveOptions {
    bool check_singularity = true;
    double singular_threshold = 1e-8;  ///< relative to the largest X-scaled singular value
    double residual_tolerance = 1e-10;
};

/// Singular values of the X-scaled operator R^{-H} A R^{-1}, ascending.
Eigen::VectorXd scaled_singular_values(const DiscreteOperator& op);

DiscreteOperator assemble(const Incidence& inc, const MediumModel& medium, const Discretization& disc);
DiscreteOperator assemble(const Incidence& inc, std::shared_ptr<const LayerDiscretization> layer);

/// Load vector: -2ik cos(theta1) e^{-ikh cos(theta1)} in the (0,0) top row.
Eigen::VectorXcd rhs(const Incidence& inc, const Discretization& disc);

DiscreteField solve(const DiscreteOperator& op, const Eigen::VectorXcd& load, const SolveOptions& opts = {});

/// Wraps a raw solution vector in the operator's layout.
DiscreteField make_field(const DiscreteOperator& op, Eigen::VectorXcd values);

RayleighData rayleigh_data(const DiscreteField& v, const Incidence& inc);

/// Total field u(x) = e^{i alpha.x~} v(x) inside, Rayleigh extension (plus u^in above) outside.
Complex quasiperiodic_lift(const DiscreteField& v, const Incidence& inc, const Eigen::Vector3d& x);

}  // namespace biperiodic
