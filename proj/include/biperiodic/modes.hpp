#pragma once

// Numerical kernel of the assembled operator at real k: guided modes.

#include <Eigen/Dense>

#include <vector>

#include "biperiodic/helmholtz.hpp"

namespace biperiodic {

struct KernelBasis {
    /// Columns are X-orthonormal kernel vectors in the operator's layout.
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd singular_values;  ///< retained, relative to sigma_max
    double gap_sigma = 1;             ///< smallest discarded relative singular value
    double threshold = 1e-8;
    double sigma_max = 0;
    ModeSet modes{0};
    std::shared_ptr<const DepthBasis> basis;

    int dimension() const { return static_cast<int>(vectors.cols()); }
    bool empty() const { return vectors.cols() == 0; }
    DiscreteField field(int l) const { return DiscreteField{modes, basis, vectors.col(l)}; }
    /// Boundary values (v_n^+, v_n^-) of vector l.
    std::pair<Complex, Complex> tail(int l, const ModeIndex& n) const;
};

/// Right singular vectors of R^{-H} A R^{-1} with sigma < threshold * sigma_max, mapped back by R^{-1}.
KernelBasis kernel(const DiscreteOperator& op, double threshold = 1e-8);

struct EvanescenceReport {
    double max_ratio = 0;  ///< max |v_n^+-| / ||v||_X over propagating n
    ModeIndex worst{0, 0};
    bool passed = true;
};

EvanescenceReport verify_evanescent(const KernelBasis& basis, const Incidence& inc, double tol = 1e-8);

/// Propagating Rayleigh content of an arbitrary field, relative to the given norm.
EvanescenceReport propagating_content(const DiscreteField& v, const Incidence& inc, double norm, double tol = 1e-8);

/// max over basis vectors of ||R^{-H} A^H G v|| / (sigma_max ||v||_X), i.e. the adjoint in the X product.
double adjoint_kernel_check(const DiscreteOperator& op, const KernelBasis& basis);
double adjoint_residual(const DiscreteOperator& op, const Eigen::VectorXcd& v);

struct LiftedMode {
    DiscreteField interior;
    ModeCoefficients tail_plus;
    ModeCoefficients tail_minus;
    Incidence inc;

    /// phi(x) = e^{i alpha.x~} v(x) in the layer, evanescent Rayleigh tails outside.
    Complex operator()(const Eigen::Vector3d& x) const;
};

std::vector<LiftedMode> mode_lift(const KernelBasis& basis, const Incidence& inc);

}  // namespace biperiodic
