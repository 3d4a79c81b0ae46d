#pragma once

// Limiting absorption at a propagative wave vector: L(eps) is the operator assembled at
// k + i eps with theta~ held fixed, L'(0) its eps-derivative, P the X-orthogonal
// projection onto the kernel of L(0).

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

#include "biperiodic/helmholtz.hpp"
#include "biperiodic/modes.hpp"

namespace biperiodic {

/// 0.1 * 2^{-j}, j = 0..10
std::vector<double> default_eps_schedule();

struct LapScenario {
    Incidence inc;
    std::shared_ptr<const LayerDiscretization> layer;
    DiscreteOperator op;  ///< L(0)
    KernelBasis kernel;
    std::vector<double> eps_schedule = default_eps_schedule();
    bool inside_hypotheses = true;  ///< q >= sin^2(theta1) everywhere
};

LapScenario make_scenario(const Incidence& inc, const MediumModel& medium, const Discretization& disc,
                          double svd_threshold = 1e-8);

/// d/d eps of the assembled matrix at eps = 0, i.e. i dA/dk at fixed theta~.
Eigen::MatrixXcd derivative_operator(const DiscreteOperator& op);

/// f'(0): 2 cos(theta1) (1 - ikh cos(theta1)) e^{-ikh cos(theta1)} in the (0,0) top row.
Eigen::VectorXcd derivative_load(const Incidence& inc, const Discretization& disc);

/// P applied to a field: V V^H G v.
Eigen::VectorXcd project(const LapScenario& scn, const Eigen::VectorXcd& v);
/// P applied to the Riesz representer of a load vector: V V^H f.
Eigen::VectorXcd project_load(const LapScenario& scn, const Eigen::VectorXcd& f);
Eigen::MatrixXcd projector(const LapScenario& scn);

/// V^H L'(0) V, the kernel-restricted matrix of P L'(0).
Eigen::MatrixXcd restricted_derivative(const LapScenario& scn);

struct ConstrainedSolution {
    Eigen::VectorXcd v;           ///< stacked least-squares solution
    Eigen::VectorXcd v_two_step;  ///< particular solution plus kernel correction
    double operator_residual = 0;    ///< ||A v - f|| / ||f||
    double constraint_residual = 0;  ///< ||V^H (L' v - f')|| / (||L'|| ||v||)
    double two_step_agreement = 0;   ///< ||v - v_two_step||_X / ||v||_X
    double restricted_condition = 1;
};

ConstrainedSolution constrained_solve(const LapScenario& scn);

struct ConstraintValue {
    Complex unscaled;  ///< int_{Q_inf} [theta~ . grad u - ik q u] conj(phi)
    Complex k_scaled;  ///< int_{Q_inf} [alpha . grad u - ik^2 q u] conj(phi)
    double relative = 0;  ///< |unscaled| / (4 pi^2 ||u||_X ||phi||_X)
};

/// Interior by depth quadrature of the Fourier-projected integrand, exterior by the closed-form
/// evanescent tail integrals. u is the periodic part e^{-i alpha.x~} u of a total field.
ConstraintValue constraint_residual(const DiscreteField& u, const DiscreteField& phi, const Incidence& inc,
                                    const MediumModel& medium);

std::vector<ConstraintValue> constraint_residuals(const LapScenario& scn, const Eigen::VectorXcd& u);

struct LapResult {
    std::vector<double> eps;
    std::vector<Eigen::VectorXcd> v_eps;
    std::vector<double> deltas;      ///< ||v(eps) - v*||_X / ||v*||_X
    std::vector<double> conditions;  ///< sigma_max / sigma_min of the X-scaled L(eps)
    std::vector<std::vector<ConstraintValue>> eps_constraints;
    Eigen::VectorXcd v_limit_extrapolated;
    ConstrainedSolution constrained;
    double extrapolation_error = 0;  ///< ||v_extrapolated - v*||_X / ||v*||_X
    std::vector<ConstraintValue> limit_constraints;
    bool inside_hypotheses = true;

    /// Least-squares slope of log(delta) against log(eps) over schedule indices [first, last].
    double slope(int first, int last) const;
};

LapResult eps_sweep(const LapScenario& scn);

/// eps,delta,condition,constraint_1,... (modulus of the unscaled value per kernel vector).
void write_sweep_csv(const LapResult& r, const std::filesystem::path& path);

}  // namespace biperiodic
