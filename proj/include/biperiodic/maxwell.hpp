#pragma once

// Operator-level pieces of the electromagnetic problem on the layer 0 < x3 < h with the
// artificial boundary Gamma_h at the top: Calderon map, its quadratic forms, the
// divergence closure of Rayleigh coefficients, the incident trace vector and the
// orthogonality constraint for fields given mode by mode.

#include <Eigen/Dense>

#include <limits>
#include <map>
#include <vector>

#include "biperiodic/qp_core.hpp"

namespace biperiodic {

/// sum_n v_n e^{i alpha_n . x~} with nu . v_n = 0.
struct TangentialField {
    std::map<ModeIndex, Eigen::Vector3cd> coeffs;
    Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
    double k = 1;

    Eigen::Vector3d alpha_hat(const ModeIndex& n) const { return {alpha.x() + n.n1, alpha.y() + n.n2, 0.0}; }
    /// sqrt(k^2 - |alpha_n|^2); CutoffViolation within 1e-9 k of |alpha_n| = k.
    Complex beta(const ModeIndex& n) const;
    void check() const;
};

/// (i / beta_n) [k^2 v_n - (alpha^_n . v_n) alpha^_n] per order.
TangentialField calderon_apply(const TangentialField& v);

/// Same map from its definition: the outgoing single-order solution u = E e^{i(alpha_n.x~ + beta_n x3)}
/// with nu x E = v_n and div u = 0, then (nu x curl u) x nu.
Eigen::Vector3cd halfspace_curl_trace(const Eigen::Vector3cd& v_n, const ModeIndex& n, const Eigen::Vector2d& alpha,
                                      double k);

/// 4 pi^2 sum_n u_n . conj(v_n)
Complex dual_pairing(const TangentialField& u, const TangentialField& v);

struct CalderonForms {
    double re_form = 0;  ///< evanescent orders
    double im_form = 0;  ///< propagating orders, >= 0
};

CalderonForms calderon_forms(const TangentialField& v);

/// nu x grad p on Gamma_h for p with boundary coefficients p_n(h).
TangentialField tangential_gradient(const ModeCoefficients& p_h, const Eigen::Vector2d& alpha, double k);

/// 4 pi^2 k^2 sum_{|alpha_n| > k} |alpha_n|^2 |p_n(h)|^2 / |beta_n|
double gradient_trace_form(const ModeCoefficients& p_h, const Eigen::Vector2d& alpha, double k);

/// F_n^(3) = -(k theta~ + n) . F~_n / beta_n
Complex divergence_close(const Eigen::Vector2cd& f_tilde, const ModeIndex& n, const Incidence& inc);

class MaxwellIncidence {
public:
    /// p = Z (s x theta^) with s . theta^ = 0; Z = sqrt(mu0/eps0).
    static MaxwellIncidence from_magnetic(double k, double theta1, double theta2, const Eigen::Vector3cd& s,
                                          double impedance = 1);
    /// s = (theta^ x p) / Z; requires p . theta^ = 0.
    static MaxwellIncidence from_electric(double k, double theta1, double theta2, const Eigen::Vector3cd& p,
                                          double impedance = 1);

    double k() const { return k_; }
    double theta1() const { return theta1_; }
    double theta2() const { return theta2_; }
    const Eigen::Vector3d& direction() const { return dir_; }  ///< theta^, downward
    Eigen::Vector3d theta_check() const { return {dir_.x(), dir_.y(), 0.0}; }
    Eigen::Vector2d alpha() const { return k_ * Eigen::Vector2d(dir_.x(), dir_.y()); }
    const Eigen::Vector3cd& p() const { return p_; }
    const Eigen::Vector3cd& s() const { return s_; }

private:
    MaxwellIncidence(double k, double theta1, double theta2);
    double k_, theta1_, theta2_;
    Eigen::Vector3d dir_;
    Eigen::Vector3cd p_, s_;
};

/// q(k), closed form.
Eigen::Vector3cd incident_trace_vector(const MaxwellIncidence& minc, double h);
/// (curl E^in)_T - T(nu x E^in) assembled through calderon_apply.
Eigen::Vector3cd incident_trace_vector_calderon(const MaxwellIncidence& minc, double h);
/// dq/dk at fixed theta~ and polarisation.
Eigen::Vector3cd incident_trace_derivative(const MaxwellIncidence& minc, double h);

/// k^2 [1 - q0 (|beta|/|gamma|)(e^{-|gamma|h} + e^{|gamma|h}) / (e^{-|gamma|h} - e^{|gamma|h})];
/// requires 0 < q0 < 1 and |alpha_n| > k.
double maxwell_slab_determinant(double q0, double k, double abs_alpha_n, double h = 1);

/// The 3x3 system for (a_n^+, b_n^+, c_n^+) of an evanescent order at h = 1, and its h_n entry.
Eigen::Matrix3cd maxwell_slab_matrix(double q0, double k, const Eigen::Vector2d& alpha_n);
double maxwell_slab_hn(double q0, double k, double abs_alpha_n);

/// Homogeneous depth interval [lo, hi) with relative permittivity and permeability.
struct ModalLayer {
    double lo = 0;
    double hi = std::numeric_limits<double>::infinity();
    double eps_rel = 1;
    double mu_rel = 1;
};

/// amp e^{i (alpha_n . x~ + kz x3)} on one layer.
struct ModalTerm {
    ModeIndex n;
    Eigen::Vector3cd amp;
    Complex kz;
    int layer = 0;
};

/// Field on Q_inf = (0, 2pi)^2 x (0, inf) given by exponential terms per layer.
struct ModalField {
    Eigen::Vector2d alpha = Eigen::Vector2d::Zero();
    std::vector<ModalLayer> layers{ModalLayer{}};
    std::vector<ModalTerm> terms;

    Eigen::Vector3cd value(const Eigen::Vector3d& x) const;
    Eigen::Vector3cd curl(const Eigen::Vector3d& x) const;
};

struct MaxwellConstraint {
    Complex lhs;  ///< 2k int (eps/eps0) E . conj(psi)
    Complex rhs;  ///< i int (mu0/mu) [curl conj(psi) . (theta_check x E) - curl E . (theta_check x conj(psi))]
    Complex lhs_scaled;  ///< with k^2 and alpha^ = k theta_check
    Complex rhs_scaled;
    Complex residual() const { return lhs - rhs; }
};

/// Closed-form depth integrals per mode pair. Layers must tile [0, inf) with real positive
/// eps_rel, mu_rel; otherwise UnsupportedMedium.
MaxwellConstraint maxwell_constraint_residual(const ModalField& E, const ModalField& psi, double k,
                                              const Eigen::Vector2d& theta_tilde);

}  // namespace biperiodic
