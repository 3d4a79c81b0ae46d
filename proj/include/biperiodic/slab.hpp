#pragma once

// Closed-form results for a single constant-index layer q = q0 in |x3| < h.

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

#include "biperiodic/helmholtz.hpp"
#include "biperiodic/qp_core.hpp"

namespace biperiodic {

struct SlabParams {
    double q0 = 2;
    double h = 1;
    double k = 1;
    double abs_alpha = 0;

    void check() const;
    double inner_wavenumber() const;  ///< gamma = sqrt(k^2 q0 - |alpha|^2)
    double decay() const;             ///< sqrt(|alpha|^2 - k^2)
};

enum class Parity { even, odd };

struct DispersionRoot {
    double abs_alpha = 0;
    Parity parity = Parity::even;
    double inner_wavenumber = 0;
    double decay = 0;
};

/// even: decay cos(gamma h) - gamma sin(gamma h); odd: decay sin(gamma h) + gamma cos(gamma h).
double dispersion_residual(const SlabParams& p, Parity parity);

/// All sign-change roots in k < |alpha| < k sqrt(q0), bisected to |residual| < 1e-12.
std::vector<DispersionRoot> find_dispersion_roots(double q0, double h, double k, Parity parity, int grid = 10000);

/// Guided-mode profile in x3 (cos / sin inside, exponential tails outside), unnormalised.
double mode_profile(const DispersionRoot& root, double h, double x3);
double mode_profile_derivative(const DispersionRoot& root, double h, double x3);

/// Jumps of the profile and its x3-derivative across x3 = +h and x3 = -h.
Eigen::Vector4d interface_jumps(const DispersionRoot& root, double h);

enum class BrillouinClass { none = 0, cutoff = 1, propagative = 2, both = 3 };

class BrillouinMap {
public:
    BrillouinMap(double k, double mode_radius, int resolution);

    int resolution() const { return res_; }
    double k() const { return k_; }
    double mode_radius() const { return radius_; }
    double cell() const { return 1.0 / res_; }
    double tolerance() const { return 0.5 * std::sqrt(2.0) * cell(); }
    Eigen::Vector2d alpha(int i, int j) const;
    BrillouinClass at(int i, int j) const { return cls_[static_cast<std::size_t>(i) * res_ + j]; }
    int count(BrillouinClass c) const;

    /// alpha1,alpha2,class with class in {none, cutoff, propagative, both}.
    void write_csv(const std::filesystem::path& path) const;

private:
    friend BrillouinMap brillouin_map(double, double, int);
    double k_, radius_;
    int res_;
    std::vector<BrillouinClass> cls_;
};

/// min over |l|_inf <= 2 of ||alpha + l| - r|
double translate_distance(const Eigen::Vector2d& alpha, double r);

/// Cells of [-1/2, 1/2]^2 (centres at (i + 1/2)/res - 1/2) lying on lattice translates of the
/// circles of radius k (cut-off) and mode_radius (propagative).
BrillouinMap brillouin_map(double k, double mode_radius, int resolution = 512);

/// u_0^+- of the slab q0 by direct solution of the 4x4 continuity system.
RayleighData transfer_matrix_scattering(double q0, const Incidence& inc);

/// (e^{-2|gamma| h} - e^{2|gamma| h}) k^2 (1 - q0), requires 0 < q0 < 1 and k^2 q0 < |alpha_n|^2.
double no_mode_determinant(double q0, double k, double abs_alpha_n, double h = 1);

/// The 4x4 matching matrix for (u^+, u^-, v^+, v^-) of an evanescent order at h = 1.
Eigen::Matrix4cd scalar_matching_matrix(double q0, double k, double abs_alpha_n);

}  // namespace biperiodic
