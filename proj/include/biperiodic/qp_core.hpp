#pragma once

// Quasi-periodic kernel arithmetic: the branch-cut square root, the vertical
// wavenumbers beta_n, DtN symbols and Rayleigh-series evaluation.
//
// Everything here is header-only and templated on the real scalar so that the
// same kernels serve double-precision assembly and extended-precision checks.

#include <Eigen/Core>

#include <cmath>
#include <compare>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "biperiodic/errors.hpp"

namespace biperiodic {

using Complex = std::complex<double>;

/// Square root holomorphic in C \ iR_{<=0}: arg(result) lies in (-pi/4, 3pi/4],
/// so sqrt(t) = i sqrt(|t|) for t < 0.
template <typename Real>
std::complex<Real> branch_sqrt(const std::complex<Real>& z)
{
    const Real mag = std::abs(z);
    if (mag == Real(0)) return {};
    const Real cut_tol = Real(1e-14) * mag;
    if (z.imag() < Real(0) && std::abs(z.real()) <= cut_tol) {
        throw CutProximity("branch_sqrt: argument on the cut iR_{<0}");
    }
    std::complex<Real> r = std::sqrt(z);
    // Principal root has arg in (-pi/2, pi/2]; rotate the sector (-pi/2, -pi/4].
    if (r.real() + r.imag() <= Real(0)) r = -r;
    return r;
}

/// Integer Fourier order n = (n1, n2).
struct ModeIndex {
    int n1 = 0;
    int n2 = 0;
    auto operator<=>(const ModeIndex&) const = default;
    int linf() const { return std::max(std::abs(n1), std::abs(n2)); }
};

inline ModeIndex operator-(const ModeIndex& a, const ModeIndex& b) { return {a.n1 - b.n1, a.n2 - b.n2}; }

/// The truncated lattice |n|_inf <= N, enumerated with n1 outer and n2 inner.
class ModeSet {
public:
    explicit ModeSet(int truncation = 0) : N_(truncation)
    {
        if (truncation < 0) throw DomainError("ModeSet: negative truncation");
    }

    int truncation() const { return N_; }
    int size() const { return (2 * N_ + 1) * (2 * N_ + 1); }
    bool contains(const ModeIndex& n) const { return n.linf() <= N_; }

    int index(const ModeIndex& n) const { return (n.n1 + N_) * (2 * N_ + 1) + (n.n2 + N_); }

    ModeIndex operator[](int i) const
    {
        const int w = 2 * N_ + 1;
        return {i / w - N_, i % w - N_};
    }

    std::vector<ModeIndex> indices() const
    {
        std::vector<ModeIndex> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (int i = 0; i < size(); ++i) out.push_back((*this)[i]);
        return out;
    }

private:
    int N_;
};

using ModeCoefficients = std::map<ModeIndex, Complex>;

/// Plane-wave incidence. The direction vector theta_tilde = sin(theta1)(cos theta2, sin theta2)
/// is the fixed quantity; k may be complex (k + i eps), in which case beta_n follows the
/// angle form k^2 cos^2(theta1) - 2k n.theta_tilde - |n|^2.
template <typename Real>
class BasicIncidence {
public:
    using Scalar = std::complex<Real>;
    using Vec2 = Eigen::Matrix<Real, 2, 1>;
    using CVec2 = Eigen::Matrix<Scalar, 2, 1>;

    static BasicIncidence from_angles(Scalar k, Real theta1, Real theta2, Real h)
    {
        check_common(k, h);
        if (!(std::abs(theta1) < std::numbers::pi_v<Real> / 2)) {
            throw DomainError("incidence: theta1 must lie in (-pi/2, pi/2)");
        }
        BasicIncidence inc;
        inc.k_ = k;
        inc.theta1_ = theta1;
        inc.theta2_ = theta2;
        inc.h_ = h;
        inc.angle_derived_ = true;
        inc.tilde_ = std::sin(theta1) * Vec2(std::cos(theta2), std::sin(theta2));
        inc.alpha_ = k.real() * inc.tilde_;
        return inc;
    }

    /// Direct quasi-momentum; theta_tilde := alpha / Re(k).
    static BasicIncidence from_alpha(Scalar k, const Vec2& alpha, Real h)
    {
        check_common(k, h);
        BasicIncidence inc;
        inc.k_ = k;
        inc.h_ = h;
        inc.angle_derived_ = false;
        inc.alpha_ = alpha;
        inc.tilde_ = alpha / k.real();
        const Real s = inc.tilde_.norm();
        inc.theta1_ = s <= Real(1) ? std::asin(s) : std::numeric_limits<Real>::quiet_NaN();
        inc.theta2_ = s > Real(0) ? std::atan2(alpha.y(), alpha.x()) : Real(0);
        if (inc.theta2_ < Real(0)) inc.theta2_ += 2 * std::numbers::pi_v<Real>;
        return inc;
    }

    /// Same direction, different (typically k + i eps) wavenumber.
    BasicIncidence with_k(Scalar k) const
    {
        check_common(k, h_);
        BasicIncidence inc = *this;
        inc.k_ = k;
        if (angle_derived_) inc.alpha_ = k.real() * tilde_;
        return inc;
    }

    Scalar k() const { return k_; }
    Real theta1() const { return theta1_; }
    Real theta2() const { return theta2_; }
    Real h() const { return h_; }
    bool angle_derived() const { return angle_derived_; }
    const Vec2& alpha() const { return alpha_; }
    const Vec2& theta_tilde() const { return tilde_; }
    bool real_k() const { return k_.imag() == Real(0); }

    Real sin2() const { return tilde_.squaredNorm(); }
    Real cos2() const { return Real(1) - sin2(); }
    Real cos_theta1() const { return std::sqrt(std::max(cos2(), Real(0))); }

    /// Quasi-momentum k theta_tilde (complex when k is).
    CVec2 alpha_complex() const { return k_ * tilde_.template cast<Scalar>(); }

    Real n_dot_tilde(const ModeIndex& n) const { return n.n1 * tilde_.x() + n.n2 * tilde_.y(); }

    Scalar beta_squared(const ModeIndex& n) const
    {
        const Real nn = Real(n.n1) * n.n1 + Real(n.n2) * n.n2;
        return k_ * k_ * cos2() - Real(2) * k_ * n_dot_tilde(n) - nn;
    }

    Scalar beta(const ModeIndex& n) const { return branch_sqrt(beta_squared(n)); }

    /// d beta_n / dk at fixed theta_tilde.
    Scalar dbeta_dk(const ModeIndex& n) const { return (k_ * cos2() - n_dot_tilde(n)) / beta(n); }

    /// Vertical wavenumber of the incident wave, k cos(theta1).
    Scalar incident_vertical() const { return k_ * cos_theta1(); }

    /// |n + alpha| for real quasi-momentum.
    Real alpha_norm(const ModeIndex& n) const { return Vec2(n.n1 + alpha_.x(), n.n2 + alpha_.y()).norm(); }

private:
    static void check_common(Scalar k, Real h)
    {
        if (!(k.real() > Real(0)) || k.imag() < Real(0)) {
            throw DomainError("incidence: need Re k > 0 and Im k >= 0");
        }
        if (!(h > Real(0))) throw DomainError("incidence: half-thickness must be positive");
    }

    Scalar k_{1};
    Real theta1_ = 0;
    Real theta2_ = 0;
    Real h_ = 1;
    bool angle_derived_ = true;
    Vec2 alpha_ = Vec2::Zero();
    Vec2 tilde_ = Vec2::Zero();
};

using Incidence = BasicIncidence<double>;

template <typename Real>
std::complex<Real> beta(const ModeIndex& n, const BasicIncidence<Real>& inc)
{
    return inc.beta(n);
}

inline double default_cutoff_tolerance(const Incidence& inc) { return 1e-9 * std::abs(inc.k()); }

/// beta_n over a truncated lattice. For real k no entry may be closer than the
/// cut-off tolerance to zero.
class BetaTable {
public:
    BetaTable(const Incidence& inc, int truncation, double cutoff_tolerance)
        : inc_(inc), modes_(truncation), tol_(cutoff_tolerance)
    {
        values_.reserve(static_cast<std::size_t>(modes_.size()));
        for (int i = 0; i < modes_.size(); ++i) {
            const ModeIndex n = modes_[i];
            const Complex b = inc.beta(n);
            if (inc.real_k() && std::abs(b) < tol_) {
                throw CutoffViolation("beta table: order (" + std::to_string(n.n1) + "," + std::to_string(n.n2) +
                                      ") is at cut-off");
            }
            values_.push_back(b);
        }
    }

    BetaTable(const Incidence& inc, int truncation) : BetaTable(inc, truncation, default_cutoff_tolerance(inc)) {}

    const ModeSet& modes() const { return modes_; }
    const Incidence& incidence() const { return inc_; }
    double cutoff_tolerance() const { return tol_; }
    Complex operator()(const ModeIndex& n) const { return values_.at(static_cast<std::size_t>(modes_.index(n))); }
    Complex operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

private:
    Incidence inc_;
    ModeSet modes_;
    double tol_;
    std::vector<Complex> values_;
};

/// min over |n|_inf <= N of Im beta_n(k + i eps); requires Im k > 0.
inline double min_im_beta(const Incidence& inc, int truncation)
{
    if (!(inc.k().imag() > 0)) throw DomainError("min_im_beta: requires Im k > 0");
    const ModeSet modes(truncation);
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < modes.size(); ++i) m = std::min(m, inc.beta(modes[i]).imag());
    return m;
}

struct ModeClassification {
    std::vector<ModeIndex> propagating;
    std::vector<ModeIndex> evanescent;
    std::vector<ModeIndex> cutoff_flags;
};

inline ModeClassification classify_modes(const Incidence& inc, int truncation, double tol, bool strict = false)
{
    if (!inc.real_k()) throw DomainError("classify_modes: requires real k");
    const double k = inc.k().real();
    ModeClassification out;
    const ModeSet modes(truncation);
    for (int i = 0; i < modes.size(); ++i) {
        const ModeIndex n = modes[i];
        const double r = inc.alpha_norm(n);
        if (std::abs(r - k) < tol) out.cutoff_flags.push_back(n);
        if (r < k) {
            out.propagating.push_back(n);
        } else if (r > k) {
            out.evanescent.push_back(n);
        }
    }
    if (strict && !out.cutoff_flags.empty()) {
        throw CutoffViolation("classify_modes: cut-off order present");
    }
    return out;
}

enum class Side { above, below };

/// DtN multiplier +-i beta_n of the periodic (or quasi-periodic) DtN map.
inline Complex dtn_symbol(const ModeIndex& n, Side side, const Incidence& inc)
{
    const Complex ib = Complex(0, 1) * inc.beta(n);
    return side == Side::above ? ib : -ib;
}

/// sum_n c_n exp(i alpha_n . x~ +- i beta_n (x3 -+ h)) on the requested side.
inline Complex rayleigh_eval(const ModeCoefficients& coeffs, Side side, const Incidence& inc,
                             const Eigen::Vector3d& x)
{
    const double h = inc.h();
    if (side == Side::above && x.z() < h) throw WrongSide("rayleigh_eval: x3 below the upper interface");
    if (side == Side::below && x.z() > -h) throw WrongSide("rayleigh_eval: x3 above the lower interface");
    const Complex I(0, 1);
    const auto a = inc.alpha_complex();
    Complex sum{};
    for (const auto& [n, c] : coeffs) {
        const Complex phase_t = (a.x() + double(n.n1)) * x.x() + (a.y() + double(n.n2)) * x.y();
        const Complex b = inc.beta(n);
        const Complex phase_v = side == Side::above ? b * (x.z() - h) : -b * (x.z() + h);
        sum += c * std::exp(I * (phase_t + phase_v));
    }
    return sum;
}

}  // namespace biperiodic
