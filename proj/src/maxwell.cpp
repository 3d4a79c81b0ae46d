#include "biperiodic/maxwell.hpp"

#include <cmath>
#include <numbers>

namespace biperiodic {

namespace {

const Complex I(0, 1);
constexpr double four_pi2 = 4 * std::numbers::pi * std::numbers::pi;

/// Bilinear a x b; Eigen's cross conjugates complex results.
Eigen::Vector3cd cross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b)
{
    return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

Eigen::Vector3cd nu_cross(const Eigen::Vector3cd& a) { return {-a.y(), a.x(), Complex{}}; }

/// (nu x a) x nu: the tangential part.
Eigen::Vector3cd tangential(const Eigen::Vector3cd& a) { return {a.x(), a.y(), Complex{}}; }

/// int_lo^hi e^{s x} dx
Complex exp_integral(Complex s, double lo, double hi)
{
    if (std::isinf(hi)) {
        if (!(s.real() < 0)) throw DomainError("maxwell_constraint_residual: non-decaying term on the unbounded layer");
        return -std::exp(s * lo) / s;
    }
    if (std::abs(s) * (hi - lo) < 1e-8) {
        // Series keeps the small-s limit accurate.
        const Complex t = s * (hi - lo);
        return std::exp(s * lo) * (hi - lo) * (1.0 + t / 2.0 + t * t / 6.0);
    }
    return (std::exp(s * hi) - std::exp(s * lo)) / s;
}

}  // namespace

Complex TangentialField::beta(const ModeIndex& n) const
{
    const double a = alpha_hat(n).norm();
    if (std::abs(a - k) < 1e-9 * k) throw CutoffViolation("calderon: |alpha_n| = k");
    return branch_sqrt(Complex(k * k - a * a));
}

void TangentialField::check() const
{
    for (const auto& [n, v] : coeffs) {
        if (std::abs(v.z()) > 0) throw DomainError("tangential field: third component must vanish");
    }
}

TangentialField calderon_apply(const TangentialField& v)
{
    v.check();
    TangentialField out{{}, v.alpha, v.k};
    const double k2 = v.k * v.k;
    for (const auto& [n, vn] : v.coeffs) {
        const Eigen::Vector3cd a = v.alpha_hat(n).cast<Complex>();
        const Complex proj = a.transpose() * vn;
        out.coeffs[n] = (I / v.beta(n)) * (k2 * vn - proj * a);
    }
    return out;
}

Eigen::Vector3cd halfspace_curl_trace(const Eigen::Vector3cd& v_n, const ModeIndex& n, const Eigen::Vector2d& alpha,
                                      double k)
{
    const TangentialField probe{{}, alpha, k};
    const Complex b = probe.beta(n);
    const Eigen::Vector3d a = probe.alpha_hat(n);
    // nu x E = (-E2, E1, 0) = v_n
    const Complex e1 = v_n.y(), e2 = -v_n.x();
    const Complex e3 = -(a.x() * e1 + a.y() * e2) / b;
    const Eigen::Vector3cd E(e1, e2, e3);
    const Eigen::Vector3cd kappa(a.x(), a.y(), b);
    return tangential(I * cross(kappa, E));
}

Complex dual_pairing(const TangentialField& u, const TangentialField& v)
{
    Complex s{};
    for (const auto& [n, un] : u.coeffs) {
        const auto it = v.coeffs.find(n);
        if (it != v.coeffs.end()) s += it->second.dot(un);
    }
    return four_pi2 * s;
}

CalderonForms calderon_forms(const TangentialField& v)
{
    v.check();
    CalderonForms out;
    const double k2 = v.k * v.k;
    for (const auto& [n, vn] : v.coeffs) {
        const Complex b = v.beta(n);
        const Complex proj = v.alpha_hat(n).cast<Complex>().transpose() * vn;
        const double bracket = k2 * vn.squaredNorm() - std::norm(proj);
        if (v.alpha_hat(n).norm() > v.k) {
            out.re_form += bracket / std::abs(b);
        } else {
            out.im_form += bracket / b.real();
        }
    }
    out.re_form *= four_pi2;
    out.im_form *= four_pi2;
    return out;
}

TangentialField tangential_gradient(const ModeCoefficients& p_h, const Eigen::Vector2d& alpha, double k)
{
    TangentialField out{{}, alpha, k};
    for (const auto& [n, p] : p_h) {
        const Eigen::Vector3cd grad = I * p * out.alpha_hat(n).cast<Complex>();
        out.coeffs[n] = nu_cross(grad);
    }
    return out;
}

double gradient_trace_form(const ModeCoefficients& p_h, const Eigen::Vector2d& alpha, double k)
{
    const TangentialField probe{{}, alpha, k};
    double s = 0;
    for (const auto& [n, p] : p_h) {
        const double a = probe.alpha_hat(n).norm();
        if (!(a > k)) continue;
        s += a * a * std::norm(p) / std::abs(probe.beta(n));
    }
    return four_pi2 * k * k * s;
}

Complex divergence_close(const Eigen::Vector2cd& f_tilde, const ModeIndex& n, const Incidence& inc)
{
    const Complex b = inc.beta(n);
    if (std::abs(b) < default_cutoff_tolerance(inc)) throw CutoffViolation("divergence_close: beta_n = 0");
    const auto a = inc.alpha_complex();
    return -((a.x() + double(n.n1)) * f_tilde.x() + (a.y() + double(n.n2)) * f_tilde.y()) / b;
}

MaxwellIncidence::MaxwellIncidence(double k, double theta1, double theta2)
    : k_(k), theta1_(theta1), theta2_(theta2)
{
    if (!(k > 0)) throw DomainError("maxwell incidence: k must be positive");
    if (!(std::abs(theta1) < std::numbers::pi / 2)) throw DomainError("maxwell incidence: |theta1| < pi/2");
    dir_ = {std::sin(theta1) * std::cos(theta2), std::sin(theta1) * std::sin(theta2), -std::cos(theta1)};
}

MaxwellIncidence MaxwellIncidence::from_magnetic(double k, double theta1, double theta2, const Eigen::Vector3cd& s,
                                                 double impedance)
{
    MaxwellIncidence m(k, theta1, theta2);
    const Eigen::Vector3cd d = m.dir_.cast<Complex>();
    if (std::abs(Complex(s.transpose() * d)) > 1e-12 * std::max(1.0, s.norm())) {
        throw DomainError("maxwell incidence: s . theta^ must vanish");
    }
    m.s_ = s;
    m.p_ = impedance * cross(s, d);
    return m;
}

MaxwellIncidence MaxwellIncidence::from_electric(double k, double theta1, double theta2, const Eigen::Vector3cd& p,
                                                 double impedance)
{
    MaxwellIncidence m(k, theta1, theta2);
    const Eigen::Vector3cd d = m.dir_.cast<Complex>();
    if (std::abs(Complex(p.transpose() * d)) > 1e-12 * std::max(1.0, p.norm())) {
        throw DomainError("maxwell incidence: p . theta^ must vanish");
    }
    m.p_ = p;
    m.s_ = cross(d, p) / impedance;
    return m;
}

namespace {

/// q(k) e^{ikh cos} / k, independent of k at fixed direction and polarisation.
Eigen::Vector3cd trace_shape(const MaxwellIncidence& m)
{
    const double c = std::cos(m.theta1());
    const Eigen::Vector3cd d = m.direction().cast<Complex>();
    const Eigen::Vector3cd tc = m.theta_check().cast<Complex>();
    const Eigen::Vector3cd np = nu_cross(m.p());
    const Complex proj = tc.transpose() * np;
    return I * tangential(cross(d, m.p())) - (I / c) * np + (I / c) * proj * tc;
}

}  // namespace

Eigen::Vector3cd incident_trace_vector(const MaxwellIncidence& m, double h)
{
    const double c = std::cos(m.theta1());
    return m.k() * trace_shape(m) * std::exp(-I * m.k() * h * c);
}

Eigen::Vector3cd incident_trace_vector_calderon(const MaxwellIncidence& m, double h)
{
    const double k = m.k();
    const Complex phase = std::exp(I * k * m.direction().z() * h);
    // E^in = p e^{ik theta^.x}; curl E^in = ik theta^ x E^in.
    const Eigen::Vector3cd curl = I * k * cross(m.direction().cast<Complex>(), m.p()) * phase;
    TangentialField trace{{}, m.alpha(), k};
    trace.coeffs[{0, 0}] = nu_cross(m.p()) * phase;
    const TangentialField t = calderon_apply(trace);
    return tangential(curl) - t.coeffs.at({0, 0});
}

Eigen::Vector3cd incident_trace_derivative(const MaxwellIncidence& m, double h)
{
    const double c = std::cos(m.theta1());
    const Complex e = std::exp(-I * m.k() * h * c);
    return trace_shape(m) * e * (1.0 - I * m.k() * h * c);
}

double maxwell_slab_determinant(double q0, double k, double abs_alpha_n, double h)
{
    if (!(q0 > 0 && q0 < 1)) throw DomainError("maxwell_slab_determinant: requires 0 < q0 < 1");
    if (!(k > 0) || !(h > 0)) throw DomainError("maxwell_slab_determinant: requires k > 0, h > 0");
    if (!(abs_alpha_n > k)) throw DomainError("maxwell_slab_determinant: requires |alpha_n| > k");
    const double b = std::sqrt(abs_alpha_n * abs_alpha_n - k * k);
    const double g = std::sqrt(abs_alpha_n * abs_alpha_n - k * k * q0);
    const double ratio = (std::exp(-g * h) + std::exp(g * h)) / (std::exp(-g * h) - std::exp(g * h));
    return k * k * (1 - q0 * (b / g) * ratio);
}

double maxwell_slab_hn(double q0, double k, double abs_alpha_n)
{
    const double b = std::sqrt(abs_alpha_n * abs_alpha_n - k * k);
    const double g = std::sqrt(abs_alpha_n * abs_alpha_n - k * k * q0);
    return b - g * (std::exp(-g) + std::exp(g)) / (std::exp(-g) - std::exp(g));
}

Eigen::Matrix3cd maxwell_slab_matrix(double q0, double k, const Eigen::Vector2d& alpha_n)
{
    const double a = alpha_n.norm();
    const double b = std::sqrt(a * a - k * k);
    const double g = std::sqrt(a * a - k * k * q0);
    const double ratio = (std::exp(-g) + std::exp(g)) / (std::exp(-g) - std::exp(g));
    const double hn = b - g * ratio;
    const double dn = 1 - (b / g) * ratio;
    Eigen::Matrix3cd A;
    A << hn, 0.0, I * alpha_n.x() * dn,
         0.0, hn, I * alpha_n.y() * dn,
         I * alpha_n.x(), I * alpha_n.y(), -b;
    return A;
}

Eigen::Vector3cd ModalField::value(const Eigen::Vector3d& x) const
{
    Eigen::Vector3cd s = Eigen::Vector3cd::Zero();
    for (const auto& t : terms) {
        const auto& L = layers[static_cast<std::size_t>(t.layer)];
        if (x.z() < L.lo || x.z() >= L.hi) continue;
        const double ph = (alpha.x() + t.n.n1) * x.x() + (alpha.y() + t.n.n2) * x.y();
        s += t.amp * std::exp(I * (ph + t.kz * x.z()));
    }
    return s;
}

Eigen::Vector3cd ModalField::curl(const Eigen::Vector3d& x) const
{
    Eigen::Vector3cd s = Eigen::Vector3cd::Zero();
    for (const auto& t : terms) {
        const auto& L = layers[static_cast<std::size_t>(t.layer)];
        if (x.z() < L.lo || x.z() >= L.hi) continue;
        const double ph = (alpha.x() + t.n.n1) * x.x() + (alpha.y() + t.n.n2) * x.y();
        const Eigen::Vector3cd kappa(alpha.x() + t.n.n1, alpha.y() + t.n.n2, t.kz);
        s += I * cross(kappa, t.amp) * std::exp(I * (ph + t.kz * x.z()));
    }
    return s;
}

namespace {

void check_layers(const ModalField& f)
{
    if (f.layers.empty()) throw UnsupportedMedium("modal field: no layers");
    double lo = 0;
    for (const auto& L : f.layers) {
        if (L.lo != lo || !(L.hi > L.lo)) throw UnsupportedMedium("modal field: layers must tile [0, inf)");
        if (!(L.eps_rel > 0) || !(L.mu_rel > 0)) {
            throw UnsupportedMedium("modal field: eps and mu must be positive constants per layer");
        }
        lo = L.hi;
    }
    if (!std::isinf(lo)) throw UnsupportedMedium("modal field: last layer must extend to infinity");
    for (const auto& t : f.terms) {
        if (t.layer < 0 || t.layer >= static_cast<int>(f.layers.size())) {
            throw UnsupportedMedium("modal field: term refers to a missing layer");
        }
    }
}

}  // namespace

MaxwellConstraint maxwell_constraint_residual(const ModalField& E, const ModalField& psi, double k,
                                              const Eigen::Vector2d& theta_tilde)
{
    check_layers(E);
    check_layers(psi);
    if (E.layers.size() != psi.layers.size()) throw UnsupportedMedium("modal fields: layer structures differ");
    for (std::size_t l = 0; l < E.layers.size(); ++l) {
        const auto& a = E.layers[l];
        const auto& b = psi.layers[l];
        if (a.lo != b.lo || a.hi != b.hi || a.eps_rel != b.eps_rel || a.mu_rel != b.mu_rel) {
            throw UnsupportedMedium("modal fields: layer structures differ");
        }
    }
    if ((E.alpha - psi.alpha).norm() > 1e-14) throw DomainError("modal fields: different quasi-momenta");

    const Eigen::Vector3cd tc(theta_tilde.x(), theta_tilde.y(), 0.0);
    const Eigen::Vector3cd ah = k * tc;
    Complex mass{}, curl_part{}, curl_part_a{};
    for (const auto& t : E.terms) {
        for (const auto& u : psi.terms) {
            if (t.layer != u.layer || !(t.n == u.n)) continue;
            const auto& L = E.layers[static_cast<std::size_t>(t.layer)];
            const Complex depth = exp_integral(I * (t.kz - std::conj(u.kz)), L.lo, L.hi);
            const Eigen::Vector3cd kt(E.alpha.x() + t.n.n1, E.alpha.y() + t.n.n2, t.kz);
            const Eigen::Vector3cd ku(E.alpha.x() + u.n.n1, E.alpha.y() + u.n.n2, u.kz);
            const Eigen::Vector3cd curl_e = I * cross(kt, t.amp);
            const Eigen::Vector3cd curl_pc = (I * cross(ku, u.amp)).conjugate();
            const Eigen::Vector3cd pc = u.amp.conjugate();
            mass += L.eps_rel * Complex(t.amp.transpose() * pc) * depth;
            const Complex c1 = curl_pc.transpose() * cross(tc, t.amp);
            const Complex c2 = curl_e.transpose() * cross(tc, pc);
            curl_part += (c1 - c2) / L.mu_rel * depth;
            const Complex a1 = curl_pc.transpose() * cross(ah, t.amp);
            const Complex a2 = curl_e.transpose() * cross(ah, pc);
            curl_part_a += (a1 - a2) / L.mu_rel * depth;
        }
    }
    MaxwellConstraint out;
    out.lhs = four_pi2 * 2 * k * mass;
    out.rhs = four_pi2 * I * curl_part;
    out.lhs_scaled = four_pi2 * 2 * k * k * mass;
    out.rhs_scaled = four_pi2 * I * curl_part_a;
    return out;
}

}  // namespace biperiodic
