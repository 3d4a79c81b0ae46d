#include "biperiodic/slab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace biperiodic {

namespace {

const Complex I(0, 1);

const char* class_name(BrillouinClass c)
{
    switch (c) {
    case BrillouinClass::cutoff: return "cutoff";
    case BrillouinClass::propagative: return "propagative";
    case BrillouinClass::both: return "both";
    default: return "none";
    }
}

}  // namespace

void SlabParams::check() const
{
    if (!(q0 > 0) || !(h > 0) || !(k > 0)) throw DomainError("slab: need q0 > 0, h > 0, k > 0");
    if (!(abs_alpha > k) || !(abs_alpha < k * std::sqrt(q0))) {
        throw DomainError("slab: |alpha| must lie in (k, k sqrt(q0))");
    }
}

double SlabParams::inner_wavenumber() const { return std::sqrt(k * k * q0 - abs_alpha * abs_alpha); }
double SlabParams::decay() const { return std::sqrt(abs_alpha * abs_alpha - k * k); }

double dispersion_residual(const SlabParams& p, Parity parity)
{
    p.check();
    const double g = p.inner_wavenumber();
    const double d = p.decay();
    if (parity == Parity::even) return d * std::cos(g * p.h) - g * std::sin(g * p.h);
    return d * std::sin(g * p.h) + g * std::cos(g * p.h);
}

std::vector<DispersionRoot> find_dispersion_roots(double q0, double h, double k, Parity parity, int grid)
{
    std::vector<DispersionRoot> roots;
    if (!(q0 > 1) || grid < 2) return roots;
    const double lo = k;
    const double hi = k * std::sqrt(q0);
    auto f = [&](double a) { return dispersion_residual({q0, h, k, a}, parity); };
    auto push = [&](double a) {
        const SlabParams p{q0, h, k, a};
        roots.push_back({a, parity, p.inner_wavenumber(), p.decay()});
    };
    // Open interval: sample interior points only.
    double a_prev = lo + (hi - lo) / (grid + 1);
    double f_prev = f(a_prev);
    for (int i = 2; i <= grid; ++i) {
        const double a = lo + (hi - lo) * i / (grid + 1);
        const double fa = f(a);
        if (f_prev == 0.0) {
            push(a_prev);
        } else if (fa != 0.0 && std::signbit(fa) != std::signbit(f_prev)) {
            double l = a_prev, r = a, fl = f_prev;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (l + r);
                const double fm = f(m);
                if (fm == 0.0 || std::abs(fm) < 1e-15 || r - l < 4e-16 * r) {
                    l = r = m;
                    break;
                }
                if (std::signbit(fm) == std::signbit(fl)) {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
            }
            const double root = 0.5 * (l + r);
            if (std::abs(f(root)) < 1e-12) push(root);
        }
        a_prev = a;
        f_prev = fa;
    }
    if (f_prev == 0.0) push(a_prev);
    return roots;
}

double mode_profile(const DispersionRoot& r, double h, double x3)
{
    const double g = r.inner_wavenumber;
    if (std::abs(x3) <= h) return r.parity == Parity::even ? std::cos(g * x3) : std::sin(g * x3);
    const double tail = std::exp(-r.decay * (std::abs(x3) - h));
    if (r.parity == Parity::even) return std::cos(g * h) * tail;
    return std::copysign(std::sin(g * h), x3) * tail;
}

double mode_profile_derivative(const DispersionRoot& r, double h, double x3)
{
    const double g = r.inner_wavenumber;
    if (std::abs(x3) <= h) return r.parity == Parity::even ? -g * std::sin(g * x3) : g * std::cos(g * x3);
    const double s = x3 > 0 ? 1.0 : -1.0;
    return -s * r.decay * mode_profile(r, h, x3);
}

Eigen::Vector4d interface_jumps(const DispersionRoot& r, double h)
{
    const double g = r.inner_wavenumber;
    auto inner = [&](double x) { return r.parity == Parity::even ? std::cos(g * x) : std::sin(g * x); };
    auto inner_d = [&](double x) { return r.parity == Parity::even ? -g * std::sin(g * x) : g * std::cos(g * x); };
    // Outer one-sided limits at +-h.
    const double top_val = r.parity == Parity::even ? std::cos(g * h) : std::sin(g * h);
    const double bot_val = r.parity == Parity::even ? std::cos(g * h) : -std::sin(g * h);
    return {top_val - inner(h), -r.decay * top_val - inner_d(h), bot_val - inner(-h), r.decay * bot_val - inner_d(-h)};
}

double translate_distance(const Eigen::Vector2d& alpha, double r)
{
    double best = std::numeric_limits<double>::infinity();
    for (int l1 = -2; l1 <= 2; ++l1) {
        for (int l2 = -2; l2 <= 2; ++l2) {
            best = std::min(best, std::abs((alpha + Eigen::Vector2d(l1, l2)).norm() - r));
        }
    }
    return best;
}

BrillouinMap::BrillouinMap(double k, double mode_radius, int resolution)
    : k_(k), radius_(mode_radius), res_(resolution), cls_(static_cast<std::size_t>(resolution) * resolution)
{
    if (resolution < 1) throw DomainError("brillouin_map: resolution must be positive");
}

Eigen::Vector2d BrillouinMap::alpha(int i, int j) const
{
    return {(i + 0.5) / res_ - 0.5, (j + 0.5) / res_ - 0.5};
}

int BrillouinMap::count(BrillouinClass c) const { return static_cast<int>(std::count(cls_.begin(), cls_.end(), c)); }

void BrillouinMap::write_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(10);
    out << "alpha1,alpha2,class\n";
    for (int i = 0; i < res_; ++i) {
        for (int j = 0; j < res_; ++j) {
            const auto a = alpha(i, j);
            out << a.x() << ',' << a.y() << ',' << class_name(at(i, j)) << '\n';
        }
    }
}

BrillouinMap brillouin_map(double k, double mode_radius, int resolution)
{
    BrillouinMap map(k, mode_radius, resolution);
    const double tol = map.tolerance();
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const auto a = map.alpha(i, j);
            int c = 0;
            if (translate_distance(a, k) < tol) c |= 1;
            if (translate_distance(a, mode_radius) < tol) c |= 2;
            map.cls_[static_cast<std::size_t>(i) * resolution + j] = static_cast<BrillouinClass>(c);
        }
    }
    return map;
}

RayleighData transfer_matrix_scattering(double q0, const Incidence& inc)
{
    if (!inc.real_k()) throw DomainError("transfer_matrix_scattering: requires real k");
    const double k = inc.k().real();
    const double a = inc.alpha().norm();
    if (!(a < k)) throw DomainError("transfer_matrix_scattering: requires |alpha| < k");
    const double h = inc.h();
    const Complex b = inc.beta({0, 0});
    const Complex g = branch_sqrt(Complex(k * k * q0 - a * a));
    // Unknowns (u+, u-, A, B); interior A e^{i g x3} + B e^{-i g x3}.
    Eigen::Matrix4cd S;
    Eigen::Vector4cd rhs;
    const Complex ep = std::exp(I * g * h), em = std::exp(-I * g * h);
    const Complex inc_top = std::exp(-I * b * h);
    S << 1.0, 0.0, -ep, -em,
         I * b, 0.0, -I * g * ep, I * g * em,
         0.0, 1.0, -em, -ep,
         0.0, -I * b, -I * g * em, I * g * ep;
    rhs << -inc_top, I * b * inc_top, 0.0, 0.0;
    const Eigen::Vector4cd x = S.fullPivLu().solve(rhs);
    RayleighData out;
    out.u_plus[{0, 0}] = x(0);
    out.u_minus[{0, 0}] = x(1);
    out.efficiency_plus[{0, 0}] = std::norm(x(0));
    out.efficiency_minus[{0, 0}] = std::norm(x(1));
    out.balance_residual = std::abs(out.total_efficiency() - 1.0);
    return out;
}

double no_mode_determinant(double q0, double k, double abs_alpha_n, double h)
{
    if (!(q0 > 0 && q0 < 1)) throw DomainError("no_mode_determinant: requires 0 < q0 < 1");
    if (!(k > 0) || !(h > 0)) throw DomainError("no_mode_determinant: requires k > 0, h > 0");
    const double g2 = k * k * q0 - abs_alpha_n * abs_alpha_n;
    if (!(g2 < 0)) throw DomainError("no_mode_determinant: gamma_n must be imaginary (k^2 q0 < |alpha_n|^2)");
    const double g = std::sqrt(-g2);
    return (std::exp(-2 * g * h) - std::exp(2 * g * h)) * k * k * (1 - q0);
}

Eigen::Matrix4cd scalar_matching_matrix(double q0, double k, double abs_alpha_n)
{
    const double bn = std::sqrt(std::abs(abs_alpha_n * abs_alpha_n - k * k));
    const Complex g = branch_sqrt(Complex(k * k * q0 - abs_alpha_n * abs_alpha_n));
    const Complex ep = std::exp(I * g), em = std::exp(-I * g);
    Eigen::Matrix4cd A;
    A << 1.0, 0.0, -ep, -em,
         0.0, 1.0, -em, -ep,
         -bn, 0.0, -I * g * ep, I * g * em,
         0.0, bn, I * g * em, -I * g * ep;
    return A;
}

}  // namespace biperiodic
