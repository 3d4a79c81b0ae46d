#include <numbers>
#include <random>

#include "biperiodic/depth_basis.hpp"
#include "biperiodic/maxwell.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace biperiodic;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
const double four_pi2 = 4 * pi * pi;
const Complex I(0, 1);
}  // namespace

TEST_SUITE("maxwell")
{
    TEST_CASE("calderon on the reference directions")
    {
        const double k = 2.0;
        const Eigen::Vector2d alpha(0.3, 0.4);
        const ModeIndex n{0, 0};
        TangentialField f{{}, alpha, k};
        const Eigen::Vector3d a = f.alpha_hat(n).normalized();
        const Complex b = f.beta(n);

        const Eigen::Vector3cd perp = Complex(0.5, -1.0) * Eigen::Vector3cd(-a.y(), a.x(), 0);
        f.coeffs[n] = perp;
        CHECK((calderon_apply(f).coeffs.at(n) - I * k * k / b * perp).norm() < 1e-14);

        const Eigen::Vector3cd par = Complex(0.2, 0.3) * a.cast<Complex>();
        f.coeffs[n] = par;
        CHECK((calderon_apply(f).coeffs.at(n) - I * b * par).norm() < 1e-14);

        f.coeffs[n] = Eigen::Vector3cd(1, 0, 0.1);
        CHECK_THROWS_AS(calderon_apply(f), DomainError);
    }

    TEST_CASE("calderon agrees with the half-space oracle")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(-1, 1);
        for (int s = 0; s < 100; ++s) {
            const double k = 1.5 + U(rng);
            const Eigen::Vector2d alpha(0.5 * U(rng), 0.5 * U(rng));
            const ModeIndex n{static_cast<int>(3 * U(rng)), static_cast<int>(3 * U(rng))};
            const Eigen::Vector3cd v(Complex(U(rng), U(rng)), Complex(U(rng), U(rng)), 0);
            const double a1 = alpha.x() + n.n1, a2 = alpha.y() + n.n2;
            if (std::abs(std::hypot(a1, a2) - k) < 1e-6) continue;
            TangentialField f{{{n, v}}, alpha, k};
            const Eigen::Vector3cd expect = oracle::halfspace_trace(v, a1, a2, k);
            CHECK((calderon_apply(f).coeffs.at(n) - expect).norm() < 1e-12 * expect.norm());
            CHECK((halfspace_curl_trace(v, n, alpha, k) - expect).norm() < 1e-12 * expect.norm());
        }
    }

    TEST_CASE("calderon forms")
    {
        const CalderonForms zero = calderon_forms(TangentialField{{}, Eigen::Vector2d(0.1, 0.2), 1.3});
        CHECK(zero.re_form == 0.0);
        CHECK(zero.im_form == 0.0);

        const double k = 2.0;
        TangentialField f{{}, Eigen::Vector2d(0.3, 0.0), k};
        const ModeIndex n{0, 0};
        f.coeffs[n] = Eigen::Vector3cd(0, 1, 0);  // perpendicular to alpha^ = (0.3, 0)
        CHECK(calderon_forms(f).im_form == Approx(four_pi2 * k * k / f.beta(n).real()));
        CHECK(calderon_forms(f).re_form == 0.0);

        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> U(-1, 1);
        for (int s = 0; s < 1000; ++s) {
            TangentialField g{{}, Eigen::Vector2d(0.5 * U(rng), 0.5 * U(rng)), 1.5 + U(rng)};
            for (const ModeIndex m : ModeSet(2).indices()) {
                if (std::abs(g.alpha_hat(m).norm() - g.k) < 1e-6) continue;
                g.coeffs[m] = Eigen::Vector3cd(Complex(U(rng), U(rng)), Complex(U(rng), U(rng)), 0);
            }
            const CalderonForms c = calderon_forms(g);
            CHECK(c.im_form >= -1e-12);
        }
    }

    TEST_CASE("gradient trace form")
    {
        // |alpha_n| = 2, k = 1
        ModeCoefficients p{{{2, 0}, 1.0}};
        CHECK(gradient_trace_form(p, Eigen::Vector2d::Zero(), 1.0) == Approx(four_pi2 * 4 / std::sqrt(3.0)));
        CHECK(gradient_trace_form({{{0, 0}, 1.0}}, Eigen::Vector2d(0.1, 0.1), 1.0) == 0.0);

        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> U(-1, 1);
        const Eigen::Vector2d alpha(0.21, -0.13);
        const double k = 1.4;
        ModeCoefficients q;
        for (const ModeIndex m : ModeSet(3).indices()) q[m] = Complex(U(rng), U(rng));
        const double direct = gradient_trace_form(q, alpha, k);
        const double via = calderon_forms(tangential_gradient(q, alpha, k)).re_form;
        CHECK(std::abs(direct - via) < 1e-12 * direct);
    }

    TEST_CASE("divergence closure")
    {
        const Incidence inc = Incidence::from_angles(1.7, 0.4, 0.9, 1.0);
        const ModeIndex n{1, -1};
        const Eigen::Vector2d an(inc.alpha().x() + 1, inc.alpha().y() - 1);
        CHECK(std::abs(divergence_close(Eigen::Vector2cd(-an.y(), an.x()), n, inc)) < 1e-14);
        const Incidence normal = Incidence::from_angles(1.7, 0.0, 0.0, 1.0);
        CHECK(std::abs(divergence_close(Eigen::Vector2cd(Complex(1, 2), 3), {0, 0}, normal)) == 0.0);
        const Eigen::Vector2cd f(Complex(0.3, -0.2), Complex(1.1, 0.4));
        const Complex f3 = divergence_close(f, n, inc);
        CHECK(std::abs(an.x() * f.x() + an.y() * f.y() + inc.beta(n) * f3) < 1e-14);
    }

    TEST_CASE("incidence polarisation")
    {
        const Eigen::Vector3cd s0(Complex(0, 1), 1, 0);
        const double t1 = 0.0, t2 = 0.0;
        const auto m = MaxwellIncidence::from_magnetic(1.0, t1, t2, s0);
        const Eigen::Vector3cd d = m.direction().cast<Complex>();
        CHECK(std::abs(Complex(m.p().transpose() * d)) < 1e-15);
        CHECK((m.p() - oracle::cross(s0, d)).norm() < 1e-15);
        const auto back = MaxwellIncidence::from_electric(1.0, t1, t2, m.p());
        CHECK((back.s() - s0).norm() < 1e-14);
        CHECK_THROWS_AS(MaxwellIncidence::from_electric(1.0, 0.0, 0.0, Eigen::Vector3cd(0, 0, 1)), DomainError);
    }

    TEST_CASE("incident trace vector")
    {
        const double k = 1.3, h = 1.0;
        const auto m = MaxwellIncidence::from_electric(k, 0.0, 0.0, Eigen::Vector3cd(1, 0, 0));
        const Eigen::Vector3cd expect = -2.0 * I * k * Eigen::Vector3cd(0, 1, 0) * std::exp(-I * k * h);
        CHECK((incident_trace_vector(m, h) - expect).norm() < 1e-14);

        std::mt19937_64 rng(14);
        std::uniform_real_distribution<double> U(0, 1);
        for (int s = 0; s < 100; ++s) {
            const double kk = 0.5 + 2 * U(rng), t1 = (U(rng) - 0.5) * 2.8, t2 = 2 * pi * U(rng), hh = 0.5 + U(rng);
            const Eigen::Vector3d dir(std::sin(t1) * std::cos(t2), std::sin(t1) * std::sin(t2), -std::cos(t1));
            const Eigen::Vector3d e1(-std::sin(t2), std::cos(t2), 0);
            const Eigen::Vector3cd p =
                Complex(U(rng), U(rng)) * e1.cast<Complex>() + Complex(U(rng), U(rng)) * dir.cross(e1).cast<Complex>();
            const auto mi = MaxwellIncidence::from_electric(kk, t1, t2, p);
            const Eigen::Vector3cd q1 = incident_trace_vector(mi, hh);
            CHECK((q1 - incident_trace_vector_calderon(mi, hh)).norm() < 1e-12 * q1.norm());

            const double delta = 1e-6;
            const auto mk = MaxwellIncidence::from_electric(kk + delta, t1, t2, p);
            const Eigen::Vector3cd fd = (incident_trace_vector(mk, hh) - q1) / delta;
            CHECK((fd - incident_trace_derivative(mi, hh)).norm() < 1e-5 * std::max(1.0, fd.norm()));
        }
    }

    TEST_CASE("maxwell slab determinant")
    {
        CHECK(maxwell_slab_determinant(1e-12, 1.3, 2.0) == Approx(1.69).epsilon(1e-9));
        std::mt19937_64 rng(15);
        std::uniform_real_distribution<double> U(0, 1);
        for (int s = 0; s < 1000; ++s) {
            const double q0 = 0.01 + 0.98 * U(rng), k = 0.1 + 3 * U(rng), a = k * (1.001 + 2 * U(rng));
            CHECK(maxwell_slab_determinant(q0, k, a) > 0);
        }
        for (int s = 0; s < 100; ++s) {
            const double q0 = 0.05 + 0.9 * U(rng), k = 0.3 + 2 * U(rng), phi = 2 * pi * U(rng);
            const double a = k * (1.01 + U(rng));
            const Eigen::Vector2d an(a * std::cos(phi), a * std::sin(phi));
            const Complex det = maxwell_slab_matrix(q0, k, an).determinant();
            const double expect = maxwell_slab_determinant(q0, k, a);
            CHECK(std::abs(det / maxwell_slab_hn(q0, k, a) - expect) < 1e-9 * std::max(1.0, std::abs(expect)));
        }
        CHECK_THROWS_AS(maxwell_slab_determinant(1.5, 1.0, 2.0), DomainError);
    }

    TEST_CASE("constraint of a single evanescent mode, closed form")
    {
        const double k = 1.2, s = 0.7;
        const Eigen::Vector2d alpha(0.3, -0.2), tt = alpha / k;
        const Eigen::Vector3cd a(Complex(0.4, 0.1), Complex(-0.3, 0.6), Complex(0.2, -0.5));
        ModalField E;
        E.alpha = alpha;
        E.terms.push_back({{1, 0}, a, Complex(0, s), 0});
        const MaxwellConstraint c = maxwell_constraint_residual(E, E, k, tt);

        const Eigen::Vector3cd kap(alpha.x() + 1, alpha.y(), Complex(0, s));
        const Eigen::Vector3cd curl = I * oracle::cross(kap, a);
        const Eigen::Vector3cd tc(tt.x(), tt.y(), 0);
        const double depth = 1 / (2 * s);
        const Complex lhs = four_pi2 * 2 * k * a.squaredNorm() * depth;
        const Complex rhs = four_pi2 * I * depth *
                            (Complex(curl.conjugate().transpose() * oracle::cross(tc, a)) -
                             Complex(curl.transpose() * oracle::cross(tc, a.conjugate())));
        CHECK(std::abs(c.lhs - lhs) < 1e-12 * std::abs(lhs));
        CHECK(std::abs(c.rhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
        CHECK(std::abs(c.lhs_scaled - k * c.lhs) < 1e-14 * std::abs(c.lhs_scaled));
        CHECK(std::abs(c.rhs_scaled - k * c.rhs) < 1e-13 * std::max(1.0, std::abs(c.rhs_scaled)));

        const MaxwellConstraint z = maxwell_constraint_residual(ModalField{}, ModalField{}, k, tt);
        CHECK(z.lhs == Complex(0));
        CHECK(z.rhs == Complex(0));
    }

    TEST_CASE("constraint on a layered field agrees with depth quadrature")
    {
        const double k = 1.1;
        const Eigen::Vector2d alpha(0.25, 0.1), tt = alpha / k;
        ModalField E, P;
        const std::vector<ModalLayer> layers{{0, 1, 2.0, 1.5}, {1}};
        E.alpha = P.alpha = alpha;
        E.layers = P.layers = layers;
        const ModeIndex n{-1, 0};
        E.terms = {{n, Eigen::Vector3cd(1, Complex(0, 1), 0.2), 0.8, 0},
                   {n, Eigen::Vector3cd(0.3, 0, Complex(0.1, 0.1)), -0.8, 0},
                   {n, Eigen::Vector3cd(0.5, 0.2, Complex(0, 0.3)), Complex(0, 0.9), 1}};
        P.terms = {{n, Eigen::Vector3cd(0.2, 1, Complex(0, -0.4)), Complex(0.3, 0.1), 0},
                   {n, Eigen::Vector3cd(Complex(0.1, 0.5), 0.7, 0), Complex(0, 1.3), 1}};
        const MaxwellConstraint c = maxwell_constraint_residual(E, P, k, tt);

        const Eigen::Vector3cd tc(tt.x(), tt.y(), 0);
        auto integrand = [&](double x3, double eps, double mu, Complex& mass, Complex& curl_part) {
            const Eigen::Vector3d x(0, 0, x3);
            const Eigen::Vector3cd e = E.value(x), p = P.value(x).conjugate();
            const Eigen::Vector3cd ce = E.curl(x), cp = P.curl(x).conjugate();
            mass = eps * Complex(e.transpose() * p);
            curl_part = (Complex(cp.transpose() * oracle::cross(tc, e)) - Complex(ce.transpose() * oracle::cross(tc, p))) / mu;
        };
        Complex mass{}, curl{};
        const auto [x0, w0] = gauss_legendre(40, 0.0, 1.0 - 1e-15);
        for (int q = 0; q < x0.size(); ++q) {
            Complex m, r;
            integrand(x0(q), 2.0, 1.5, m, r);
            mass += w0(q) * m;
            curl += w0(q) * r;
        }
        const auto [x1, w1] = gauss_legendre(200, 1.0, 60.0);
        for (int q = 0; q < x1.size(); ++q) {
            Complex m, r;
            integrand(x1(q), 1.0, 1.0, m, r);
            mass += w1(q) * m;
            curl += w1(q) * r;
        }
        CHECK(std::abs(c.lhs - four_pi2 * 2 * k * mass) < 1e-10 * std::abs(c.lhs));
        CHECK(std::abs(c.rhs - four_pi2 * I * curl) < 1e-10 * std::abs(c.rhs));
    }

    TEST_CASE("unsupported layer structures")
    {
        ModalField E;
        E.layers = {{0, 1}};
        CHECK_THROWS_AS(maxwell_constraint_residual(E, E, 1.0, Eigen::Vector2d::Zero()), UnsupportedMedium);
        E.layers = {{0.5}};
        CHECK_THROWS_AS(maxwell_constraint_residual(E, E, 1.0, Eigen::Vector2d::Zero()), UnsupportedMedium);
        E.layers = {{0, 1, -2.0}, {1}};
        CHECK_THROWS_AS(maxwell_constraint_residual(E, E, 1.0, Eigen::Vector2d::Zero()), UnsupportedMedium);
    }

    TEST_CASE("cut-off is rejected")
    {
        TangentialField f{{{{0, 0}, Eigen::Vector3cd(1, 0, 0)}}, Eigen::Vector2d(1.0, 0.0), 1.0};
        CHECK_THROWS_AS(calderon_apply(f), CutoffViolation);
    }
}
