#include <numbers>
#include <random>

#include "biperiodic/qp_core.hpp"
#include "doctest.h"

using namespace biperiodic;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
const double k_ex1 = pi / (2 * std::sqrt(2.0));
const double alpha_ex1 = pi * std::sqrt(3.0) / 4;

Incidence ex1(Complex k = k_ex1) { return Incidence::from_alpha(k, Eigen::Vector2d(1 - alpha_ex1, 0), 1.0); }
}  // namespace

TEST_SUITE("qp_core")
{
    TEST_CASE("branch_sqrt on the reference points")
    {
        CHECK(std::abs(branch_sqrt(Complex(4)) - Complex(2)) < 1e-15);
        CHECK(std::abs(branch_sqrt(Complex(-4)) - Complex(0, 2)) < 1e-15);
        const Complex r = branch_sqrt(Complex(-4, -0.01));
        CHECK(r.real() == Approx(-0.0025).epsilon(1e-3));
        CHECK(r.imag() == Approx(2.0).epsilon(1e-5));
        CHECK(branch_sqrt(Complex(0)) == Complex(0));
    }

    TEST_CASE("branch_sqrt squares back and stays in its sector")
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> U(-5, 5);
        for (int i = 0; i < 2000; ++i) {
            const Complex z(U(rng), U(rng));
            if (z.imag() < 0 && std::abs(z.real()) < 1e-3) continue;
            const Complex r = branch_sqrt(z);
            CHECK(std::abs(r * r - z) < 1e-12 * std::max(1.0, std::abs(z)));
            const double a = std::arg(r);
            CHECK(a > -pi / 4 - 1e-15);
            CHECK(a <= 3 * pi / 4 + 1e-15);
        }
    }

    TEST_CASE("branch_sqrt is continuous across the negative real axis")
    {
        const Complex above = branch_sqrt(Complex(-4, 1e-9)), below = branch_sqrt(Complex(-4, -1e-9));
        CHECK(std::abs(above - below) < 1e-8);
    }

    TEST_CASE("branch_sqrt rejects the cut")
    {
        CHECK_THROWS_AS(branch_sqrt(Complex(0, -3)), CutProximity);
    }

    TEST_CASE("beta values")
    {
        const Incidence normal = Incidence::from_angles(2.0, 0.0, 0.0, 1.0);
        CHECK(std::abs(normal.beta({0, 0}) - Complex(2)) < 1e-15);
        CHECK(std::abs(normal.beta({3, 0}) - Complex(0, std::sqrt(5.0))) < 1e-14);
        CHECK(std::abs(ex1().beta({-1, 0}) - Complex(0, pi / 4)) < 1e-14);
    }

    TEST_CASE("angle form of beta agrees with |n + alpha| at real k")
    {
        const Incidence inc = Incidence::from_angles(1.7, 0.4, 1.1, 1.0);
        for (const ModeIndex n : ModeSet(3).indices()) {
            const double a = inc.alpha_norm(n);
            CHECK(std::abs(inc.beta_squared(n) - Complex(1.7 * 1.7 - a * a)) < 1e-12);
        }
    }

    TEST_CASE("min_im_beta")
    {
        CHECK(min_im_beta(Incidence::from_angles(Complex(1, 0.1), pi / 4, 0.0, 1.0), 20) > 0);
        CHECK(min_im_beta(Incidence::from_angles(Complex(2, 1), 0.0, 0.0, 1.0), 0) == Approx(1.0));
        const Incidence inc = ex1(Complex(k_ex1, 0.01));
        const double m = min_im_beta(inc, 8);
        CHECK(m > 0);
        for (const ModeIndex n : ModeSet(8).indices()) CHECK(m <= inc.beta(n).imag());
        CHECK_THROWS_AS(min_im_beta(Incidence::from_angles(2.0, 0.0, 0.0, 1.0), 2), DomainError);
    }

    TEST_CASE("classify_modes")
    {
        const auto c = classify_modes(ex1(), 2, 1e-9);
        std::vector<ModeIndex> expect{{0, -1}, {0, 0}, {0, 1}, {1, 0}};
        CHECK(c.propagating == expect);
        CHECK(c.cutoff_flags.empty());
        CHECK(c.evanescent.size() == 21);

        const Incidence one = Incidence::from_angles(1.0, 0.0, 0.0, 1.0);
        CHECK(classify_modes(one, 1, 1e-9).propagating == std::vector<ModeIndex>{{0, 0}});
        CHECK(classify_modes(one, 1, 1e-9).cutoff_flags.size() == 4);
        CHECK_THROWS_AS(classify_modes(one, 1, 1e-9, true), CutoffViolation);
        CHECK_THROWS_AS(BetaTable(one, 1), CutoffViolation);
    }

    TEST_CASE("rayleigh_eval")
    {
        const Incidence inc = Incidence::from_angles(2.0, 0.3, 0.2, 1.0);
        CHECK(std::abs(rayleigh_eval({{{0, 0}, 1.0}}, Side::above, inc, {0, 0, 1}) - 1.0) < 1e-15);
        const ModeIndex n{3, 0};
        const Complex a = rayleigh_eval({{n, 1.0}}, Side::above, inc, {0.4, 0.1, 1});
        const Complex b = rayleigh_eval({{n, 1.0}}, Side::above, inc, {0.4, 0.1, 2});
        CHECK(std::abs(b) / std::abs(a) == Approx(std::exp(-std::abs(inc.beta(n)))));
        CHECK_THROWS_AS(rayleigh_eval({{n, 1.0}}, Side::above, inc, {0, 0, 0.5}), WrongSide);
        CHECK_THROWS_AS(rayleigh_eval({{n, 1.0}}, Side::below, inc, {0, 0, -0.5}), WrongSide);
    }

    TEST_CASE("rayleigh_eval reproduces the guided-mode tail")
    {
        // even mode cos(gamma x3) inside, cos(gamma) e^{-s(x3 - 1)} above, gamma = s = pi/4
        const Incidence inc = ex1();
        const double g = pi / 4;
        const Eigen::Vector3d x(0.7, 1.3, 2.0);
        const Complex v = rayleigh_eval({{{-1, 0}, std::cos(g)}}, Side::above, inc, x);
        const double am = inc.alpha().x() - 1;
        const Complex expect = std::cos(g) * std::exp(-g) * std::exp(Complex(0, am * x.x()));
        CHECK(std::abs(v - expect) < 1e-14);
    }

    TEST_CASE("dtn_symbol")
    {
        const Incidence inc = Incidence::from_angles(2.0, 0.0, 0.0, 1.0);
        CHECK(std::abs(dtn_symbol({0, 0}, Side::above, inc) - Complex(0, 2)) < 1e-15);
        CHECK(std::abs(dtn_symbol({-1, 0}, Side::above, ex1()) - Complex(-pi / 4)) < 1e-14);
        for (const ModeIndex n : ModeSet(2).indices()) {
            CHECK(dtn_symbol(n, Side::below, inc) == -dtn_symbol(n, Side::above, inc));
        }
    }

    TEST_CASE("incidence validation")
    {
        CHECK_THROWS_AS(Incidence::from_angles(-1.0, 0.0, 0.0, 1.0), DomainError);
        CHECK_THROWS_AS(Incidence::from_angles(Complex(1, -0.1), 0.0, 0.0, 1.0), DomainError);
        CHECK_THROWS_AS(Incidence::from_angles(1.0, pi / 2, 0.0, 1.0), DomainError);
        CHECK_THROWS_AS(Incidence::from_angles(1.0, 0.0, 0.0, 0.0), DomainError);
        const Incidence inc = Incidence::from_angles(1.5, 0.3, 0.4, 1.0).with_k(Complex(1.5, 0.2));
        CHECK(inc.theta_tilde().norm() == Approx(std::sin(0.3)));
        CHECK(std::abs(inc.dbeta_dk({1, 0}) - (inc.k() * inc.cos2() - inc.n_dot_tilde({1, 0})) / inc.beta({1, 0})) <
              1e-15);
    }

    TEST_CASE("extended precision kernels agree")
    {
        using IncL = BasicIncidence<long double>;
        const IncL a = IncL::from_angles(1.3L, 0.2L, 0.5L, 1.0L);
        const Incidence b = Incidence::from_angles(1.3, 0.2, 0.5, 1.0);
        for (const ModeIndex n : ModeSet(2).indices()) {
            const auto x = a.beta(n);
            CHECK(std::abs(Complex(double(x.real()), double(x.imag())) - b.beta(n)) < 1e-14);
        }
    }
}
