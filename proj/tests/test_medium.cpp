#include <filesystem>
#include <numbers>
#include <random>

#include "biperiodic/medium.hpp"
#include "doctest.h"

using namespace biperiodic;

namespace {
constexpr double pi = std::numbers::pi;

MediumModel cosine_medium(int n, int n3 = 2)
{
    std::vector<Complex> v;
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i3 = 0; i3 < n3; ++i3) v.emplace_back(1 + 0.5 * std::cos(2 * pi * i1 / n));
        }
    }
    return MediumModel::sampled(n, n, n3, v, 1.0);
}
}  // namespace

TEST_SUITE("medium")
{
    TEST_CASE("homogeneous slice")
    {
        const FourierSlice s = MediumModel::homogeneous(2.0, 1.0).fourier_slice(0.3, 2);
        for (const ModeIndex m : s.modes.indices()) CHECK(s.at(m) == (m == ModeIndex{0, 0} ? Complex(2) : Complex(0)));
        CHECK(s.at({5, 0}) == Complex(0));
    }

    TEST_CASE("sampled cosine")
    {
        const FourierSlice s = cosine_medium(16).fourier_slice(0.0, 3);
        CHECK(std::abs(s.at({0, 0}) - 1.0) < 1e-14);
        CHECK(std::abs(s.at({1, 0}) - 0.25) < 1e-14);
        CHECK(std::abs(s.at({-1, 0}) - 0.25) < 1e-14);
        CHECK(std::abs(s.at({0, 1})) < 1e-14);
        CHECK(std::abs(s.at({2, 0})) < 1e-14);
    }

    TEST_CASE("random real grid gives Hermitian coefficients and synthesizes back")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(1, 3);
        const int n = 9;
        std::vector<Complex> v(static_cast<std::size_t>(n * n));
        for (auto& x : v) x = U(rng);
        const MediumModel m = MediumModel::sampled(n, n, 1, v, 1.0);
        const FourierSlice s = m.fourier_slice(0.0, 4);
        for (const ModeIndex k : s.modes.indices()) {
            CHECK(std::abs(s.at({-k.n1, -k.n2}) - std::conj(s.at(k))) < 1e-13);
        }
        const auto back = m.synthesize_slice(s);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) < 1e-12);
    }

    TEST_CASE("validate")
    {
        CHECK(validate(MediumModel::homogeneous(2.0, 1.0), Incidence::from_angles(1.0, pi / 4, 0.0, 1.0)).q_ge_sin2 ==
              true);
        const MediumReport r =
            validate(MediumModel::homogeneous(0.3, 1.0), Incidence::from_angles(1.0, pi / 3, 0.0, 1.0));
        CHECK(r.q_ge_sin2 == false);
        CHECK_FALSE(r.warnings.empty());
        const MediumReport ex = validate(MediumModel::slab_stack({{-1, 1, 2.0}}, 1.0));
        CHECK(ex.q_ge_one);
        CHECK(ex.lossless);
        CHECK_FALSE(validate(MediumModel::homogeneous(Complex(2, 0.1), 1.0)).lossless);
    }

    TEST_CASE("construction errors")
    {
        CHECK_THROWS_AS(MediumModel::homogeneous(0.0, 1.0), DomainError);
        CHECK_THROWS_AS(MediumModel::homogeneous(Complex(2, -0.1), 1.0), DomainError);
        CHECK_THROWS_AS(MediumModel::slab_stack({{-2, 0, 2.0}}, 1.0), OutOfLayer);
        CHECK_THROWS_AS(MediumModel::slab_stack({{-1, 0.5, 2.0}, {0, 1, 3.0}}, 1.0), DomainError);
        CHECK_THROWS_AS(MediumModel::sampled(2, 2, 1, {1, 1, 1}, 1.0), DomainError);
        CHECK_THROWS_AS(MediumModel::homogeneous(2.0, 1.0).fourier_slice(1.5, 1), OutOfLayer);
    }

    TEST_CASE("slab stack fills gaps with the background")
    {
        const MediumModel m = MediumModel::slab_stack({{-0.5, 0.5, 3.0}}, 1.0);
        CHECK(m.value(0, 0, 0.0) == Complex(3));
        CHECK(m.value(0, 0, 0.8) == Complex(1));
        CHECK(m.value(0, 0, 2.0) == Complex(1));
        const auto cells = m.depth_cells(0);
        double len = 0;
        for (const auto& c : cells) len += c.hi - c.lo;
        CHECK(len == doctest::Approx(2.0));
    }

    TEST_CASE("file round trip")
    {
        const auto path = std::filesystem::temp_directory_path() / "biperiodic_medium_test.txt";
        const MediumModel m = cosine_medium(4, 3);
        m.save(path);
        const MediumModel back = MediumModel::load(path);
        CHECK(back.n1() == 4);
        CHECK(back.n3() == 3);
        for (std::size_t i = 0; i < m.samples().size(); ++i) CHECK(std::abs(back.samples()[i] - m.samples()[i]) < 1e-15);
        std::filesystem::remove(path);
        CHECK_THROWS_AS(MediumModel::load(path), ConfigError);
    }
}
