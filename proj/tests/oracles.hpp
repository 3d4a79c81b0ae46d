#pragma once

// Independent reference computations used by the tests.

#include <Eigen/Dense>

#include <complex>

namespace oracle {

using Complex = std::complex<double>;

/// Plain bilinear cross product, written out by components.
inline Eigen::Vector3cd cross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b)
{
    Eigen::Vector3cd c;
    c(0) = a(1) * b(2) - a(2) * b(1);
    c(1) = a(2) * b(0) - a(0) * b(2);
    c(2) = a(0) * b(1) - a(1) * b(0);
    return c;
}

/// Tangential trace of curl u for the outgoing half-space solution
/// u = E e^{i(a1 x1 + a2 x2 + b x3)} with nu x E = v (nu = e3) and div u = 0,
/// b = sqrt(k^2 - a1^2 - a2^2) with Im b >= 0 (b > 0 when real).
inline Eigen::Vector3cd halfspace_trace(const Eigen::Vector3cd& v, double a1, double a2, double k)
{
    const Complex b2 = k * k - a1 * a1 - a2 * a2;
    Complex b = std::sqrt(b2);
    if (b.imag() < 0 || (b.imag() == 0 && b.real() < 0)) b = -b;
    // v = (-E2, E1, 0)
    Eigen::Vector3cd E;
    E(0) = v(1);
    E(1) = -v(0);
    E(2) = -(a1 * E(0) + a2 * E(1)) / b;
    const Eigen::Vector3cd kappa(a1, a2, b);
    Eigen::Vector3cd c = Complex(0, 1) * cross(kappa, E);
    c(2) = 0;
    return c;
}

}  // namespace oracle
