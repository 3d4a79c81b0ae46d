#include "biperiodic/depth_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace biperiodic {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int points, double lo, double hi)
{
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
    for (int i = 1; i < points; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    const double half = 0.5 * (hi - lo);
    Eigen::VectorXd x = (eig.eigenvalues().array() * half + 0.5 * (hi + lo)).matrix();
    Eigen::VectorXd w = (2.0 * eig.eigenvectors().row(0).array().square() * half).matrix().transpose();
    return {x, w};
}

DepthBasis::DepthBasis(DepthScheme scheme, int points, double h) : scheme_(scheme), h_(h)
{
    if (points < 2) throw DomainError("depth basis: need at least two points");
    if (!(h > 0)) throw DomainError("depth basis: half-thickness must be positive");
    const int M = points;
    const int N = M - 1;
    nodes_.resize(M);
    if (scheme == DepthScheme::chebyshev) {
        bary_.resize(M);
        for (int j = 0; j < M; ++j) {
            nodes_(j) = h * std::cos(std::numbers::pi * j / N);
            bary_(j) = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
        }
        // Sine form of x_i - x_j keeps the off-diagonal entries accurate.
        diff_ = Eigen::MatrixXd::Zero(M, M);
        for (int i = 0; i < M; ++i) {
            for (int j = 0; j < M; ++j) {
                if (i == j) continue;
                const double dx = -2.0 * h * std::sin(std::numbers::pi * (i + j) / (2.0 * N)) *
                                  std::sin(std::numbers::pi * (i - j) / (2.0 * N));
                diff_(i, j) = bary_(j) / bary_(i) / dx;
            }
            diff_(i, i) = -diff_.row(i).sum();
        }
        const auto [xq, wq] = gauss_legendre(M + 1, -h, h);
        stiffness_ = Eigen::MatrixXd::Zero(M, M);
        for (int q = 0; q < xq.size(); ++q) {
            const Eigen::RowVectorXd d = derivatives_at(xq(q));
            stiffness_.noalias() += wq(q) * d.transpose() * d;
        }
    } else {
        const double dz = 2.0 * h / N;
        for (int j = 0; j < M; ++j) nodes_(j) = h - j * dz;
        nodes_(N) = -h;
        stiffness_ = Eigen::MatrixXd::Zero(M, M);
        for (int e = 0; e < N; ++e) {
            stiffness_(e, e) += 1.0 / dz;
            stiffness_(e + 1, e + 1) += 1.0 / dz;
            stiffness_(e, e + 1) -= 1.0 / dz;
            stiffness_(e + 1, e) -= 1.0 / dz;
        }
    }
    full_mass_ = mass(-h, h);
}

Eigen::RowVectorXd DepthBasis::values_at(double x) const
{
    const int M = size();
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(M);
    if (scheme_ == DepthScheme::chebyshev) {
        double denom = 0;
        for (int j = 0; j < M; ++j) {
            const double dx = x - nodes_(j);
            if (dx == 0.0) {
                v.setZero();
                v(j) = 1.0;
                return v;
            }
            v(j) = bary_(j) / dx;
            denom += v(j);
        }
        return v / denom;
    }
    const double dz = 2.0 * h_ / (M - 1);
    const double t = std::clamp((h_ - x) / dz, 0.0, double(M - 1));
    const int e = std::min(static_cast<int>(std::floor(t)), M - 2);
    const double s = t - e;
    v(e) = 1.0 - s;
    v(e + 1) = s;
    return v;
}

Eigen::RowVectorXd DepthBasis::derivatives_at(double x) const
{
    const int M = size();
    if (scheme_ == DepthScheme::chebyshev) return values_at(x) * diff_;
    Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(M);
    const double dz = 2.0 * h_ / (M - 1);
    const double t = std::clamp((h_ - x) / dz, 0.0, double(M - 1));
    const int e = std::min(static_cast<int>(std::floor(t)), M - 2);
    // Nodes decrease with the index.
    d(e) = 1.0 / dz;
    d(e + 1) = -1.0 / dz;
    return d;
}

Eigen::MatrixXd DepthBasis::mass(double lo, double hi) const
{
    const int M = size();
    lo = std::max(lo, -h_);
    hi = std::min(hi, h_);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M, M);
    if (!(hi > lo)) return out;
    if (scheme_ == DepthScheme::chebyshev) {
        const auto [xq, wq] = gauss_legendre(M + 1, lo, hi);
        for (int q = 0; q < xq.size(); ++q) {
            const Eigen::RowVectorXd v = values_at(xq(q));
            out.noalias() += wq(q) * v.transpose() * v;
        }
        return out;
    }
    // Row sums of the element mass: int l_j over [lo, hi], split at the nodes.
    std::vector<double> cuts{lo, hi};
    for (int j = 0; j < M; ++j) {
        if (nodes_(j) > lo && nodes_(j) < hi) cuts.push_back(nodes_(j));
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const auto [xq, wq] = gauss_legendre(2, cuts[c], cuts[c + 1]);
        for (int q = 0; q < xq.size(); ++q) out.diagonal() += wq(q) * values_at(xq(q)).transpose();
    }
    return out;
}

}  // namespace biperiodic
