#pragma once

#include <Eigen/Dense>

#include <utility>

#include "biperiodic/qp_core.hpp"

namespace biperiodic {

enum class DepthScheme {
    chebyshev,          ///< nodal spectral Galerkin on Chebyshev-Lobatto points
    finite_difference,  ///< second order: P1 elements with lumped (trapezoidal) mass
};

/// Gauss-Legendre rule on [lo, hi] (Golub-Welsch).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int points, double lo, double hi);

/// Nodal basis in x3 on [-h, h]. Node 0 is the top (+h), node M-1 the bottom (-h).
class DepthBasis {
public:
    DepthBasis(DepthScheme scheme, int points, double h);

    DepthScheme scheme() const { return scheme_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    double h() const { return h_; }
    const Eigen::VectorXd& nodes() const { return nodes_; }
    static constexpr int top() { return 0; }
    int bottom() const { return size() - 1; }

    Eigen::RowVectorXd values_at(double x) const;
    Eigen::RowVectorXd derivatives_at(double x) const;

    /// int l_i' l_j' over [-h, h].
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    /// int l_i l_j over [lo, hi] (diagonal row-sum form for the finite-difference scheme).
    Eigen::MatrixXd mass(double lo, double hi) const;
    const Eigen::MatrixXd& full_mass() const { return full_mass_; }

    template <typename Derived>
    Complex evaluate(const Eigen::MatrixBase<Derived>& nodal, double x) const
    {
        return (values_at(x).cast<Complex>() * nodal)(0, 0);
    }

    template <typename Derived>
    Complex evaluate_derivative(const Eigen::MatrixBase<Derived>& nodal, double x) const
    {
        return (derivatives_at(x).cast<Complex>() * nodal)(0, 0);
    }

private:
    DepthScheme scheme_;
    double h_;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd bary_;
    Eigen::MatrixXd diff_;
    Eigen::MatrixXd stiffness_;
    Eigen::MatrixXd full_mass_;
};

}  // namespace biperiodic
