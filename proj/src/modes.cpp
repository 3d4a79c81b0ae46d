#include "biperiodic/modes.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <sstream>

#include "biperiodic/parallel.hpp"

namespace biperiodic {

std::pair<Complex, Complex> KernelBasis::tail(int l, const ModeIndex& n) const
{
    const DiscreteField f = field(l);
    return {f.top(n), f.bottom(n)};
}

KernelBasis kernel(const DiscreteOperator& op, double threshold)
{
    if (!op.incidence().real_k()) throw DomainError("kernel: requires real k");
    const GramFactor R(op);
    const int M = op.disc().M;
    const int B = op.modes().size();
    const int dim = op.dim();

    // (block, sigma, right singular vector in scaled coordinates)
    struct Part {
        Eigen::VectorXd sigma;
        Eigen::MatrixXcd V;
    };
    std::vector<Part> parts;
    if (op.block_diagonal()) {
        parts.resize(static_cast<std::size_t>(B));
        parallel_for(B, [&](int b) {
            const Eigen::MatrixXcd Ab = op.matrix().block(b * M, b * M, M, M);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R.scale_block(Ab, b, b), Eigen::ComputeFullV);
            Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(dim, M);
            V.block(b * M, 0, M, M) = svd.matrixV();
            parts[static_cast<std::size_t>(b)] = {svd.singularValues(), std::move(V)};
        });
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(R.scale(op.matrix()), Eigen::ComputeFullV);
        parts.push_back({svd.singularValues(), svd.matrixV()});
    }

    double smax = 0;
    for (const auto& p : parts) smax = std::max(smax, p.sigma.maxCoeff());

    KernelBasis out;
    out.threshold = threshold;
    out.sigma_max = smax;
    out.modes = op.modes();
    out.basis = op.layer()->basis();
    out.gap_sigma = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXcd> cols;
    std::vector<double> kept;
    for (const auto& p : parts) {
        for (Eigen::Index i = 0; i < p.sigma.size(); ++i) {
            const double rel = p.sigma(i) / smax;
            if (rel > threshold / 10 && rel < threshold * 10) {
                std::ostringstream msg;
                msg << "kernel: relative singular value " << rel << " within a factor 10 of the threshold "
                    << threshold;
                throw ThresholdAmbiguity(msg.str());
            }
            if (rel < threshold) {
                cols.push_back(R.solve_R(p.V.col(i)));
                kept.push_back(rel);
            } else {
                out.gap_sigma = std::min(out.gap_sigma, rel);
            }
        }
    }
    out.vectors.resize(dim, static_cast<Eigen::Index>(cols.size()));
    out.singular_values.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t l = 0; l < cols.size(); ++l) {
        out.vectors.col(static_cast<Eigen::Index>(l)) = cols[l];
        out.singular_values(static_cast<Eigen::Index>(l)) = kept[l];
    }
    return out;
}

EvanescenceReport propagating_content(const DiscreteField& v, const Incidence& inc, double norm, double tol)
{
    EvanescenceReport rep;
    const double k = inc.k().real();
    for (int i = 0; i < v.modes.size(); ++i) {
        const ModeIndex n = v.modes[i];
        if (!(inc.alpha_norm(n) < k)) continue;
        const double r = std::max(std::abs(v.top(n)), std::abs(v.bottom(n))) / norm;
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.worst = n;
        }
    }
    rep.passed = rep.max_ratio <= tol;
    return rep;
}

EvanescenceReport verify_evanescent(const KernelBasis& basis, const Incidence& inc, double tol)
{
    EvanescenceReport rep;
    for (int l = 0; l < basis.dimension(); ++l) {
        const auto r = propagating_content(basis.field(l), inc, 1.0, tol);
        if (r.max_ratio >= rep.max_ratio) rep = r;
    }
    rep.passed = rep.max_ratio <= tol;
    return rep;
}

namespace {

double adjoint_ratio(const DiscreteOperator& op, const GramFactor& R, const Eigen::VectorXcd& v, double smax)
{
    const Eigen::VectorXcd w = R.solve_RH(op.matrix().adjoint() * v);
    return w.norm() / (smax * R.norm(v));
}

}  // namespace

double adjoint_kernel_check(const DiscreteOperator& op, const KernelBasis& basis)
{
    const GramFactor R(op);
    double worst = 0;
    for (int l = 0; l < basis.dimension(); ++l) {
        worst = std::max(worst, adjoint_ratio(op, R, basis.vectors.col(l), basis.sigma_max));
    }
    return worst;
}

double adjoint_residual(const DiscreteOperator& op, const Eigen::VectorXcd& v)
{
    const Eigen::VectorXd sigma = scaled_singular_values(op);
    return adjoint_ratio(op, GramFactor(op), v, sigma(sigma.size() - 1));
}

Complex LiftedMode::operator()(const Eigen::Vector3d& x) const
{
    const double h = inc.h();
    if (x.z() > h) return rayleigh_eval(tail_plus, Side::above, inc, x);
    if (x.z() < -h) return rayleigh_eval(tail_minus, Side::below, inc, x);
    const auto a = inc.alpha_complex();
    const Complex I(0, 1);
    Complex sum{};
    for (int i = 0; i < interior.modes.size(); ++i) {
        const ModeIndex n = interior.modes[i];
        sum += interior.at(n, x.z()) * std::exp(I * (double(n.n1) * x.x() + double(n.n2) * x.y()));
    }
    return std::exp(I * (a.x() * x.x() + a.y() * x.y())) * sum;
}

std::vector<LiftedMode> mode_lift(const KernelBasis& basis, const Incidence& inc)
{
    std::vector<LiftedMode> out;
    for (int l = 0; l < basis.dimension(); ++l) {
        LiftedMode m{basis.field(l), {}, {}, inc};
        for (int i = 0; i < basis.modes.size(); ++i) {
            const ModeIndex n = basis.modes[i];
            m.tail_plus[n] = m.interior.top(n);
            m.tail_minus[n] = m.interior.bottom(n);
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace biperiodic
