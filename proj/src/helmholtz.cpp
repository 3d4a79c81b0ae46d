#include "biperiodic/helmholtz.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biperiodic/parallel.hpp"

namespace biperiodic {

namespace {

const Complex I(0, 1);

Eigen::MatrixXcd block_of(const Eigen::MatrixXcd& A, int bi, int bj, int M)
{
    return A.block(static_cast<Eigen::Index>(bi) * M, static_cast<Eigen::Index>(bj) * M, M, M);
}

}  // namespace

void Discretization::check() const
{
    if (N < 0) throw DomainError("discretization: N must be >= 0");
    if (M < 8) throw DomainError("discretization: M must be >= 8");
}

LayerDiscretization::LayerDiscretization(const MediumModel& medium, const Discretization& disc)
    : medium_(medium), disc_(disc), modes_(disc.N), differences_(2 * disc.N)
{
    disc.check();
    if (medium.kind() == MediumModel::Kind::sampled) {
        const int need = 2 * (2 * disc.N + 1);
        if (medium.transverse_resolution() < need) {
            throw AliasError("sampled medium needs at least " + std::to_string(need) +
                             " points per period for N = " + std::to_string(disc.N));
        }
    }
    basis_ = std::make_shared<const DepthBasis>(disc.depth_scheme, disc.M, medium.h());
    const int M = disc.M;
    zero_ = Eigen::MatrixXcd::Zero(M, M);
    const auto cells = medium.depth_cells(2 * disc.N);
    std::vector<Eigen::MatrixXd> cell_mass;
    cell_mass.reserve(cells.size());
    for (const auto& c : cells) cell_mass.push_back(basis_->mass(c.lo, c.hi));

    contrast_.assign(static_cast<std::size_t>(differences_.size()), zero_);
    for (int i = 0; i < differences_.size(); ++i) {
        const ModeIndex m = differences_[i];
        Eigen::MatrixXcd acc = zero_;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            Complex coeff = cells[c].slice.at(m);
            if (m == ModeIndex{0, 0}) coeff -= 1.0;
            if (coeff != Complex{}) acc += coeff * cell_mass[c].cast<Complex>();
        }
        contrast_[static_cast<std::size_t>(i)] = std::move(acc);
    }
}

const Eigen::MatrixXcd& LayerDiscretization::contrast(const ModeIndex& m) const
{
    if (!differences_.contains(m)) return zero_;
    return contrast_[static_cast<std::size_t>(differences_.index(m))];
}

DiscreteOperator::DiscreteOperator(Eigen::MatrixXcd matrix, Incidence inc,
                                   std::shared_ptr<const LayerDiscretization> layer)
    : matrix_(std::move(matrix)), inc_(inc), layer_(std::move(layer))
{
    const auto& basis = *layer_->basis();
    const int M = basis.size();
    for (int b = 0; b < modes().size(); ++b) {
        const ModeIndex n = modes()[b];
        const double nn = double(n.n1) * n.n1 + double(n.n2) * n.n2;
        Eigen::MatrixXd g = basis.stiffness() + nn * basis.full_mass();
        const double w = std::sqrt(1.0 + nn);
        g(DepthBasis::top(), DepthBasis::top()) += w;
        g(M - 1, M - 1) += w;
        gram_.push_back(std::move(g));
    }
}

Eigen::MatrixXd DiscreteOperator::gram() const
{
    const int M = disc().M;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim(), dim());
    for (int b = 0; b < modes().size(); ++b) G.block(b * M, b * M, M, M) = gram_[static_cast<std::size_t>(b)];
    return G;
}

GramFactor::GramFactor(const DiscreteOperator& op) : M_(op.disc().M)
{
    for (int b = 0; b < op.modes().size(); ++b) {
        Eigen::LLT<Eigen::MatrixXd> llt(op.gram_block(b));
        R_.push_back(Eigen::MatrixXd(llt.matrixU()).cast<Complex>());
    }
}

Eigen::VectorXcd GramFactor::apply_R(const Eigen::VectorXcd& v) const
{
    Eigen::VectorXcd out(v.size());
    for (std::size_t b = 0; b < R_.size(); ++b) {
        const auto off = static_cast<Eigen::Index>(b) * M_;
        out.segment(off, M_) = R_[b].triangularView<Eigen::Upper>() * v.segment(off, M_);
    }
    return out;
}

Eigen::VectorXcd GramFactor::solve_R(const Eigen::VectorXcd& v) const
{
    Eigen::VectorXcd out(v.size());
    for (std::size_t b = 0; b < R_.size(); ++b) {
        const auto off = static_cast<Eigen::Index>(b) * M_;
        out.segment(off, M_) = R_[b].triangularView<Eigen::Upper>().solve(v.segment(off, M_));
    }
    return out;
}

Eigen::VectorXcd GramFactor::solve_RH(const Eigen::VectorXcd& v) const
{
    Eigen::VectorXcd out(v.size());
    for (std::size_t b = 0; b < R_.size(); ++b) {
        const auto off = static_cast<Eigen::Index>(b) * M_;
        out.segment(off, M_) =
            R_[b].adjoint().triangularView<Eigen::Lower>().solve(v.segment(off, M_));
    }
    return out;
}

Eigen::MatrixXcd GramFactor::scale_block(const Eigen::MatrixXcd& A_block, int b_row, int b_col) const
{
    const Eigen::MatrixXcd& Rr = R_[static_cast<std::size_t>(b_row)];
    const Eigen::MatrixXcd& Rc = R_[static_cast<std::size_t>(b_col)];
    // R_r^{-H} A R_c^{-1}
    Eigen::MatrixXcd left = Rr.adjoint().triangularView<Eigen::Lower>().solve(A_block);
    Eigen::MatrixXcd right =
        Rc.adjoint().triangularView<Eigen::Lower>().solve(left.adjoint());  // (R_c^{-H} left^H) = (left R_c^{-1})^H
    return right.adjoint();
}

Eigen::MatrixXcd GramFactor::scale(const Eigen::MatrixXcd& A) const
{
    const int B = static_cast<int>(R_.size());
    Eigen::MatrixXcd out(A.rows(), A.cols());
    for (int bi = 0; bi < B; ++bi) {
        for (int bj = 0; bj < B; ++bj) {
            out.block(bi * M_, bj * M_, M_, M_) = scale_block(block_of(A, bi, bj, M_), bi, bj);
        }
    }
    return out;
}

Eigen::VectorXd scaled_singular_values(const DiscreteOperator& op)
{
    const GramFactor R(op);
    const int M = op.disc().M;
    const int B = op.modes().size();
    Eigen::VectorXd sigma(op.dim());
    if (op.block_diagonal()) {
        std::vector<Eigen::VectorXd> parts(static_cast<std::size_t>(B));
        parallel_for(B, [&](int b) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R.scale_block(block_of(op.matrix(), b, b, M), b, b));
            parts[static_cast<std::size_t>(b)] = svd.singularValues();
        });
        for (int b = 0; b < B; ++b) sigma.segment(b * M, M) = parts[static_cast<std::size_t>(b)];
    } else {
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(R.scale(op.matrix()));
        sigma = svd.singularValues();
    }
    std::sort(sigma.begin(), sigma.end());
    return sigma;
}

DiscreteOperator assemble(const Incidence& inc, const MediumModel& medium, const Discretization& disc)
{
    return assemble(inc, std::make_shared<const LayerDiscretization>(medium, disc));
}

DiscreteOperator assemble(const Incidence& inc, std::shared_ptr<const LayerDiscretization> layer)
{
    const auto& disc = layer->disc();
    const ModeSet& modes = layer->modes();
    if (std::abs(layer->medium().h() - inc.h()) > 1e-12 * inc.h()) {
        throw DomainError("assemble: medium and incidence disagree on the half-thickness");
    }
    if (inc.real_k()) classify_modes(inc, disc.N, default_cutoff_tolerance(inc), true);
    const int M = disc.M;
    const int B = modes.size();
    const Complex k = inc.k();
    const Complex k2 = k * k;
    const Eigen::MatrixXcd stiff = layer->stiffness().cast<Complex>();
    const Eigen::MatrixXcd mass = layer->mass().cast<Complex>();
    const int bottom = M - 1;

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(disc.unknowns(), disc.unknowns());
    parallel_for(B, [&](int bi) {
        const ModeIndex n = modes[bi];
        const Complex b = inc.beta(n);
        auto diag = A.block(bi * M, bi * M, M, M);
        // q == 1 folds into -beta_n^2 exactly.
        diag = stiff - b * b * mass - k2 * layer->contrast({0, 0});
        diag(DepthBasis::top(), DepthBasis::top()) -= I * b;
        diag(bottom, bottom) -= I * b;
        if (layer->transversally_constant()) return;
        for (int bj = 0; bj < B; ++bj) {
            if (bj == bi) continue;
            const ModeIndex m = modes[bj];
            A.block(bi * M, bj * M, M, M) = -k2 * layer->contrast(n - m);
        }
    });
    return DiscreteOperator(std::move(A), inc, std::move(layer));
}

Eigen::VectorXcd rhs(const Incidence& inc, const Discretization& disc)
{
    const ModeSet modes(disc.N);
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(disc.unknowns());
    const Complex kc = inc.incident_vertical();
    f(modes.index({0, 0}) * disc.M + DepthBasis::top()) = -2.0 * I * kc * std::exp(-I * kc * inc.h());
    return f;
}

DiscreteField make_field(const DiscreteOperator& op, Eigen::VectorXcd values)
{
    return DiscreteField{op.modes(), op.layer()->basis(), std::move(values)};
}

DiscreteField solve(const DiscreteOperator& op, const Eigen::VectorXcd& load, const SolveOptions& opts)
{
    if (load.size() != op.dim()) throw DomainError("solve: load vector has the wrong length");
    if (opts.check_singularity) {
        const Eigen::VectorXd sigma = scaled_singular_values(op);
        const double rel = sigma(0) / sigma(sigma.size() - 1);
        if (rel < opts.singular_threshold) {
            std::ostringstream msg;
            msg << "solve: operator is numerically singular (relative sigma_min = " << rel
                << "); alpha is close to a propagative wave vector";
            throw NearSingular(msg.str(), rel);
        }
    }
    const int M = op.disc().M;
    const int B = op.modes().size();
    Eigen::VectorXcd x(op.dim());
    if (op.block_diagonal()) {
        parallel_for(B, [&](int b) {
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(block_of(op.matrix(), b, b, M));
            x.segment(b * M, M) = lu.solve(load.segment(b * M, M));
        });
    } else {
        x = op.matrix().partialPivLu().solve(load);
    }
    const double scale = std::max(load.norm(), std::numeric_limits<double>::min());
    const double res = (op.matrix() * x - load).norm() / scale;
    if (!(res <= opts.residual_tolerance)) {
        std::ostringstream msg;
        msg << "solve: relative residual " << res << " above tolerance";
        throw NearSingular(msg.str(), 0.0);
    }
    return make_field(op, std::move(x));
}

double RayleighData::total_efficiency() const
{
    double s = 0;
    for (const auto& [n, e] : efficiency_plus) s += e;
    for (const auto& [n, e] : efficiency_minus) s += e;
    return s;
}

RayleighData rayleigh_data(const DiscreteField& v, const Incidence& inc)
{
    RayleighData out;
    const Complex kc = inc.incident_vertical();
    const double beta0 = kc.real();
    for (int i = 0; i < v.modes.size(); ++i) {
        const ModeIndex n = v.modes[i];
        Complex up = v.top(n);
        if (n == ModeIndex{0, 0}) up -= std::exp(-I * kc * inc.h());
        const Complex down = v.bottom(n);
        out.u_plus[n] = up;
        out.u_minus[n] = down;
        if (inc.alpha_norm(n) < inc.k().real()) {
            const double w = inc.beta(n).real() / beta0;
            out.efficiency_plus[n] = w * std::norm(up);
            out.efficiency_minus[n] = w * std::norm(down);
        }
    }
    out.balance_residual = std::abs(out.total_efficiency() - 1.0);
    return out;
}

Complex quasiperiodic_lift(const DiscreteField& v, const Incidence& inc, const Eigen::Vector3d& x)
{
    const auto a = inc.alpha_complex();
    const Complex carrier = std::exp(I * (a.x() * x.x() + a.y() * x.y()));
    const double h = inc.h();
    if (std::abs(x.z()) <= h) {
        Complex sum{};
        for (int i = 0; i < v.modes.size(); ++i) {
            const ModeIndex n = v.modes[i];
            sum += v.at(n, x.z()) * std::exp(I * (double(n.n1) * x.x() + double(n.n2) * x.y()));
        }
        return carrier * sum;
    }
    const RayleighData r = rayleigh_data(v, inc);
    if (x.z() > h) {
        const Complex incident = carrier * std::exp(-I * inc.incident_vertical() * x.z());
        return incident + rayleigh_eval(r.u_plus, Side::above, inc, x);
    }
    return rayleigh_eval(r.u_minus, Side::below, inc, x);
}

}  // namespace biperiodic
