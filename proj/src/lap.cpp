#include "biperiodic/lap.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "biperiodic/parallel.hpp"

namespace biperiodic {

namespace {

const Complex I(0, 1);
constexpr double four_pi2 = 4 * std::numbers::pi * std::numbers::pi;

double x_norm(const DiscreteField& v)
{
    const auto& b = *v.basis;
    const int M = b.size();
    double s = 0;
    for (int i = 0; i < v.modes.size(); ++i) {
        const ModeIndex n = v.modes[i];
        const double nn = double(n.n1) * n.n1 + double(n.n2) * n.n2;
        const Eigen::VectorXcd p = v.profile(n);
        Eigen::MatrixXd g = b.stiffness() + nn * b.full_mass();
        g(0, 0) += std::sqrt(1 + nn);
        g(M - 1, M - 1) += std::sqrt(1 + nn);
        s += p.dot(g.cast<Complex>() * p).real();
    }
    return std::sqrt(std::max(s, 0.0));
}

}  // namespace

std::vector<double> default_eps_schedule()
{
    std::vector<double> out;
    for (int j = 0; j <= 10; ++j) out.push_back(0.1 * std::ldexp(1.0, -j));
    return out;
}

LapScenario make_scenario(const Incidence& inc, const MediumModel& medium, const Discretization& disc,
                          double svd_threshold)
{
    if (!inc.real_k()) throw DomainError("lap: scenario needs real k");
    auto layer = std::make_shared<const LayerDiscretization>(medium, disc);
    DiscreteOperator op = assemble(inc, layer);
    KernelBasis ker = kernel(op, svd_threshold);
    const MediumReport rep = validate(medium, inc);
    return LapScenario{inc, layer, std::move(op), std::move(ker), default_eps_schedule(),
                       rep.q_ge_sin2.value_or(true)};
}

Eigen::MatrixXcd derivative_operator(const DiscreteOperator& op)
{
    const Incidence& inc = op.incidence();
    if (inc.real_k()) classify_modes(inc, op.disc().N, default_cutoff_tolerance(inc), true);
    const auto& layer = *op.layer();
    const int M = op.disc().M;
    const int B = op.modes().size();
    const Complex k = inc.k();
    const double c2 = inc.cos2();
    const Eigen::MatrixXcd mass = layer.mass().cast<Complex>();
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(op.dim(), op.dim());
    parallel_for(B, [&](int bi) {
        const ModeIndex n = op.modes()[bi];
        auto diag = D.block(bi * M, bi * M, M, M);
        diag = I * (2 * inc.n_dot_tilde(n) - 2.0 * k * c2) * mass - 2.0 * I * k * layer.contrast({0, 0});
        const Complex db = inc.dbeta_dk(n);
        diag(DepthBasis::top(), DepthBasis::top()) += db;
        diag(M - 1, M - 1) += db;
        if (op.block_diagonal()) return;
        for (int bj = 0; bj < B; ++bj) {
            if (bj == bi) continue;
            D.block(bi * M, bj * M, M, M) = -2.0 * I * k * layer.contrast(n - op.modes()[bj]);
        }
    });
    return D;
}

Eigen::VectorXcd derivative_load(const Incidence& inc, const Discretization& disc)
{
    const ModeSet modes(disc.N);
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(disc.unknowns());
    const double c = inc.cos_theta1();
    const Complex k = inc.k();
    f(modes.index({0, 0}) * disc.M + DepthBasis::top()) =
        2.0 * c * (1.0 - I * k * inc.h() * c) * std::exp(-I * k * inc.h() * c);
    return f;
}

Eigen::VectorXcd project(const LapScenario& scn, const Eigen::VectorXcd& v)
{
    const Eigen::MatrixXd G = scn.op.gram();
    return scn.kernel.vectors * (scn.kernel.vectors.adjoint() * (G.cast<Complex>() * v));
}

Eigen::VectorXcd project_load(const LapScenario& scn, const Eigen::VectorXcd& f)
{
    return scn.kernel.vectors * (scn.kernel.vectors.adjoint() * f);
}

Eigen::MatrixXcd projector(const LapScenario& scn)
{
    return scn.kernel.vectors * (scn.kernel.vectors.adjoint() * scn.op.gram().cast<Complex>());
}

Eigen::MatrixXcd restricted_derivative(const LapScenario& scn)
{
    const auto& V = scn.kernel.vectors;
    return V.adjoint() * derivative_operator(scn.op) * V;
}

ConstrainedSolution constrained_solve(const LapScenario& scn)
{
    const DiscreteOperator& op = scn.op;
    const Eigen::VectorXcd f = rhs(scn.inc, op.disc());
    ConstrainedSolution out;
    if (scn.kernel.empty()) {
        SolveOptions opts;
        opts.check_singularity = false;
        out.v = solve(op, f, opts).values;
        out.v_two_step = out.v;
        out.operator_residual = (op.matrix() * out.v - f).norm() / f.norm();
        return out;
    }
    const Eigen::MatrixXcd D = derivative_operator(op);
    const Eigen::VectorXcd fd = derivative_load(scn.inc, op.disc());
    const Eigen::MatrixXcd& V = scn.kernel.vectors;
    const GramFactor R(op);
    const int n = op.dim();
    const int d = scn.kernel.dimension();

    const Eigen::MatrixXcd VDV = V.adjoint() * D * V;
    Eigen::JacobiSVD<Eigen::MatrixXcd> rsvd(VDV, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto rs = rsvd.singularValues();
    out.restricted_condition = rs(0) / rs(rs.size() - 1);
    if (!(out.restricted_condition <= 1e8)) {
        std::ostringstream msg;
        msg << "constrained_solve: kernel-restricted P L'(0) has condition " << out.restricted_condition;
        throw ConstraintSingular(msg.str());
    }

    // Stacked system in X-scaled coordinates: [S^; V^H D R^{-1}] w = [R^{-H} f; V^H f'].
    const Eigen::MatrixXcd Shat = R.scale(op.matrix());
    Eigen::MatrixXcd DR(d, n);
    for (int l = 0; l < d; ++l) DR.row(l) = R.solve_RH(D.adjoint() * V.col(l)).adjoint();
    Eigen::MatrixXcd stacked(n + d, n);
    stacked << Shat, DR;
    Eigen::VectorXcd b(n + d);
    b << R.solve_RH(f), V.adjoint() * fd;
    const Eigen::VectorXcd w = stacked.colPivHouseholderQr().solve(b);
    out.v = R.solve_R(w);

    // Two-step: minimum-norm particular solution, then the kernel correction.
    Eigen::BDCSVD<Eigen::MatrixXcd> ssvd(Shat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ssvd.setThreshold(scn.kernel.threshold);
    const Eigen::VectorXcd vp = R.solve_R(ssvd.solve(R.solve_RH(f)));
    const Eigen::VectorXcd c = rsvd.solve(V.adjoint() * fd - V.adjoint() * (D * vp));
    out.v_two_step = vp + V * c;

    out.operator_residual = (op.matrix() * out.v - f).norm() / f.norm();
    out.constraint_residual = (V.adjoint() * (D * out.v - fd)).norm() / (D.norm() * out.v.norm());
    out.two_step_agreement = R.norm(out.v - out.v_two_step) / R.norm(out.v);
    return out;
}

ConstraintValue constraint_residual(const DiscreteField& u, const DiscreteField& phi, const Incidence& inc,
                                    const MediumModel& medium)
{
    if (!inc.real_k()) throw DomainError("constraint_residual: requires real k");
    const double k = inc.k().real();
    const auto content = propagating_content(phi, inc, x_norm(phi));
    if (!content.passed) {
        std::ostringstream msg;
        msg << "constraint_residual: mode has propagating content " << content.max_ratio << " at order ("
            << content.worst.n1 << ", " << content.worst.n2 << ")";
        throw NonEvanescentMode(msg.str());
    }
    const ModeSet& modes = u.modes;
    const auto& basis = *u.basis;
    const double c2 = inc.cos2();
    const Eigen::Vector2d alpha = k * inc.theta_tilde();

    // sums of the form sum psi_n^H B (a_n v_n + b sum_m c_{n-m} v_m), split into theta and q parts
    Complex grad{}, grad_a{}, pot{};
    for (const auto& cell : medium.depth_cells(2 * modes.truncation())) {
        const Eigen::MatrixXcd B = basis.mass(cell.lo, cell.hi).cast<Complex>();
        for (int i = 0; i < modes.size(); ++i) {
            const ModeIndex n = modes[i];
            const Eigen::VectorXcd Bp = B * phi.profile(n);
            const Eigen::VectorXcd un = u.profile(n);
            const Complex bu = Bp.dot(un);
            grad += I * inc.n_dot_tilde(n) * bu;
            grad_a += I * (n.n1 * alpha.x() + n.n2 * alpha.y()) * bu;
            Complex q_part = c2 * bu;
            for (int j = 0; j < modes.size(); ++j) {
                const ModeIndex m = modes[j];
                Complex q = cell.slice.at(n - m);
                if (n == m) q -= 1.0;
                if (q != Complex{}) q_part += q * Bp.dot(u.profile(m));
            }
            pot += q_part;
        }
    }
    // Half-space tails, int_h^inf e^{-2|beta_n|(x3-h)} dx3 = 1 / (2|beta_n|).
    Complex tail_grad{}, tail_grad_a{}, tail_pot{};
    for (int i = 0; i < modes.size(); ++i) {
        const ModeIndex n = modes[i];
        if (!(inc.alpha_norm(n) > k)) continue;
        const double w = 1.0 / (2 * std::abs(inc.beta(n)));
        const Complex pair = u.top(n) * std::conj(phi.top(n)) + u.bottom(n) * std::conj(phi.bottom(n));
        tail_grad += I * inc.n_dot_tilde(n) * w * pair;
        tail_grad_a += I * (n.n1 * alpha.x() + n.n2 * alpha.y()) * w * pair;
        tail_pot += c2 * w * pair;
    }
    ConstraintValue out;
    out.unscaled = four_pi2 * ((grad + tail_grad) - I * k * (pot + tail_pot));
    // alpha in place of theta~ and k^2 in place of k.
    out.k_scaled = four_pi2 * ((grad_a + tail_grad_a) - I * (k * k) * (pot + tail_pot));
    out.relative = std::abs(out.unscaled) / (four_pi2 * std::max(x_norm(u) * x_norm(phi), 1e-300));
    return out;
}

std::vector<ConstraintValue> constraint_residuals(const LapScenario& scn, const Eigen::VectorXcd& u)
{
    std::vector<ConstraintValue> out;
    const DiscreteField uf = make_field(scn.op, u);
    for (int l = 0; l < scn.kernel.dimension(); ++l) {
        out.push_back(constraint_residual(uf, scn.kernel.field(l), scn.inc, scn.layer->medium()));
    }
    return out;
}

double LapResult::slope(int first, int last) const
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int j = first; j <= last && j < static_cast<int>(eps.size()); ++j) {
        const double x = std::log(eps[static_cast<std::size_t>(j)]);
        const double y = std::log(deltas[static_cast<std::size_t>(j)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LapResult eps_sweep(const LapScenario& scn)
{
    const auto& sched = scn.eps_schedule;
    for (std::size_t j = 0; j < sched.size(); ++j) {
        if (!(sched[j] > 0) || (j > 0 && !(sched[j] < sched[j - 1]))) {
            throw DomainError("eps_sweep: schedule must be positive and decreasing");
        }
    }
    LapResult out;
    out.inside_hypotheses = scn.inside_hypotheses;
    out.eps = sched;
    out.constrained = constrained_solve(scn);
    const std::size_t J = sched.size();
    out.v_eps.resize(J);
    out.conditions.resize(J);
    const double k = scn.inc.k().real();
    parallel_for(static_cast<int>(J), [&](int j) {
        const Incidence inc = scn.inc.with_k(Complex(k, sched[static_cast<std::size_t>(j)]));
        const DiscreteOperator op = assemble(inc, scn.layer);
        const Eigen::VectorXd sigma = scaled_singular_values(op);
        const double rel = sigma(0) / sigma(sigma.size() - 1);
        if (rel < 1e-8) throw NearSingular("eps_sweep: L(eps) numerically singular", rel);
        out.conditions[static_cast<std::size_t>(j)] = 1 / rel;
        SolveOptions opts;
        opts.check_singularity = false;
        out.v_eps[static_cast<std::size_t>(j)] = solve(op, rhs(inc, op.disc()), opts).values;
    });
    const GramFactor R(scn.op);
    const Eigen::VectorXcd& vs = out.constrained.v;
    const double ns = R.norm(vs);
    for (std::size_t j = 0; j < J; ++j) {
        out.deltas.push_back(R.norm(out.v_eps[j] - vs) / ns);
        out.eps_constraints.push_back(constraint_residuals(scn, out.v_eps[j]));
    }
    if (J >= 2) {
        const double e1 = sched[J - 2], e2 = sched[J - 1];
        out.v_limit_extrapolated = (e1 * out.v_eps[J - 1] - e2 * out.v_eps[J - 2]) / (e1 - e2);
        out.extrapolation_error = R.norm(out.v_limit_extrapolated - vs) / ns;
    }
    out.limit_constraints = constraint_residuals(scn, vs);
    return out;
}

void write_sweep_csv(const LapResult& r, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(12);
    const std::size_t d = r.limit_constraints.size();
    out << "eps,delta,condition";
    for (std::size_t l = 0; l < d; ++l) out << ",constraint_" << l + 1;
    out << '\n';
    for (std::size_t j = 0; j < r.eps.size(); ++j) {
        out << r.eps[j] << ',' << r.deltas[j] << ',' << r.conditions[j];
        for (const auto& c : r.eps_constraints[j]) out << ',' << std::abs(c.unscaled);
        out << '\n';
    }
}

}  // namespace biperiodic
