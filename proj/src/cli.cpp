#include "biperiodic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "biperiodic/errors.hpp"
#include "biperiodic/helmholtz.hpp"
#include "biperiodic/lap.hpp"
#include "biperiodic/maxwell.hpp"
#include "biperiodic/medium.hpp"
#include "biperiodic/modes.hpp"
#include "biperiodic/slab.hpp"

namespace biperiodic::cli {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"solve", "modes", "lap", "dispersion", "slab", "maxwell-check"};
    return c;
}

namespace {

json parse_value(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

double number(const json& j, const char* key, double fallback)
{
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

double required_number(const json& j, const char* section, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string(section) + "." + key + " is required and must be a number");
    }
    return j.at(key).get<double>();
}

int integer(const json& j, const char* key, int fallback)
{
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
    return j.at(key).get<int>();
}

/// A number or [re, im].
Complex complex_value(const json& j, const std::string& what)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(what + " must be a number or [re, im]");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

const json& section(const json& doc, const char* name)
{
    static const json empty = json::object();
    if (!doc.contains(name)) return empty;
    if (!doc.at(name).is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
    return doc.at(name);
}

void check_sections(const json& doc)
{
    static const std::vector<std::string> known{"incidence", "medium", "discretization", "lap",
                                                "dispersion", "maxwell", "output", "strict"};
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown section '" + key + "'");
        }
    }
}

Incidence make_incidence(const json& doc)
{
    const json& s = section(doc, "incidence");
    const double k = required_number(s, "incidence", "k");
    const Complex kc(k, number(s, "k_imag", 0.0));
    const double h = number(s, "h", 1.0);
    if (s.contains("alpha")) {
        if (s.contains("theta1") || s.contains("theta2")) {
            throw ConfigError("incidence: give either alpha or theta1/theta2, not both");
        }
        const json& a = s.at("alpha");
        if (!a.is_array() || a.size() != 2) throw ConfigError("incidence.alpha must be [a1, a2]");
        return Incidence::from_alpha(kc, Eigen::Vector2d(a[0].get<double>(), a[1].get<double>()), h);
    }
    return Incidence::from_angles(kc, number(s, "theta1", 0.0), number(s, "theta2", 0.0), h);
}

MediumModel make_medium(const json& doc, double h, const fs::path& base_dir)
{
    const json& s = section(doc, "medium");
    const std::string kind = s.value("kind", "homogeneous");
    const double floor = number(s, "q_floor", 1e-6);
    if (kind == "homogeneous") {
        if (!s.contains("q0")) throw ConfigError("medium.q0 is required for kind homogeneous");
        return MediumModel::homogeneous(complex_value(s.at("q0"), "medium.q0"), h, floor);
    }
    if (kind == "slab_stack") {
        if (!s.contains("layers") || !s.at("layers").is_array()) {
            throw ConfigError("medium.layers must be an array for kind slab_stack");
        }
        std::vector<LayerSpec> layers;
        for (const json& l : s.at("layers")) {
            layers.push_back({required_number(l, "medium.layers[]", "lo"), required_number(l, "medium.layers[]", "hi"),
                              complex_value(l.at("q"), "medium.layers[].q")});
        }
        return MediumModel::slab_stack(std::move(layers), h, floor);
    }
    if (kind == "sampled") {
        if (!s.contains("path") || !s.at("path").is_string()) throw ConfigError("medium.path is required for sampled");
        fs::path p = s.at("path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        MediumModel m = MediumModel::load(p, floor);
        if (std::abs(m.h() - h) > 1e-12 * h) throw ConfigError("medium file h differs from incidence.h");
        return m;
    }
    throw ConfigError("medium.kind must be homogeneous, slab_stack or sampled");
}

Discretization make_disc(const json& doc)
{
    const json& s = section(doc, "discretization");
    Discretization d;
    d.N = integer(s, "N", 0);
    d.M = integer(s, "M", 32);
    const std::string scheme = s.value("depth_scheme", "chebyshev");
    if (scheme == "chebyshev") {
        d.depth_scheme = DepthScheme::chebyshev;
    } else if (scheme == "finite_difference") {
        d.depth_scheme = DepthScheme::finite_difference;
    } else {
        throw ConfigError("discretization.depth_scheme must be chebyshev or finite_difference");
    }
    d.check();
    return d;
}

double positive(const json& s, const char* key, double fallback)
{
    const double v = number(s, key, fallback);
    if (!(v > 0)) throw ConfigError(std::string(key) + " must be positive");
    return v;
}

std::vector<double> eps_schedule(const json& doc)
{
    const json& s = section(doc, "lap");
    if (s.contains("eps")) {
        std::vector<double> e;
        for (const json& v : s.at("eps")) {
            if (!v.is_number() || !(v.get<double>() > 0)) throw ConfigError("lap.eps entries must be positive");
            e.push_back(v.get<double>());
        }
        if (e.size() < 2) throw ConfigError("lap.eps needs at least two values");
        return e;
    }
    const double eps0 = positive(s, "eps0", 0.1);
    const int levels = integer(s, "levels", 11);
    if (levels < 2) throw ConfigError("lap.levels must be at least 2");
    std::vector<double> e;
    for (int j = 0; j < levels; ++j) e.push_back(eps0 * std::ldexp(1.0, -j));
    return e;
}

json header(const RunConfig& cfg)
{
    return {{"tool", tool_name}, {"version", tool_version}, {"command", cfg.command},
            {"config_hash", config_hash(cfg.doc)}};
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::string mode_key(const ModeIndex& n) { return std::to_string(n.n1) + "," + std::to_string(n.n2); }

json coeffs_json(const ModeCoefficients& c)
{
    json out = json::array();
    for (const auto& [n, v] : c) out.push_back({{"n", {n.n1, n.n2}}, {"value", complex_json(v)}});
    return out;
}

json rayleigh_json(const RayleighData& r)
{
    json eff_p = json::object(), eff_m = json::object();
    for (const auto& [n, e] : r.efficiency_plus) eff_p[mode_key(n)] = e;
    for (const auto& [n, e] : r.efficiency_minus) eff_m[mode_key(n)] = e;
    return {{"u_plus", coeffs_json(r.u_plus)},
            {"u_minus", coeffs_json(r.u_minus)},
            {"efficiency_plus", eff_p},
            {"efficiency_minus", eff_m},
            {"total_efficiency", r.total_efficiency()},
            {"balance_residual", r.balance_residual}};
}

void write_efficiencies(const fs::path& path, const RayleighData& r, const Incidence& inc)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "n1,n2,side,beta_re,efficiency,balance_residual\n";
    out << std::setprecision(17);
    auto rows = [&](const std::map<ModeIndex, double>& eff, const char* side) {
        for (const auto& [n, e] : eff) {
            out << n.n1 << ',' << n.n2 << ',' << side << ',' << inc.beta(n).real() << ',' << e << ','
                << r.balance_residual << '\n';
        }
    };
    rows(r.efficiency_plus, "above");
    rows(r.efficiency_minus, "below");
}

struct Hypotheses {
    std::vector<std::string> warnings;
    bool violated = false;  ///< q >= sin^2(theta1) fails somewhere
};

Hypotheses check_medium(const MediumModel& medium, const Incidence& inc, std::ostream& log)
{
    const MediumReport rep = validate(medium, inc);
    Hypotheses h{rep.warnings, rep.q_ge_sin2.has_value() && !*rep.q_ge_sin2};
    for (const auto& w : rep.warnings) log << "warning: " << w << '\n';
    return h;
}

int finish(const RunConfig& cfg, const Hypotheses& h)
{
    return cfg.strict && h.violated ? hypothesis_warning : ok;
}

int run_solve(const RunConfig& cfg, std::ostream& log)
{
    const Incidence inc = make_incidence(cfg.doc);
    const MediumModel medium = make_medium(cfg.doc, inc.h(), cfg.base_dir);
    const Discretization disc = make_disc(cfg.doc);
    const Hypotheses hyp = check_medium(medium, inc, log);
    const DiscreteOperator op = assemble(inc, medium, disc);
    const DiscreteField v = solve(op, rhs(inc, disc));
    const RayleighData r = rayleigh_data(v, inc);

    json report = header(cfg);
    report["rayleigh"] = rayleigh_json(r);
    report["warnings"] = hyp.warnings;
    write_json(cfg.out_dir / "rayleigh.json", report);
    write_efficiencies(cfg.out_dir / "efficiencies.csv", r, inc);
    log << "solve: total efficiency " << r.total_efficiency() << ", balance residual " << r.balance_residual << '\n';
    return finish(cfg, hyp);
}

json kernel_json(const KernelBasis& kb, const Incidence& inc)
{
    json vecs = json::array();
    for (int l = 0; l < kb.dimension(); ++l) {
        json tails = json::array();
        for (int i = 0; i < kb.modes.size(); ++i) {
            const ModeIndex n = kb.modes[i];
            const auto [p, m] = kb.tail(l, n);
            tails.push_back({{"n", {n.n1, n.n2}}, {"plus", complex_json(p)}, {"minus", complex_json(m)}});
        }
        vecs.push_back({{"tails", tails}});
    }
    std::vector<double> sv(kb.singular_values.data(), kb.singular_values.data() + kb.singular_values.size());
    const EvanescenceReport ev = verify_evanescent(kb, inc);
    return {{"dimension", kb.dimension()},
            {"singular_values", sv},
            {"gap", kb.gap_sigma},
            {"threshold", kb.threshold},
            {"sigma_max", kb.sigma_max},
            {"evanescence", {{"max_ratio", ev.max_ratio}, {"passed", ev.passed}}},
            {"vectors", vecs}};
}

int run_modes(const RunConfig& cfg, std::ostream& log)
{
    const Incidence inc = make_incidence(cfg.doc);
    const MediumModel medium = make_medium(cfg.doc, inc.h(), cfg.base_dir);
    const Discretization disc = make_disc(cfg.doc);
    const Hypotheses hyp = check_medium(medium, inc, log);
    const double thr = positive(section(cfg.doc, "lap"), "svd_threshold", 1e-8);
    const DiscreteOperator op = assemble(inc, medium, disc);
    const KernelBasis kb = kernel(op, thr);

    json report = header(cfg);
    report["kernel"] = kernel_json(kb, inc);
    report["kernel"]["adjoint_residual"] = kb.empty() ? 0.0 : adjoint_kernel_check(op, kb);
    report["warnings"] = hyp.warnings;
    write_json(cfg.out_dir / "modes.json", report);
    log << "modes: kernel dimension " << kb.dimension() << '\n';
    return finish(cfg, hyp);
}

json constraints_json(const std::vector<ConstraintValue>& cs)
{
    json out = json::array();
    for (const auto& c : cs) {
        out.push_back({{"unscaled", complex_json(c.unscaled)}, {"k_scaled", complex_json(c.k_scaled)},
                       {"relative", c.relative}});
    }
    return out;
}

int run_lap(const RunConfig& cfg, std::ostream& log)
{
    const Incidence inc = make_incidence(cfg.doc);
    if (!inc.real_k()) throw ConfigError("lap: incidence.k_imag must be zero");
    const MediumModel medium = make_medium(cfg.doc, inc.h(), cfg.base_dir);
    const Discretization disc = make_disc(cfg.doc);
    const Hypotheses hyp = check_medium(medium, inc, log);
    const double thr = positive(section(cfg.doc, "lap"), "svd_threshold", 1e-8);

    LapScenario scn = make_scenario(inc, medium, disc, thr);
    scn.eps_schedule = eps_schedule(cfg.doc);
    const LapResult r = eps_sweep(scn);
    write_sweep_csv(r, cfg.out_dir / "sweep.csv");

    const int last = static_cast<int>(r.eps.size()) - 1;
    const int first = std::max(0, std::min(4, last - 1));
    const DiscreteField vstar = make_field(scn.op, r.constrained.v);

    json report = header(cfg);
    report["kernel"] = kernel_json(scn.kernel, inc);
    report["inside_hypotheses"] = r.inside_hypotheses;
    report["sweep"] = {{"eps", r.eps},
                       {"delta", r.deltas},
                       {"condition", r.conditions},
                       {"slope", r.slope(first, last)},
                       {"slope_range", {first, last}},
                       {"extrapolation_error", r.extrapolation_error}};
    report["constrained"] = {{"operator_residual", r.constrained.operator_residual},
                             {"constraint_residual", r.constrained.constraint_residual},
                             {"two_step_agreement", r.constrained.two_step_agreement},
                             {"restricted_condition", r.constrained.restricted_condition},
                             {"constraints", constraints_json(r.limit_constraints)},
                             {"rayleigh", rayleigh_json(rayleigh_data(vstar, inc))}};
    report["warnings"] = hyp.warnings;
    write_json(cfg.out_dir / "lap.json", report);
    log << "lap: kernel dimension " << scn.kernel.dimension() << ", slope " << r.slope(first, last)
        << ", final delta " << r.deltas.back() << '\n';
    if (!r.inside_hypotheses) log << "warning: scenario lies outside the LAP hypotheses\n";
    return cfg.strict && (hyp.violated || !r.inside_hypotheses) ? hypothesis_warning : ok;
}

const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

double slab_q0(const json& doc, const char* sec)
{
    const json& s = section(doc, sec);
    if (s.contains("q0")) return complex_value(s.at("q0"), std::string(sec) + ".q0").real();
    const json& m = section(doc, "medium");
    if (m.value("kind", "homogeneous") == "homogeneous" && m.contains("q0")) {
        const Complex q = complex_value(m.at("q0"), "medium.q0");
        if (q.imag() != 0) throw ConfigError(std::string(sec) + ": needs a real q0");
        return q.real();
    }
    throw ConfigError(std::string(sec) + ": needs q0 or a homogeneous medium");
}

int run_dispersion(const RunConfig& cfg, std::ostream& log)
{
    const json& s = section(cfg.doc, "dispersion");
    const json& is = section(cfg.doc, "incidence");
    const double k = required_number(is, "incidence", "k");
    const double h = number(is, "h", 1.0);
    const double q0 = slab_q0(cfg.doc, "dispersion");
    const std::string parity = s.value("parity", "both");
    const int scan = integer(s, "scan", 10000);
    const int res = integer(s, "resolution", 512);
    if (scan < 2 || res < 1) throw ConfigError("dispersion.scan and dispersion.resolution must be positive");

    std::vector<DispersionRoot> roots;
    if (parity == "even" || parity == "both") {
        for (const auto& r : find_dispersion_roots(q0, h, k, Parity::even, scan)) roots.push_back(r);
    }
    if (parity == "odd" || parity == "both") {
        for (const auto& r : find_dispersion_roots(q0, h, k, Parity::odd, scan)) roots.push_back(r);
    }
    if (parity != "even" && parity != "odd" && parity != "both") {
        throw ConfigError("dispersion.parity must be even, odd or both");
    }

    double radius = 0;
    if (s.contains("mode_radius")) {
        radius = required_number(s, "dispersion", "mode_radius");
    } else if (!roots.empty()) {
        radius = roots.front().abs_alpha;
    }
    const BrillouinMap map = brillouin_map(k, radius, res);
    map.write_csv(cfg.out_dir / "brillouin.csv");

    json jr = json::array();
    for (const auto& r : roots) {
        jr.push_back({{"abs_alpha", r.abs_alpha}, {"parity", parity_name(r.parity)},
                      {"inner_wavenumber", r.inner_wavenumber}, {"decay", r.decay},
                      {"residual", dispersion_residual({q0, h, k, r.abs_alpha}, r.parity)}});
    }
    json report = header(cfg);
    report["q0"] = q0;
    report["k"] = k;
    report["h"] = h;
    report["roots"] = jr;
    report["brillouin"] = {{"resolution", res},
                           {"mode_radius", radius},
                           {"cutoff_cells", map.count(BrillouinClass::cutoff)},
                           {"propagative_cells", map.count(BrillouinClass::propagative)},
                           {"both_cells", map.count(BrillouinClass::both)}};
    write_json(cfg.out_dir / "dispersion.json", report);
    log << "dispersion: " << roots.size() << " root(s)\n";
    return ok;
}

int run_slab(const RunConfig& cfg, std::ostream& log)
{
    const Incidence inc = make_incidence(cfg.doc);
    const double q0 = slab_q0(cfg.doc, "medium");
    const Discretization disc = make_disc(cfg.doc);
    const MediumModel medium = MediumModel::homogeneous(q0, inc.h());
    const Hypotheses hyp = check_medium(medium, inc, log);

    const RayleighData oracle = transfer_matrix_scattering(q0, inc);
    const RayleighData galerkin = rayleigh_data(solve(assemble(inc, medium, disc), rhs(inc, disc)), inc);
    const ModeIndex o{0, 0};
    const double err = std::max(std::abs(galerkin.u_plus.at(o) - oracle.u_plus.at(o)),
                                std::abs(galerkin.u_minus.at(o) - oracle.u_minus.at(o)));

    json report = header(cfg);
    report["q0"] = q0;
    report["transfer_matrix"] = {{"u_plus", complex_json(oracle.u_plus.at(o))},
                                 {"u_minus", complex_json(oracle.u_minus.at(o))}};
    report["galerkin"] = {{"u_plus", complex_json(galerkin.u_plus.at(o))},
                          {"u_minus", complex_json(galerkin.u_minus.at(o))},
                          {"balance_residual", galerkin.balance_residual}};
    report["max_error"] = err;
    if (inc.real_k() && q0 > 1) {
        json roots = json::array();
        const double a = inc.alpha().norm();
        for (Parity p : {Parity::even, Parity::odd}) {
            for (const auto& r : find_dispersion_roots(q0, inc.h(), inc.k().real(), p)) {
                roots.push_back({{"abs_alpha", r.abs_alpha}, {"parity", parity_name(p)}});
            }
        }
        report["dispersion_roots"] = roots;
        report["abs_alpha"] = a;
    }
    report["warnings"] = hyp.warnings;
    write_json(cfg.out_dir / "slab.json", report);
    log << "slab: max |u_0 - oracle| = " << err << '\n';
    return finish(cfg, hyp);
}

int run_maxwell_check(const RunConfig& cfg, std::ostream& log)
{
    const json& s = section(cfg.doc, "maxwell");
    const int samples = integer(s, "samples", 1000);
    const std::uint64_t seed = static_cast<std::uint64_t>(integer(s, "seed", 1));
    const double tol = positive(s, "tolerance", 1e-12);
    if (samples < 1) throw ConfigError("maxwell.samples must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto cplx = [&] { return Complex(2 * U(rng) - 1, 2 * U(rng) - 1); };
    const double pi = std::numbers::pi;

    double calderon_err = 0, im_min = std::numeric_limits<double>::infinity();
    double det_min = std::numeric_limits<double>::infinity(), trace_err = 0;
    int skipped = 0;
    for (int i = 0; i < samples; ++i) {
        const double k = 0.5 + 2.5 * U(rng);
        const Eigen::Vector2d alpha(U(rng) - 0.5, U(rng) - 0.5);
        const ModeIndex n{static_cast<int>(U(rng) * 7) - 3, static_cast<int>(U(rng) * 7) - 3};

        TangentialField v{{}, alpha, k};
        try {
            const Eigen::Vector3cd vn(cplx(), cplx(), 0.0);
            v.coeffs[n] = vn;
            const Eigen::Vector3cd a = calderon_apply(v).coeffs.at(n);
            const Eigen::Vector3cd b = halfspace_curl_trace(vn, n, alpha, k);
            calderon_err = std::max(calderon_err, (a - b).norm() / std::max(1.0, b.norm()));

            TangentialField f{{}, alpha, k};
            for (int m1 = -2; m1 <= 2; ++m1) {
                for (int m2 = -2; m2 <= 2; ++m2) f.coeffs[{m1, m2}] = Eigen::Vector3cd(cplx(), cplx(), 0.0);
            }
            im_min = std::min(im_min, calderon_forms(f).im_form);
        } catch (const CutoffViolation&) {
            ++skipped;
        }

        const double q0 = 0.05 + 0.9 * U(rng);
        const double an = k * (1.0 + 0.01 + 2.0 * U(rng));
        det_min = std::min(det_min, maxwell_slab_determinant(q0, k, an));

        const double t1 = (U(rng) - 0.5) * 0.9 * pi, t2 = 2 * pi * U(rng);
        const Eigen::Vector3d d(std::sin(t1) * std::cos(t2), std::sin(t1) * std::sin(t2), -std::cos(t1));
        Eigen::Vector3d e1 = d.cross(Eigen::Vector3d::UnitZ());
        if (e1.norm() < 1e-12) e1 = Eigen::Vector3d::UnitX();
        e1.normalize();
        const Eigen::Vector3d e2 = d.cross(e1);
        const Eigen::Vector3cd p = cplx() * e1.cast<Complex>() + cplx() * e2.cast<Complex>();
        const MaxwellIncidence m = MaxwellIncidence::from_electric(k, t1, t2, p);
        const double h = 0.5 + U(rng);
        const Eigen::Vector3cd q1 = incident_trace_vector(m, h), q2 = incident_trace_vector_calderon(m, h);
        trace_err = std::max(trace_err, (q1 - q2).norm() / std::max(1.0, q1.norm()));
    }

    const bool pass_calderon = calderon_err <= tol;
    const bool pass_im = im_min >= -tol;
    const bool pass_det = det_min > 0;
    const bool pass_trace = trace_err <= tol;
    json report = header(cfg);
    report["samples"] = samples;
    report["seed"] = seed;
    report["skipped_cutoff"] = skipped;
    report["checks"] = {
        {"calderon_vs_halfspace", {{"max_error", calderon_err}, {"passed", pass_calderon}}},
        {"im_form_nonnegative", {{"min", im_min}, {"passed", pass_im}}},
        {"slab_determinant_positive", {{"min", det_min}, {"passed", pass_det}}},
        {"incident_trace_two_route", {{"max_error", trace_err}, {"passed", pass_trace}}}};
    write_json(cfg.out_dir / "maxwell_checks.json", report);
    const bool all = pass_calderon && pass_im && pass_det && pass_trace;
    log << "maxwell-check: " << (all ? "all checks passed" : "check failed") << '\n';
    return all ? ok : numerical_failure;
}

}  // namespace

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key.path=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override has an empty key segment: " + assignment);
        if (node->is_null()) *node = json::object();
        if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + assignment);
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = parse_value(assignment.substr(eq + 1));
}

RunConfig make_config(const std::string& command, json doc, const std::vector<std::string>& overrides)
{
    const auto& cs = commands();
    if (std::find(cs.begin(), cs.end(), command) == cs.end()) throw ConfigError("unknown command '" + command + "'");
    if (doc.is_null()) doc = json::object();
    for (const auto& o : overrides) apply_override(doc, o);
    check_sections(doc);
    RunConfig cfg;
    cfg.command = command;
    cfg.doc = std::move(doc);
    const json& out = section(cfg.doc, "output");
    if (out.contains("directory")) cfg.out_dir = out.at("directory").get<std::string>();
    if (cfg.doc.contains("strict")) cfg.strict = cfg.doc.at("strict").get<bool>();
    return cfg;
}

RunConfig load_config(const std::string& command, const fs::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    RunConfig cfg = make_config(command, std::move(doc), overrides);
    cfg.base_dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    return cfg;
}

std::string config_hash(const json& doc)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : doc.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

int run(const RunConfig& cfg, std::ostream& log)
{
    try {
        fs::create_directories(cfg.out_dir);
        if (cfg.command == "solve") return run_solve(cfg, log);
        if (cfg.command == "modes") return run_modes(cfg, log);
        if (cfg.command == "lap") return run_lap(cfg, log);
        if (cfg.command == "dispersion") return run_dispersion(cfg, log);
        if (cfg.command == "slab") return run_slab(cfg, log);
        if (cfg.command == "maxwell-check") return run_maxwell_check(cfg, log);
        throw ConfigError("unknown command '" + cfg.command + "'");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const json::exception& e) {
        log << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const AliasError& e) {
        log << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const Error& e) {
        log << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const fs::filesystem_error& e) {
        log << "config error: " << e.what() << '\n';
        return config_error;
    }
}

}  // namespace biperiodic::cli
