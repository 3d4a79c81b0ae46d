#include "biperiodic/medium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace biperiodic {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

Complex parse_value(const std::string& token)
{
    const auto comma = token.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(token), 0.0};
        return {std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("medium file: bad value '" + token + "'");
    }
}

}  // namespace

void MediumModel::check_values(const std::vector<Complex>& values) const
{
    for (const Complex& q : values) {
        if (!(q.real() >= q_floor_)) throw DomainError("medium: Re q below the positivity floor");
        if (q.imag() < 0) throw DomainError("medium: Im q must be non-negative");
    }
}

MediumModel MediumModel::homogeneous(Complex q0, double h, double q_floor)
{
    return slab_stack({LayerSpec{-h, h, q0}}, h, q_floor);
}

MediumModel MediumModel::slab_stack(std::vector<LayerSpec> layers, double h, double q_floor)
{
    if (!(h > 0)) throw DomainError("medium: half-thickness must be positive");
    if (!(q_floor > 0)) throw DomainError("medium: q_floor must be positive");
    MediumModel m;
    m.h_ = h;
    m.q_floor_ = q_floor;
    std::sort(layers.begin(), layers.end(), [](const LayerSpec& a, const LayerSpec& b) { return a.lo < b.lo; });
    double prev = -h;
    std::vector<Complex> qs;
    for (const auto& l : layers) {
        if (!(l.hi > l.lo)) throw DomainError("medium: empty slab layer");
        if (l.lo < -h - 1e-12 || l.hi > h + 1e-12) throw OutOfLayer("medium: slab layer outside |x3| < h");
        if (l.lo < prev - 1e-12) throw DomainError("medium: overlapping slab layers");
        prev = l.hi;
        qs.push_back(l.q);
    }
    m.check_values(qs);
    m.layers_ = std::move(layers);
    const bool whole = m.layers_.size() == 1 && std::abs(m.layers_[0].lo + h) < 1e-12 &&
                       std::abs(m.layers_[0].hi - h) < 1e-12;
    m.kind_ = whole ? Kind::homogeneous : Kind::slab_stack;
    return m;
}

MediumModel MediumModel::sampled(int n1, int n2, int n3, std::vector<Complex> values, double h, double q_floor)
{
    if (n1 < 1 || n2 < 1 || n3 < 1) throw DomainError("medium: empty sampling grid");
    if (values.size() != static_cast<std::size_t>(n1) * n2 * n3) {
        throw DomainError("medium: sample count does not match grid dimensions");
    }
    if (!(h > 0)) throw DomainError("medium: half-thickness must be positive");
    MediumModel m;
    m.kind_ = Kind::sampled;
    m.h_ = h;
    m.q_floor_ = q_floor;
    m.n1_ = n1;
    m.n2_ = n2;
    m.n3_ = n3;
    m.check_values(values);
    m.samples_ = std::move(values);
    return m;
}

MediumModel MediumModel::load(const std::filesystem::path& path, double q_floor)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("medium file: cannot open " + path.string());
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "biperiodic-medium" || version != 1) throw ConfigError("medium file: bad header");
    int n1 = 0, n2 = 0, n3 = 0;
    double h = 0;
    std::string key;
    while (in >> key && key != "data") {
        if (key == "n1") in >> n1;
        else if (key == "n2") in >> n2;
        else if (key == "n3") in >> n3;
        else if (key == "h") in >> h;
        else throw ConfigError("medium file: unknown header key '" + key + "'");
    }
    if (key != "data") throw ConfigError("medium file: missing data section");
    std::vector<Complex> values;
    std::string token;
    while (in >> token) values.push_back(parse_value(token));
    return sampled(n1, n2, n3, std::move(values), h, q_floor);
}

void MediumModel::save(const std::filesystem::path& path) const
{
    if (kind_ != Kind::sampled) throw UnsupportedMedium("medium: only sampled media have a file form");
    std::ofstream out(path);
    out.precision(17);
    out << "biperiodic-medium 1\nn1 " << n1_ << "\nn2 " << n2_ << "\nn3 " << n3_ << "\nh " << h_ << "\ndata\n";
    for (const Complex& q : samples_) {
        out << q.real();
        if (q.imag() != 0) out << ',' << q.imag();
        out << '\n';
    }
}

std::vector<LayerSpec> MediumModel::filled_layers() const
{
    std::vector<LayerSpec> out;
    double prev = -h_;
    for (const auto& l : layers_) {
        if (l.lo > prev + 1e-14) out.push_back({prev, l.lo, Complex(1)});
        out.push_back(l);
        prev = l.hi;
    }
    if (prev < h_ - 1e-14) out.push_back({prev, h_, Complex(1)});
    return out;
}

Complex MediumModel::value(double x1, double x2, double x3) const
{
    if (std::abs(x3) > h_) return Complex(1);
    if (kind_ != Kind::sampled) {
        for (const auto& l : layers_) {
            if (x3 >= l.lo && x3 <= l.hi) return l.q;
        }
        return Complex(1);
    }
    auto wrap = [](double x, int n) {
        const double t = x / two_pi - std::floor(x / two_pi);
        return std::min(n - 1, static_cast<int>(std::lround(t * n)) % n);
    };
    const int i1 = wrap(x1, n1_);
    const int i2 = wrap(x2, n2_);
    const int i3 = std::clamp(static_cast<int>(std::floor((x3 + h_) / (2 * h_) * n3_)), 0, n3_ - 1);
    return samples_[(static_cast<std::size_t>(i1) * n2_ + i2) * n3_ + i3];
}

FourierSlice MediumModel::fourier_slice(double x3, int M) const
{
    if (std::abs(x3) > h_) throw OutOfLayer("fourier_slice: depth outside the layer");
    FourierSlice s;
    s.depth = x3;
    s.modes = ModeSet(M);
    s.coeffs.assign(static_cast<std::size_t>(s.modes.size()), Complex{});
    if (kind_ != Kind::sampled) {
        s.coeffs[static_cast<std::size_t>(s.modes.index({0, 0}))] = value(0, 0, x3);
        return s;
    }
    const int i3 = std::clamp(static_cast<int>(std::floor((x3 + h_) / (2 * h_) * n3_)), 0, n3_ - 1);
    // Separable DFT: first along x2 for every x1 row, then along x1.
    const Complex I(0, 1);
    const int w = 2 * M + 1;
    std::vector<Complex> partial(static_cast<std::size_t>(n1_) * w);
    for (int i1 = 0; i1 < n1_; ++i1) {
        for (int m2 = -M; m2 <= M; ++m2) {
            Complex acc{};
            for (int i2 = 0; i2 < n2_; ++i2) {
                const Complex q = samples_[(static_cast<std::size_t>(i1) * n2_ + i2) * n3_ + i3];
                acc += q * std::exp(-I * (two_pi * m2 * i2 / n2_));
            }
            partial[static_cast<std::size_t>(i1) * w + (m2 + M)] = acc / double(n2_);
        }
    }
    for (int m1 = -M; m1 <= M; ++m1) {
        for (int m2 = -M; m2 <= M; ++m2) {
            Complex acc{};
            for (int i1 = 0; i1 < n1_; ++i1) {
                acc += partial[static_cast<std::size_t>(i1) * w + (m2 + M)] * std::exp(-I * (two_pi * m1 * i1 / n1_));
            }
            s.coeffs[static_cast<std::size_t>(s.modes.index({m1, m2}))] = acc / double(n1_);
        }
    }
    return s;
}

std::vector<Complex> MediumModel::synthesize_slice(const FourierSlice& slice) const
{
    if (kind_ != Kind::sampled) throw UnsupportedMedium("synthesize_slice: sampled media only");
    const Complex I(0, 1);
    std::vector<Complex> out(static_cast<std::size_t>(n1_) * n2_);
    for (int i1 = 0; i1 < n1_; ++i1) {
        for (int i2 = 0; i2 < n2_; ++i2) {
            Complex acc{};
            for (int j = 0; j < slice.modes.size(); ++j) {
                const ModeIndex m = slice.modes[j];
                acc += slice.coeffs[static_cast<std::size_t>(j)] *
                       std::exp(I * (two_pi * m.n1 * i1 / n1_ + two_pi * m.n2 * i2 / n2_));
            }
            out[static_cast<std::size_t>(i1) * n2_ + i2] = acc;
        }
    }
    return out;
}

std::vector<DepthCell> MediumModel::depth_cells(int M) const
{
    std::vector<DepthCell> cells;
    if (kind_ != Kind::sampled) {
        for (const auto& l : filled_layers()) {
            DepthCell c{l.lo, l.hi, {}};
            c.slice.depth = 0.5 * (l.lo + l.hi);
            c.slice.modes = ModeSet(M);
            c.slice.coeffs.assign(static_cast<std::size_t>(c.slice.modes.size()), Complex{});
            c.slice.coeffs[static_cast<std::size_t>(c.slice.modes.index({0, 0}))] = l.q;
            cells.push_back(std::move(c));
        }
        return cells;
    }
    const double dz = 2 * h_ / n3_;
    for (int j = 0; j < n3_; ++j) {
        const double lo = -h_ + j * dz;
        const double hi = j + 1 == n3_ ? h_ : lo + dz;
        cells.push_back({lo, hi, fourier_slice(0.5 * (lo + hi), M)});
    }
    return cells;
}

Complex MediumModel::min_re_q_sample() const
{
    Complex best(std::numeric_limits<double>::infinity(), 0);
    auto consider = [&](Complex q) {
        if (q.real() < best.real()) best = q;
    };
    if (kind_ == Kind::sampled) {
        for (const auto& q : samples_) consider(q);
    } else {
        for (const auto& l : filled_layers()) consider(l.q);
    }
    return best;
}

MediumReport validate(const MediumModel& model, const std::optional<Incidence>& inc)
{
    MediumReport r;
    r.min_re_q = model.min_re_q_sample().real();
    if (model.kind() == MediumModel::Kind::sampled) {
        for (const auto& q : model.samples()) r.lossless = r.lossless && q.imag() == 0;
    } else {
        for (const auto& l : model.layers()) r.lossless = r.lossless && l.q.imag() == 0;
    }
    r.q_ge_one = r.min_re_q >= 1.0;
    if (!r.q_ge_one) r.warnings.emplace_back("q >= 1 does not hold in the layer");
    if (inc) {
        const double s2 = inc->sin2();
        r.q_ge_sin2 = r.min_re_q >= s2;
        if (!*r.q_ge_sin2) {
            r.warnings.emplace_back("q >= sin^2(theta1) violated: uniqueness for complex k and injectivity of the "
                                    "limiting constraint are not guaranteed");
        }
    }
    return r;
}

}  // namespace biperiodic
