#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "biperiodic/qp_core.hpp"

namespace biperiodic {

/// Transverse Fourier coefficients q_m(x3) for |m|_inf <= M at one depth.
struct FourierSlice {
    double depth = 0;
    ModeSet modes{0};
    std::vector<Complex> coeffs;

    /// Zero outside the stored range.
    Complex at(const ModeIndex& m) const
    {
        return modes.contains(m) ? coeffs[static_cast<std::size_t>(modes.index(m))] : Complex{};
    }
};

/// A depth interval on which q is independent of x3.
struct DepthCell {
    double lo = 0;
    double hi = 0;
    FourierSlice slice;
};

struct LayerSpec {
    double lo = 0;
    double hi = 0;
    Complex q{1};
};

/// Bi-periodic refractive index inside |x3| < h; q == 1 outside by construction.
class MediumModel {
public:
    enum class Kind { homogeneous, slab_stack, sampled };

    static MediumModel homogeneous(Complex q0, double h, double q_floor = 1e-6);
    /// Layers may leave gaps, which are filled with the background value 1.
    static MediumModel slab_stack(std::vector<LayerSpec> layers, double h, double q_floor = 1e-6);
    /// values in row-major (x1, x2, x3) order on the cell-centred depth grid.
    static MediumModel sampled(int n1, int n2, int n3, std::vector<Complex> values, double h,
                               double q_floor = 1e-6);
    static MediumModel load(const std::filesystem::path& path, double q_floor = 1e-6);
    void save(const std::filesystem::path& path) const;

    Kind kind() const { return kind_; }
    double h() const { return h_; }
    double q_floor() const { return q_floor_; }
    const std::vector<LayerSpec>& layers() const { return layers_; }

    /// True when q depends on x3 only (no coupling between Fourier orders).
    bool transversally_constant() const { return kind_ != Kind::sampled; }

    /// Points per period in x1 and x2; 0 for analytic kinds.
    int transverse_resolution() const { return kind_ == Kind::sampled ? std::min(n1_, n2_) : 0; }

    Complex value(double x1, double x2, double x3) const;

    FourierSlice fourier_slice(double x3, int M) const;

    /// Piecewise-constant-in-depth decomposition of [-h, h] with slices truncated at M.
    std::vector<DepthCell> depth_cells(int M) const;

    /// Inverse of fourier_slice on the sampling grid (sampled media only).
    std::vector<Complex> synthesize_slice(const FourierSlice& slice) const;

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int n3() const { return n3_; }
    const std::vector<Complex>& samples() const { return samples_; }

    Complex min_re_q_sample() const;

private:
    MediumModel() = default;
    void check_values(const std::vector<Complex>& values) const;
    std::vector<LayerSpec> filled_layers() const;

    Kind kind_ = Kind::homogeneous;
    double h_ = 1;
    double q_floor_ = 1e-6;
    std::vector<LayerSpec> layers_;
    int n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<Complex> samples_;
};

struct MediumReport {
    double min_re_q = 0;
    bool lossless = true;
    bool q_ge_one = false;
    std::optional<bool> q_ge_sin2;
    std::vector<std::string> warnings;
};

/// Checks the hypotheses the uniqueness results rely on. Never throws.
MediumReport validate(const MediumModel& model, const std::optional<Incidence>& inc = std::nullopt);

}  // namespace biperiodic
