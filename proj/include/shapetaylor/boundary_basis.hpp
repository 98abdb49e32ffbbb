#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace shapetaylor {

/// Dyadic samples of a compactly supported mother wavelet and its derivative,
/// sup-normalized so that max |Psi| = 1. Samples live on [0, support_len]
/// with spacing 2^-depth; evaluation is by linear interpolation, zero outside.
struct CascadeTable {
    int depth = 0;
    double spacing = 0.0;
    double support_len = 0.0;
    Eigen::VectorXd psi;      // mother wavelet
    Eigen::VectorXd dpsi;     // centered-difference derivative
    Eigen::VectorXd phi;      // scaling function (same grid), integral 1
    std::vector<double> filter;  // orthonormal low-pass taps, sum = sqrt(2)

    double eval(double x) const;
    double eval_deriv(double x) const;
};

/// Builds the table by the cascade algorithm (exact dyadic refinement from
/// the integer-grid eigenvector). Supported names: "db4" (8 taps, 4 vanishing
/// moments), "haar" (sanity inputs only). Requires 8 <= depth <= 16.
std::shared_ptr<const CascadeTable> cascade_table(std::string_view wavelet_name, int depth);

/// Truncated Fourier family: psi_j = scale * ceil(j/2)^-alpha * {cos,sin}(ceil(j/2) theta),
/// cosine for odd j, sine for even j.
class FourierBasis {
public:
    FourierBasis(double alpha, int truncation);

    double eval(int j, double theta) const;
    double eval_deriv(int j, double theta) const;
    int size() const { return truncation_; }
    double alpha() const { return alpha_; }
    double scale() const { return scale_; }
    void set_scale(double s) { scale_ = s; }

private:
    double alpha_;
    double scale_ = 1.0;
    int truncation_;
};

/// Periodized wavelet family on the circle. Linear index: j = 1 is the
/// coarsest periodized scaling function (identically 1 before amplitude);
/// j >= 2 enumerates wavelets level-major, shift-minor. The wavelet
/// coordinate is t = theta / (2 pi); level-l shift-k evaluates
/// Psi(2^l t - k) wrapped with period 1.
class WaveletBasis {
public:
    WaveletBasis(double alpha, double theta_variation, double r0_min, int max_level,
                 std::shared_ptr<const CascadeTable> table);

    double eval(int j, double theta) const;
    double eval_deriv(int j, double theta) const;
    int size() const { return 1 << (max_level_ + 1); }

    struct IndexInfo {
        int level;
        int shift;
        bool is_scaling;
    };
    IndexInfo index_info(int j) const;
    int level_of(int j) const { return index_info(j).level; }

    /// (r0_min * theta / M) (1 - 2^-alpha) 2^(-alpha l), times the rescale factor.
    double level_amplitude(int level) const;

    double alpha() const { return alpha_; }
    double theta_variation() const { return theta_; }
    double r0_min() const { return r0_min_; }
    int max_level() const { return max_level_; }
    double shift_sum_bound() const { return table_M_; }  // M of the table
    const CascadeTable& table() const { return *table_; }
    std::shared_ptr<const CascadeTable> table_ptr() const { return table_; }
    double scale() const { return scale_; }
    void set_scale(double s) { scale_ = s; }
    void set_theta_variation(double t) { theta_ = t; }

private:
    double alpha_;
    double theta_;
    double r0_min_;
    int max_level_;
    std::shared_ptr<const CascadeTable> table_;
    double table_M_;
    double scale_ = 1.0;
};

class Basis {
public:
    explicit Basis(FourierBasis b) : impl_(std::move(b)) {}
    explicit Basis(WaveletBasis b) : impl_(std::move(b)) {}

    enum class Kind { Fourier, Wavelet };
    Kind kind() const { return std::holds_alternative<FourierBasis>(impl_) ? Kind::Fourier : Kind::Wavelet; }
    int size() const;
    double alpha() const;

    const FourierBasis* fourier() const { return std::get_if<FourierBasis>(&impl_); }
    const WaveletBasis* wavelet() const { return std::get_if<WaveletBasis>(&impl_); }

    FourierBasis* fourier() { return std::get_if<FourierBasis>(&impl_); }
    WaveletBasis* wavelet() { return std::get_if<WaveletBasis>(&impl_); }

private:
    std::variant<FourierBasis, WaveletBasis> impl_;
};

/// psi_j(theta). Throws std::out_of_range for j outside the retained range.
double eval_psi(const Basis& basis, int j, double theta);
/// d/dtheta psi_j(theta).
double eval_dpsi(const Basis& basis, int j, double theta);

/// sup over a uniform grid of `grid_size` angles of sum_j |psi_j(theta)|.
double total_variation_sup(const Basis& basis, int grid_size = 1 << 14);

/// Multiplies the family by a constant so the grid-evaluated total shape
/// variation equals theta * r0_min. Requires theta in (0, 1).
Basis rescale_to_theta(Basis basis, double theta, double r0_min = 1.0);

}  // namespace shapetaylor
