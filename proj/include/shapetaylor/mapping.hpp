#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <variant>
#include <vector>

#include "shapetaylor/boundary_basis.hpp"

namespace shapetaylor {

/// Displacement field sample: Phi_j(x) and D_x Phi_j(x).
struct Displacement {
    Eigen::Vector2d value = Eigen::Vector2d::Zero();
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
};

/// Phi_j(x) = chi(x) psi_j(theta(x)) x/|x| with the affine mollifier
/// chi = (|x| - r0^-/4) / (r0 - r0^-/4) on |x| >= r0^-/4, 0 inside.
/// Values and Jacobians are closed-form; r0 == 1 (circular reference).
class MollifierMapping {
public:
    MollifierMapping(Basis basis, double r0 = 1.0);

    Displacement displacement(int j, const Eigen::Vector2d& x) const;
    int dimension_count() const { return basis_.size(); }
    double cutoff_radius() const { return cutoff_; }
    double r0() const { return r0_; }
    const Basis& basis() const { return basis_; }

    /// chi at x (exposed for the theory-constant checks).
    double chi(const Eigen::Vector2d& x) const;

    /// Closed-form displacement for a radial field chi(x) g(theta) x/|x| given
    /// g and g' at theta(x). displacement(j, x) is this with g = psi_j; any
    /// linear combination sum y_j Phi_j is this with the summed scalars.
    Displacement radial_field(double g, double dg, const Eigen::Vector2d& x) const;

private:
    Basis basis_;
    double r0_;
    double cutoff_;
};

/// Per-component harmonic extension of the boundary data
/// phi_j^kappa(theta) = f_kappa(theta) psi_j(theta), f_x = cos, f_y = sin,
/// computed by separation of variables on the unit disk: the analytic-part
/// Fourier coefficients a_n give Phi^kappa(r, theta) = Re a_0 + 2 Re sum a_n z^n.
class HarmonicMapping {
public:
    HarmonicMapping(Basis basis, int n_fourier = 1 << 12, int mode_cutoff = -1);

    Displacement displacement(int j, const Eigen::Vector2d& x) const;
    int dimension_count() const { return basis_.size(); }
    const Basis& basis() const { return basis_; }
    int n_fourier() const { return n_fourier_; }
    int mode_cutoff() const { return mode_cutoff_; }

    /// Analytic-part coefficients a_0..a_N for component kappa (0 = x, 1 = y).
    const std::vector<std::complex<double>>& spectral_coefficients(int j, int kappa) const;

    struct Spectrum {
        std::vector<std::complex<double>> coef[2];  // per component
    };

    /// One spectral object for the summed boundary data sum_j y_j psi_j;
    /// evaluate it at many points with eval_spectrum.
    Spectrum combined_spectrum(const std::vector<double>& y) const;
    static Displacement eval_spectrum(const Spectrum& s, const Eigen::Vector2d& x, int mode_cutoff);

private:
    const Spectrum& spectrum(int j) const;

    Basis basis_;
    int n_fourier_;
    int mode_cutoff_;
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<int, std::shared_ptr<const Spectrum>> cache_;
};

class Mapping {
public:
    explicit Mapping(MollifierMapping m) : impl_(std::move(m)) {}
    explicit Mapping(HarmonicMapping m) : impl_(std::move(m)) {}

    enum class Kind { Mollifier, Harmonic };
    Kind kind() const { return std::holds_alternative<MollifierMapping>(impl_) ? Kind::Mollifier : Kind::Harmonic; }

    Displacement displacement(int j, const Eigen::Vector2d& x) const;
    int dimension_count() const;
    const Basis& basis() const;

    const MollifierMapping* mollifier() const { return std::get_if<MollifierMapping>(&impl_); }
    const HarmonicMapping* harmonic() const { return std::get_if<HarmonicMapping>(&impl_); }

private:
    std::variant<MollifierMapping, HarmonicMapping> impl_;
};

/// Phi(y; x) = x + sum_j y_j Phi_j(x) and its Jacobian I + sum y_j D_x Phi_j.
/// y is a finite coefficient vector indexed from dimension 1.
std::pair<Eigen::Vector2d, Eigen::Matrix2d> full_map(const Mapping& mapping, const std::vector<double>& y,
                                                     const Eigen::Vector2d& x);

struct SigmaBounds {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    long sample_count = 0;
};

/// Empirical extremes of the singular values of D_x Phi^{-1}(y; x) over
/// random sign-pattern parameter vectors (y = 0 included) and spatial samples.
/// Deterministic: fixed-seed generator. Throws if a sampled Jacobian is singular.
SigmaBounds estimate_sigma_bounds(const Mapping& mapping, int y_samples = 32, int x_samples = 512);

}  // namespace shapetaylor
