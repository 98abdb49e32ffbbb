#include "shapetaylor/mapping.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace shapetaylor {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angle_of(const Eigen::Vector2d& x) {
    double t = std::atan2(x.y(), x.x());
    if (t < 0.0) t += kTwoPi;
    return t;
}

// xorshift-based deterministic generator for the sampling estimators
struct SplitMix {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

}  // namespace

MollifierMapping::MollifierMapping(Basis basis, double r0)
    : basis_(std::move(basis)), r0_(r0), cutoff_(r0 / 4.0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("MollifierMapping: r0 must be positive");
}

double MollifierMapping::chi(const Eigen::Vector2d& x) const {
    const double r = x.norm();
    if (r <= cutoff_) return 0.0;
    return (r - cutoff_) / (r0_ - cutoff_);
}

Displacement MollifierMapping::radial_field(double g, double dg, const Eigen::Vector2d& x) const {
    const double r = x.norm();
    if (r > r0_ * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "MollifierMapping: point (" << x.x() << ", " << x.y() << ") lies outside the reference domain";
        throw std::invalid_argument(msg.str());
    }
    Displacement d;
    if (r <= cutoff_) return d;  // chi == 0 inside the cutoff circle

    const double chi_val = (r - cutoff_) / (r0_ - cutoff_);
    const double chi_r = 1.0 / (r0_ - cutoff_);

    const Eigen::Vector2d hat = x / r;
    d.value = chi_val * g * hat;

    // D[chi g(theta) x/|x|] = hat (g grad(chi) + chi g' grad(theta))^T
    //                         + chi g (I - hat hat^T)/r
    const Eigen::Vector2d grad_chi = chi_r * hat;
    const Eigen::Vector2d grad_theta(-x.y() / (r * r), x.x() / (r * r));
    d.jacobian = hat * (g * grad_chi + chi_val * dg * grad_theta).transpose() +
                 (chi_val * g / r) * (Eigen::Matrix2d::Identity() - hat * hat.transpose());
    return d;
}

Displacement MollifierMapping::displacement(int j, const Eigen::Vector2d& x) const {
    if (j < 1 || j > basis_.size()) throw std::out_of_range("MollifierMapping: dimension j out of range");
    const double r = x.norm();
    if (r <= cutoff_) {
        if (r > r0_ * (1.0 + 1e-12)) throw std::invalid_argument("MollifierMapping: point outside the domain");
        return Displacement{};
    }
    const double theta = angle_of(x);
    return radial_field(eval_psi(basis_, j, theta), eval_dpsi(basis_, j, theta), x);
}

HarmonicMapping::HarmonicMapping(Basis basis, int n_fourier, int mode_cutoff)
    : basis_(std::move(basis)), n_fourier_(n_fourier), mode_cutoff_(mode_cutoff) {
    if (n_fourier_ < (1 << 12) || (n_fourier_ & (n_fourier_ - 1)) != 0)
        throw std::invalid_argument("HarmonicMapping: n_fourier must be a power of two >= 4096");
    if (mode_cutoff_ < 0) mode_cutoff_ = n_fourier_ / 2 - 1;
    if (mode_cutoff_ > n_fourier_ / 2 - 1)
        throw std::invalid_argument("HarmonicMapping: mode_cutoff exceeds the Nyquist range");
}

const HarmonicMapping::Spectrum& HarmonicMapping::spectrum(int j) const {
    {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(j);
        if (it != cache_.end()) return *it->second;
    }
    // compute outside the lock; losing a race just discards a duplicate
    auto spec = std::make_shared<Spectrum>();
    Eigen::FFT<double> fft;
    std::vector<double> samples(n_fourier_);
    std::vector<std::complex<double>> freq(n_fourier_);
    for (int kappa = 0; kappa < 2; ++kappa) {
        for (int i = 0; i < n_fourier_; ++i) {
            const double theta = kTwoPi * i / n_fourier_;
            const double f = (kappa == 0) ? std::cos(theta) : std::sin(theta);
            samples[i] = f * eval_psi(basis_, j, theta);
        }
        fft.fwd(freq, samples);
        auto& coef = spec->coef[kappa];
        coef.resize(mode_cutoff_ + 1);
        for (int n = 0; n <= mode_cutoff_; ++n) coef[n] = freq[n] / static_cast<double>(n_fourier_);
    }
    std::lock_guard lock(cache_mutex_);
    auto [it, inserted] = cache_.try_emplace(j, std::move(spec));
    return *it->second;
}

const std::vector<std::complex<double>>& HarmonicMapping::spectral_coefficients(int j, int kappa) const {
    if (j < 1 || j > basis_.size()) throw std::out_of_range("HarmonicMapping: dimension j out of range");
    if (kappa < 0 || kappa > 1) throw std::out_of_range("HarmonicMapping: component must be 0 or 1");
    return spectrum(j).coef[kappa];
}

Displacement HarmonicMapping::eval_spectrum(const Spectrum& s, const Eigen::Vector2d& x, int mode_cutoff) {
    const double r = x.norm();
    if (r > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "HarmonicMapping: point (" << x.x() << ", " << x.y() << ") lies outside the unit disk";
        throw std::invalid_argument(msg.str());
    }
    // truncate where r^n falls below 1e-15 of the coefficient scale
    int n_max = mode_cutoff;
    if (r < 1.0 - 1e-9) {
        const double limit = 35.0 / -std::log(std::min(r + 1e-300, 1.0 - 1e-9));
        n_max = std::min<int>(mode_cutoff, static_cast<int>(limit) + 1);
    }
    const std::complex<double> z(x.x(), x.y());
    Displacement d;
    for (int kappa = 0; kappa < 2; ++kappa) {
        const auto& a = s.coef[kappa];
        const int top = std::min<int>(n_max, static_cast<int>(a.size()) - 1);
        // Horner for f(z) = sum_{n>=1} a_n z^n and f'(z)
        std::complex<double> f = 0.0, fp = 0.0;
        for (int n = top; n >= 1; --n) {
            fp = fp * z + f;
            f = f * z + a[n];
        }
        fp = fp * z + f;  // derivative of z * poly
        f *= z;
        const double value = a[0].real() + 2.0 * f.real();
        d.value[kappa] = value;
        d.jacobian(kappa, 0) = 2.0 * fp.real();
        d.jacobian(kappa, 1) = -2.0 * fp.imag();
    }
    return d;
}

Displacement HarmonicMapping::displacement(int j, const Eigen::Vector2d& x) const {
    if (j < 1 || j > basis_.size()) throw std::out_of_range("HarmonicMapping: dimension j out of range");
    return eval_spectrum(spectrum(j), x, mode_cutoff_);
}

HarmonicMapping::Spectrum HarmonicMapping::combined_spectrum(const std::vector<double>& y) const {
    Spectrum combined;
    Eigen::FFT<double> fft;
    std::vector<double> radial(n_fourier_);
    std::vector<double> samples(n_fourier_);
    std::vector<std::complex<double>> freq(n_fourier_);
    for (int i = 0; i < n_fourier_; ++i) {
        const double theta = kTwoPi * i / n_fourier_;
        double acc = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0.0) acc += y[j] * eval_psi(basis_, static_cast<int>(j) + 1, theta);
        radial[i] = acc;
    }
    for (int kappa = 0; kappa < 2; ++kappa) {
        for (int i = 0; i < n_fourier_; ++i) {
            const double theta = kTwoPi * i / n_fourier_;
            samples[i] = ((kappa == 0) ? std::cos(theta) : std::sin(theta)) * radial[i];
        }
        fft.fwd(freq, samples);
        auto& coef = combined.coef[kappa];
        coef.resize(mode_cutoff_ + 1);
        for (int n = 0; n <= mode_cutoff_; ++n) coef[n] = freq[n] / static_cast<double>(n_fourier_);
    }
    return combined;
}

Displacement Mapping::displacement(int j, const Eigen::Vector2d& x) const {
    if (const auto* m = mollifier()) return m->displacement(j, x);
    return harmonic()->displacement(j, x);
}

int Mapping::dimension_count() const {
    if (const auto* m = mollifier()) return m->dimension_count();
    return harmonic()->dimension_count();
}

const Basis& Mapping::basis() const {
    if (const auto* m = mollifier()) return m->basis();
    return harmonic()->basis();
}

std::pair<Eigen::Vector2d, Eigen::Matrix2d> full_map(const Mapping& mapping, const std::vector<double>& y,
                                                     const Eigen::Vector2d& x) {
    Eigen::Vector2d value = x;
    Eigen::Matrix2d jac = Eigen::Matrix2d::Identity();
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] == 0.0) continue;
        Displacement d = mapping.displacement(static_cast<int>(j) + 1, x);
        value += y[j] * d.value;
        jac += y[j] * d.jacobian;
    }
    return {value, jac};
}

namespace {

// singular values of a 2x2 matrix, closed form
std::pair<double, double> singular_values(const Eigen::Matrix2d& m) {
    const double t = m.squaredNorm();
    const double d = m.determinant();
    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
    const double smax = std::sqrt(0.5 * (t + disc));
    const double smin = std::sqrt(std::max(0.0, 0.5 * (t - disc)));
    return {smin, smax};
}

}  // namespace

SigmaBounds estimate_sigma_bounds(const Mapping& mapping, int y_samples, int x_samples) {
    const int dims = mapping.dimension_count();
    SplitMix rng{0x5eedf00dull};

    // spatial samples: polar grid biased toward the boundary, plus near-axis points
    std::vector<Eigen::Vector2d> points;
    const int n_r = std::max(4, static_cast<int>(std::sqrt(static_cast<double>(x_samples) / 4.0)));
    const int n_t = std::max(8, x_samples / n_r);
    for (int ir = 0; ir < n_r; ++ir) {
        const double u = (ir + 0.5) / n_r;
        const double r = 1.0 - u * u * 0.999;  // clusters near r = 1
        for (int it = 0; it < n_t; ++it) {
            const double theta = kTwoPi * (it + 0.33) / n_t;
            points.emplace_back(r * std::cos(theta), r * std::sin(theta));
        }
    }

    // sign patterns: y = 0 first, then random in {-1, 0, 1}^dims
    std::vector<std::vector<double>> ys;
    ys.emplace_back(dims, 0.0);
    for (int s = 1; s < y_samples; ++s) {
        std::vector<double> y(dims, 0.0);
        for (int j = 0; j < dims; ++j) {
            const double u = rng.uniform();
            y[j] = (u < 1.0 / 3.0) ? -1.0 : (u < 2.0 / 3.0 ? 0.0 : 1.0);
        }
        ys.push_back(std::move(y));
    }

    SigmaBounds out;
    out.sigma_min = std::numeric_limits<double>::infinity();
    out.sigma_max = 0.0;
    auto record = [&](const Eigen::Matrix2d& jac, const Eigen::Vector2d& x) {
        if (std::abs(jac.determinant()) < 1e-14) {
            std::ostringstream msg;
            msg << "estimate_sigma_bounds: singular Jacobian at x = (" << x.x() << ", " << x.y()
                << ") for a sampled sign pattern";
            throw std::runtime_error(msg.str());
        }
        // singular values of DPhi^{-1} are the reciprocals of DPhi's
        auto [smin, smax] = singular_values(jac);
        out.sigma_min = std::min(out.sigma_min, 1.0 / smax);
        out.sigma_max = std::max(out.sigma_max, 1.0 / smin);
        ++out.sample_count;
    };

    if (const auto* h = mapping.harmonic()) {
        for (const auto& y : ys) {
            const auto spec = h->combined_spectrum(y);
            for (const auto& x : points) {
                Displacement d = HarmonicMapping::eval_spectrum(spec, x, h->mode_cutoff());
                record(Eigen::Matrix2d::Identity() + d.jacobian, x);
            }
        }
        return out;
    }

    const auto* m = mapping.mollifier();
    const Basis& basis = m->basis();
    for (const auto& y : ys) {
        for (const auto& x : points) {
            const double theta = angle_of(x);
            double g = 0.0, dg = 0.0;
            for (int j = 1; j <= dims; ++j) {
                const double w = y[j - 1];
                if (w == 0.0) continue;
                g += w * eval_psi(basis, j, theta);
                dg += w * eval_dpsi(basis, j, theta);
            }
            Displacement d = m->radial_field(g, dg, x);
            record(Eigen::Matrix2d::Identity() + d.jacobian, x);
        }
    }
    return out;
}

}  // namespace shapetaylor
