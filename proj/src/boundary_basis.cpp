#include "shapetaylor/boundary_basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace shapetaylor {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Orthonormal Daubechies filter with 4 vanishing moments (8 taps),
// normalized so the taps sum to sqrt(2).
const std::vector<double> kDb4Filter = {
    0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278};

const std::vector<double> kHaarFilter = {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};

// Scaling function values at the integers: eigenvector of T[m][n] = sqrt(2) h[2m-n]
// for eigenvalue 1, normalized to sum 1. Solved by power iteration with
// deflation-free renormalization (the eigenvalue-1 eigenspace is simple).
Eigen::VectorXd integer_values(const std::vector<double>& h) {
    const int n = static_cast<int>(h.size()) - 2;  // interior integers 1..len-2
    if (n <= 0) {
        Eigen::VectorXd v(1);
        v[0] = 1.0;
        return v;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int m = 1; m <= n; ++m)
        for (int k = 1; k <= n; ++k) {
            const int idx = 2 * m - k;
            if (idx >= 0 && idx < static_cast<int>(h.size())) T(m - 1, k - 1) = std::numbers::sqrt2 * h[idx];
        }
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < 200; ++it) {
        v = T * v;
        const double s = v.sum();
        if (std::abs(s) < 1e-300) throw std::runtime_error("cascade: integer eigenproblem degenerated");
        v /= s;
    }
    return v;
}

std::shared_ptr<const CascadeTable> build_cascade(const std::vector<double>& h, int depth) {
    const int taps = static_cast<int>(h.size());
    const int support = taps - 1;

    // phi at spacing 2^-L, refined one dyadic level at a time via
    // phi(x) = sqrt(2) sum_k h_k phi(2x - k)
    Eigen::VectorXd phi_int = integer_values(h);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(support + 1);
    for (int m = 1; m < support; ++m) phi[m] = phi_int[m - 1];

    // we need one extra dyadic level of phi to synthesize psi at full depth
    const int phi_depth = depth;
    for (int level = 1; level <= phi_depth; ++level) {
        const std::int64_t n_new = static_cast<std::int64_t>(support) * (1LL << level) + 1;
        Eigen::VectorXd next = Eigen::VectorXd::Zero(n_new);
        const double spacing_new = std::ldexp(1.0, -level);
        for (std::int64_t i = 0; i < n_new; ++i) {
            if (i % 2 == 0) {
                next[i] = phi[i / 2];
                continue;
            }
            const double x = i * spacing_new;
            double acc = 0.0;
            for (int k = 0; k < taps; ++k) {
                const double arg = 2.0 * x - k;
                if (arg < 0.0 || arg > support) continue;
                // arg is on the previous level's grid
                const double pos = arg * (1LL << (level - 1));
                acc += h[k] * phi[static_cast<std::int64_t>(std::llround(pos))];
            }
            next[i] = std::numbers::sqrt2 * acc;
        }
        phi = std::move(next);
    }

    // psi(x) = sqrt(2) sum_k g_k phi(2x - k), g_k = (-1)^k h[taps-1-k]
    const std::int64_t n = static_cast<std::int64_t>(support) * (1LL << depth) + 1;
    const double spacing = std::ldexp(1.0, -depth);
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = i * spacing;
        double acc = 0.0;
        for (int k = 0; k < taps; ++k) {
            const double g = ((k % 2) ? -1.0 : 1.0) * h[taps - 1 - k];
            const double arg = 2.0 * x - k;
            if (arg < 0.0 || arg > support) continue;
            const double pos = arg * (1LL << depth);
            acc += g * phi[static_cast<std::int64_t>(std::llround(pos))];
        }
        psi[i] = std::numbers::sqrt2 * acc;
    }

    const double sup = psi.cwiseAbs().maxCoeff();
    psi /= sup;

    Eigen::VectorXd dpsi = Eigen::VectorXd::Zero(n);
    for (std::int64_t i = 1; i + 1 < n; ++i) dpsi[i] = (psi[i + 1] - psi[i - 1]) / (2.0 * spacing);
    if (n > 1) {
        dpsi[0] = (psi[1] - psi[0]) / spacing;
        dpsi[n - 1] = (psi[n - 1] - psi[n - 2]) / spacing;
    }

    auto table = std::make_shared<CascadeTable>();
    table->depth = depth;
    table->spacing = spacing;
    table->support_len = support;
    table->psi = std::move(psi);
    table->dpsi = std::move(dpsi);
    table->phi = std::move(phi);
    table->filter = h;
    return table;
}

double interp(const Eigen::VectorXd& v, double spacing, double support_len, double x) {
    if (x <= 0.0 || x >= support_len) return 0.0;
    const double pos = x / spacing;
    const auto i0 = static_cast<std::int64_t>(pos);
    const double w = pos - i0;
    return v[i0] * (1.0 - w) + v[i0 + 1] * w;
}

double wrap_unit(double t) {
    t -= std::floor(t);
    return t;
}

}  // namespace

double CascadeTable::eval(double x) const { return interp(psi, spacing, support_len, x); }
double CascadeTable::eval_deriv(double x) const { return interp(dpsi, spacing, support_len, x); }

std::shared_ptr<const CascadeTable> cascade_table(std::string_view wavelet_name, int depth) {
    if (depth < 8 || depth > 16) throw std::invalid_argument("cascade_table: depth must be in [8, 16]");
    static std::mutex mtx;
    static std::map<std::pair<std::string, int>, std::shared_ptr<const CascadeTable>> cache;
    const std::string name(wavelet_name);
    {
        std::lock_guard lock(mtx);
        auto it = cache.find({name, depth});
        if (it != cache.end()) return it->second;
    }
    std::shared_ptr<const CascadeTable> table;
    if (name == "db4")
        table = build_cascade(kDb4Filter, depth);
    else if (name == "haar")
        table = build_cascade(kHaarFilter, depth);
    else
        throw std::invalid_argument("cascade_table: unknown wavelet name '" + name + "'");
    std::lock_guard lock(mtx);
    auto [it, inserted] = cache.try_emplace({name, depth}, table);
    return it->second;
}

FourierBasis::FourierBasis(double alpha, int truncation) : alpha_(alpha), truncation_(truncation) {
    if (truncation < 1) throw std::invalid_argument("FourierBasis: truncation must be >= 1");
}

double FourierBasis::eval(int j, double theta) const {
    if (j < 1 || j > truncation_) throw std::out_of_range("FourierBasis::eval: j out of range");
    if (j % 2 == 0) {
        const double m = j / 2;
        return scale_ * std::pow(m, -alpha_) * std::sin(m * theta);
    }
    const double m = (j + 1) / 2;
    return scale_ * std::pow(m, -alpha_) * std::cos(m * theta);
}

double FourierBasis::eval_deriv(int j, double theta) const {
    if (j < 1 || j > truncation_) throw std::out_of_range("FourierBasis::eval_deriv: j out of range");
    if (j % 2 == 0) {
        const double m = j / 2;
        return scale_ * std::pow(m, -alpha_) * m * std::cos(m * theta);
    }
    const double m = (j + 1) / 2;
    return -scale_ * std::pow(m, -alpha_) * m * std::sin(m * theta);
}

WaveletBasis::WaveletBasis(double alpha, double theta_variation, double r0_min, int max_level,
                           std::shared_ptr<const CascadeTable> table)
    : alpha_(alpha), theta_(theta_variation), r0_min_(r0_min), max_level_(max_level), table_(std::move(table)) {
    if (!(r0_min > 0.0)) throw std::invalid_argument("WaveletBasis: r0_min must be positive");
    if (max_level_ < 0) throw std::invalid_argument("WaveletBasis: max_level must be >= 0");
    // M = sup_t sum_k |Psi(t - k)| on the dyadic grid
    const auto& t = *table_;
    const std::int64_t per = 1LL << t.depth;
    double best = 0.0;
    for (std::int64_t i = 0; i < per; ++i) {
        double s = 0.0;
        for (int m = 0; m < static_cast<int>(t.support_len); ++m) s += std::abs(t.psi[i + m * per]);
        best = std::max(best, s);
    }
    table_M_ = best;
}

WaveletBasis::IndexInfo WaveletBasis::index_info(int j) const {
    if (j < 1 || j > size()) throw std::out_of_range("WaveletBasis: j out of range");
    if (j == 1) return {0, 0, true};
    const int off = j - 2;
    int level = 0;
    while ((2 << level) <= off + 1) ++level;  // level = floor(log2(off+1))
    const int shift = off + 1 - (1 << level);
    return {level, shift, false};
}

double WaveletBasis::level_amplitude(int level) const {
    return scale_ * (r0_min_ * theta_ / table_M_) * (1.0 - std::pow(2.0, -alpha_)) *
           std::pow(2.0, -alpha_ * level);
}

double WaveletBasis::eval(int j, double theta) const {
    const IndexInfo info = index_info(j);
    if (info.is_scaling) return level_amplitude(0);  // periodized scaling fn == 1
    const double t = wrap_unit(theta / kTwoPi);
    const double block = static_cast<double>(1 << info.level);
    const double u = block * t - info.shift;
    double acc = 0.0;
    // periodization: sum over translates by the level period 2^l
    const double lo = std::ceil(-u / block - 1e-12);
    for (double m = lo;; m += 1.0) {
        const double x = u + m * block;
        if (x >= table_->support_len) break;
        acc += table_->eval(x);
    }
    return level_amplitude(info.level) * acc;
}

double WaveletBasis::eval_deriv(int j, double theta) const {
    const IndexInfo info = index_info(j);
    if (info.is_scaling) return 0.0;
    const double t = wrap_unit(theta / kTwoPi);
    const double block = static_cast<double>(1 << info.level);
    const double u = block * t - info.shift;
    double acc = 0.0;
    const double lo = std::ceil(-u / block - 1e-12);
    for (double m = lo;; m += 1.0) {
        const double x = u + m * block;
        if (x >= table_->support_len) break;
        acc += table_->eval_deriv(x);
    }
    // chain rule through Psi(2^l t - k), t = theta / (2 pi)
    return level_amplitude(info.level) * acc * block / kTwoPi;
}

int Basis::size() const {
    if (const auto* f = fourier()) return f->size();
    return wavelet()->size();
}

double Basis::alpha() const {
    if (const auto* f = fourier()) return f->alpha();
    return wavelet()->alpha();
}

double eval_psi(const Basis& basis, int j, double theta) {
    if (const auto* f = basis.fourier()) return f->eval(j, theta);
    return basis.wavelet()->eval(j, theta);
}

double eval_dpsi(const Basis& basis, int j, double theta) {
    if (const auto* f = basis.fourier()) return f->eval_deriv(j, theta);
    return basis.wavelet()->eval_deriv(j, theta);
}

double total_variation_sup(const Basis& basis, int grid_size) {
    if (const auto* w = basis.wavelet()) {
        // per level, the shift sum collapses to S(frac(2^l t)) with
        // S(u) = sum_m |Psi(u + m)|; precompute S on the dyadic grid
        const auto& t = w->table();
        const std::int64_t per = 1LL << t.depth;
        Eigen::VectorXd shift_sum(per + 1);
        for (std::int64_t i = 0; i <= per; ++i) {
            double s = 0.0;
            for (int m = 0; m < static_cast<int>(t.support_len); ++m) {
                const std::int64_t idx = i + m * per;
                if (idx < t.psi.size()) s += std::abs(t.psi[idx]);
            }
            shift_sum[i] = s;
        }
        auto S = [&](double u) {
            const double pos = u * per;
            const auto i0 = static_cast<std::int64_t>(pos);
            const double f = pos - i0;
            return shift_sum[i0] * (1.0 - f) + shift_sum[std::min(i0 + 1, per)] * f;
        };
        double best = 0.0;
        for (int g = 0; g < grid_size; ++g) {
            const double t01 = static_cast<double>(g) / grid_size;
            double sum = w->level_amplitude(0);  // scaling function
            for (int l = 0; l <= w->max_level(); ++l) {
                double u = t01 * (1 << l);
                u -= std::floor(u);
                sum += w->level_amplitude(l) * S(u);
            }
            best = std::max(best, sum);
        }
        return best;
    }
    const auto* f = basis.fourier();
    double best = 0.0;
    for (int g = 0; g < grid_size; ++g) {
        const double theta = kTwoPi * g / grid_size;
        double sum = 0.0;
        for (int j = 1; j <= f->size(); ++j) sum += std::abs(f->eval(j, theta));
        best = std::max(best, sum);
    }
    return best;
}

Basis rescale_to_theta(Basis basis, double theta, double r0_min) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("rescale_to_theta: theta must lie in (0, 1)");
    const double sup = total_variation_sup(basis);
    if (!(sup > 0.0)) throw std::runtime_error("rescale_to_theta: basis has zero total variation");
    const double factor = theta * r0_min / sup;
    if (auto* f = basis.fourier()) {
        f->set_scale(f->scale() * factor);
    } else {
        // fold the correction into scale_ while repointing the theta field at
        // the realized variation, keeping the net amplitude = old * factor
        auto* w = basis.wavelet();
        w->set_scale(w->scale() * factor * (w->theta_variation() / theta));
        w->set_theta_variation(theta);
    }
    return basis;
}

}  // namespace shapetaylor
