#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shapetaylor/multiindex.hpp"

namespace shapetaylor {

/// Per-point data entering the derivative formulas: Phi_j(x) and D_x Phi_j(x)
/// for every dimension in the support of the requested indices.
template <typename Scalar>
struct PointJet {
    std::vector<int> dims;                                     // sorted dimension indices
    std::vector<Eigen::Matrix<Scalar, 2, 1>> phi;              // Phi_j(x)
    std::vector<Eigen::Matrix<Scalar, 2, 2>> dphi;             // D_x Phi_j(x)

    const Eigen::Matrix<Scalar, 2, 2>& dphi_of(int j) const {
        auto it = std::lower_bound(dims.begin(), dims.end(), j);
        if (it == dims.end() || *it != j) throw std::invalid_argument("PointJet: dimension missing from jet");
        return dphi[static_cast<std::size_t>(it - dims.begin())];
    }
};

/// Precomputed evaluation plan for all derivative quantities below a fixed
/// index kappa: the sub-index lattice, the inverse-Jacobian recursion steps,
/// and the three-way Leibniz compositions for the pullback coefficient.
/// Building a plan is pure combinatorics; running it on a jet is pure algebra,
/// so one plan serves every quadrature point.
class DerivPlan {
public:
    explicit DerivPlan(const MultiIndex& kappa);

    const MultiIndex& kappa() const { return kappa_; }
    const std::vector<int>& dims() const { return dims_; }
    int lattice_size() const { return static_cast<int>(lattice_.size()); }
    const std::vector<MultiIndex>& lattice() const { return lattice_; }

    struct InvTerm {
        int left, right;   // lattice ranks of dN factors
        int dim_slot;      // position in dims() of the D_x Phi_j factor
        double coeff;      // binomial weight
    };
    struct InvStep {
        int target;                  // lattice rank being filled
        std::vector<InvTerm> terms;  // sum, negated
    };
    const std::vector<InvStep>& inv_steps() const { return inv_steps_; }

    struct DetEntry {
        int target;
        int kind;          // 0: 1, 1: tr(M_a), 2: 2 det(M_a), 3: tr a tr b - tr(ab)
        int a = -1, b = -1;  // dim slots
    };
    const std::vector<DetEntry>& det_entries() const { return det_entries_; }

    struct Composition {
        int inv1, inv2, det;  // lattice ranks
        double multinomial;
    };
    const std::vector<Composition>& compositions() const { return compositions_; }

    int rank_of(const MultiIndex& sigma) const;  // throws if sigma !<= kappa

private:
    MultiIndex kappa_;
    std::vector<int> dims_;
    std::vector<int> exps_;
    std::vector<int> strides_;
    std::vector<MultiIndex> lattice_;
    std::vector<InvStep> inv_steps_;
    std::vector<DetEntry> det_entries_;
    std::vector<Composition> compositions_;
};

/// Reusable per-point scratch space for running a DerivPlan.
template <typename Scalar>
struct DerivWorkspace {
    std::vector<Eigen::Matrix<Scalar, 2, 2>> inv;  // dN at each lattice rank
    std::vector<Scalar> det;                       // d(det) at each lattice rank
};

namespace detail {

template <typename Scalar>
void run_plan(const DerivPlan& plan, const std::vector<Eigen::Matrix<Scalar, 2, 2>>& m,
              DerivWorkspace<Scalar>& ws) {
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
    const int n = plan.lattice_size();
    ws.inv.assign(n, Mat2::Zero());
    ws.det.assign(n, Scalar(0));
    ws.inv[0] = Mat2::Identity();
    for (const auto& step : plan.inv_steps()) {
        Mat2 acc = Mat2::Zero();
        for (const auto& t : step.terms) acc += t.coeff * (ws.inv[t.left] * m[t.dim_slot] * ws.inv[t.right]);
        ws.inv[step.target] = -acc;
    }
    for (const auto& e : plan.det_entries()) {
        switch (e.kind) {
            case 0: ws.det[e.target] = Scalar(1); break;
            case 1: ws.det[e.target] = m[e.a].trace(); break;
            case 2: ws.det[e.target] = Scalar(2) * m[e.a].determinant(); break;
            default: ws.det[e.target] = m[e.a].trace() * m[e.b].trace() - (m[e.a] * m[e.b]).trace(); break;
        }
    }
}

}  // namespace detail

/// d^mu[(D_x Phi)^{-1}](0) via the memoized Leibniz recursion
/// d^{mu+e_j} N = -sum_{nu <= mu} binom(mu, nu) d^nu N . D_x Phi_j . d^{mu-nu} N.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> d_inv(const MultiIndex& mu, const PointJet<Scalar>& jet) {
    DerivPlan plan(mu);
    std::vector<Eigen::Matrix<Scalar, 2, 2>> m;
    for (int d : plan.dims()) m.push_back(jet.dphi_of(d));
    DerivWorkspace<Scalar> ws;
    detail::run_plan(plan, m, ws);
    return ws.inv.back();
}

/// Oracle route: (-1)^|mu| mu! sum over distinct orderings of the derivative
/// directions of the product D_x Phi_{xi_1} ... D_x Phi_{xi_|mu|}.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> d_inv_permutation_sum(const MultiIndex& mu, const PointJet<Scalar>& jet) {
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
    if (mu.is_zero()) return Mat2::Identity();
    std::vector<int> word;
    for (const auto& [j, e] : mu.entries())
        for (int k = 0; k < e; ++k) word.push_back(j);
    std::sort(word.begin(), word.end());
    Mat2 acc = Mat2::Zero();
    do {
        Mat2 prod = Mat2::Identity();
        for (int j : word) prod = prod * jet.dphi_of(j);
        acc += prod;
    } while (std::next_permutation(word.begin(), word.end()));
    const double sign = (mu.order() % 2 == 0) ? 1.0 : -1.0;
    return sign * static_cast<double>(factorial(mu)) * acc;
}

/// d^mu[det D_x Phi](0), closed form (the determinant is quadratic in y for d = 2).
template <typename Scalar>
Scalar d_det(const MultiIndex& mu, const PointJet<Scalar>& jet) {
    const int order = mu.order();
    if (order == 0) return Scalar(1);
    if (order > 2) return Scalar(0);
    const auto& ent = mu.entries();
    if (order == 1) return jet.dphi_of(ent[0].first).trace();
    if (ent.size() == 1) return Scalar(2) * jet.dphi_of(ent[0].first).determinant();
    const auto& a = jet.dphi_of(ent[0].first);
    const auto& b = jet.dphi_of(ent[1].first);
    return a.trace() * b.trace() - (a * b).trace();
}

/// Oracle route: the Jacobi-formula recursion
/// d^mu det = sum_{nu <= mu - e_j} binom(mu - e_j, nu) d^nu det . tr(d^{mu-e_j-nu} N . D_x Phi_j).
template <typename Scalar>
Scalar d_det_jacobi(const MultiIndex& mu, const PointJet<Scalar>& jet);

/// d^mu A(0; x) for spatially constant a:
/// a sum_{n1+n2+n3 = mu} multinom(mu) d^{n1} N (d^{n2} N)^T d^{n3} det, symmetrized.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> d_A(const MultiIndex& mu, const PointJet<Scalar>& jet, Scalar a_value) {
    DerivPlan plan(mu);
    std::vector<Eigen::Matrix<Scalar, 2, 2>> m;
    for (int d : plan.dims()) m.push_back(jet.dphi_of(d));
    DerivWorkspace<Scalar> ws;
    detail::run_plan(plan, m, ws);
    using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
    Mat2 acc = Mat2::Zero();
    for (const auto& c : plan.compositions())
        acc += c.multinomial * ws.det[c.det] * (ws.inv[c.inv1] * ws.inv[c.inv2].transpose());
    acc *= a_value;
    return Scalar(0.5) * (acc + acc.transpose());
}

/// d^mu F(0; x) = f . d^mu det for spatially constant f; zero for |mu| >= 3.
template <typename Scalar>
Scalar d_F(const MultiIndex& mu, const PointJet<Scalar>& jet, Scalar f_value) {
    return f_value * d_det(mu, jet);
}

template <typename Scalar>
Scalar d_det_jacobi(const MultiIndex& mu, const PointJet<Scalar>& jet) {
    if (mu.is_zero()) return Scalar(1);
    const int j = mu.entries().front().first;
    const MultiIndex base = mu.minus(j);
    Scalar acc(0);
    std::vector<MultiIndex> below = lower_set(base);
    below.push_back(base);
    for (const auto& nu : below) {
        const MultiIndex rest = *base.try_subtract(nu);
        const Scalar g = d_det_jacobi(nu, jet);
        const Eigen::Matrix<Scalar, 2, 2> dninv = d_inv(rest, jet);
        acc += static_cast<double>(binom(base, nu)) * g * (dninv * jet.dphi_of(j)).trace();
    }
    return acc;
}

}  // namespace shapetaylor
