#include "shapetaylor/shape_calculus.hpp"

namespace shapetaylor {

namespace {

// rank of sigma in the mixed-radix lattice of kappa (little-endian in the
// sorted dimension list)
int rank_in(const std::vector<int>& dims, const std::vector<int>& strides, const MultiIndex& sigma) {
    int r = 0;
    for (const auto& [j, e] : sigma.entries()) {
        auto it = std::lower_bound(dims.begin(), dims.end(), j);
        if (it == dims.end() || *it != j) throw std::invalid_argument("DerivPlan: index outside the lattice");
        r += strides[static_cast<std::size_t>(it - dims.begin())] * e;
    }
    return r;
}

}  // namespace

DerivPlan::DerivPlan(const MultiIndex& kappa) : kappa_(kappa) {
    for (const auto& [j, e] : kappa.entries()) {
        dims_.push_back(j);
        exps_.push_back(e);
    }
    strides_.resize(dims_.size());
    int total = 1;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        strides_[d] = total;
        total *= exps_[d] + 1;
    }

    // lattice in rank order (rank is mixed-radix little-endian, so rank order
    // enumerates every sigma after all of its predecessors sigma - e_j)
    lattice_.resize(total);
    std::vector<int> cur(dims_.size(), 0);
    for (int r = 0; r < total; ++r) {
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t d = 0; d < dims_.size(); ++d)
            if (cur[d] > 0) pairs.emplace_back(dims_[d], cur[d]);
        lattice_[r] = MultiIndex::from_pairs(std::move(pairs));
        for (std::size_t d = 0; d < dims_.size(); ++d) {
            if (cur[d] < exps_[d]) {
                ++cur[d];
                std::fill(cur.begin(), cur.begin() + d, 0);
                break;
            }
        }
    }

    // inverse-Jacobian recursion steps, in rank order
    for (int r = 1; r < total; ++r) {
        const MultiIndex& sigma = lattice_[r];
        const int j = sigma.entries().front().first;
        const int slot = static_cast<int>(std::lower_bound(dims_.begin(), dims_.end(), j) - dims_.begin());
        const MultiIndex base = sigma.minus(j);
        InvStep step;
        step.target = r;
        std::vector<MultiIndex> below = lower_set(base);
        below.push_back(base);
        for (const auto& nu : below) {
            const MultiIndex rest = *base.try_subtract(nu);
            InvTerm t;
            t.left = rank_in(dims_, strides_, nu);
            t.right = rank_in(dims_, strides_, rest);
            t.dim_slot = slot;
            t.coeff = static_cast<double>(binom(base, nu));
            step.terms.push_back(t);
        }
        inv_steps_.push_back(std::move(step));
    }

    // determinant entries (nonzero only up to order 2)
    for (int r = 0; r < total; ++r) {
        const MultiIndex& sigma = lattice_[r];
        const int order = sigma.order();
        if (order > 2) continue;
        DetEntry e;
        e.target = r;
        if (order == 0) {
            e.kind = 0;
        } else if (order == 1) {
            e.kind = 1;
            e.a = static_cast<int>(std::lower_bound(dims_.begin(), dims_.end(), sigma.entries()[0].first) -
                                   dims_.begin());
        } else if (sigma.entries().size() == 1) {
            e.kind = 2;
            e.a = static_cast<int>(std::lower_bound(dims_.begin(), dims_.end(), sigma.entries()[0].first) -
                                   dims_.begin());
        } else {
            e.kind = 3;
            e.a = static_cast<int>(std::lower_bound(dims_.begin(), dims_.end(), sigma.entries()[0].first) -
                                   dims_.begin());
            e.b = static_cast<int>(std::lower_bound(dims_.begin(), dims_.end(), sigma.entries()[1].first) -
                                   dims_.begin());
        }
        det_entries_.push_back(e);
    }

    // three-way compositions nu1 + nu2 + nu3 = kappa with |nu3| <= 2
    const std::int64_t kappa_fact = factorial(kappa);
    std::vector<MultiIndex> subs = lower_set(kappa);
    subs.push_back(kappa);
    for (const auto& nu1 : subs) {
        const MultiIndex rem = *kappa.try_subtract(nu1);
        std::vector<MultiIndex> subs2 = lower_set(rem);
        subs2.push_back(rem);
        for (const auto& nu2 : subs2) {
            const MultiIndex nu3 = *rem.try_subtract(nu2);
            if (nu3.order() > 2) continue;
            Composition c;
            c.inv1 = rank_in(dims_, strides_, nu1);
            c.inv2 = rank_in(dims_, strides_, nu2);
            c.det = rank_in(dims_, strides_, nu3);
            c.multinomial = static_cast<double>(kappa_fact / (factorial(nu1) * factorial(nu2) * factorial(nu3)));
            compositions_.push_back(c);
        }
    }
}

int DerivPlan::rank_of(const MultiIndex& sigma) const { return rank_in(dims_, strides_, sigma); }

}  // namespace shapetaylor
