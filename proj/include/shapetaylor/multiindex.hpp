#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shapetaylor {

/// Finitely supported multi-index: a sparse map from 1-based dimension
/// indices to positive exponents. The zero index has empty storage.
class MultiIndex {
public:
    MultiIndex() = default;

    /// e_j, the unit index in dimension j (j >= 1).
    static MultiIndex unit(int j);

    /// Builds from (dimension, exponent) pairs; zero exponents are dropped,
    /// duplicates are summed. Throws on dimension < 1 or exponent < 0.
    static MultiIndex from_pairs(std::vector<std::pair<int, int>> pairs);

    int exponent(int j) const;
    int order() const;    // |mu|
    int support() const;  // max active dimension, 0 for the zero index
    bool is_zero() const { return entries_.empty(); }
    int active_count() const { return static_cast<int>(entries_.size()); }

    MultiIndex plus(int j) const;   // mu + e_j
    MultiIndex minus(int j) const;  // mu - e_j, throws if mu_j == 0
    MultiIndex operator+(const MultiIndex& other) const;

    /// Componentwise mu <= other.
    bool leq(const MultiIndex& other) const;
    /// mu - nu when nu <= mu, nullopt otherwise.
    std::optional<MultiIndex> try_subtract(const MultiIndex& nu) const;

    bool operator==(const MultiIndex& other) const { return entries_ == other.entries_; }
    bool operator!=(const MultiIndex& other) const { return !(*this == other); }

    /// Canonical total order: by |mu|, then the first dimension where the
    /// exponents differ wins with the larger exponent. Puts e_1 before e_2.
    static bool canonical_less(const MultiIndex& a, const MultiIndex& b);

    const std::vector<std::pair<int, int>>& entries() const { return entries_; }

    /// Text form "j1:e1,j2:e2"; the zero index serializes as "0".
    std::string to_string() const;
    static std::optional<MultiIndex> parse(std::string_view text);

    std::size_t hash() const;

private:
    // sorted by dimension, exponents strictly positive
    std::vector<std::pair<int, int>> entries_;
};

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& m) const { return m.hash(); }
};

struct MultiIndexCanonicalLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        return MultiIndex::canonical_less(a, b);
    }
};

std::int64_t factorial(int n);
std::int64_t factorial(const MultiIndex& mu);  // mu! = prod mu_j!
/// prod_j C(mu_j, nu_j); throws if nu !<= mu.
std::int64_t binom(const MultiIndex& mu, const MultiIndex& nu);

/// S_mu = {nu : nu < mu}, in canonical order. |S_mu| = prod(mu_j + 1) - 1.
std::vector<MultiIndex> lower_set(const MultiIndex& mu);

bool is_downward_closed(const std::vector<MultiIndex>& set);

/// Ordered set of multi-indices with O(1) membership and insertion stamps.
class IndexSet {
public:
    IndexSet() = default;

    /// Returns false if already present. The stamp is free-form (the greedy
    /// loop records its iteration counter here).
    bool insert(const MultiIndex& mu, int stamp = 0);
    bool contains(const MultiIndex& mu) const;
    std::size_t size() const { return members_.size(); }
    const std::vector<MultiIndex>& members() const { return members_; }
    int stamp(const MultiIndex& mu) const;
    int max_support() const;
    bool is_downward_closed() const;

private:
    std::vector<MultiIndex> members_;
    std::vector<int> stamps_;
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> lookup_;
};

/// Reduced neighbors N(Lambda): all nu not in Lambda such that
/// Lambda + {nu} stays downward closed and supp(nu) <= max supp(Lambda) + 1.
/// Canonical order. Throws if Lambda is not downward closed or misses 0.
std::vector<MultiIndex> reduced_neighbors(const IndexSet& lambda);

}  // namespace shapetaylor
