#include "shapetaylor/multiindex.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace shapetaylor {

MultiIndex MultiIndex::unit(int j) {
    if (j < 1) throw std::invalid_argument("MultiIndex::unit: dimension must be >= 1");
    MultiIndex m;
    m.entries_.emplace_back(j, 1);
    return m;
}

MultiIndex MultiIndex::from_pairs(std::vector<std::pair<int, int>> pairs) {
    for (const auto& [j, e] : pairs) {
        if (j < 1) throw std::invalid_argument("MultiIndex: dimension must be >= 1");
        if (e < 0) throw std::invalid_argument("MultiIndex: exponent must be >= 0");
    }
    std::sort(pairs.begin(), pairs.end());
    MultiIndex m;
    for (const auto& [j, e] : pairs) {
        if (e == 0) continue;
        if (!m.entries_.empty() && m.entries_.back().first == j)
            m.entries_.back().second += e;
        else
            m.entries_.emplace_back(j, e);
    }
    return m;
}

int MultiIndex::exponent(int j) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(j, 0));
    return (it != entries_.end() && it->first == j) ? it->second : 0;
}

int MultiIndex::order() const {
    int sum = 0;
    for (const auto& [j, e] : entries_) sum += e;
    return sum;
}

int MultiIndex::support() const { return entries_.empty() ? 0 : entries_.back().first; }

MultiIndex MultiIndex::plus(int j) const {
    MultiIndex m = *this;
    auto it = std::lower_bound(m.entries_.begin(), m.entries_.end(), std::make_pair(j, 0));
    if (it != m.entries_.end() && it->first == j)
        it->second += 1;
    else
        m.entries_.insert(it, {j, 1});
    return m;
}

MultiIndex MultiIndex::minus(int j) const {
    MultiIndex m = *this;
    auto it = std::lower_bound(m.entries_.begin(), m.entries_.end(), std::make_pair(j, 0));
    if (it == m.entries_.end() || it->first != j || it->second == 0)
        throw std::invalid_argument("MultiIndex::minus: exponent in dimension is zero");
    if (--it->second == 0) m.entries_.erase(it);
    return m;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    MultiIndex m;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            m.entries_.push_back(*a++);
        } else if (a == entries_.end() || b->first < a->first) {
            m.entries_.push_back(*b++);
        } else {
            m.entries_.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    return m;
}

bool MultiIndex::leq(const MultiIndex& other) const {
    for (const auto& [j, e] : entries_)
        if (e > other.exponent(j)) return false;
    return true;
}

std::optional<MultiIndex> MultiIndex::try_subtract(const MultiIndex& nu) const {
    if (!nu.leq(*this)) return std::nullopt;
    MultiIndex m;
    auto b = nu.entries_.begin();
    for (const auto& [j, e] : entries_) {
        int sub = 0;
        while (b != nu.entries_.end() && b->first < j) ++b;
        if (b != nu.entries_.end() && b->first == j) sub = b->second;
        if (e - sub > 0) m.entries_.emplace_back(j, e - sub);
    }
    return m;
}

bool MultiIndex::canonical_less(const MultiIndex& a, const MultiIndex& b) {
    const int oa = a.order(), ob = b.order();
    if (oa != ob) return oa < ob;
    // first differing dimension decides; larger exponent there comes first
    auto ia = a.entries_.begin();
    auto ib = b.entries_.begin();
    while (ia != a.entries_.end() && ib != b.entries_.end()) {
        if (ia->first != ib->first) {
            // the one active in the earlier dimension has the larger exponent there
            return ia->first < ib->first;
        }
        if (ia->second != ib->second) return ia->second > ib->second;
        ++ia;
        ++ib;
    }
    return ia != a.entries_.end();
}

std::string MultiIndex::to_string() const {
    if (entries_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(entries_[i].first);
        out += ':';
        out += std::to_string(entries_[i].second);
    }
    return out;
}

std::optional<MultiIndex> MultiIndex::parse(std::string_view text) {
    if (text == "0") return MultiIndex{};
    std::vector<std::pair<int, int>> pairs;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) return std::nullopt;
        int j = 0, e = 0;
        auto r1 = std::from_chars(item.data(), item.data() + colon, j);
        auto r2 = std::from_chars(item.data() + colon + 1, item.data() + item.size(), e);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || r2.ptr != item.data() + item.size())
            return std::nullopt;
        if (j < 1 || e < 1) return std::nullopt;
        pairs.emplace_back(j, e);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (pairs.empty()) return std::nullopt;
    return from_pairs(std::move(pairs));
}

std::size_t MultiIndex::hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& [j, e] : entries_) {
        h ^= static_cast<std::size_t>(j) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

std::int64_t factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial: negative argument");
    if (n > 20) throw std::invalid_argument("factorial: argument exceeds exact 64-bit range");
    std::int64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

std::int64_t factorial(const MultiIndex& mu) {
    std::int64_t f = 1;
    for (const auto& [j, e] : mu.entries()) f *= factorial(e);
    return f;
}

std::int64_t binom(const MultiIndex& mu, const MultiIndex& nu) {
    if (!nu.leq(mu)) throw std::invalid_argument("binom: nu is not componentwise <= mu");
    std::int64_t prod = 1;
    for (const auto& [j, e] : nu.entries()) {
        const int m = mu.exponent(j);
        // C(m, e) by the multiplicative formula, exact in 64 bits for m <= 12
        std::int64_t c = 1;
        for (int i = 1; i <= e; ++i) c = c * (m - e + i) / i;
        prod *= c;
    }
    return prod;
}

std::vector<MultiIndex> lower_set(const MultiIndex& mu) {
    std::vector<MultiIndex> out;
    const auto& ent = mu.entries();
    std::vector<int> exps(ent.size(), 0);
    // lexicographic tensor enumeration over 0..mu_j per active dimension
    while (true) {
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i < ent.size(); ++i)
            if (exps[i] > 0) pairs.emplace_back(ent[i].first, exps[i]);
        out.push_back(MultiIndex::from_pairs(std::move(pairs)));
        std::size_t i = 0;
        for (; i < ent.size(); ++i) {
            if (exps[i] < ent[i].second) {
                ++exps[i];
                std::fill(exps.begin(), exps.begin() + i, 0);
                break;
            }
        }
        if (i == ent.size()) break;
    }
    out.pop_back();  // the last enumerated element is mu itself
    std::sort(out.begin(), out.end(), MultiIndex::canonical_less);
    return out;
}

bool is_downward_closed(const std::vector<MultiIndex>& set) {
    IndexSet s;
    for (const auto& m : set) s.insert(m);
    return s.is_downward_closed();
}

bool IndexSet::insert(const MultiIndex& mu, int stamp) {
    auto [it, fresh] = lookup_.try_emplace(mu, members_.size());
    if (!fresh) return false;
    members_.push_back(mu);
    stamps_.push_back(stamp);
    return true;
}

bool IndexSet::contains(const MultiIndex& mu) const { return lookup_.count(mu) > 0; }

int IndexSet::stamp(const MultiIndex& mu) const {
    auto it = lookup_.find(mu);
    if (it == lookup_.end()) throw std::invalid_argument("IndexSet::stamp: not a member");
    return stamps_[it->second];
}

int IndexSet::max_support() const {
    int s = 0;
    for (const auto& m : members_) s = std::max(s, m.support());
    return s;
}

bool IndexSet::is_downward_closed() const {
    for (const auto& mu : members_) {
        for (const auto& [j, e] : mu.entries()) {
            if (!contains(mu.minus(j))) return false;
        }
    }
    return true;
}

std::vector<MultiIndex> reduced_neighbors(const IndexSet& lambda) {
    if (!lambda.contains(MultiIndex{}))
        throw std::invalid_argument("reduced_neighbors: Lambda must contain the zero index");
    if (!lambda.is_downward_closed())
        throw std::invalid_argument("reduced_neighbors: Lambda is not downward closed");

    const int supp_cap = lambda.max_support() + 1;
    IndexSet seen;
    std::vector<MultiIndex> out;
    for (const auto& mu : lambda.members()) {
        for (int j = 1; j <= supp_cap; ++j) {
            MultiIndex nu = mu.plus(j);
            if (nu.support() > supp_cap) continue;
            if (lambda.contains(nu) || seen.contains(nu)) continue;
            bool closed = true;
            for (const auto& [d, e] : nu.entries()) {
                if (!lambda.contains(nu.minus(d))) {
                    closed = false;
                    break;
                }
            }
            if (closed) {
                seen.insert(nu);
                out.push_back(nu);
            }
        }
    }
    std::sort(out.begin(), out.end(), MultiIndex::canonical_less);
    return out;
}

}  // namespace shapetaylor
