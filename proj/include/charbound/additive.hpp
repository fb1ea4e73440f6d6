#pragma once

// Sumsets, additive energy and the exact counting facts behind the
// energy-versus-dilation estimate for graphs of maps between duals.
//
// Every count here is an exact 64-bit integer; nothing passes through floats
// except the derived ratios in PropkReport.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "charbound/errors.hpp"
#include "charbound/group.hpp"

namespace charbound {

/// Graph of a map phi: Lambda -> H^ as a subset of G^ x H^.
class MapGraph {
public:
    using Pair = std::pair<GroupElement, GroupElement>;

    MapGraph() = default;
    MapGraph(GroupSpec g_dual, GroupSpec h_dual, std::vector<Pair> pairs)
        : g_dual_(std::move(g_dual)),
          h_dual_(std::move(h_dual)),
          prod_(GroupSpec::product(g_dual_, h_dual_)),
          pairs_(std::move(pairs)) {
        for (const auto& [a, b] : pairs_) {
            g_dual_.check(a);
            h_dual_.check(b);
            if (!lookup_.emplace(a, b).second)
                throw std::invalid_argument("graph has two values at the same point");
        }
    }

    const GroupSpec& g_dual() const { return g_dual_; }
    const GroupSpec& h_dual() const { return h_dual_; }
    const GroupSpec& prod_dual() const { return prod_; }
    const std::vector<Pair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    const GroupElement& operator()(const GroupElement& a) const {
        auto it = lookup_.find(a);
        if (it == lookup_.end()) throw std::out_of_range("point outside the graph's domain");
        return it->second;
    }
    bool defined_at(const GroupElement& a) const { return lookup_.count(a) != 0; }

    ElementSet domain() const {
        ElementSet s;
        for (const auto& p : pairs_) s.insert(p.first);
        return s;
    }

    ElementSet image() const {
        ElementSet s;
        for (const auto& p : pairs_) s.insert(p.second);
        return s;
    }

    bool injective() const { return image().size() == pairs_.size(); }

    /// Gamma as a set of elements of the product dual.
    ElementSet as_set() const {
        ElementSet s;
        for (const auto& [a, b] : pairs_) s.insert(concat(a, b));
        return s;
    }

    /// Graph of phi^-1 (phi must be injective).
    MapGraph inverse() const {
        if (!injective()) throw std::invalid_argument("cannot invert a non-injective map");
        std::vector<Pair> inv;
        inv.reserve(pairs_.size());
        for (const auto& [a, b] : pairs_) inv.emplace_back(b, a);
        return MapGraph(h_dual_, g_dual_, std::move(inv));
    }

private:
    GroupSpec g_dual_;
    GroupSpec h_dual_;
    GroupSpec prod_;
    std::vector<Pair> pairs_;
    std::map<GroupElement, GroupElement> lookup_;
};

inline ElementSet sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b) {
    ElementSet out;
    for (const auto& x : a)
        for (const auto& y : b) out.insert(elem_add(g, x, y));
    return out;
}

/// A + A + ... + A (m summands).
inline ElementSet iterated_sumset(const GroupSpec& g, u64 m, const ElementSet& a) {
    if (m == 0) throw std::invalid_argument("iterated_sumset needs m >= 1");
    ElementSet acc = a;
    for (u64 i = 1; i < m; ++i) {
        ElementSet next = sumset(g, acc, a);
        if (next == acc) break;  // closed under + A from here on
        acc = std::move(next);
    }
    return acc;
}

namespace detail {

inline constexpr std::size_t kEnergyMaxSize = 2097151;  // |S|^3 < 2^63

/// r(s) = #{(a, b) in S^2 : a + b = s}, keyed by canonical index.
inline std::unordered_map<u64, u64> pair_sum_counts(const GroupSpec& g, const std::vector<GroupElement>& s) {
    std::unordered_map<u64, u64> r;
    r.reserve(s.size() * s.size());
    for (const auto& a : s)
        for (const auto& b : s) ++r[g.index(elem_add(g, a, b))];
    return r;
}

}  // namespace detail

/// E(S) = #{(a, b, c, d) in S^4 : a + b = c + d} = sum_s r(s)^2.
inline u64 energy(const GroupSpec& g, const ElementSet& s) {
    if (s.size() > detail::kEnergyMaxSize) throw std::overflow_error("energy: set too large");
    const std::vector<GroupElement> v(s.begin(), s.end());
    u64 e = 0;
    for (const auto& [key, r] : detail::pair_sum_counts(g, v)) e += r * r;
    return e;
}

inline u64 graph_energy(const MapGraph& gamma) { return energy(gamma.prod_dual(), gamma.as_set()); }

/// Counting-measure statistics of 1_X * 1_{m.X}.
struct ConvStats {
    u64 l1 = 0;       // |X| |m.X|
    u64 l2sq = 0;     // sum_s c(s)^2
    u64 support = 0;  // |X + m.X|
    u64 x_size = 0;
    u64 mx_size = 0;
    u64 mg_size = 0;  // |m.G| for the ambient group

    /// l1^2 <= l2sq * support
    bool cauchy_schwarz_holds() const {
        using u128 = unsigned __int128;
        return static_cast<u128>(l1) * l1 <= static_cast<u128>(l2sq) * support;
    }

    /// A coincidence x + m.y = x' + m.y' is fixed by (x, x - x', m.y) and
    /// x - x' lies in m.G, so l2sq <= |X| |m.G| |m.X|.
    bool counting_bound_holds() const {
        using u128 = unsigned __int128;
        return static_cast<u128>(l2sq) <= static_cast<u128>(x_size) * mg_size * mx_size;
    }
};

inline ConvStats conv_stats(const GroupSpec& g, const ElementSet& x, u64 m) {
    if (m == 0) throw std::invalid_argument("conv_stats needs m >= 1");
    if (x.size() > detail::kEnergyMaxSize) throw std::overflow_error("conv_stats: set too large");
    const ElementSet mx = dilate_set(g, m, x);
    std::unordered_map<u64, u64> c;
    c.reserve(x.size() * mx.size());
    for (const auto& a : x)
        for (const auto& b : mx) ++c[g.index(elem_add(g, a, b))];
    ConvStats st;
    st.x_size = x.size();
    st.mx_size = mx.size();
    st.mg_size = dilated_group_size(g, m);
    st.l1 = st.x_size * st.mx_size;
    st.support = c.size();
    for (const auto& [k, v] : c) st.l2sq += v * v;
    return st;
}

/// Raw quantities of the energy-versus-dilation estimate for a graph.
/// No constant is asserted; ratio and epsilon are for empirical fitting.
struct PropkReport {
    u64 m = 0;
    u64 energy = 0;
    u64 gamma_size = 0;
    u64 dilated_g = 0;      // |m.G^|
    u64 dilated_image = 0;  // |m.Im phi|
    double epsilon = 0.0;   // E / |Gamma|^3
    double ratio = 0.0;     // |m.G^| / |m.Im phi|
    ConvStats conv;         // of 1_Gamma * 1_{m.Gamma} in G^ x H^
    /// Graph-specific count: a coincidence is fixed by (lambda, lambda -
    /// lambda' in m.G^, m.gamma), so l2sq <= |Gamma| |m.G^| |m.Gamma|.
    bool graph_counting_bound = false;
    bool plunnecke_containment = false;  // Gamma + m.Gamma subset of (m+1)Gamma

    /// log(epsilon) / log(ratio), defined only when ratio > 1.
    std::optional<double> empirical_exponent() const {
        if (!(ratio > 1.0) || epsilon <= 0.0) return std::nullopt;
        return std::log(epsilon) / std::log(ratio);
    }
};

inline PropkReport propk_report(const MapGraph& gamma, u64 m) {
    if (gamma.empty()) throw std::invalid_argument("propk_report of an empty graph");
    if (m == 0) throw std::invalid_argument("propk_report needs m >= 1");
    PropkReport r;
    r.m = m;
    r.gamma_size = gamma.size();
    r.energy = graph_energy(gamma);
    r.dilated_g = dilated_group_size(gamma.g_dual(), m);
    r.dilated_image = dilate_set(gamma.h_dual(), m, gamma.image()).size();
    const double n = static_cast<double>(r.gamma_size);
    r.epsilon = static_cast<double>(r.energy) / (n * n * n);
    r.ratio = static_cast<double>(r.dilated_g) / static_cast<double>(r.dilated_image);

    const GroupSpec& prod = gamma.prod_dual();
    const ElementSet gs = gamma.as_set();
    r.conv = conv_stats(prod, gs, m);
    using u128 = unsigned __int128;
    r.graph_counting_bound =
        static_cast<u128>(r.conv.l2sq) <= static_cast<u128>(r.gamma_size) * r.dilated_g * r.conv.mx_size;
    // (m+1)Gamma is only needed as a superset test; stop early for large m.
    const ElementSet lhs = sumset(prod, gs, dilate_set(prod, m, gs));
    const ElementSet rhs = iterated_sumset(prod, m + 1, gs);
    r.plunnecke_containment = true;
    for (const auto& x : lhs)
        if (!rhs.count(x)) {
            r.plunnecke_containment = false;
            break;
        }

    if (r.energy == 0 || r.dilated_g == 0 || r.dilated_image == 0)
        throw SoundnessError("propk_report: nonpositive count");
    if (r.epsilon > 1.0) throw SoundnessError("propk_report: normalised energy exceeds 1");
    return r;
}

enum class BsgMode { exhaustive, greedy };

inline constexpr std::size_t kBsgExhaustiveCap = 64;

/// Largest X in Gamma with |X + X| <= K |X| (exhaustive) or a best-effort
/// such X (greedy). A heuristic stand-in for the Balog-Szemeredi-Gowers
/// extraction; no constants are claimed. Returns elements of G^ x H^.
inline std::optional<ElementSet> bsg_heuristic(const MapGraph& gamma, double k,
                                               BsgMode mode = BsgMode::exhaustive) {
    if (gamma.empty() || k < 1.0) return std::nullopt;
    const GroupSpec& prod = gamma.prod_dual();
    const std::vector<GroupElement> elems = [&] {
        const ElementSet s = gamma.as_set();
        return std::vector<GroupElement>(s.begin(), s.end());
    }();
    const std::size_t n = elems.size();
    std::vector<std::vector<u64>> sum(n, std::vector<u64>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sum[i][j] = prod.index(elem_add(prod, elems[i], elems[j]));

    auto doubling_ok = [&](std::size_t distinct, std::size_t size) {
        return static_cast<double>(distinct) <= k * static_cast<double>(size);
    };

    if (mode == BsgMode::greedy) {
        std::vector<bool> in(n, true);
        std::size_t size = n;
        auto distinct_sums = [&] {
            std::unordered_map<u64, int> seen;
            for (std::size_t i = 0; i < n; ++i)
                if (in[i])
                    for (std::size_t j = 0; j < n; ++j)
                        if (in[j]) seen[sum[i][j]] = 1;
            return seen.size();
        };
        std::size_t cur = distinct_sums();
        while (size > 0 && !doubling_ok(cur, size)) {
            std::size_t best_i = n, best_d = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!in[i]) continue;
                in[i] = false;
                const std::size_t d = distinct_sums();
                in[i] = true;
                if (best_i == n || d < best_d) {
                    best_i = i;
                    best_d = d;
                }
            }
            in[best_i] = false;
            --size;
            cur = best_d;
        }
        if (size == 0) return std::nullopt;
        ElementSet out;
        for (std::size_t i = 0; i < n; ++i)
            if (in[i]) out.insert(elems[i]);
        return out;
    }

    if (n > kBsgExhaustiveCap) throw std::length_error("bsg_heuristic: exhaustive mode is capped at 64 points");

    // Branch and bound. |X + X| only grows with X, so a partial choice whose
    // sumset already exceeds K (|chosen| + |remaining|) cannot be completed.
    std::vector<std::size_t> chosen, best;
    std::unordered_map<u64, int> counts;
    std::size_t distinct = 0;

    auto add = [&](std::size_t i) {
        chosen.push_back(i);
        for (std::size_t j : chosen)
            if (counts[sum[i][j]]++ == 0) ++distinct;
    };
    auto remove = [&](std::size_t i) {
        for (std::size_t j : chosen)
            if (--counts[sum[i][j]] == 0) --distinct;
        chosen.pop_back();
    };

    auto dfs = [&](auto&& self, std::size_t i) -> void {
        if (chosen.size() + (n - i) <= best.size()) return;
        if (!doubling_ok(distinct, chosen.size() + (n - i))) return;
        if (i == n) {
            if (doubling_ok(distinct, chosen.size())) best = chosen;
            return;
        }
        add(i);
        self(self, i + 1);
        remove(i);
        self(self, i + 1);
    };
    dfs(dfs, 0);

    if (best.empty()) return std::nullopt;
    ElementSet out;
    for (std::size_t i : best) out.insert(elems[i]);
    return out;
}

}  // namespace charbound
