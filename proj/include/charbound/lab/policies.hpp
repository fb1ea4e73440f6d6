#pragma once

// Character maps used by the sweeps: Walsh-Paley indexing, uniformly random
// injections and sum-distinct (Sidon) graphs found by local search.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "charbound/additive.hpp"
#include "charbound/group.hpp"
#include "charbound/lab/config.hpp"
#include "charbound/rng.hpp"

namespace charbound::lab {

/// Position of `a` in the enumeration used by walsh_paley. On (Z/2)^k this is
/// sum_j a_j 2^j, so coordinate j plays the role of the Rademacher r_j; other
/// groups use the canonical index.
inline u64 walsh_paley_rank(const GroupSpec& g, const GroupElement& a) {
    if (!charbound::detail::all_binary(g)) return g.index(a);
    u64 r = 0;
    for (std::size_t j = 0; j < g.rank(); ++j) r |= a[j] << j;
    return r;
}

inline GroupElement walsh_paley_element(const GroupSpec& g, u64 rank) {
    if (!charbound::detail::all_binary(g)) return g.element(rank % g.order());
    GroupElement a(std::vector<u64>(g.rank(), 0));
    for (std::size_t j = 0; j < g.rank(); ++j) a[j] = (rank >> j) & 1u;
    return a;
}

struct SidonSearch {
    std::vector<u64> targets;  // canonical indices into the target group
    u64 conflicts = 0;         // repeated pair sums left when the search stopped
    unsigned steps = 0;
};

namespace detail {

/// Calls fn(t, w) for every t in g with w = index(element(t) + element(v)),
/// walking t in canonical order and carrying w along as a second odometer.
template <typename Fn>
void for_each_shift(const GroupSpec& g, u64 v, Fn&& fn) {
    const std::size_t r = g.rank();
    std::vector<u64> stride(r), td(r, 0), wd(r);
    u64 s = 1;
    for (std::size_t k = r; k-- > 0;) {
        stride[k] = s;
        s *= g.modulus(k);
    }
    const GroupElement ve = g.element(v);
    for (std::size_t k = 0; k < r; ++k) wd[k] = ve[k];
    u64 w = v;
    for (u64 t = 0; t < g.order(); ++t) {
        fn(t, w);
        for (std::size_t k = r; k-- > 0;) {
            const u64 n = g.modulus(k);
            if (wd[k] + 1 == n) {
                wd[k] = 0;
                w -= (n - 1) * stride[k];
            } else {
                ++wd[k];
                w += stride[k];
            }
            if (++td[k] < n) break;
            td[k] = 0;
        }
    }
}

}  // namespace detail

inline constexpr u64 kSidonWorkCap = u64{1} << 31;

/// Looks for targets t_i in `tgt` such that the graph {(d_i, t_i)} has only
/// trivial additive quadruples: every unordered pair {i, j}, i = j allowed,
/// has its own sum in D x T. Greedy placement in a random order, then
/// min-conflicts moves on elements that still share a pair sum. Targets are
/// kept distinct throughout.
inline SidonSearch sidon_search(const GroupSpec& dom, const std::vector<GroupElement>& domain,
                                const GroupSpec& tgt, Rng& rng, unsigned max_steps) {
    const std::size_t n = domain.size();
    const u64 tn = tgt.order();
    if (n == 0) return {};
    if (n > tn) throw std::invalid_argument("sidon_search: more points than targets");
    if (static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(tn) > static_cast<double>(kSidonWorkCap))
        throw std::invalid_argument("sidon_search: instance too large");
    if (static_cast<double>(dom.order()) * static_cast<double>(tn) > static_cast<double>(u64{1} << 28))
        throw std::invalid_argument("sidon_search: pair-sum table too large");

    std::vector<u64> dsum(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dsum[i * n + j] = dom.index(elem_add(dom, domain[i], domain[j]));
    std::vector<u64> twice(tn);
    for (u64 t = 0; t < tn; ++t) {
        const GroupElement e = tgt.element(t);
        twice[t] = tgt.index(elem_add(tgt, e, e));
    }
    // t + v for the cyclic case without the odometer.
    const bool cyclic = tgt.rank() == 1;
    auto tadd = [&](u64 a, u64 b) { return cyclic ? (a + b) % tn : tgt.index(elem_add(tgt, tgt.element(a), tgt.element(b))); };

    std::vector<std::uint32_t> occ(dom.order() * tn, 0);
    std::vector<std::uint32_t> used(tn, 0);
    std::vector<u64> val(n, 0);
    std::vector<char> placed(n, 0);

    auto touch = [&](std::size_t i, int delta) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!placed[j] || j == i) continue;
            occ[dsum[i * n + j] * tn + tadd(val[i], val[j])] += delta;
        }
        occ[dsum[i * n + i] * tn + twice[val[i]]] += delta;
        used[val[i]] += delta;
    };

    std::vector<u64> cost(tn);
    // Picks the least-conflicting free target for element i (not currently placed).
    auto best_target = [&](std::size_t i) {
        std::fill(cost.begin(), cost.end(), 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (!placed[j] || j == i) continue;
            const u64 row = dsum[i * n + j] * tn;
            if (cyclic) {
                const u64 v = val[j];
                for (u64 t = 0; t < tn; ++t) {
                    u64 w = t + v;
                    if (w >= tn) w -= tn;
                    cost[t] += occ[row + w];
                }
            } else {
                detail::for_each_shift(tgt, val[j], [&](u64 t, u64 w) { cost[t] += occ[row + w]; });
            }
        }
        const u64 row = dsum[i * n + i] * tn;
        for (u64 t = 0; t < tn; ++t) cost[t] += occ[row + twice[t]] + (used[t] ? u64{1} << 40 : 0);
        u64 best = UINT64_MAX, pick = 0, ties = 0;
        for (u64 t = 0; t < tn; ++t) {
            if (cost[t] < best) {
                best = cost[t];
                pick = t;
                ties = 1;
            } else if (cost[t] == best && rng.below(++ties) == 0) {
                pick = t;
            }
        }
        return pick;
    };

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t i : order) {
        val[i] = best_target(i);
        placed[i] = 1;
        touch(i, +1);
    }

    auto conflicted = [&]() {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n; ++i) {
            bool bad = occ[dsum[i * n + i] * tn + twice[val[i]]] > 1;
            for (std::size_t j = 0; j < n && !bad; ++j)
                if (j != i) bad = occ[dsum[i * n + j] * tn + tadd(val[i], val[j])] > 1;
            if (bad) out.push_back(i);
        }
        return out;
    };

    SidonSearch res;
    std::vector<std::size_t> bad = conflicted();
    while (!bad.empty() && res.steps < max_steps) {
        const std::size_t i = bad[rng.below(bad.size())];
        touch(i, -1);
        placed[i] = 0;
        val[i] = best_target(i);
        placed[i] = 1;
        touch(i, +1);
        ++res.steps;
        bad = conflicted();
    }
    for (auto c : occ)
        if (c > 1) res.conflicts += c - 1;
    res.targets = std::move(val);
    return res;
}

struct BuiltMap {
    MapGraph phi;
    bool sidon_verified = false;  // graph energy equals 2n^2 - n
    u64 search_conflicts = 0;
};

inline u64 sidon_energy(u64 n) { return 2 * n * n - n; }

inline unsigned default_sidon_steps(std::size_t n, unsigned configured) {
    return configured != 0 ? configured : static_cast<unsigned>(20 * n);
}

/// Builds phi on `domain` (a subset of g_dual) into h_dual.
inline BuiltMap build_map(MapPolicy policy, const GroupSpec& g_dual, const std::vector<GroupElement>& domain,
                          const GroupSpec& h_dual, Rng& rng, unsigned sidon_steps) {
    std::vector<MapGraph::Pair> pairs;
    BuiltMap out;
    switch (policy) {
        case MapPolicy::identity: {
            if (!(g_dual == h_dual)) throw ConfigError("identity policy needs equal groups");
            for (const auto& a : domain) pairs.emplace_back(a, a);
            break;
        }
        case MapPolicy::walsh_paley: {
            for (const auto& a : domain)
                pairs.emplace_back(a, walsh_paley_element(h_dual, walsh_paley_rank(g_dual, a)));
            break;
        }
        case MapPolicy::random_injection: {
            if (domain.size() > h_dual.order()) throw ConfigError("no injection: domain larger than target");
            // Partial Fisher-Yates over target indices, stored sparsely.
            std::map<u64, u64> swapped;
            const u64 tn = h_dual.order();
            for (std::size_t i = 0; i < domain.size(); ++i) {
                const u64 j = i + rng.below(tn - i);
                const u64 vj = swapped.count(j) ? swapped[j] : j;
                const u64 vi = swapped.count(i) ? swapped[i] : i;
                swapped[j] = vi;
                pairs.emplace_back(domain[i], h_dual.element(vj));
            }
            break;
        }
        case MapPolicy::sidon_injection: {
            if (domain.size() > h_dual.order()) throw ConfigError("no injection: domain larger than target");
            SidonSearch s;
            try {
                s = sidon_search(g_dual, domain, h_dual, rng, default_sidon_steps(domain.size(), sidon_steps));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            for (std::size_t i = 0; i < domain.size(); ++i) pairs.emplace_back(domain[i], h_dual.element(s.targets[i]));
            out.search_conflicts = s.conflicts;
            break;
        }
    }
    out.phi = MapGraph(g_dual, h_dual, std::move(pairs));
    out.sidon_verified = graph_energy(out.phi) == sidon_energy(out.phi.size());
    return out;
}

}  // namespace charbound::lab
