#pragma once

// Finite Abelian groups as products of cyclic factors Z/n_1 x ... x Z/n_k.
//
// A group doubles as its own dual: the character indexed by a evaluates to
// exp(2 pi i sum_j a_j x_j / n_j) (see harmonic.hpp). Elements are dense
// residue vectors; each element also has a canonical mixed-radix index
// (row-major, factor 0 most significant) used for array-backed storage.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace charbound {

using u64 = std::uint64_t;

inline constexpr u64 kOrderCap = static_cast<u64>(std::numeric_limits<std::int64_t>::max());

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 n) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % n);
}

inline u64 addmod(u64 a, u64 b, u64 n) {
    // a, b < n
    return a >= n - b ? a - (n - b) : a + b;
}

inline bool mul_overflows(u64 a, u64 b, u64 cap) {
    return b != 0 && a > cap / b;
}

inline std::vector<std::pair<u64, unsigned>> factorize(u64 n) {
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 p = 2; p <= n / p; ++p) {
        if (n % p != 0) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline u64 ipow(u64 base, unsigned e) {
    u64 r = 1;
    while (e-- > 0) r *= base;
    return r;
}

}  // namespace detail

/// An element of a finite Abelian group (or of its dual): one residue per factor.
struct GroupElement {
    std::vector<u64> residues;

    GroupElement() = default;
    explicit GroupElement(std::vector<u64> r) : residues(std::move(r)) {}
    GroupElement(std::initializer_list<u64> r) : residues(r) {}

    std::size_t size() const { return residues.size(); }
    u64 operator[](std::size_t i) const { return residues[i]; }
    u64& operator[](std::size_t i) { return residues[i]; }

    auto operator<=>(const GroupElement&) const = default;
    bool operator==(const GroupElement&) const = default;
};

using ElementSet = std::set<GroupElement>;

/// Concatenation (a, b) as an element of a product group.
inline GroupElement concat(const GroupElement& a, const GroupElement& b) {
    GroupElement out;
    out.residues.reserve(a.size() + b.size());
    out.residues.insert(out.residues.end(), a.residues.begin(), a.residues.end());
    out.residues.insert(out.residues.end(), b.residues.begin(), b.residues.end());
    return out;
}

/// A finite Abelian group given by its cyclic factor moduli.
///
/// Factors equal to 1 are dropped, so the trivial group is the empty list
/// with order 1. The order is capped at 2^63 - 1.
class GroupSpec {
public:
    GroupSpec() = default;

    explicit GroupSpec(std::vector<u64> orders) {
        orders_.reserve(orders.size());
        order_ = 1;
        for (u64 n : orders) {
            if (n == 0) throw std::invalid_argument("group modulus must be >= 1");
            if (n == 1) continue;
            if (detail::mul_overflows(order_, n, kOrderCap))
                throw std::overflow_error("group order exceeds 2^63 - 1");
            order_ *= n;
            orders_.push_back(n);
        }
    }

    GroupSpec(std::initializer_list<u64> orders) : GroupSpec(std::vector<u64>(orders)) {}

    /// (Z/n)^count
    static GroupSpec power(u64 n, std::size_t count) {
        return GroupSpec(std::vector<u64>(count, n));
    }

    static GroupSpec product(const GroupSpec& a, const GroupSpec& b) {
        std::vector<u64> v = a.orders_;
        v.insert(v.end(), b.orders_.begin(), b.orders_.end());
        return GroupSpec(std::move(v));
    }

    const std::vector<u64>& moduli() const { return orders_; }
    std::size_t rank() const { return orders_.size(); }
    u64 order() const { return order_; }
    u64 modulus(std::size_t i) const { return orders_[i]; }
    bool trivial() const { return orders_.empty(); }

    bool operator==(const GroupSpec& o) const { return orders_ == o.orders_; }

    bool contains(const GroupElement& x) const {
        if (x.size() != orders_.size()) return false;
        for (std::size_t i = 0; i < orders_.size(); ++i)
            if (x[i] >= orders_[i]) return false;
        return true;
    }

    void check(const GroupElement& x) const {
        if (x.size() != orders_.size())
            throw std::invalid_argument("element shape does not match group " + to_string());
        for (std::size_t i = 0; i < orders_.size(); ++i)
            if (x[i] >= orders_[i])
                throw std::invalid_argument("element residue out of range for group " +
                                            to_string());
    }

    GroupElement zero() const { return GroupElement(std::vector<u64>(orders_.size(), 0)); }

    u64 index(const GroupElement& x) const {
        check(x);
        u64 idx = 0;
        for (std::size_t i = 0; i < orders_.size(); ++i) idx = idx * orders_[i] + x[i];
        return idx;
    }

    GroupElement element(u64 idx) const {
        if (idx >= order_) throw std::out_of_range("element index out of range");
        GroupElement x(std::vector<u64>(orders_.size(), 0));
        for (std::size_t i = orders_.size(); i-- > 0;) {
            x[i] = idx % orders_[i];
            idx /= orders_[i];
        }
        return x;
    }

    /// Splits an element of product(*this, other) into its two halves.
    std::pair<GroupElement, GroupElement> split(const GroupElement& x) const {
        GroupElement a, b;
        a.residues.assign(x.residues.begin(), x.residues.begin() + static_cast<long>(rank()));
        b.residues.assign(x.residues.begin() + static_cast<long>(rank()), x.residues.end());
        return {a, b};
    }

    std::string to_string() const {
        if (orders_.empty()) return "{0}";
        std::string s;
        for (std::size_t i = 0; i < orders_.size(); ++i) {
            if (i) s += "x";
            s += "Z/" + std::to_string(orders_[i]);
        }
        return s;
    }

private:
    std::vector<u64> orders_;
    u64 order_ = 1;
};

/// Canonical group from a list of positive moduli.
inline GroupSpec group_make(std::span<const u64> orders) {
    return GroupSpec(std::vector<u64>(orders.begin(), orders.end()));
}

inline GroupElement elem_add(const GroupSpec& g, const GroupElement& a, const GroupElement& b) {
    g.check(a);
    g.check(b);
    GroupElement out(std::vector<u64>(g.rank()));
    for (std::size_t i = 0; i < g.rank(); ++i) out[i] = detail::addmod(a[i], b[i], g.modulus(i));
    return out;
}

inline GroupElement elem_neg(const GroupSpec& g, const GroupElement& a) {
    g.check(a);
    GroupElement out(std::vector<u64>(g.rank()));
    for (std::size_t i = 0; i < g.rank(); ++i) out[i] = a[i] == 0 ? 0 : g.modulus(i) - a[i];
    return out;
}

inline GroupElement elem_sub(const GroupSpec& g, const GroupElement& a, const GroupElement& b) {
    return elem_add(g, a, elem_neg(g, b));
}

inline GroupElement elem_zero(const GroupSpec& g) { return g.zero(); }

/// m.x, the m-fold sum of x (0.x = 0).
inline GroupElement dilate(const GroupSpec& g, u64 m, const GroupElement& x) {
    g.check(x);
    GroupElement out(std::vector<u64>(g.rank()));
    for (std::size_t i = 0; i < g.rank(); ++i) out[i] = detail::mulmod(m % g.modulus(i), x[i], g.modulus(i));
    return out;
}

inline ElementSet dilate_set(const GroupSpec& g, u64 m, const ElementSet& s) {
    ElementSet out;
    for (const auto& x : s) out.insert(dilate(g, m, x));
    return out;
}

/// |m.G| = prod_i n_i / gcd(n_i, m), without enumerating the group.
inline u64 dilated_group_size(const GroupSpec& g, u64 m) {
    u64 size = 1;
    for (u64 n : g.moduli()) size *= n / std::gcd(n, m % n);
    return size;
}

inline u64 exponent(const GroupSpec& g) {
    u64 e = 1;
    for (u64 n : g.moduli()) e = std::lcm(e, n);
    return e;
}

/// Order of a single element: lcm_i n_i / gcd(n_i, x_i).
inline u64 element_order(const GroupSpec& g, const GroupElement& x) {
    g.check(x);
    u64 o = 1;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        u64 n = g.modulus(i);
        o = std::lcm(o, n / std::gcd(n, x[i]));
    }
    return o;
}

/// Invariant factors 1 < d_1 | d_2 | ... | d_r.
///
/// Each modulus is split into prime powers; for every prime the powers are
/// sorted in descending order and the j-th largest power goes into the j-th
/// factor counted from the end.
inline std::vector<u64> invariant_factors(const GroupSpec& g) {
    std::map<u64, std::vector<unsigned>> by_prime;
    for (u64 n : g.moduli())
        for (auto [p, e] : detail::factorize(n)) by_prime[p].push_back(e);
    std::size_t r = 0;
    for (auto& [p, es] : by_prime) {
        std::sort(es.begin(), es.end(), std::greater<>());
        r = std::max(r, es.size());
    }
    std::vector<u64> d(r, 1);
    for (const auto& [p, es] : by_prime)
        for (std::size_t j = 0; j < es.size(); ++j) d[r - 1 - j] *= detail::ipow(p, es[j]);
    return d;
}

/// Subgroup generated by f: closure of f and 0 under addition and negation.
inline ElementSet subgroup_generated(const GroupSpec& g, const ElementSet& f) {
    ElementSet seen{g.zero()};
    std::deque<GroupElement> queue{g.zero()};
    std::vector<GroupElement> gens;
    for (const auto& x : f) {
        g.check(x);
        gens.push_back(x);
        gens.push_back(elem_neg(g, x));
    }
    while (!queue.empty()) {
        GroupElement cur = std::move(queue.front());
        queue.pop_front();
        for (const auto& s : gens) {
            GroupElement nxt = elem_add(g, cur, s);
            if (seen.insert(nxt).second) queue.push_back(std::move(nxt));
        }
    }
    return seen;
}

/// All elements of g, in canonical index order.
inline std::vector<GroupElement> all_elements(const GroupSpec& g) {
    if (g.order() > (u64{1} << 26)) throw std::length_error("group too large to enumerate");
    std::vector<GroupElement> out;
    out.reserve(g.order());
    for (u64 i = 0; i < g.order(); ++i) out.push_back(g.element(i));
    return out;
}

/// A group homomorphism given by an integer matrix, rows indexed by codomain
/// factors and columns by domain factors.
class GroupHom {
public:
    GroupHom(GroupSpec domain, GroupSpec codomain, std::vector<std::vector<u64>> matrix)
        : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
        if (matrix_.size() != codomain_.rank())
            throw std::invalid_argument("hom matrix needs one row per codomain factor");
        for (std::size_t i = 0; i < matrix_.size(); ++i) {
            if (matrix_[i].size() != domain_.rank())
                throw std::invalid_argument("hom matrix needs one column per domain factor");
            const u64 mi = codomain_.modulus(i);
            for (std::size_t j = 0; j < domain_.rank(); ++j) {
                matrix_[i][j] %= mi;
                // the generator of Z/n_j has order n_j, so its image must too
                if (detail::mulmod(domain_.modulus(j) % mi, matrix_[i][j], mi) != 0)
                    throw std::invalid_argument("hom matrix entry (" + std::to_string(i) + "," +
                                                std::to_string(j) +
                                                ") is not compatible with factor orders");
            }
        }
    }

    static GroupHom identity(const GroupSpec& g) {
        std::vector<std::vector<u64>> m(g.rank(), std::vector<u64>(g.rank(), 0));
        for (std::size_t i = 0; i < g.rank(); ++i) m[i][i] = 1;
        return GroupHom(g, g, std::move(m));
    }

    const GroupSpec& domain() const { return domain_; }
    const GroupSpec& codomain() const { return codomain_; }
    const std::vector<std::vector<u64>>& matrix() const { return matrix_; }

    GroupElement apply(const GroupElement& x) const {
        domain_.check(x);
        GroupElement out(std::vector<u64>(codomain_.rank(), 0));
        for (std::size_t i = 0; i < codomain_.rank(); ++i) {
            const u64 mi = codomain_.modulus(i);
            u64 acc = 0;
            for (std::size_t j = 0; j < domain_.rank(); ++j)
                acc = detail::addmod(acc, detail::mulmod(matrix_[i][j], x[j] % mi, mi), mi);
            out[i] = acc;
        }
        return out;
    }

    /// Image of the canonical generators e_j.
    std::vector<GroupElement> generator_images() const {
        std::vector<GroupElement> out;
        for (std::size_t j = 0; j < domain_.rank(); ++j) {
            GroupElement col(std::vector<u64>(codomain_.rank()));
            for (std::size_t i = 0; i < codomain_.rank(); ++i) col[i] = matrix_[i][j];
            out.push_back(std::move(col));
        }
        return out;
    }

    bool surjective() const {
        const auto imgs = generator_images();
        return subgroup_generated(codomain_, ElementSet(imgs.begin(), imgs.end())).size() ==
               codomain_.order();
    }

    /// Dual map: the character b of the codomain pulls back to b o psi, the
    /// character of the domain with a_j = sum_i b_i * (n_j M_ij / m_i) mod n_j.
    GroupElement dual_apply(const GroupElement& b) const {
        codomain_.check(b);
        GroupElement a(std::vector<u64>(domain_.rank(), 0));
        for (std::size_t j = 0; j < domain_.rank(); ++j) {
            const u64 nj = domain_.modulus(j);
            u64 acc = 0;
            for (std::size_t i = 0; i < codomain_.rank(); ++i) {
                const u64 mi = codomain_.modulus(i);
                const auto scaled = static_cast<unsigned __int128>(nj) * matrix_[i][j] / mi;
                const u64 coef = static_cast<u64>(scaled % nj);
                acc = detail::addmod(acc, detail::mulmod(coef, b[i] % nj, nj), nj);
            }
            a[j] = acc;
        }
        return a;
    }

private:
    GroupSpec domain_;
    GroupSpec codomain_;
    std::vector<std::vector<u64>> matrix_;
};

inline GroupElement hom_apply(const GroupHom& h, const GroupElement& x) { return h.apply(x); }

struct Dilation {
    u64 m;
    u64 size_g;
    u64 size_h;
};

/// Finite analog of choosing m with m.G^ small and m.H^ nontrivial: among the
/// divisors m of exponent(G^ x H^) with m.H^ != {0}, the one minimising
/// |m.G^| (smallest m on ties).
inline Dilation best_dilation(const GroupSpec& g_dual, const GroupSpec& h_dual) {
    if (g_dual.trivial() || h_dual.trivial())
        throw std::invalid_argument("best_dilation needs nontrivial groups");
    const u64 e = std::lcm(exponent(g_dual), exponent(h_dual));
    std::vector<u64> divisors{1};
    for (auto [p, k] : detail::factorize(e)) {
        const std::size_t base = divisors.size();
        u64 pk = 1;
        for (unsigned i = 0; i < k; ++i) {
            pk *= p;
            for (std::size_t d = 0; d < base; ++d) divisors.push_back(divisors[d] * pk);
        }
    }
    std::sort(divisors.begin(), divisors.end());
    Dilation best{0, 0, 0};
    for (u64 m : divisors) {
        const u64 sh = dilated_group_size(h_dual, m);
        if (sh <= 1) continue;
        const u64 sg = dilated_group_size(g_dual, m);
        if (best.m == 0 || sg < best.size_g) best = {m, sg, sh};
    }
    return best;
}

}  // namespace charbound
