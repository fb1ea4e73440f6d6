#pragma once

// Algebra homomorphisms T: L_1(D) -> L_1(G) for finite D (typically H^n), in
// the spectral form T(f)^(gamma) = f^(alpha(gamma)) for gamma in S and 0
// off S. Finite groups make ||T||_{1->1} exactly computable.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "charbound/additive.hpp"
#include "charbound/group.hpp"
#include "charbound/harmonic.hpp"

namespace charbound {

class AlgebraHom {
public:
    /// alpha is a graph from the codomain's dual G^ to the domain's dual D^.
    AlgebraHom(GroupSpec dom, GroupSpec cod, MapGraph alpha)
        : dom_(std::move(dom)), cod_(std::move(cod)), alpha_(std::move(alpha)) {
        if (!(alpha_.g_dual() == cod_) || !(alpha_.h_dual() == dom_))
            throw std::invalid_argument("alpha must map the codomain dual to the domain dual");
        s_ = CharSet(cod_, alpha_.domain());
        injective_ = alpha_.image().size() == dom_.order();
    }

    const GroupSpec& dom() const { return dom_; }
    const GroupSpec& cod() const { return cod_; }
    const CharSet& s() const { return s_; }
    const MapGraph& alpha() const { return alpha_; }
    /// T is injective iff alpha is onto D^.
    bool injective() const { return injective_; }

    GroupFunction apply(const GroupFunction& f) const {
        if (!(f.group() == dom_)) throw std::invalid_argument("AlgebraHom::apply: wrong domain");
        const Spectrum fhat = dft(f);
        Spectrum out(cod_);
        for (const auto& [gamma, lam] : alpha_.pairs()) out[cod_.index(gamma)] = fhat.at(lam);
        return idft(out);
    }

    /// T(|D| delta_y) = sum_{gamma in S} conj(alpha(gamma)(y)) gamma.
    GroupFunction apply_point_mass(const GroupElement& y) const {
        Spectrum out(cod_);
        for (const auto& [gamma, lam] : alpha_.pairs())
            out[cod_.index(gamma)] = std::conj(char_eval(dom_, lam, y));
        return idft(out);
    }

private:
    GroupSpec dom_;
    GroupSpec cod_;
    MapGraph alpha_;
    CharSet s_;
    bool injective_ = false;
};

inline AlgebraHom hom_make(const GroupSpec& dom, const GroupSpec& cod, const CharSet& s, MapGraph alpha) {
    if (!(s.dual() == cod)) throw std::invalid_argument("hom_make: S must lie in the codomain dual");
    if (alpha.domain() != s.members()) throw std::invalid_argument("hom_make: alpha must be defined exactly on S");
    return AlgebraHom(dom, cod, std::move(alpha));
}

/// f -> f o psi for a surjection psi: G -> D. In spectral form S is the set of
/// pulled-back characters lambda o psi and alpha(lambda o psi) = lambda.
inline AlgebraHom hom_pullback(const GroupHom& psi, bool check = true) {
    if (check && !psi.surjective()) throw std::invalid_argument("hom_pullback: psi is not surjective");
    std::vector<MapGraph::Pair> pairs;
    for (const auto& lam : all_elements(psi.codomain())) pairs.emplace_back(psi.dual_apply(lam), lam);
    return AlgebraHom(psi.codomain(), psi.domain(),
                      MapGraph(psi.domain(), psi.codomain(), std::move(pairs)));
}

/// f -> sum_{lambda in D^} f^(lambda) phi(lambda) for an injection phi: D^ -> G^.
inline AlgebraHom hom_spectral(const MapGraph& phi_inj) {
    if (!phi_inj.injective()) throw std::invalid_argument("hom_spectral: phi is not injective");
    return AlgebraHom(phi_inj.g_dual(), phi_inj.h_dual(), phi_inj.inverse());
}

namespace detail {

/// Visits the L_1(G) slices T(|D| delta_y) for every y in D.
template <typename Visitor>
void for_each_point_mass_image(const AlgebraHom& t, Visitor&& visit) {
    const GroupSpec& dom = t.dom();
    const GroupSpec& cod = t.cod();
    const auto& pairs = t.alpha().pairs();
    std::vector<u64> idx;
    for (const auto& pr : pairs) idx.push_back(cod.index(pr.first));
    std::vector<cd> buf;
    for (u64 yi = 0; yi < dom.order(); ++yi) {
        const GroupElement y = dom.element(yi);
        buf.assign(cod.order(), 0.0);
        for (std::size_t i = 0; i < pairs.size(); ++i) buf[idx[i]] = std::conj(char_eval(dom, pairs[i].second, y));
        tensor_transform(buf, cod, +1);
        visit(static_cast<const std::vector<cd>&>(buf));
    }
}

}  // namespace detail

/// ||T||_{1->1} = max_y ||T(|D| delta_y)||_{L_1(G)}: the extreme points of
/// the L_1 ball are unimodular multiples of normalised point masses.
inline double hom_norm_exact(const AlgebraHom& t) {
    if (t.s().empty()) return 0.0;
    double best = 0.0;
    detail::for_each_point_mass_image(t, [&](const std::vector<cd>& v) {
        double acc = 0.0;
        for (const auto& x : v) acc += std::abs(x);
        best = std::max(best, acc / static_cast<double>(v.size()));
    });
    return best;
}

struct HomEnergyBound {
    u64 energy = 0;           // E(Gamma)
    double anorm = 0.0;       // ||1_Gamma||_A
    u64 gamma_size = 0;       // |Gamma|
    double norm_lower_bound = 0.0;  // |Gamma|^{3/2} / E^{1/2}
    double phi_l4_4 = 0.0;    // ||phi||_4^4 on G x D
    double phi_l2_2 = 0.0;    // ||phi||_2^2
    double phi_l1 = 0.0;      // ||phi||_1
    bool anorm_from_product = false;  // anorm computed on the full product group
    bool identities_hold = false;
};

inline constexpr u64 kProductTransformCap = u64{1} << 22;

/// E(Gamma) >= ||phi||_2^6 / ||phi||_1^2 = |Gamma|^3 / ||1_Gamma||_A^2 and
/// ||1_Gamma||_A <= ||T|| give ||T|| >= |Gamma|^{3/2} / E(Gamma)^{1/2}.
///
/// phi(x, y) = sum_{(gamma, lambda) in Gamma} gamma(-x) lambda(-y) is sampled
/// slice by slice over y; its norms are checked against E(Gamma) (integer
/// count), |Gamma| and the A-norm from a full product transform.
inline HomEnergyBound hom_energy_bound(const AlgebraHom& t) {
    if (t.alpha().empty()) throw std::invalid_argument("hom_energy_bound: empty S");
    HomEnergyBound b;
    b.gamma_size = t.alpha().size();
    b.energy = graph_energy(t.alpha());

    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    detail::for_each_point_mass_image(t, [&](const std::vector<cd>& v) {
        for (const auto& x : v) {
            const double a2 = std::norm(x);
            s1 += std::sqrt(a2);
            s2 += a2;
            s4 += a2 * a2;
        }
    });
    const double total = static_cast<double>(t.dom().order()) * static_cast<double>(t.cod().order());
    b.phi_l1 = s1 / total;
    b.phi_l2_2 = s2 / total;
    b.phi_l4_4 = s4 / total;

    const GroupSpec& prod = t.alpha().prod_dual();
    if (prod.order() <= kProductTransformCap) {
        b.anorm = algebra_norm_indicator(prod, t.alpha().as_set());
        b.anorm_from_product = true;
    } else {
        b.anorm = b.phi_l1;
    }

    const double e = static_cast<double>(b.energy);
    const double n = static_cast<double>(b.gamma_size);
    auto close = [](double a, double c) { return std::abs(a - c) <= 1e-9 * std::max(1.0, std::abs(c)); };
    b.identities_hold = close(b.phi_l4_4, e) && close(b.phi_l2_2, n) && close(b.phi_l1, b.anorm);
    b.norm_lower_bound = std::pow(n, 1.5) / std::sqrt(e);
    return b;
}

}  // namespace charbound
