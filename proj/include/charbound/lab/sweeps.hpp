#pragma once

// The three desk-scale sweeps. Grid points run on a small thread pool; each
// draws randomness only from derive_seed(cfg.seed, stream), with streams
// fixed by grid position, so records do not depend on scheduling.

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "charbound/additive.hpp"
#include "charbound/algebra_hom.hpp"
#include "charbound/errors.hpp"
#include "charbound/group.hpp"
#include "charbound/lab/config.hpp"
#include "charbound/lab/policies.hpp"
#include "charbound/lab/report.hpp"
#include "charbound/operators.hpp"
#include "charbound/rng.hpp"

namespace charbound::lab {

/// Runs fn(i) for i in [0, count) on `threads` workers. The first exception
/// thrown by any task is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline std::string moduli_string(const std::vector<u64>& mods) {
    std::string s;
    for (std::size_t i = 0; i < mods.size(); ++i) s += (i ? "x" : "") + std::to_string(mods[i]);
    return s;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Random subset of g of the given size (0 = all of g), canonical order.
inline std::vector<GroupElement> random_domain(const GroupSpec& g, std::size_t size, Rng& rng) {
    if (size == 0 || size >= g.order()) return all_elements(g);
    std::map<u64, u64> swapped;
    std::vector<u64> picked;
    for (std::size_t i = 0; i < size; ++i) {
        const u64 j = i + rng.below(g.order() - i);
        const u64 vj = swapped.count(j) ? swapped[j] : j;
        const u64 vi = swapped.count(i) ? swapped[i] : i;
        swapped[j] = vi;
        picked.push_back(vj);
    }
    std::sort(picked.begin(), picked.end());
    std::vector<GroupElement> out;
    for (u64 i : picked) out.push_back(g.element(i));
    return out;
}

inline constexpr u64 kStreamStride = u64{1} << 32;

}  // namespace detail

// ---------------------------------------------------------------------------
// corollary1: G = (Z/2)^k, Lambda = G^, phi into Z/N.

struct Corollary1Record {
    unsigned k = 0;
    unsigned seed_index = 0;
    double p = 1.0;
    u64 N = 0;
    MapPolicy policy = MapPolicy::sidon_injection;
    u64 lambda_size = 0;
    double K = 0.0;
    u64 energy = 0;
    u64 sidon_energy = 0;
    bool sidon_verified = false;
    double theta = 0.0;
    double raw_bound = 0.0;
    double effective_bound = 0.0;
    double estimate = 0.0;
    u64 m = 0;
    u64 dilated_g = 0;
    u64 dilated_image = 0;
    double ratio = 0.0;
    double wall_time = 0.0;

    static std::vector<std::string> columns(bool timing) {
        std::vector<std::string> c{"k",          "seed_index", "p",     "N",           "policy",   "lambda_size",
                                   "K",          "energy",     "sidon_energy", "sidon_verified", "theta",
                                   "raw_bound",  "effective_bound", "estimate", "m", "dilated_g", "dilated_image",
                                   "ratio"};
        if (timing) c.push_back("wall_time");
        return c;
    }

    std::vector<std::string> cells(bool timing) const {
        std::vector<std::string> c{fmt_int(k),          fmt_int(seed_index),      fmt_real(p),
                                   fmt_int(N),          to_string(policy),        fmt_int(lambda_size),
                                   fmt_real(K),         fmt_int(energy),          fmt_int(sidon_energy),
                                   fmt_bool(sidon_verified), fmt_real(theta),     fmt_real(raw_bound),
                                   fmt_real(effective_bound), fmt_real(estimate), fmt_int(m),
                                   fmt_int(dilated_g),  fmt_int(dilated_image),   fmt_real(ratio)};
        if (timing) c.push_back(fmt_real(wall_time));
        return c;
    }
};

inline std::vector<Corollary1Record> run_corollary1(const SweepConfig& cfg) {
    validate(cfg);
    if (cfg.experiment != Experiment::corollary1) throw ConfigError("run_corollary1: wrong experiment");
    const unsigned nk = cfg.k_max - cfg.k_min + 1;
    const GroupSpec h({cfg.N});

    // Stage 1: one map per (k, seed index).
    const std::size_t nmaps = static_cast<std::size_t>(nk) * cfg.seeds;
    std::vector<BuiltMap> maps(nmaps);
    parallel_for(nmaps, cfg.threads, [&](std::size_t i) {
        const unsigned k = cfg.k_min + static_cast<unsigned>(i / cfg.seeds);
        const GroupSpec g = GroupSpec::power(2, k);
        Rng rng(derive_seed(cfg.seed, i));
        maps[i] = build_map(cfg.policy, g, all_elements(g), h, rng, cfg.sidon_iterations);
    });

    // Stage 2: certificate and estimate per (k, seed index, p).
    const std::size_t np = cfg.p.size();
    std::vector<Corollary1Record> out(nmaps * np);
    parallel_for(out.size(), cfg.threads, [&](std::size_t gi) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t mi = gi / np;
        const double p = cfg.p[gi % np];
        const unsigned k = cfg.k_min + static_cast<unsigned>(mi / cfg.seeds);
        const GroupSpec g = GroupSpec::power(2, k);
        const BuiltMap& bm = maps[mi];
        const CharOperator t(g, h, bm.phi);
        const NormCertificate cert = energy_certificate(t, p);
        if (std::abs(cert.K - 1.0) > 1e-9)
            throw SoundnessError("corollary1: projection onto the full dual has norm " + fmt_real(cert.K));

        Corollary1Record r;
        r.k = k;
        r.seed_index = static_cast<unsigned>(mi % cfg.seeds);
        r.p = p;
        r.N = cfg.N;
        r.policy = cfg.policy;
        r.lambda_size = cert.lambda_size;
        r.K = cert.K;
        r.energy = cert.energy;
        r.sidon_energy = sidon_energy(cert.lambda_size);
        r.sidon_verified = bm.sidon_verified;
        r.theta = cert.theta;
        r.raw_bound = cert.raw_bound;
        r.effective_bound = cert.effective_bound;
        r.estimate = estimate_norm_lp(t, p, {cfg.restarts, cfg.iterations},
                                      derive_seed(cfg.seed, detail::kStreamStride + gi));
        if (r.estimate < 1.0 - 1e-9) throw SoundnessError("corollary1: estimate below the character witness");
        r.m = cfg.m.front();
        r.dilated_g = dilated_group_size(g, r.m);
        r.dilated_image = dilate_set(h, r.m, bm.phi.image()).size();
        r.ratio = static_cast<double>(r.dilated_g) / static_cast<double>(r.dilated_image);
        r.wall_time = detail::seconds_since(t0);
        out[gi] = r;
    });
    return out;
}

// ---------------------------------------------------------------------------
// propk: random Lambda in g, phi into h, energy versus dilation sizes.

struct PropkRecord {
    std::size_t size = 0;  // requested |Lambda| (0 = whole dual)
    unsigned seed_index = 0;
    u64 m = 0;
    MapPolicy policy = MapPolicy::random_injection;
    std::string g, h;
    u64 gamma_size = 0;
    u64 energy = 0;
    bool sidon_verified = false;
    double epsilon = 0.0;
    u64 dilated_g = 0;
    u64 dilated_image = 0;
    double ratio = 0.0;
    std::optional<double> exponent;
    u64 l1 = 0, l2sq = 0, support = 0, x_size = 0, mx_size = 0, mg_size = 0;
    bool cauchy_schwarz = false, counting_bound = false, graph_counting_bound = false, plunnecke = false;
    double wall_time = 0.0;

    static std::vector<std::string> columns(bool timing) {
        std::vector<std::string> c{"size",      "seed_index", "m",         "policy",     "g",        "h",
                                   "gamma_size", "energy",    "sidon_verified", "epsilon", "dilated_g",
                                   "dilated_image", "ratio",  "exponent",  "l1",         "l2sq",     "support",
                                   "x_size",    "mx_size",    "mg_size",   "cauchy_schwarz", "counting_bound",
                                   "graph_counting_bound", "plunnecke"};
        if (timing) c.push_back("wall_time");
        return c;
    }

    std::vector<std::string> cells(bool timing) const {
        std::vector<std::string> c{fmt_int(size),         fmt_int(seed_index),   fmt_int(m),
                                   to_string(policy),     g,                     h,
                                   fmt_int(gamma_size),   fmt_int(energy),       fmt_bool(sidon_verified),
                                   fmt_real(epsilon),     fmt_int(dilated_g),    fmt_int(dilated_image),
                                   fmt_real(ratio),       fmt_real(exponent),    fmt_int(l1),
                                   fmt_int(l2sq),         fmt_int(support),      fmt_int(x_size),
                                   fmt_int(mx_size),      fmt_int(mg_size),      fmt_bool(cauchy_schwarz),
                                   fmt_bool(counting_bound), fmt_bool(graph_counting_bound), fmt_bool(plunnecke)};
        if (timing) c.push_back(fmt_real(wall_time));
        return c;
    }
};

inline std::vector<PropkRecord> run_propk(const SweepConfig& cfg) {
    validate(cfg);
    if (cfg.experiment != Experiment::propk) throw ConfigError("run_propk: wrong experiment");
    const GroupSpec g(cfg.g);
    const GroupSpec h(cfg.h);
    const std::size_t nmaps = cfg.sizes.size() * cfg.seeds;
    std::vector<BuiltMap> maps(nmaps);
    parallel_for(nmaps, cfg.threads, [&](std::size_t i) {
        Rng rng(derive_seed(cfg.seed, i));
        const auto domain = detail::random_domain(g, cfg.sizes[i / cfg.seeds], rng);
        maps[i] = build_map(cfg.policy, g, domain, h, rng, cfg.sidon_iterations);
    });

    const std::size_t nm = cfg.m.size();
    std::vector<PropkRecord> out(nmaps * nm);
    parallel_for(out.size(), cfg.threads, [&](std::size_t gi) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t mi = gi / nm;
        const BuiltMap& bm = maps[mi];
        const PropkReport rep = propk_report(bm.phi, cfg.m[gi % nm]);
        PropkRecord r;
        r.size = cfg.sizes[mi / cfg.seeds];
        r.seed_index = static_cast<unsigned>(mi % cfg.seeds);
        r.m = rep.m;
        r.policy = cfg.policy;
        r.g = moduli_string(cfg.g);
        r.h = moduli_string(cfg.h);
        r.gamma_size = rep.gamma_size;
        r.energy = rep.energy;
        r.sidon_verified = bm.sidon_verified;
        r.epsilon = rep.epsilon;
        r.dilated_g = rep.dilated_g;
        r.dilated_image = rep.dilated_image;
        r.ratio = rep.ratio;
        r.exponent = rep.empirical_exponent();
        r.l1 = rep.conv.l1;
        r.l2sq = rep.conv.l2sq;
        r.support = rep.conv.support;
        r.x_size = rep.conv.x_size;
        r.mx_size = rep.conv.mx_size;
        r.mg_size = rep.conv.mg_size;
        r.cauchy_schwarz = rep.conv.cauchy_schwarz_holds();
        r.counting_bound = rep.conv.counting_bound_holds();
        r.graph_counting_bound = rep.graph_counting_bound;
        r.plunnecke = rep.plunnecke_containment;
        if (!(r.cauchy_schwarz && r.counting_bound && r.graph_counting_bound && r.plunnecke))
            throw SoundnessError("propk: an exact inequality failed at grid point " + std::to_string(gi));
        r.wall_time = detail::seconds_since(t0);
        out[gi] = r;
    });
    return out;
}

// ---------------------------------------------------------------------------
// homgrowth: injective algebra homs L_1(H^n) -> L_1(G).

struct HomgrowthRecord {
    unsigned n = 0;
    unsigned seed_index = 0;
    MapPolicy policy = MapPolicy::random_injection;
    std::string g, h;
    u64 surplus = 0;
    u64 dom_order = 0;  // |H^n|
    std::string status;  // "ok" or "no_injection"
    u64 s_size = 0;
    bool injective = false;
    u64 energy = 0;
    double anorm = 0.0;
    double norm_exact = 0.0;
    double norm_lower_bound = 0.0;
    bool identities = false;
    u64 best_m = 0;
    u64 dilated_g = 0;
    u64 dilated_h = 0;
    u64 n_gh = 0;  // ceil(2 log2 |m.G^|)
    double wall_time = 0.0;

    bool ok() const { return status == "ok"; }

    static std::vector<std::string> columns(bool timing) {
        std::vector<std::string> c{"n",          "seed_index", "policy",   "g",          "h",
                                   "surplus",    "dom_order",  "status",   "s_size",     "injective",
                                   "energy",     "anorm",      "norm_exact", "norm_lower_bound", "spectral_cap",
                                   "identities", "best_m",     "dilated_g", "dilated_h", "n_gh"};
        if (timing) c.push_back("wall_time");
        return c;
    }

    std::vector<std::string> cells(bool timing) const {
        std::vector<std::string> c{fmt_int(n), fmt_int(seed_index), to_string(policy), g, h, fmt_int(surplus),
                                   fmt_int(dom_order), status};
        if (ok()) {
            for (auto& s : {fmt_int(s_size), fmt_bool(injective), fmt_int(energy), fmt_real(anorm),
                            fmt_real(norm_exact), fmt_real(norm_lower_bound), fmt_int(dom_order),
                            fmt_bool(identities)})
                c.push_back(s);
        } else {
            c.insert(c.end(), 8, "");
        }
        for (auto& s : {fmt_int(best_m), fmt_int(dilated_g), fmt_int(dilated_h), fmt_int(n_gh)}) c.push_back(s);
        if (timing) c.push_back(fmt_real(wall_time));
        return c;
    }
};

inline std::vector<HomgrowthRecord> run_homgrowth(const SweepConfig& cfg) {
    validate(cfg);
    if (cfg.experiment != Experiment::homgrowth) throw ConfigError("run_homgrowth: wrong experiment");
    const GroupSpec g(cfg.g);
    const GroupSpec h(cfg.h);
    const Dilation dil = best_dilation(g, h);
    const u64 n_gh = static_cast<u64>(std::ceil(2.0 * std::log2(static_cast<double>(dil.size_g)) - 1e-12));

    const unsigned nn = cfg.n_max - cfg.n_min + 1;
    std::vector<HomgrowthRecord> out(static_cast<std::size_t>(nn) * cfg.seeds);
    parallel_for(out.size(), cfg.threads, [&](std::size_t gi) {
        const auto t0 = std::chrono::steady_clock::now();
        HomgrowthRecord r;
        r.n = cfg.n_min + static_cast<unsigned>(gi / cfg.seeds);
        r.seed_index = static_cast<unsigned>(gi % cfg.seeds);
        r.policy = cfg.policy;
        r.g = moduli_string(cfg.g);
        r.h = moduli_string(cfg.h);
        r.surplus = cfg.surplus;
        std::vector<u64> dmods;
        for (unsigned i = 0; i < r.n; ++i) dmods.insert(dmods.end(), cfg.h.begin(), cfg.h.end());
        const GroupSpec d(dmods);
        r.dom_order = d.order();
        r.best_m = dil.m;
        r.dilated_g = dil.size_g;
        r.dilated_h = dil.size_h;
        r.n_gh = n_gh;
        if (d.order() + cfg.surplus > g.order()) {
            r.status = "no_injection";
            r.wall_time = detail::seconds_since(t0);
            out[gi] = r;
            return;
        }
        r.status = "ok";
        Rng rng(derive_seed(cfg.seed, gi));
        const BuiltMap bm = build_map(cfg.policy, d, all_elements(d), g, rng, cfg.sidon_iterations);
        if (!bm.phi.injective()) throw SoundnessError("homgrowth: map policy produced a non-injective map");

        std::vector<MapGraph::Pair> alpha;
        for (const auto& [lam, gamma] : bm.phi.pairs()) alpha.emplace_back(gamma, lam);
        if (cfg.surplus > 0) {
            // Extra characters of G^ outside the image, each sent to a random point of D^.
            const ElementSet image = bm.phi.image();
            std::vector<u64> free;
            for (u64 i = 0; i < g.order(); ++i)
                if (!image.count(g.element(i))) free.push_back(i);
            rng.shuffle(free);
            for (u64 i = 0; i < cfg.surplus; ++i) alpha.emplace_back(g.element(free[i]), d.element(rng.below(d.order())));
        }
        const AlgebraHom t(d, g, MapGraph(g, d, std::move(alpha)));
        const HomEnergyBound eb = hom_energy_bound(t);
        r.s_size = t.s().size();
        r.injective = t.injective();
        r.energy = eb.energy;
        r.anorm = eb.anorm;
        r.norm_exact = hom_norm_exact(t);
        r.norm_lower_bound = eb.norm_lower_bound;
        r.identities = eb.identities_hold;

        const double tol = 1e-9 * std::max(1.0, r.norm_exact);
        if (!r.identities) throw SoundnessError("homgrowth: phi norm identities failed");
        if (r.norm_lower_bound > r.norm_exact + tol)
            throw SoundnessError("homgrowth: energy lower bound exceeds the exact norm");
        if (r.anorm > r.norm_exact + tol) throw SoundnessError("homgrowth: A-norm exceeds the exact norm");
        if (cfg.surplus == 0 && r.norm_exact > static_cast<double>(r.dom_order) * (1.0 + 1e-9))
            throw SoundnessError("homgrowth: spectral injection exceeds |H|^n");
        r.wall_time = detail::seconds_since(t0);
        out[gi] = r;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Summaries over sweep output.

/// log2 raw_bound against k at the given p (first seed index only).
inline Fit corollary1_fit(const std::vector<Corollary1Record>& recs, double p) {
    std::vector<double> x, y;
    for (const auto& r : recs)
        if (r.seed_index == 0 && r.p == p) {
            x.push_back(r.k);
            y.push_back(r.raw_bound);
        }
    return fit_exponent(x, y);
}

/// Minimum of norm_exact over seeds for each n with at least one "ok" record.
inline std::vector<std::pair<unsigned, double>> homgrowth_min_norms(const std::vector<HomgrowthRecord>& recs) {
    std::map<unsigned, double> best;
    for (const auto& r : recs) {
        if (!r.ok()) continue;
        auto it = best.find(r.n);
        if (it == best.end()) best.emplace(r.n, r.norm_exact);
        else it->second = std::min(it->second, r.norm_exact);
    }
    return {best.begin(), best.end()};
}

inline Fit homgrowth_fit(const std::vector<HomgrowthRecord>& recs) {
    std::vector<double> x, y;
    for (const auto& [n, v] : homgrowth_min_norms(recs)) {
        x.push_back(n);
        y.push_back(v);
    }
    return fit_exponent(x, y);
}

}  // namespace charbound::lab
