// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance           run every criterion
//   acceptance 3 6       run criteria 3 and 6 only
//
// Exit status is 0 only when every selected criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>

#include "oracles.hpp"

using namespace charbound;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Collects failures with a short first-failure message.
class Check {
public:
    void require(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (first_.empty()) first_ = what;
    }
    Outcome outcome(const std::string& summary) const {
        if (failures_ == 0) return {true, summary};
        return {false, summary + "; " + std::to_string(failures_) + " failure(s), first: " + first_};
    }

private:
    int failures_ = 0;
    std::string first_;
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

GroupFunction random_function(Rng& rng, const GroupSpec& g) {
    GroupFunction f(g);
    for (auto& v : f.values()) v = cd(rng.normal(), rng.normal());
    return f;
}

GroupSpec random_shape(Rng& rng, int which) {
    switch (which % 3) {
        case 0: return GroupSpec{2 + rng.below(400)};
        case 1: return GroupSpec::power(2, 2 + rng.below(8));
        default: return oracle::random_group(rng, 3000, 12);
    }
}

lab::SweepConfig config_from(const std::string& text) {
    lab::SweepConfig c = lab::apply_key_values(lab::SweepConfig{}, lab::parse_key_values(text));
    lab::validate(c);
    return c;
}

// 1 -------------------------------------------------------------------------
Outcome transforms() {
    Check ck;
    Rng rng(101);
    const std::vector<GroupSpec> shapes{GroupSpec{4096},         GroupSpec::power(2, 12), GroupSpec{64, 64},
                                        GroupSpec{3, 5, 7},      GroupSpec{6, 4},         GroupSpec{1009},
                                        GroupSpec{2, 3, 4, 5, 6}, GroupSpec{17, 17},      GroupSpec{8, 8, 8},
                                        GroupSpec{127, 2}};
    double worst_inv = 0.0, worst_parseval = 0.0, worst_walsh = 0.0;
    for (const auto& g : shapes)
        for (int t = 0; t < 100; ++t) {
            const GroupFunction f = random_function(rng, g);
            const Spectrum s = dft(f);
            const GroupFunction back = idft(s);
            double e = 0.0;
            for (u64 i = 0; i < g.order(); ++i) e = std::max(e, std::abs(back[i] - f[i]));
            worst_inv = std::max(worst_inv, e);
            ck.require(e <= 1e-12, "inverse on " + g.to_string() + " off by " + num(e));
            double energy = 0.0;
            for (const auto& c : s.coeffs()) energy += std::norm(c);
            const double l2 = lp_norm(f, 2.0);
            const double rel = std::abs(energy - l2 * l2) / (l2 * l2);
            worst_parseval = std::max(worst_parseval, rel);
            ck.require(rel <= 1e-12, "Parseval on " + g.to_string() + " off by " + num(rel));
        }
    // Every Abelian 2-group of order <= 256, one per partition of k <= 8;
    // the elementary ones take the Walsh path.
    std::vector<GroupSpec> two_groups;
    std::vector<u64> parts;
    auto partitions = [&](auto&& self, unsigned left, unsigned max_part) -> void {
        if (left == 0) {
            two_groups.emplace_back(parts);
            return;
        }
        for (unsigned e = std::min(left, max_part); e >= 1; --e) {
            parts.push_back(u64{1} << e);
            self(self, left - e, e);
            parts.pop_back();
        }
    };
    for (unsigned k = 1; k <= 8; ++k) partitions(partitions, k, k);
    for (const auto& g : two_groups) {
        for (int t = 0; t < 3; ++t) {
            const GroupFunction f = random_function(rng, g);
            const auto fast = dft(f).coeffs();
            const auto slow = oracle::naive_dft(g, f.values());
            double e = 0.0;
            for (u64 i = 0; i < g.order(); ++i) e = std::max(e, std::abs(fast[i] - slow[i]));
            worst_walsh = std::max(worst_walsh, e);
            ck.require(e <= 1e-12, "2-group " + g.to_string() + " off by " + num(e));
        }
    }
    return ck.outcome("max inverse error " + num(worst_inv) + ", max Parseval rel error " + num(worst_parseval) +
                      ", max fast-vs-naive error on " + std::to_string(two_groups.size()) +
                      " 2-groups " + num(worst_walsh));
}

// 2 -------------------------------------------------------------------------
Outcome energy_oracle() {
    Check ck;
    Rng rng(202);
    for (int t = 0; t < 200; ++t) {
        const GroupSpec g = random_shape(rng, t);
        const auto s = oracle::random_subset(rng, g, 1 + rng.below(30));
        const u64 fast = energy(g, s), slow = oracle::naive_energy(g, s);
        ck.require(fast == slow, g.to_string() + ": " + std::to_string(fast) + " vs " + std::to_string(slow));
    }
    return ck.outcome("200 sets, exact integer equality");
}

// 3 -------------------------------------------------------------------------
Outcome dilation_steps() {
    Check ck;
    Rng rng(303);
    for (int t = 0; t < 500; ++t) {
        const GroupSpec g = random_shape(rng, t);
        const auto x = oracle::random_subset(rng, g, 1 + rng.below(20));
        const u64 m = 1 + rng.below(6);
        const ConvStats s = conv_stats(g, x, m);
        ck.require(s.cauchy_schwarz_holds(), "Cauchy-Schwarz on " + g.to_string());
        ck.require(s.counting_bound_holds(), "counting bound on " + g.to_string());
        const u64 lhs = sumset(g, x, dilate_set(g, m, x)).size();
        const u64 rhs = iterated_sumset(g, m + 1, x).size();
        ck.require(lhs <= rhs, "containment on " + g.to_string());
        ck.require(lhs == s.support, "support mismatch on " + g.to_string());
    }
    return ck.outcome("500 (X, m) instances, integer comparisons");
}

// 4 -------------------------------------------------------------------------
Outcome chain() {
    Check ck;
    Rng rng(404);
    const double ps[] = {1.0, 1.25, 1.5, 1.75};
    double worst_rel = 0.0;
    for (int t = 0; t < 200; ++t) {
        const GroupSpec g = oracle::random_group(rng, 64);
        const GroupSpec h = oracle::random_group(rng, 64);
        const CharOperator op(g, h, oracle::random_graph(rng, g, h, 1 + rng.below(g.order())));
        const double p = ps[t % 4];
        const ChainReport r = verify_prop_main_chain(op, p);
        for (const auto& l : r.links)
            ck.require(l.pass, l.name + " on " + g.to_string() + " -> " + h.to_string() + " p=" + num(p));
        for (const char* name : {"iii_l2_identity", "v_l4_identity"}) {
            const auto& l = r.link(name);
            const double rel = std::abs(l.lhs - l.rhs) / std::max(1e-300, std::abs(l.rhs));
            worst_rel = std::max(worst_rel, rel);
            ck.require(rel <= 1e-9, std::string(name) + " relative gap " + num(rel));
        }
    }
    return ck.outcome("200 operators, max relative gap in the two identities " + num(worst_rel));
}

// 5 -------------------------------------------------------------------------
Outcome certificate_soundness() {
    Check ck;
    Rng rng(505);
    double worst_margin = -1e300, largest_bound = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        const GroupSpec g = oracle::random_group(rng, 16, 16);
        const GroupSpec h = oracle::random_group(rng, 16, 16);
        const std::size_t size = 1 + rng.below(std::min<u64>(4, g.order()));
        const CharOperator op(g, h, oracle::random_graph(rng, g, h, size));
        for (double p : {1.0, 1.5}) {
            const NormCertificate c = energy_certificate(op, p);
            const double grid = oracle::GridNorm(op, p).maximise();
            worst_margin = std::max(worst_margin, c.effective_bound - grid);
            largest_bound = std::max(largest_bound, c.effective_bound);
            ck.require(c.effective_bound <= grid + 1e-3, g.to_string() + " -> " + h.to_string() + " p=" + num(p) +
                                                             ": bound " + num(c.effective_bound) + " grid " +
                                                             num(grid));
        }
    }
    return ck.outcome("50 instances at p = 1 and 1.5, max (bound - grid) " + num(worst_margin) +
                      ", largest bound " + num(largest_bound));
}

// 6 -------------------------------------------------------------------------
Outcome corollary_growth() {
    Check ck;
    const lab::SweepConfig cfg = config_from(
        "experiment = corollary1\nk_min = 2\nk_max = 8\nN = 1009\np = 1\npolicy = sidon_injection\n"
        "seed = 7\nrestarts = 4\niterations = 30\nthreads = 4");
    const auto recs = lab::run_corollary1(cfg);
    std::string unmatched;
    for (const auto& r : recs) {
        const double n = std::pow(2.0, r.k);
        const double closed = std::sqrt(n * n * n / (2 * n * n - n));
        const double rel = std::abs(r.raw_bound - closed) / closed;
        if (rel > 1e-9) unmatched += " k=" + std::to_string(r.k) + " (E=" + std::to_string(r.energy) + " vs " +
                                     std::to_string(r.sidon_energy) + ")";
        ck.require(rel <= 1e-9, "k=" + std::to_string(r.k) + " raw bound " + num(r.raw_bound) + " vs closed form " +
                                    num(closed) + ", energy " + std::to_string(r.energy) + " vs " +
                                    std::to_string(r.sidon_energy));
    }
    // Rebuild the k <= 5 maps from the sweep's seed streams and count quadruples by hand.
    const GroupSpec h{cfg.N};
    for (unsigned k = cfg.k_min; k <= 5; ++k) {
        const std::size_t i = k - cfg.k_min;
        const GroupSpec g = GroupSpec::power(2, k);
        Rng rng(derive_seed(cfg.seed, i));
        const auto built = lab::build_map(cfg.policy, g, all_elements(g), h, rng, cfg.sidon_iterations);
        const u64 brute = oracle::quartic_energy(built.phi.prod_dual(), built.phi.as_set());
        const u64 n = u64{1} << k;
        ck.require(brute == 2 * n * n - n, "k=" + std::to_string(k) + " brute-force energy " + std::to_string(brute));
        ck.require(brute == recs[i].energy, "k=" + std::to_string(k) + " sweep energy differs from brute force");
    }
    const lab::Fit fit = lab::corollary1_fit(recs, 1.0);
    ck.require(fit.slope >= 0.3 && fit.slope <= 0.7, "slope " + num(fit.slope));
    ck.require(fit.r2 >= 0.99, "r2 " + num(fit.r2));
    return ck.outcome("slope " + num(fit.slope) + ", r2 " + num(fit.r2) +
                      (unmatched.empty() ? std::string(", all k match the closed form")
                                         : ", closed form missed at" + unmatched));
}

// 7 -------------------------------------------------------------------------
Outcome hom_identities() {
    Check ck;
    Rng rng(707);
    double worst_id = 0.0, worst_mult = 0.0;
    for (int t = 0; t < 100; ++t) {
        const GroupSpec d = oracle::random_group(rng, 12, 6);
        const GroupSpec g = oracle::random_group(rng, 36, 8);
        std::vector<MapGraph::Pair> pairs;
        for (const auto& gamma : oracle::random_subset(rng, g, 1 + rng.below(std::min<u64>(g.order(), 10))))
            pairs.emplace_back(gamma, oracle::random_element(rng, d));
        const AlgebraHom hom(d, g, MapGraph(g, d, pairs));
        const HomEnergyBound b = hom_energy_bound(hom);
        const GroupSpec& prod = hom.alpha().prod_dual();
        const ElementSet gamma = hom.alpha().as_set();
        const double e4 = oracle::direct_phi_norm(prod, gamma, 4.0);
        const double e2 = oracle::direct_phi_norm(prod, gamma, 2.0);
        const double e1 = oracle::direct_phi_norm(prod, gamma, 1.0);
        const double gaps[] = {std::abs(e4 - static_cast<double>(b.energy)) / static_cast<double>(b.energy),
                               std::abs(e2 - static_cast<double>(b.gamma_size)) / static_cast<double>(b.gamma_size),
                               std::abs(e1 - b.anorm) / std::max(1.0, b.anorm)};
        for (double gap : gaps) {
            worst_id = std::max(worst_id, gap);
            ck.require(gap <= 1e-9, "identity gap " + num(gap));
        }
        ck.require(b.identities_hold, "library identity flag");
        const double exact = hom_norm_exact(hom);
        ck.require(b.norm_lower_bound <= exact + 1e-9 * std::max(1.0, exact),
                   "lower bound " + num(b.norm_lower_bound) + " above exact " + num(exact));

        const GroupFunction f = random_function(rng, d), k = random_function(rng, d);
        const GroupFunction lhs = hom.apply(convolve(f, k));
        const GroupFunction rhs = convolve(hom.apply(f), hom.apply(k));
        for (u64 i = 0; i < g.order(); ++i) worst_mult = std::max(worst_mult, std::abs(lhs[i] - rhs[i]));
    }
    ck.require(worst_mult <= 1e-12, "multiplicativity gap " + num(worst_mult));
    return ck.outcome("100 homs, max identity gap " + num(worst_id) + ", max multiplicativity gap " +
                      num(worst_mult));
}

// 8 -------------------------------------------------------------------------
Outcome hom_growth() {
    Check ck;
    const lab::SweepConfig cfg = config_from(
        "experiment = homgrowth\ng = 2^12\nh = 3\nn_min = 1\nn_max = 5\npolicy = random_injection\nseeds = 20\n"
        "seed = 3\nthreads = 4");
    const auto recs = lab::run_homgrowth(cfg);
    for (const auto& r : recs) {
        ck.require(r.ok(), "n=" + std::to_string(r.n) + " status " + r.status);
        ck.require(r.norm_exact <= std::pow(3.0, r.n) * (1 + 1e-12),
                   "n=" + std::to_string(r.n) + " norm " + num(r.norm_exact) + " above 3^n");
    }
    const auto mins = lab::homgrowth_min_norms(recs);
    std::string series;
    for (std::size_t i = 0; i < mins.size(); ++i) {
        series += (i ? " " : "") + num(mins[i].second);
        if (i > 0) ck.require(mins[i].second >= mins[i - 1].second, "minimum decreases at n=" + std::to_string(mins[i].first));
    }
    ck.require(mins.size() == 5, "expected five values of n");
    const lab::Fit fit = lab::homgrowth_fit(recs);
    ck.require(fit.slope >= 0.2, "slope " + num(fit.slope));
    ck.require(fit.r2 >= 0.9, "r2 " + num(fit.r2));
    return ck.outcome("min norms [" + series + "], slope " + num(fit.slope) + ", r2 " + num(fit.r2));
}

// 9 -------------------------------------------------------------------------
Outcome sampling() {
    Check ck;
    for (unsigned L = 1; L <= 6; ++L) {
        const GroupSpec g = GroupSpec::power(2, L);
        for (u64 mask = 0; mask < (u64{1} << L); ++mask) {
            std::set<unsigned> J;
            GroupElement a(std::vector<u64>(L, 0));
            for (unsigned j = 0; j < L; ++j)
                if (mask >> j & 1) {
                    J.insert(j);
                    a[j] = 1;
                }
            const GroupFunction w = sample_walsh(L, J);
            for (u64 t = 0; t < g.order(); ++t) {
                const double expect = oracle::character_value(g, a, g.element(t)).real() > 0 ? 1.0 : -1.0;
                ck.require(w[t] == cd(expect, 0.0), "Walsh L=" + std::to_string(L) + " t=" + std::to_string(t));
            }
        }
    }
    double worst = 0.0;
    for (u64 N = 1; N <= 64; ++N) {
        const GroupSpec g{N};
        for (long long z = -static_cast<long long>(N) + 1; z < static_cast<long long>(N); ++z) {
            const GroupFunction f = sample_trig(N, z);
            const u64 zr = static_cast<u64>((z % static_cast<long long>(N) + static_cast<long long>(N)) %
                                            static_cast<long long>(N));
            for (u64 t = 0; t < N; ++t)
                worst = std::max(worst, std::abs(f[t] - oracle::character_value(g, GroupElement{zr}, GroupElement{t})));
        }
    }
    ck.require(worst <= 1e-12, "trig gap " + num(worst));
    return ck.outcome("Walsh exact for L <= 6, max trig gap " + num(worst));
}

// 10 ------------------------------------------------------------------------
Outcome determinism() {
    Check ck;
    const std::string base[] = {
        "experiment = corollary1\nk_min = 2\nk_max = 7\nN = 1009\np = 1, 1.5\nseeds = 2\nrestarts = 3\niterations = 20",
        "experiment = propk\ng = 4^3\nh = 64\nsizes = 4, 8, 16, 24\nm = 2, 4\npolicy = random_injection\nseeds = 3",
        "experiment = propk\ng = 2^6\nh = 1009\nsizes = 8, 32, full\nm = 2\npolicy = sidon_injection\nseeds = 2",
        "experiment = homgrowth\ng = 2^10\nh = 3\nn_min = 1\nn_max = 4\nseeds = 6\nsurplus = 2",
    };
    for (const auto& text : base) {
        std::string csv[3];
        const char* threads[] = {"1", "3", "8"};
        for (int i = 0; i < 3; ++i) {
            const lab::SweepConfig c = config_from(text + "\nthreads = " + threads[i]);
            switch (c.experiment) {
                case lab::Experiment::corollary1: csv[i] = lab::to_csv(lab::run_corollary1(c), false); break;
                case lab::Experiment::propk: csv[i] = lab::to_csv(lab::run_propk(c), false); break;
                case lab::Experiment::homgrowth: csv[i] = lab::to_csv(lab::run_homgrowth(c), false); break;
            }
        }
        const std::string first_line = text.substr(0, text.find('\n'));
        ck.require(csv[0] == csv[1] && csv[0] == csv[2], first_line + " differs across thread counts");
    }
    return ck.outcome("4 sweeps byte-identical at 1, 3 and 8 threads");
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "transform correctness", transforms},
        {2, "energy oracle equivalence", energy_oracle},
        {3, "dilation proof steps exact", dilation_steps},
        {4, "norm chain verification", chain},
        {5, "certificate soundness", certificate_soundness},
        {6, "full-dual growth in k", corollary_growth},
        {7, "algebra hom identities", hom_identities},
        {8, "algebra hom growth in n", hom_growth},
        {9, "Walsh and trig sampling", sampling},
        {10, "sweep determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    bool all_pass = true;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%d] %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
