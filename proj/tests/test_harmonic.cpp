#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"

using namespace charbound;

namespace {

GroupFunction random_function(Rng& rng, const GroupSpec& g) {
    GroupFunction f(g);
    for (auto& v : f.values()) v = cd(rng.normal(), rng.normal());
    return f;
}

double max_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

const cd I(0.0, 1.0);

}  // namespace

TEST(CharEval, Examples) {
    EXPECT_NEAR(std::abs(char_eval(GroupSpec{4}, {1}, {1}) - I), 0.0, 1e-15);
    const GroupSpec g{6, 4};
    for (const auto& x : all_elements(g)) EXPECT_NEAR(std::abs(char_eval(g, g.zero(), x) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(char_eval(GroupSpec{2, 2}, {1, 1}, {1, 1}) - 1.0), 0.0, 1e-15);
    EXPECT_THROW(char_eval(g, {1}, {1, 1}), std::invalid_argument);
}

TEST(Dft, CharacterAndPointMass) {
    const GroupSpec g{6, 4};
    const GroupElement a{5, 3};
    const Spectrum s = dft(character(g, a));
    for (u64 i = 0; i < g.order(); ++i) EXPECT_NEAR(std::abs(s[i] - (i == g.index(a) ? 1.0 : 0.0)), 0.0, 1e-12);

    const Spectrum t = dft(point_mass(g, g.zero(), static_cast<double>(g.order())));
    for (u64 i = 0; i < g.order(); ++i) EXPECT_NEAR(std::abs(t[i] - 1.0), 0.0, 1e-12);
}

TEST(Dft, MatchesNaiveOnMixedShapes) {
    Rng rng(1);
    for (const GroupSpec& g : {GroupSpec{6, 4}, GroupSpec{5}, GroupSpec{2, 3, 5}, GroupSpec{7, 7},
                               GroupSpec{100}, GroupSpec{67, 2}, GroupSpec{3, 3, 3, 3}}) {
        const GroupFunction f = random_function(rng, g);
        EXPECT_LT(max_diff(dft(f).coeffs(), oracle::naive_dft(g, f.values())), 1e-12) << g.to_string();
        const GroupFunction back = idft(dft(f));
        EXPECT_LT(max_diff(back.values(), f.values()), 1e-12) << g.to_string();
    }
}

TEST(Dft, WalshPathMatchesNaive) {
    Rng rng(2);
    for (std::size_t k = 1; k <= 8; ++k) {
        const GroupSpec g = GroupSpec::power(2, k);
        const GroupFunction f = random_function(rng, g);
        EXPECT_LT(max_diff(dft(f).coeffs(), oracle::naive_dft(g, f.values())), 1e-12) << k;
    }
}

TEST(Dft, ParsevalAndTranslation) {
    Rng rng(3);
    for (const GroupSpec& g : {GroupSpec{6, 4}, GroupSpec{2, 2, 2, 2}, GroupSpec{9, 5}, GroupSpec{131}}) {
        const GroupFunction f = random_function(rng, g);
        const Spectrum s = dft(f);
        double sum = 0.0;
        for (const auto& c : s.coeffs()) sum += std::norm(c);
        const double l2 = lp_norm(f, 2.0);
        EXPECT_NEAR(sum, l2 * l2, 1e-12 * l2 * l2);

        const GroupElement z = oracle::random_element(rng, g);
        const Spectrum st = dft(translate(f, z));
        for (u64 i = 0; i < g.order(); ++i)
            EXPECT_NEAR(std::abs(st[i] - char_eval(g, g.element(i), z) * s[i]), 0.0, 1e-12);
    }
}

TEST(LpNorm, Examples) {
    const GroupSpec g{5, 3};
    for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) EXPECT_NEAR(lp_norm(character(g, {2, 1}), p), 1.0, 1e-12);
    const GroupFunction d = point_mass(g, g.zero(), 15.0);
    EXPECT_NEAR(lp_norm(d, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(lp_norm(d, 2.0), std::sqrt(15.0), 1e-12);
    EXPECT_THROW(lp_norm(d, 0.5), std::domain_error);

    Rng rng(4);
    const GroupFunction f = random_function(rng, GroupSpec{7, 4});
    double prev = 0.0;
    for (double p : {1.0, 1.25, 2.0, 4.0, kInf}) {
        const double v = lp_norm(f, p);
        EXPECT_GE(v, prev - 1e-12);
        prev = v;
    }
}

TEST(Project, Examples) {
    Rng rng(5);
    const GroupSpec g{4, 3};
    const GroupFunction f = random_function(rng, g);
    EXPECT_LT(max_diff(project(f, CharSet::full(g)).values(), f.values()), 1e-12);
    EXPECT_LT(max_diff(project(f, CharSet(g, {})).values(), std::vector<cd>(g.order())), 1e-12);

    GroupFunction ab = character(g, {1, 2});
    const GroupFunction b = character(g, {3, 0});
    for (u64 i = 0; i < g.order(); ++i) ab[i] += b[i];
    EXPECT_LT(max_diff(project(ab, CharSet(g, {{1, 2}})).values(), character(g, {1, 2}).values()), 1e-12);
}

TEST(Project, IdempotentContraction) {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        const GroupSpec g = oracle::random_group(rng, 200);
        const GroupFunction f = random_function(rng, g);
        const CharSet lam(g, oracle::random_subset(rng, g, 1 + rng.below(g.order())));
        const GroupFunction pf = project(f, lam);
        EXPECT_LT(max_diff(project(pf, lam).values(), pf.values()), 1e-12);
        EXPECT_LE(lp_norm(pf, 2.0), lp_norm(f, 2.0) + 1e-12);
        const Spectrum s = dft(pf);
        for (u64 i = 0; i < g.order(); ++i)
            if (!lam.contains(g.element(i))) {
                EXPECT_NEAR(std::abs(s[i]), 0.0, 1e-12);
            }
    }
}

TEST(Dirichlet, Examples) {
    const GroupSpec g{3, 4};
    const GroupFunction full = dirichlet_kernel(g, CharSet::full(g));
    for (u64 i = 0; i < g.order(); ++i) EXPECT_NEAR(std::abs(full[i] - (i == 0 ? 12.0 : 0.0)), 0.0, 1e-12);
    EXPECT_LT(max_diff(dirichlet_kernel(g, CharSet(g, {{2, 1}})).values(), character(g, {2, 1}).values()), 1e-12);

    const GroupSpec z3{3};
    const cd w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    const GroupFunction d = dirichlet_kernel(z3, CharSet(z3, {{0}, {1}}));
    EXPECT_NEAR(std::abs(d[0] - 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d[1] - (1.0 + w)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d[2] - (1.0 + w * w)), 0.0, 1e-12);
    EXPECT_THROW(dirichlet_kernel(z3, CharSet(z3, {})), std::invalid_argument);
}

TEST(ProjectionNorm, ExamplesAndPointMasses) {
    const GroupSpec g{4, 2};
    EXPECT_NEAR(projection_norm_1to1(g, CharSet::full(g)), 1.0, 1e-12);
    EXPECT_NEAR(projection_norm_1to1(g, CharSet(g, {{3, 1}})), 1.0, 1e-12);
    const GroupSpec z3{3};
    EXPECT_NEAR(projection_norm_1to1(z3, CharSet(z3, {{0}, {1}})), 4.0 / 3.0, 1e-12);

    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const GroupSpec h = oracle::random_group(rng, 100);
        const CharSet lam(h, oracle::random_subset(rng, h, 1 + rng.below(h.order())));
        EXPECT_NEAR(projection_norm_1to1(h, lam), projection_norm_1to1_by_point_masses(h, lam), 1e-12);
    }
}

TEST(AlgebraNorm, Examples) {
    const GroupSpec prod{3, 5};
    EXPECT_NEAR(algebra_norm_indicator(prod, {{1, 2}}), 1.0, 1e-12);
    EXPECT_EQ(algebra_norm_indicator(prod, {}), 0.0);

    const GroupSpec zz{7, 7};
    ElementSet diag;
    for (u64 a = 0; a < 7; ++a) diag.insert({a, a});
    EXPECT_NEAR(algebra_norm_indicator(zz, diag), 1.0, 1e-12);

    Rng rng(8);
    const GroupSpec v = GroupSpec::power(2, 4);
    for (int t = 0; t < 10; ++t) {
        const auto gamma = oracle::random_subset(rng, v, 3);
        EXPECT_NEAR(algebra_norm_indicator(v, gamma), oracle::direct_phi_norm(v, gamma, 1.0), 1e-12);
    }
}

TEST(Sampling, WalshExamples) {
    const GroupFunction w = sample_walsh(2, {0});
    const std::vector<double> expect{1, 1, -1, -1};
    for (u64 t = 0; t < 4; ++t) EXPECT_EQ(w[t], cd(expect[t], 0.0));
    const GroupFunction e = sample_walsh(2, {});
    for (u64 t = 0; t < 4; ++t) EXPECT_EQ(e[t], cd(1.0, 0.0));
    const GroupFunction w01 = sample_walsh(3, {0, 1});
    const GroupSpec g = GroupSpec::power(2, 3);
    for (u64 t = 0; t < 8; ++t) EXPECT_NEAR(std::abs(w01[t] - char_eval(g, {1, 1, 0}, g.element(t))), 0.0, 1e-15);
    EXPECT_THROW(sample_walsh(2, {2}), std::invalid_argument);
}

TEST(Sampling, WalshMultiplicative) {
    const unsigned L = 5;
    for (unsigned a = 0; a < 32; ++a)
        for (unsigned b = 0; b < 32; b += 3) {
            std::set<unsigned> ja, jb, jab;
            for (unsigned j = 0; j < L; ++j) {
                if (a >> j & 1) ja.insert(j);
                if (b >> j & 1) jb.insert(j);
                if ((a ^ b) >> j & 1) jab.insert(j);
            }
            const GroupFunction wa = sample_walsh(L, ja), wb = sample_walsh(L, jb), wab = sample_walsh(L, jab);
            for (u64 t = 0; t < 32; ++t) {
                ASSERT_TRUE(wa[t] == cd(1.0) || wa[t] == cd(-1.0));
                ASSERT_EQ(wab[t], wa[t] * wb[t]);
            }
        }
}

TEST(Sampling, TrigExamples) {
    const GroupFunction z0 = sample_trig(5, 0);
    for (u64 t = 0; t < 5; ++t) EXPECT_NEAR(std::abs(z0[t] - 1.0), 0.0, 1e-15);
    const GroupFunction e1 = sample_trig(4, 1);
    const std::vector<cd> expect{1.0, I, -1.0, -I};
    EXPECT_LT(max_diff(e1.values(), expect), 1e-15);
    EXPECT_LT(max_diff(sample_trig(8, 9).values(), sample_trig(8, 1).values()), 1e-12);
    EXPECT_LT(max_diff(sample_trig(8, -1).values(), sample_trig(8, 7).values()), 1e-12);
}

TEST(Convolve, MatchesSpectralProduct) {
    Rng rng(9);
    const GroupSpec g{5, 4};
    const GroupFunction f = random_function(rng, g), h = random_function(rng, g);
    const Spectrum sf = dft(f), sh = dft(h), sc = dft(convolve(f, h));
    for (u64 i = 0; i < g.order(); ++i) EXPECT_NEAR(std::abs(sc[i] - sf[i] * sh[i]), 0.0, 1e-12);
}
