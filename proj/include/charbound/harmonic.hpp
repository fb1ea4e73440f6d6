#pragma once

// Fourier analysis on finite Abelian groups.
//
// Measure convention: Haar probability on the group, counting measure on the
// dual. With that choice
//
//   f^(a) = (1/|G|) sum_x f(x) conj(a(x)),     f(x) = sum_a f^(a) a(x),
//
// and Parseval reads sum_a |f^(a)|^2 = ||f||_2^2.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "charbound/group.hpp"

namespace charbound {

using cd = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Complex-valued function on a group, indexed by the canonical element index.
class GroupFunction {
public:
    GroupFunction() = default;
    explicit GroupFunction(GroupSpec g) : group_(std::move(g)), values_(group_.order()) {}
    GroupFunction(GroupSpec g, std::vector<cd> values)
        : group_(std::move(g)), values_(std::move(values)) {
        if (values_.size() != group_.order())
            throw std::invalid_argument("function value count must equal group order");
    }

    const GroupSpec& group() const { return group_; }
    const std::vector<cd>& values() const { return values_; }
    std::vector<cd>& values() { return values_; }
    std::size_t size() const { return values_.size(); }

    cd operator[](u64 idx) const { return values_[idx]; }
    cd& operator[](u64 idx) { return values_[idx]; }
    cd at(const GroupElement& x) const { return values_[group_.index(x)]; }

private:
    GroupSpec group_;
    std::vector<cd> values_;
};

/// Fourier coefficients, indexed by dual elements.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(GroupSpec dual) : dual_(std::move(dual)), coeffs_(dual_.order()) {}
    Spectrum(GroupSpec dual, std::vector<cd> coeffs)
        : dual_(std::move(dual)), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != dual_.order())
            throw std::invalid_argument("coefficient count must equal dual order");
    }

    const GroupSpec& dual() const { return dual_; }
    const std::vector<cd>& coeffs() const { return coeffs_; }
    std::vector<cd>& coeffs() { return coeffs_; }

    cd operator[](u64 idx) const { return coeffs_[idx]; }
    cd& operator[](u64 idx) { return coeffs_[idx]; }
    cd at(const GroupElement& a) const { return coeffs_[dual_.index(a)]; }

private:
    GroupSpec dual_;
    std::vector<cd> coeffs_;
};

/// A finite set of characters (dual elements).
class CharSet {
public:
    CharSet() = default;
    CharSet(GroupSpec dual, ElementSet members) : dual_(std::move(dual)), members_(std::move(members)) {
        for (const auto& a : members_) dual_.check(a);
    }

    static CharSet full(const GroupSpec& dual) {
        const auto all = all_elements(dual);
        return CharSet(dual, ElementSet(all.begin(), all.end()));
    }

    const GroupSpec& dual() const { return dual_; }
    const ElementSet& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(const GroupElement& a) const { return members_.count(a) != 0; }

private:
    GroupSpec dual_;
    ElementSet members_;
};

namespace detail {

/// exp(2 pi i * num / den) with num reduced mod den first.
inline cd root_of_unity(u64 num, u64 den) {
    const double t = static_cast<double>(num % den) / static_cast<double>(den);
    return std::polar(1.0, 2.0 * std::numbers::pi * t);
}

inline bool all_binary(const GroupSpec& g) {
    for (u64 n : g.moduli())
        if (n != 2) return false;
    return true;
}

/// In-place unnormalised Walsh-Hadamard butterfly over every bit of the index.
inline void fwht(std::vector<cd>& a) {
    const std::size_t n = a.size();
    for (std::size_t h = 1; h < n; h <<= 1)
        for (std::size_t i = 0; i < n; i += h << 1)
            for (std::size_t j = i; j < i + h; ++j) {
                const cd x = a[j];
                const cd y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
}

/// exp(sign 2 pi i k / n) for k < n/2, cached per thread.
inline const std::vector<cd>& pow2_twiddles(std::size_t n, int sign) {
    thread_local std::map<std::pair<std::size_t, int>, std::vector<cd>> cache;
    auto [it, fresh] = cache.try_emplace({n, sign});
    if (fresh) {
        it->second.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            it->second[k] = root_of_unity(k, n);
            if (sign < 0) it->second[k] = std::conj(it->second[k]);
        }
    }
    return it->second;
}

/// In-place radix-2 FFT, a.size() a power of two, kernel exp(sign 2 pi i / n).
inline void fft_pow2(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    if (n < 2) return;
    const std::vector<cd>& w = pow2_twiddles(n, sign);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len)
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
    }
}

/// Length-n DFT via a chirp-z convolution of power-of-two length.
class Bluestein {
public:
    Bluestein(std::size_t n, int sign) : n_(n), m_(1) {
        while (m_ < 2 * n - 1) m_ <<= 1;
        chirp_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // exp(sign pi i k^2 / n), k^2 reduced mod 2n
            const u64 k2 = mulmod(k, k, 2 * n);
            chirp_[k] = root_of_unity(k2, 2 * n);
            if (sign < 0) chirp_[k] = std::conj(chirp_[k]);
        }
        kernel_.assign(m_, 0.0);
        kernel_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n; ++k) kernel_[k] = kernel_[m_ - k] = std::conj(chirp_[k]);
        fft_pow2(kernel_, -1);
    }

    void operator()(std::vector<cd>& x) const {
        std::vector<cd> a(m_, 0.0);
        for (std::size_t k = 0; k < n_; ++k) a[k] = x[k] * chirp_[k];
        fft_pow2(a, -1);
        for (std::size_t k = 0; k < m_; ++k) a[k] *= kernel_[k];
        fft_pow2(a, +1);
        const double scale = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * scale * chirp_[k];
    }

private:
    std::size_t n_, m_;
    std::vector<cd> chirp_, kernel_;
};

inline constexpr std::size_t kNaiveAxisMax = 64;

/// Unnormalised tensor transform: out(a) = sum_x in(x) exp(sign 2 pi i <a,x>).
/// Factors up to 64 use the direct O(n^2) sum; larger ones use Bluestein.
inline void tensor_transform(std::vector<cd>& data, const GroupSpec& g, int sign) {
    if (all_binary(g)) {
        fwht(data);
        return;
    }
    std::size_t inner = data.size();
    std::vector<cd> buf, tw;
    for (std::size_t axis = 0; axis < g.rank(); ++axis) {
        const std::size_t n = g.modulus(axis);
        inner /= n;
        const std::size_t outer = data.size() / (n * inner);
        buf.resize(n);
        if (n > kNaiveAxisMax) {
            thread_local std::map<std::pair<std::size_t, int>, Bluestein> plans;
            const Bluestein& chirp = plans.try_emplace({n, sign}, n, sign).first->second;
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t i = 0; i < inner; ++i) {
                    const std::size_t base = o * n * inner + i;
                    for (std::size_t t = 0; t < n; ++t) buf[t] = data[base + t * inner];
                    chirp(buf);
                    for (std::size_t t = 0; t < n; ++t) data[base + t * inner] = buf[t];
                }
            continue;
        }
        tw.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            tw[k] = root_of_unity(k, n);
            if (sign < 0) tw[k] = std::conj(tw[k]);
        }
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < inner; ++i) {
                const std::size_t base = o * n * inner + i;
                for (std::size_t t = 0; t < n; ++t) buf[t] = data[base + t * inner];
                for (std::size_t a = 0; a < n; ++a) {
                    cd acc = 0.0;
                    std::size_t k = 0;
                    for (std::size_t t = 0; t < n; ++t) {
                        acc += buf[t] * tw[k];
                        k += a;
                        if (k >= n) k -= n;
                    }
                    data[base + a * inner] = acc;
                }
            }
    }
}

}  // namespace detail

/// a(x) = exp(2 pi i sum_j a_j x_j / n_j)
inline cd char_eval(const GroupSpec& g, const GroupElement& a, const GroupElement& x) {
    g.check(a);
    g.check(x);
    double t = 0.0;
    for (std::size_t j = 0; j < g.rank(); ++j) {
        const u64 n = g.modulus(j);
        t += static_cast<double>(detail::mulmod(a[j], x[j], n)) / static_cast<double>(n);
    }
    t -= std::floor(t);
    return std::polar(1.0, 2.0 * std::numbers::pi * t);
}

/// The character a as a function on g.
inline GroupFunction character(const GroupSpec& g, const GroupElement& a) {
    g.check(a);
    GroupFunction f(g);
    for (u64 i = 0; i < g.order(); ++i) f[i] = char_eval(g, a, g.element(i));
    return f;
}

inline Spectrum dft(const GroupFunction& f) {
    std::vector<cd> c = f.values();
    detail::tensor_transform(c, f.group(), -1);
    const double scale = 1.0 / static_cast<double>(f.group().order());
    for (auto& v : c) v *= scale;
    return Spectrum(f.group(), std::move(c));
}

inline GroupFunction idft(const Spectrum& s) {
    std::vector<cd> v = s.coeffs();
    detail::tensor_transform(v, s.dual(), +1);
    return GroupFunction(s.dual(), std::move(v));
}

/// Haar-probability L_p norm; p = kInf gives the sup norm.
inline double lp_norm(const GroupFunction& f, double p) {
    if (!(p >= 1.0)) throw std::domain_error("lp_norm requires p >= 1");
    if (f.size() == 0) return 0.0;
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    if (p == 1.0) {
        for (const auto& v : f.values()) acc += std::abs(v);
        return acc / static_cast<double>(f.size());
    }
    if (p == 2.0) {
        for (const auto& v : f.values()) acc += std::norm(v);
        return std::sqrt(acc / static_cast<double>(f.size()));
    }
    for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc / static_cast<double>(f.size()), 1.0 / p);
}

/// pi_Lambda(f) = sum_{a in Lambda} f^(a) a
inline GroupFunction project(const GroupFunction& f, const CharSet& lambda) {
    if (!(lambda.dual() == f.group()))
        throw std::invalid_argument("character set is over a different dual");
    const Spectrum full = dft(f);
    Spectrum kept(f.group());
    for (const auto& a : lambda.members()) {
        const u64 i = f.group().index(a);
        kept[i] = full[i];
    }
    return idft(kept);
}

/// D_Lambda(x) = sum_{a in Lambda} a(x)
inline GroupFunction dirichlet_kernel(const GroupSpec& g, const CharSet& lambda) {
    if (lambda.empty()) throw std::invalid_argument("dirichlet_kernel of an empty character set");
    if (!(lambda.dual() == g)) throw std::invalid_argument("character set is over a different dual");
    Spectrum s(g);
    for (const auto& a : lambda.members()) s[g.index(a)] = 1.0;
    return idft(s);
}

/// ||pi_Lambda||_{1->1}. pi_Lambda is convolution with D_Lambda, and the
/// extreme points of the L_1 ball are scaled point masses, so the norm is
/// ||D_Lambda||_1.
inline double projection_norm_1to1(const GroupSpec& g, const CharSet& lambda) {
    return lp_norm(dirichlet_kernel(g, lambda), 1.0);
}

inline GroupFunction point_mass(const GroupSpec& g, const GroupElement& y, double scale = 1.0) {
    GroupFunction f(g);
    f[g.index(y)] = scale;
    return f;
}

/// The same norm by maximising ||pi_Lambda(|G| delta_y)||_1 over every y.
inline double projection_norm_1to1_by_point_masses(const GroupSpec& g, const CharSet& lambda) {
    if (lambda.empty()) throw std::invalid_argument("projection norm of an empty character set");
    double best = 0.0;
    for (u64 i = 0; i < g.order(); ++i) {
        const auto k = point_mass(g, g.element(i), static_cast<double>(g.order()));
        best = std::max(best, lp_norm(project(k, lambda), 1.0));
    }
    return best;
}

/// tau_z(f)(x) = f(x + z)
inline GroupFunction translate(const GroupFunction& f, const GroupElement& z) {
    const GroupSpec& g = f.group();
    g.check(z);
    GroupFunction out(g);
    for (u64 i = 0; i < g.order(); ++i) out[i] = f.at(elem_add(g, g.element(i), z));
    return out;
}

/// (f * h)(x) = (1/|G|) sum_y f(y) h(x - y), by direct summation.
inline GroupFunction convolve(const GroupFunction& f, const GroupFunction& h) {
    if (!(f.group() == h.group())) throw std::invalid_argument("convolve over different groups");
    const GroupSpec& g = f.group();
    const auto elems = all_elements(g);
    GroupFunction out(g);
    const double scale = 1.0 / static_cast<double>(g.order());
    for (u64 x = 0; x < g.order(); ++x) {
        cd acc = 0.0;
        for (u64 y = 0; y < g.order(); ++y)
            acc += f[y] * h[g.index(elem_sub(g, elems[x], elems[y]))];
        out[x] = acc * scale;
    }
    return out;
}

/// ||1_Gamma||_A for a finite Gamma in the dual of a product group: the L_1
/// norm of phi(u) = sum_{c in Gamma} c(-u).
inline double algebra_norm_indicator(const GroupSpec& prod, const ElementSet& gamma) {
    if (gamma.empty()) return 0.0;
    Spectrum s(prod);
    for (const auto& c : gamma) s[prod.index(c)] = 1.0;
    // phi(u) = conj(sum_c c(u)); the conjugate has the same modulus
    return lp_norm(idft(s), 1.0);
}

/// w_J sampled at t / 2^L, t = 0..2^L-1, as a function on (Z/2)^L.
///
/// Rademacher indices are 0-based: r_j(x) = 1 iff frac(2^j x) < 1/2, so r_j
/// reads binary digit j+1 of x (most significant first). The dyadic point
/// t / 2^L has canonical index t in (Z/2)^L.
inline GroupFunction sample_walsh(unsigned L, const std::set<unsigned>& J) {
    if (L > 26) throw std::invalid_argument("sample_walsh: L too large");
    for (unsigned j : J)
        if (j >= L) throw std::invalid_argument("sample_walsh: index outside 0..L-1");
    const GroupSpec g = GroupSpec::power(2, L);
    const u64 count = u64{1} << L;
    GroupFunction f(g);
    for (u64 t = 0; t < count; ++t) {
        double v = 1.0;
        for (unsigned j : J) {
            // frac(2^j * t / 2^L) < 1/2  <=>  (2^j t mod 2^L) < 2^(L-1)
            const u64 frac_num = (t << j) & (count - 1);
            v *= frac_num < (count >> 1) ? 1.0 : -1.0;
        }
        f[t] = v;
    }
    return f;
}

/// e_z sampled at t / N, t = 0..N-1, as a function on Z/N.
inline GroupFunction sample_trig(u64 N, long long z) {
    if (N == 0) throw std::invalid_argument("sample_trig: N must be >= 1");
    const GroupSpec g{N};
    GroupFunction f(g);
    const long long n = static_cast<long long>(N);
    const u64 zr = static_cast<u64>(((z % n) + n) % n);
    for (u64 t = 0; t < N; ++t) f[t] = detail::root_of_unity(detail::mulmod(zr, t, N), N);
    return f;
}

}  // namespace charbound
