#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/rational.hpp>

#include "hypangle/geometry.hpp"

namespace hypangle {

using Rational = boost::rational<std::int64_t>;

inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("factorize needs n >= 1");
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline int moebius(std::int64_t n) {
    const auto fac = factorize(n);
    for (const auto& [p, e] : fac)
        if (e > 1) return 0;
    return fac.size() % 2 ? -1 : 1;
}

inline std::int64_t euler_phi(std::int64_t n) {
    std::int64_t out = n;
    for (const auto& [p, e] : factorize(n)) out -= out / p;
    return out;
}

inline std::int64_t divisor_count(std::int64_t n) {
    std::int64_t out = 1;
    for (const auto& [p, e] : factorize(n)) out *= e + 1;
    return out;
}

// Sum over divisors n of |c| coprime to the level of mu(n)/n; equals the
// product of (1 - 1/p) over primes p | c with p not dividing the level.
inline Rational phi_factor(std::int64_t c, std::int64_t level) {
    if (c == 0) throw std::invalid_argument("phi_factor needs c != 0");
    if (level < 1) throw std::invalid_argument("phi_factor needs level >= 1");
    Rational out(1);
    for (const auto& [p, e] : factorize(std::abs(c)))
        if (level % p != 0) out *= Rational(p - 1, p);
    return out;
}

// Product of (1 - p^{-2})^{-1} over primes p dividing n.
inline Rational coprime_zeta_factor(std::int64_t n) {
    Rational out(1);
    for (const auto& [p, e] : factorize(n)) out *= Rational(p * p, p * p - 1);
    return out;
}

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("mod_inverse needs m >= 1");
    if (m == 1) return 0;
    std::int64_t r0 = m, r1 = ((a % m) + m) % m;
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        t0 -= q * t1;
        std::swap(t0, t1);
    }
    if (r0 != 1) throw std::invalid_argument("mod_inverse: arguments not coprime");
    return ((t0 % m) + m) % m;
}

// Number of integers x in [lo, hi] with x congruent to r (mod m).
inline std::int64_t count_in_progression(std::int64_t lo, std::int64_t hi,
                                         std::int64_t r, std::int64_t m) {
    if (lo > hi) return 0;
    const std::int64_t first = lo + (((r - lo) % m) + m) % m;
    if (first > hi) return 0;
    return (hi - first) / m + 1;
}

// Pairs (a, d) in [a_lo,a_hi] x [d_lo,d_hi] with a and d congruent to 1
// modulo the level and ad congruent to 1 modulo level*|c|.
struct CongruenceBox {
    std::int64_t c = 1;
    std::int64_t level = 1;
    std::int64_t a_lo = 0, a_hi = -1;
    std::int64_t d_lo = 0, d_hi = -1;
};

inline void validate(const CongruenceBox& box) {
    if (box.c == 0) throw std::invalid_argument("congruence box needs c != 0");
    if (box.level < 1) throw std::invalid_argument("congruence box needs level >= 1");
}

inline std::int64_t count_congruence_box(const CongruenceBox& box) {
    validate(box);
    const std::int64_t m = box.level * std::abs(box.c);
    std::int64_t total = 0;
    // d == a^{-1} (mod m) already forces d == 1 (mod level) when a is.
    std::int64_t a = box.a_lo + (((1 - box.a_lo) % box.level) + box.level) % box.level;
    for (; a <= box.a_hi; a += box.level) {
        if (std::gcd(a, m) != 1) continue;
        total += count_in_progression(box.d_lo, box.d_hi, mod_inverse(a, m), m);
    }
    return total;
}

enum class IntervalMeasure { integer_count, length };

inline double prop1_main_term(const CongruenceBox& box,
                              IntervalMeasure measure = IntervalMeasure::integer_count) {
    validate(box);
    const double adj = measure == IntervalMeasure::integer_count ? 1.0 : 0.0;
    const double l1 = static_cast<double>(box.a_hi - box.a_lo) + adj;
    const double l2 = static_cast<double>(box.d_hi - box.d_lo) + adj;
    return boost::rational_cast<double>(phi_factor(box.c, box.level)) * l1 * l2 /
           (static_cast<double>(std::abs(box.c)) * box.level * box.level);
}

// S(m, n; q) by direct summation over the units mod q.
inline std::complex<double> kloosterman(std::int64_t m, std::int64_t n,
                                        std::int64_t q) {
    if (q < 1) throw std::invalid_argument("kloosterman needs q >= 1");
    if (q == 1) return {1.0, 0.0};
    m = ((m % q) + q) % q;
    n = ((n % q) + q) % q;
    const double w = 2.0 * pi / static_cast<double>(q);
    double re = 0.0, im = 0.0;
    for (std::int64_t a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        const std::int64_t t = (m * a + n * mod_inverse(a, q)) % q;
        re += std::cos(w * static_cast<double>(t));
        im += std::sin(w * static_cast<double>(t));
    }
    return {re, im};
}

inline std::complex<double> kloosterman_incomplete(std::int64_t m, std::int64_t n,
                                                   std::int64_t q, std::int64_t lo,
                                                   std::int64_t hi) {
    if (q < 1) throw std::invalid_argument("kloosterman needs q >= 1");
    if (lo > hi) return {0.0, 0.0};
    if (lo < 0 || hi > q - 1)
        throw std::invalid_argument("incomplete sum interval must lie in [0, q-1]");
    m = ((m % q) + q) % q;
    n = ((n % q) + q) % q;
    const double w = 2.0 * pi / static_cast<double>(q);
    double re = 0.0, im = 0.0;
    for (std::int64_t a = lo; a <= hi; ++a) {
        if (std::gcd(a, q) != 1) continue;
        const std::int64_t t = (m * a + n * mod_inverse(a, q)) % q;
        re += std::cos(w * static_cast<double>(t));
        im += std::sin(w * static_cast<double>(t));
    }
    return {re, im};
}

inline double weil_bound(std::int64_t m, std::int64_t n, std::int64_t q) {
    const std::int64_t g = std::gcd(std::gcd(std::abs(m), std::abs(n)), q);
    return static_cast<double>(divisor_count(q)) *
           std::sqrt(static_cast<double>(g) * static_cast<double>(q));
}

struct WeilReport {
    std::int64_t q_max = 0;
    std::int64_t m_abs_max = 0;
    std::int64_t n_abs_max = 0;
    std::int64_t checked = 0;
    std::int64_t violations = 0;
    double max_ratio = 0.0;
    std::int64_t argmax_m = 0;
    std::int64_t argmax_n = 0;
    std::int64_t argmax_q = 1;
};

// Checks |S(m,n;q)| <= tau(q) sqrt(gcd(m,n,q) q) for every q <= q_max and
// |m| <= m_abs_max, |n| <= n_abs_max.  Shares unit/inverse/phase tables per
// modulus so the whole sweep stays near O(q_max^2 pairs).
inline WeilReport weil_certificate(std::int64_t q_max, std::int64_t m_abs_max,
                                   std::int64_t n_abs_max) {
    if (q_max < 1 || m_abs_max < 0 || n_abs_max < 0)
        throw std::invalid_argument("weil_certificate: bad ranges");
    WeilReport rep{q_max, m_abs_max, n_abs_max};
    std::vector<std::int64_t> units, invs, mrow, nrow;
    std::vector<double> cos_t, sin_t;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        units.clear();
        invs.clear();
        if (q == 1) {
            units.push_back(0);
            invs.push_back(0);
        }
        for (std::int64_t a = 1; a < q; ++a) {
            if (std::gcd(a, q) == 1) {
                units.push_back(a);
                invs.push_back(mod_inverse(a, q));
            }
        }
        cos_t.resize(q);
        sin_t.resize(q);
        const double w = 2.0 * pi / static_cast<double>(q);
        for (std::int64_t t = 0; t < q; ++t) {
            cos_t[t] = std::cos(w * static_cast<double>(t));
            sin_t[t] = std::sin(w * static_cast<double>(t));
        }
        const std::size_t nu = units.size();
        const double tau = static_cast<double>(divisor_count(q));
        for (std::int64_t m = -m_abs_max; m <= m_abs_max; ++m) {
            const std::int64_t mr = ((m % q) + q) % q;
            mrow.resize(nu);
            for (std::size_t i = 0; i < nu; ++i) mrow[i] = mr * units[i] % q;
            for (std::int64_t n = -n_abs_max; n <= n_abs_max; ++n) {
                const std::int64_t nr = ((n % q) + q) % q;
                nrow.resize(nu);
                for (std::size_t i = 0; i < nu; ++i) nrow[i] = nr * invs[i] % q;
                double re = 0.0, im = 0.0;
                for (std::size_t i = 0; i < nu; ++i) {
                    std::int64_t t = mrow[i] + nrow[i];
                    if (t >= q) t -= q;
                    re += cos_t[t];
                    im += sin_t[t];
                }
                const std::int64_t g = std::gcd(std::gcd(std::abs(m), std::abs(n)), q);
                const double bound = tau * std::sqrt(static_cast<double>(g) *
                                                     static_cast<double>(q));
                const double ratio = std::hypot(re, im) / bound;
                ++rep.checked;
                if (ratio > rep.max_ratio) {
                    rep.max_ratio = ratio;
                    rep.argmax_m = m;
                    rep.argmax_n = n;
                    rep.argmax_q = q;
                }
                if (ratio > 1.0) ++rep.violations;
            }
        }
    }
    return rep;
}

struct MoebiusSumResult {
    double sum = 0.0;
    double integral = 0.0;
    double main_term = 0.0;
    std::int64_t terms = 0;
};

// Sum of phi_factor(c, level) f(c) over integers c in [lo, hi] (c >= 1;
// optionally only multiples of the level), against the predicted main term
// C_level * integral(f) (divided by the level in the multiples case).
template <class F>
MoebiusSumResult moebius_weighted_sum(std::int64_t level, double lo, double hi,
                                      F&& f, bool multiples_only = false) {
    if (level < 1) throw std::invalid_argument("moebius_weighted_sum: level >= 1");
    if (!(lo >= 0.0) || !(hi > lo))
        throw std::invalid_argument("moebius_weighted_sum: need 0 <= lo < hi");
    MoebiusSumResult out;
    std::int64_t c = static_cast<std::int64_t>(std::ceil(std::max(1.0, lo)));
    const std::int64_t last = static_cast<std::int64_t>(std::floor(hi));
    std::int64_t step = 1;
    if (multiples_only) {
        step = level;
        c += ((level - c % level) % level);
    }
    for (; c <= last; c += step) {
        out.sum += boost::rational_cast<double>(phi_factor(c, level)) *
                   f(static_cast<double>(c));
        ++out.terms;
    }
    out.integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, lo, hi, 15, 1e-10);
    const double cn = 6.0 / (pi * pi) *
                      boost::rational_cast<double>(coprime_zeta_factor(level));
    out.main_term = cn * out.integral / (multiples_only ? level : 1);
    return out;
}

}  // namespace hypangle
