#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "hypangle/arith.hpp"
#include "hypangle/geometry.hpp"
#include "hypangle/group_element.hpp"

namespace hypangle {

// Orbit ball: gamma in the level-N congruence subgroup with conjugated
// Frobenius norm A^2+B^2+C^2+D^2 at most norm_bound_sq (= 2 cosh R).
struct BallSpec {
    std::int64_t level = 1;
    Point z0{0.0, 1.0};
    double norm_bound_sq = 2.0;
};

struct SectorSpec {
    BallSpec ball;
    double beta = std::numeric_limits<double>::infinity();
};

struct BallElement {
    GroupElement gamma;
    ConjugatedEntries entries;
};

struct AngleCollection {
    std::vector<AngleSample> samples;
    std::int64_t undefined_count = 0;
};

inline void validate(const BallSpec& spec) {
    if (spec.level < 1) throw std::invalid_argument("ball level must be >= 1");
    require_upper(spec.z0);
    if (!(spec.norm_bound_sq >= 2.0))
        throw std::invalid_argument("norm bound squared must be >= 2");
    // Keep every entry below 2^31 so products like a*d stay in 64 bits.
    const double q = std::sqrt(spec.norm_bound_sq);
    const double cmax = q / spec.z0.y + 1.0;
    const double admax = std::abs(spec.z0.x) * cmax + q + 1.0;
    const double bmax = spec.z0.y * q + 2.0 * std::abs(spec.z0.x) * admax + 1.0;
    constexpr double lim = 2147483648.0;
    if (cmax >= lim || admax >= lim || bmax >= lim)
        throw std::overflow_error("ball bound exceeds the safe entry range");
}

namespace detail {

inline std::int64_t isqrt(std::int64_t v) {
    if (v < 0) return -1;
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (s > 0 && s * s > v) --s;
    while ((s + 1) * (s + 1) <= v) ++s;
    return s;
}

// Smallest x >= lo with x congruent to r (mod m).
inline std::int64_t first_geq(std::int64_t lo, std::int64_t r, std::int64_t m) {
    return lo + (((r - lo) % m) + m) % m;
}

// With base point i and an integral bound the membership test is exact
// integer arithmetic: the conjugated entries are the matrix entries.
inline bool exact_lattice(const BallSpec& spec) {
    return spec.z0.x == 0.0 && spec.z0.y == 1.0 &&
           spec.norm_bound_sq == std::floor(spec.norm_bound_sq) &&
           spec.norm_bound_sq <= 4.0e18;
}

// Nonzero c values to scan, ascending.  One extra multiple is kept at each
// end; empty windows drop it.
inline std::vector<std::int64_t> c_values(const BallSpec& spec) {
    const double q = std::sqrt(spec.norm_bound_sq);
    const auto kmax =
        static_cast<std::int64_t>(std::floor(q / (spec.z0.y * static_cast<double>(spec.level)))) + 1;
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(2 * kmax));
    for (std::int64_t k = -kmax; k <= kmax; ++k)
        if (k != 0) out.push_back(k * spec.level);
    return out;
}

// c = 0 block: a = d = +-1 (minus only when the level divides 2), b over
// multiples of the level with 2 + (b/y0)^2 <= Q^2.
template <class Visitor>
void scan_c_zero(const BallSpec& spec, Visitor& visit) {
    const std::int64_t n = spec.level;
    const bool exact = exact_lattice(spec);
    std::int64_t bmax;
    if (exact) {
        bmax = isqrt(static_cast<std::int64_t>(spec.norm_bound_sq) - 2);
    } else {
        bmax = static_cast<std::int64_t>(std::floor(
                   std::sqrt(std::max(0.0, spec.norm_bound_sq - 2.0)) * spec.z0.y)) +
               1;
    }
    const double x0 = spec.z0.x;
    const double y0 = spec.z0.y;
    for (const std::int64_t s : {std::int64_t{1}, std::int64_t{-1}}) {
        if (s == -1 && 2 % n != 0) continue;
        for (std::int64_t b = first_geq(-bmax, 0, n); b <= bmax; b += n) {
            const double sa = static_cast<double>(s);
            // mirrors conjugate_entries exactly: the B expression must not be
            // simplified or enumerated and reconstructed angles drift by an ulp
            const ConjugatedEntries e{
                sa, (sa * x0 + static_cast<double>(b) - sa * x0) / y0, 0.0, sa};
            if (!exact && !(e.norm_sq() <= spec.norm_bound_sq)) continue;
            visit(GroupElement{s, b, 0, s}, e);
        }
    }
}

// One nonzero c: a runs over the A-window with a == 1 (mod level), d over
// the progression d == a^{-1} (mod level*|c|) inside the D-window, and
// b = (ad-1)/c is exact.  The final norm test decides membership.
template <class Visitor>
void scan_c(const BallSpec& spec, std::int64_t c, Visitor& visit) {
    const std::int64_t n = spec.level;
    const std::int64_t m = n * std::abs(c);
    if (exact_lattice(spec)) {
        const auto qi = static_cast<std::int64_t>(spec.norm_bound_sq);
        const std::int64_t c2 = c * c;
        if (c2 > qi) return;
        const std::int64_t amax = isqrt(qi - c2);
        for (std::int64_t a = first_geq(-amax, 1, n); a <= amax; a += n) {
            if (std::gcd(a, m) != 1) continue;
            const std::int64_t ainv = mod_inverse(a, m);
            const std::int64_t dmax = isqrt(qi - c2 - a * a);
            for (std::int64_t d = first_geq(-dmax, ainv, m); d <= dmax; d += m) {
                const std::int64_t num = a * d - 1;
                if (num % c != 0)
                    throw std::logic_error("enumeration: inexact b division");
                const std::int64_t b = num / c;
                if (b % n != 0)
                    throw std::logic_error("enumeration: b escapes the level");
                if (std::abs(b) > isqrt(qi - c2 - a * a - d * d)) continue;
                visit(GroupElement{a, b, c, d},
                      ConjugatedEntries{static_cast<double>(a), static_cast<double>(b),
                                        static_cast<double>(c), static_cast<double>(d)});
            }
        }
        return;
    }
    const double x0 = spec.z0.x;
    const double y0 = spec.z0.y;
    const double qsq = spec.norm_bound_sq;
    const double cc = static_cast<double>(c) * y0;
    const double csq = cc * cc;
    if (!(csq <= qsq)) return;
    const double w = std::sqrt(qsq - csq);
    const double center = static_cast<double>(c) * x0;
    const auto alo = static_cast<std::int64_t>(std::ceil(center - w)) - 1;
    const auto ahi = static_cast<std::int64_t>(std::floor(center + w)) + 1;
    for (std::int64_t a = first_geq(alo, 1, n); a <= ahi; a += n) {
        const double ca = static_cast<double>(a) - center;
        const double arem = qsq - csq - ca * ca;
        if (!(arem >= 0.0)) continue;
        if (std::gcd(a, m) != 1) continue;
        const std::int64_t ainv = mod_inverse(a, m);
        const double wd = std::sqrt(arem);
        const auto dlo = static_cast<std::int64_t>(std::ceil(-center - wd)) - 1;
        const auto dhi = static_cast<std::int64_t>(std::floor(-center + wd)) + 1;
        for (std::int64_t d = first_geq(dlo, ainv, m); d <= dhi; d += m) {
            const std::int64_t num = a * d - 1;
            if (num % c != 0)
                throw std::logic_error("enumeration: inexact b division");
            const std::int64_t b = num / c;
            if (b % n != 0)
                throw std::logic_error("enumeration: b escapes the level");
            const ConjugatedEntries e{
                ca, (ca * x0 + static_cast<double>(b) - static_cast<double>(d) * x0) / y0,
                cc, center + static_cast<double>(d)};
            if (e.norm_sq() <= qsq) visit(GroupElement{a, b, c, d}, e);
        }
    }
}

// Runs per_c(worker, c) over contiguous slices of cs; slice w is owned by
// worker w, so per-worker results concatenated in worker order reproduce
// the single-thread stream.
template <class PerC>
void parallel_over_c(const std::vector<std::int64_t>& cs, int workers, PerC&& per_c) {
    if (workers <= 1 || cs.size() < 2) {
        for (const auto c : cs) per_c(0, c);
        return;
    }
    const std::size_t chunk = (cs.size() + workers - 1) / static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr) {
        const std::size_t lo = static_cast<std::size_t>(wkr) * chunk;
        const std::size_t hi = std::min(cs.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&per_c, &cs, wkr, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) per_c(wkr, cs[i]);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Visits every ball element exactly once: the c = 0 block first, then c
// ascending.  Single-threaded and deterministic.
template <class Visitor>
void enumerate_ball(const BallSpec& spec, Visitor&& visit) {
    validate(spec);
    detail::scan_c_zero(spec, visit);
    for (const auto c : detail::c_values(spec)) detail::scan_c(spec, c, visit);
}

inline std::vector<BallElement> collect_ball(const BallSpec& spec, int workers = 1) {
    validate(spec);
    workers = std::max(1, workers);
    std::vector<std::vector<BallElement>> parts(static_cast<std::size_t>(workers) + 1);
    auto head = [&parts](const GroupElement& g, const ConjugatedEntries& e) {
        parts[0].push_back({g, e});
    };
    detail::scan_c_zero(spec, head);
    const auto cs = detail::c_values(spec);
    detail::parallel_over_c(cs, workers, [&](int wkr, std::int64_t c) {
        auto sink = [&parts, wkr](const GroupElement& g, const ConjugatedEntries& e) {
            parts[static_cast<std::size_t>(wkr) + 1].push_back({g, e});
        };
        detail::scan_c(spec, c, sink);
    });
    std::vector<BallElement> out;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    out.reserve(total);
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline std::int64_t count_ball(const BallSpec& spec, int workers = 1) {
    validate(spec);
    workers = std::max(1, workers);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(workers) + 1, 0);
    auto head = [&counts](const GroupElement&, const ConjugatedEntries&) { ++counts[0]; };
    detail::scan_c_zero(spec, head);
    detail::parallel_over_c(detail::c_values(spec), workers, [&](int wkr, std::int64_t c) {
        auto sink = [&counts, wkr](const GroupElement&, const ConjugatedEntries&) {
            ++counts[static_cast<std::size_t>(wkr) + 1];
        };
        detail::scan_c(spec, c, sink);
    });
    std::int64_t total = 0;
    for (const auto v : counts) total += v;
    return total;
}

// Angle of every ball element toward z1; elements with gamma z0 = z1 are
// counted, not sampled.
inline AngleCollection collect_angles(const BallSpec& spec, const Point& z1,
                                      int workers = 1) {
    validate(spec);
    require_upper(z1);
    workers = std::max(1, workers);
    const NormalizedTarget target = normalize_target(spec.z0, z1);
    struct Part {
        std::vector<AngleSample> samples;
        std::int64_t undefined = 0;
    };
    std::vector<Part> parts(static_cast<std::size_t>(workers) + 1);
    auto feed = [&target](Part& part, const GroupElement& g, const ConjugatedEntries& e) {
        const auto th = angle_from_entries(e, target);
        if (!th) {
            ++part.undefined;
            return;
        }
        const double dist = std::acosh(std::max(1.0, e.norm_sq() / 2.0));
        part.samples.push_back({g, *th, dist});
    };
    auto head = [&](const GroupElement& g, const ConjugatedEntries& e) {
        feed(parts[0], g, e);
    };
    detail::scan_c_zero(spec, head);
    detail::parallel_over_c(detail::c_values(spec), workers, [&](int wkr, std::int64_t c) {
        auto sink = [&, wkr](const GroupElement& g, const ConjugatedEntries& e) {
            feed(parts[static_cast<std::size_t>(wkr) + 1], g, e);
        };
        detail::scan_c(spec, c, sink);
    });
    AngleCollection out;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.samples.size();
    out.samples.reserve(total);
    for (auto& p : parts) {
        out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
        out.undefined_count += p.undefined;
    }
    return out;
}

namespace detail {

// Sector membership per nonzero c: A/C <= beta plus the modified norm
// (C^2+A^2)(1+D^2/C^2) <= Q^2.  d is counted along its progression without
// being enumerated.
inline std::int64_t sector_count_c(const SectorSpec& spec, std::int64_t c) {
    const BallSpec& ball = spec.ball;
    const std::int64_t n = ball.level;
    const std::int64_t m = n * std::abs(c);
    const bool cut = std::isfinite(spec.beta);
    std::int64_t total = 0;
    if (exact_lattice(ball)) {
        const auto qi = static_cast<std::int64_t>(ball.norm_bound_sq);
        const std::int64_t c2 = c * c;
        if (c2 > qi) return 0;
        const std::int64_t amax = isqrt(qi - c2);
        std::int64_t alo = -amax;
        std::int64_t ahi = amax;
        if (cut) {
            const double edge = spec.beta * static_cast<double>(c);
            if (c > 0)
                ahi = std::min(ahi, static_cast<std::int64_t>(std::floor(edge)));
            else
                alo = std::max(alo, static_cast<std::int64_t>(std::ceil(edge)));
        }
        for (std::int64_t a = first_geq(alo, 1, n); a <= ahi; a += n) {
            if (std::gcd(a, m) != 1) continue;
            const std::int64_t s = c2 + a * a;
            const auto lim = static_cast<std::int64_t>(
                static_cast<__int128>(qi) * c2 / s);
            const std::int64_t dmax = isqrt(lim - c2);
            if (dmax < 0) continue;
            total += count_in_progression(-dmax, dmax, mod_inverse(a, m), m);
        }
        return total;
    }
    const double x0 = ball.z0.x;
    const double y0 = ball.z0.y;
    const double qsq = ball.norm_bound_sq;
    const double cc = static_cast<double>(c) * y0;
    const double csq = cc * cc;
    if (!(csq <= qsq)) return 0;
    const double w = std::sqrt(qsq - csq);
    const double center = static_cast<double>(c) * x0;
    double alo_f = center - w;
    double ahi_f = center + w;
    if (cut) {
        if (c > 0)
            ahi_f = std::min(ahi_f, center + spec.beta * cc);
        else
            alo_f = std::max(alo_f, center + spec.beta * cc);
    }
    const auto ahi = static_cast<std::int64_t>(std::floor(ahi_f));
    for (std::int64_t a = first_geq(static_cast<std::int64_t>(std::ceil(alo_f)), 1, n);
         a <= ahi; a += n) {
        const double ca = static_cast<double>(a) - center;
        const double ssq = csq + ca * ca;
        if (!(ssq <= qsq)) continue;
        if (std::gcd(a, m) != 1) continue;
        const double wd = std::abs(cc) * std::sqrt(qsq / ssq - 1.0);
        const auto dlo = static_cast<std::int64_t>(std::ceil(-center - wd));
        const auto dhi = static_cast<std::int64_t>(std::floor(-center + wd));
        total += count_in_progression(dlo, dhi, mod_inverse(a, m), m);
    }
    return total;
}

}  // namespace detail

inline std::int64_t count_sector(const SectorSpec& spec, int workers = 1) {
    validate(spec.ball);
    if (std::isinf(spec.beta) && spec.beta < 0) return 0;
    workers = std::max(1, workers);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(workers), 0);
    detail::parallel_over_c(detail::c_values(spec.ball), workers,
                            [&](int wkr, std::int64_t c) {
                                counts[static_cast<std::size_t>(wkr)] +=
                                    detail::sector_count_c(spec, c);
                            });
    std::int64_t total = 0;
    for (const auto v : counts) total += v;
    return total;
}

}  // namespace hypangle
