#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hypangle/hypangle.hpp"

namespace {

using namespace hypangle;

struct Harness {
    std::mt19937_64 rng;
    bool fault_xi_zero = false;
    int workers = 1;
    int checks = 0;
    int failures = 0;

    double xi_eval(const NormalizedTarget& t, double w) {
        double v = xi(t, w);
        if (fault_xi_zero && w == 0.0) v += 0.01;
        return v;
    }

    void check(const std::string& name, bool pass, const std::string& detail = "") {
        ++checks;
        if (!pass) ++failures;
        std::cout << (pass ? "ok " : "FAIL ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << '\n';
    }

    void close(const std::string& name, double got, double want, double tol) {
        std::ostringstream os;
        os << "got " << got << ", want " << want << " within " << tol;
        check(name, std::abs(got - want) <= tol, os.str());
    }

    void most(const std::string& name, double got, double bound) {
        std::ostringstream os;
        os << "got " << got << ", bound " << bound;
        check(name, got <= bound, os.str());
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    std::int64_t randint(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    }
};

Point mobius(const GroupElement& g, const Point& z) {
    const std::complex<double> w(z.x, z.y);
    const std::complex<double> r =
        (static_cast<double>(g.a) * w + static_cast<double>(g.b)) /
        (static_cast<double>(g.c) * w + static_cast<double>(g.d));
    return {r.real(), r.imag()};
}

// Random element of the level-N congruence subgroup: a short word in the
// two parabolic generators.
GroupElement random_element(Harness& h, std::int64_t level) {
    GroupElement g;
    const std::int64_t len = h.randint(1, 5);
    for (std::int64_t i = 0; i < len; ++i) {
        const std::int64_t k = h.randint(-3, 3);
        const GroupElement step = h.randint(0, 1) == 0
                                      ? GroupElement{1, k * level, 0, 1}
                                      : GroupElement{1, 0, k * level, 1};
        g = g * step;
    }
    return g;
}

double circular_gap(double a, double b) {
    const double gap = std::abs(a - b);
    return std::min(gap, pi - gap);
}

bool tuple_less(const GroupElement& l, const GroupElement& r) {
    return std::tie(l.a, l.b, l.c, l.d) < std::tie(r.a, r.b, r.c, r.d);
}

// Reference enumeration: plain quadruple loop over entry boxes with the
// membership conditions checked directly.
std::vector<GroupElement> brute_ball(const BallSpec& spec) {
    const double q = std::sqrt(spec.norm_bound_sq);
    const auto cmax = static_cast<std::int64_t>(std::floor(q / spec.z0.y));
    const auto admax = static_cast<std::int64_t>(
        std::ceil(q + static_cast<double>(cmax) * std::abs(spec.z0.x)));
    const auto bmax = static_cast<std::int64_t>(std::ceil(
        q * spec.z0.y + 2.0 * std::abs(spec.z0.x) * static_cast<double>(admax)));
    std::vector<GroupElement> out;
    for (std::int64_t c = -cmax; c <= cmax; ++c)
        for (std::int64_t a = -admax; a <= admax; ++a)
            for (std::int64_t d = -admax; d <= admax; ++d)
                for (std::int64_t b = -bmax; b <= bmax; ++b) {
                    if (a * d - b * c != 1) continue;
                    const GroupElement g{a, b, c, d};
                    if (!g.is_level(spec.level)) continue;
                    if (conjugate_entries(g, spec.z0).norm_sq() <= spec.norm_bound_sq)
                        out.push_back(g);
                }
    std::sort(out.begin(), out.end(), tuple_less);
    return out;
}

// Reference sector count; the integer route mirrors the exact-lattice
// membership test, the double route evaluates the defining inequality.
std::int64_t brute_sector(const SectorSpec& spec) {
    const BallSpec& ball = spec.ball;
    if (std::isinf(spec.beta) && spec.beta < 0) return 0;
    const double q = std::sqrt(ball.norm_bound_sq);
    const auto cmax = static_cast<std::int64_t>(std::floor(q / ball.z0.y));
    const auto admax = static_cast<std::int64_t>(
        std::ceil(q + static_cast<double>(cmax) * std::abs(ball.z0.x)));
    const bool exact = ball.z0.x == 0.0 && ball.z0.y == 1.0 &&
                       ball.norm_bound_sq == std::floor(ball.norm_bound_sq);
    std::int64_t total = 0;
    for (std::int64_t c = -cmax; c <= cmax; ++c) {
        if (c == 0) continue;
        for (std::int64_t a = -admax; a <= admax; ++a)
            for (std::int64_t d = -admax; d <= admax; ++d) {
                if ((a * d - 1) % c != 0) continue;
                const GroupElement g{a, (a * d - 1) / c, c, d};
                if (!g.is_level(ball.level)) continue;
                const ConjugatedEntries e = conjugate_entries(g, ball.z0);
                if (!(e.a / e.c <= spec.beta)) continue;
                if (exact) {
                    const auto qi = static_cast<std::int64_t>(ball.norm_bound_sq);
                    const __int128 lhs =
                        static_cast<__int128>(c * c + a * a) * (c * c + d * d);
                    const __int128 rhs = static_cast<__int128>(qi) * (c * c);
                    if (lhs <= rhs) ++total;
                } else {
                    const double mod =
                        (e.c * e.c + e.a * e.a) * (1.0 + e.d * e.d / (e.c * e.c));
                    if (mod <= ball.norm_bound_sq) ++total;
                }
            }
    }
    return total;
}

// ---------------------------------------------------------------- suites

void suite_geometry(Harness& h) {
    h.close("geometry/distance-identity", hyperbolic_distance({0, 1}, {0, 1}), 0.0,
            1e-15);
    h.close("geometry/distance-i-2i", hyperbolic_distance({0, 1}, {0, 2}),
            std::log(2.0), 1e-12);
    bool sym = true;
    for (int i = 0; i < 200; ++i) {
        const Point z{h.uniform(-5, 5), h.uniform(0.1, 5)};
        const Point w{h.uniform(-5, 5), h.uniform(0.1, 5)};
        if (hyperbolic_distance(z, w) != hyperbolic_distance(w, z)) sym = false;
    }
    h.check("geometry/distance-symmetric", sym);

    double det_gap = 0.0, norm_gap = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::int64_t level = h.randint(1, 4);
        const GroupElement g = random_element(h, level);
        const Point z0{h.uniform(-2, 2), h.uniform(0.2, 3)};
        const ConjugatedEntries e = conjugate_entries(g, z0);
        det_gap = std::max(det_gap, std::abs(e.a * e.d - e.b * e.c - 1.0) /
                                        std::max(1.0, e.norm_sq()));
        const double via_norm = std::acosh(std::max(1.0, e.norm_sq() / 2.0));
        const double direct = hyperbolic_distance(z0, mobius(g, z0));
        norm_gap = std::max(norm_gap,
                            std::abs(via_norm - direct) / std::max(1.0, direct));
    }
    h.most("geometry/conjugated-determinant", det_gap, 1e-12);
    h.most("geometry/norm-vs-distance", norm_gap, 1e-9);

    const Point z0{0.3, 1.7};
    const Point z1{-0.4, 0.9};
    const auto angles = collect_angles({1, z0, 60.0}, z1);
    double worst = 0.0;
    std::int64_t compared = 0;
    bool sign_ok = true;
    for (const auto& s : angles.samples) {
        const auto ref = angle_oracle(s.gamma, z0, z1);
        if (!ref) continue;
        ++compared;
        worst = std::max(worst, circular_gap(s.theta, *ref));
        const GroupElement neg{-s.gamma.a, -s.gamma.b, -s.gamma.c, -s.gamma.d};
        const auto flipped = angle(neg, z0, z1);
        if (!flipped || *flipped != s.theta) sign_ok = false;
    }
    {
        std::ostringstream os;
        os << "compared " << compared << " elements, worst gap " << worst;
        h.check("geometry/angle-matches-oracle", compared > 100 && worst <= 1e-9,
                os.str());
    }
    h.check("geometry/angle-sign-invariance", sign_ok);

    const NormalizedTarget t = normalize_target({0, 1}, {0, 2});
    h.check("geometry/normalized-target", t.x == 0.0 && t.y == 2.0);
    h.check("geometry/angle-undefined-at-match",
            !angle(GroupElement{}, {0, 1}, {0, 1}).has_value());
}

void suite_membership(Harness& h) {
    bool closure = true, inverse = true, congruence = true;
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t level = h.randint(1, 6);
        const GroupElement g = random_element(h, level);
        const GroupElement k = random_element(h, level);
        if (!(g * k).is_level(level)) closure = false;
        if (!g.inverse().is_level(level)) inverse = false;
        const bool direct = (g.a - 1) % level == 0 && (g.d - 1) % level == 0 &&
                            g.b % level == 0 && g.c % level == 0;
        if (g.is_level(level) != direct) congruence = false;
        if (level > 1) {
            const GroupElement off{g.a, g.b + 1, g.c, g.d};
            if (off.is_level(level)) congruence = false;
        }
    }
    h.check("membership/closure", closure);
    h.check("membership/inverse", inverse);
    h.check("membership/congruence-definition", congruence);

    bool det_guard = false;
    try {
        make_element(1, 1, 1, 1);
    } catch (const std::invalid_argument&) {
        det_guard = true;
    }
    h.check("membership/determinant-guard", det_guard);

    bool enumerated_ok = true;
    for (const std::int64_t level : {1, 2, 3}) {
        const BallSpec spec{level, {0.2, 0.8}, 40.0};
        const auto elements = collect_ball(spec);
        for (const auto& el : elements) {
            if (el.gamma.det() != 1 || !el.gamma.is_level(level) ||
                !(el.entries.norm_sq() <= spec.norm_bound_sq))
                enumerated_ok = false;
        }
    }
    h.check("membership/enumerated-elements", enumerated_ok);
}

void suite_ball_small(Harness& h) {
    const std::vector<Point> bases{{0.0, 1.0}, {1.0, 2.0}};
    for (const std::int64_t level : {1, 2, 3})
        for (const auto& z0 : bases)
            for (const double qsq : {2.0, 6.5, 12.0}) {
                const BallSpec spec{level, z0, qsq};
                const auto reference = brute_ball(spec);
                auto got_elements = collect_ball(spec);
                std::vector<GroupElement> got;
                got.reserve(got_elements.size());
                for (const auto& el : got_elements) got.push_back(el.gamma);
                std::sort(got.begin(), got.end(), tuple_less);
                std::ostringstream name;
                name << "ball-small/set-equality-N" << level << "-z" << z0.x << ","
                     << z0.y << "-Q2=" << qsq;
                std::ostringstream os;
                os << "brute " << reference.size() << ", enumerated " << got.size();
                h.check(name.str(), got == reference, os.str());
            }

    const BallSpec probe{2, {0.0, 1.0}, 80.0};
    const auto single = collect_ball(probe, 1);
    bool workers_equal = true;
    for (const int w : {2, 3, 7}) {
        const auto multi = collect_ball(probe, w);
        if (multi.size() != single.size()) {
            workers_equal = false;
            continue;
        }
        for (std::size_t i = 0; i < multi.size(); ++i)
            if (!(multi[i].gamma == single[i].gamma)) workers_equal = false;
        if (count_ball(probe, w) != static_cast<std::int64_t>(single.size()))
            workers_equal = false;
    }
    h.check("ball-small/worker-merge-identical", workers_equal);

    std::int64_t visited = 0;
    enumerate_ball(probe, [&visited](const GroupElement&, const ConjugatedEntries&) {
        ++visited;
    });
    h.check("ball-small/count-matches-enumeration",
            visited == count_ball(probe) &&
                visited == static_cast<std::int64_t>(single.size()));

    // The integer and floating routes must agree away from boundary ties.
    const double qsq = 52.0;
    const auto exact_count = count_ball({1, {0.0, 1.0}, qsq});
    const auto float_count = count_ball({1, {0.0, 1.0}, qsq + 1e-9});
    std::ostringstream os;
    os << "exact " << exact_count << ", float " << float_count;
    h.check("ball-small/exact-vs-float-route", exact_count == float_count, os.str());
}

void suite_ball_values(Harness& h) {
    h.check("ball-values/stabilizer-level1", count_ball({1, {0, 1}, 2.0}) == 4);
    h.check("ball-values/stabilizer-level2", count_ball({2, {0, 1}, 2.0}) == 2);
    h.check("ball-values/frozen-Q2-4", count_ball({1, {0, 1}, 4.0}) == 20);
    h.check("ball-values/frozen-Q2-10", count_ball({1, {0, 1}, 10.0}) == 52);

    bool monotone = true;
    for (const Point z0 : {Point{0.0, 1.0}, Point{0.5, 1.25}}) {
        std::int64_t prev = -1;
        for (int q = 2; q <= 30; ++q) {
            const auto n = count_ball({1, z0, static_cast<double>(q)});
            if (n < prev) monotone = false;
            prev = n;
        }
    }
    h.check("ball-values/count-monotone-in-bound", monotone);

    const auto coarse = brute_ball({1, {0, 1}, 60.0});
    const auto fine = brute_ball({2, {0, 1}, 60.0});
    const auto finer = brute_ball({4, {0, 1}, 60.0});
    auto subset = [](const std::vector<GroupElement>& inner,
                     const std::vector<GroupElement>& outer) {
        return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end(),
                             tuple_less);
    };
    h.check("ball-values/level-divisibility-nesting",
            subset(fine, coarse) && subset(finer, fine));

    // gamma -> gamma^{-1} preserves the norm at base point i.
    std::vector<std::int64_t> norms, inverse_norms;
    for (const auto& el : collect_ball({3, {0, 1}, 90.0})) {
        const auto& g = el.gamma;
        norms.push_back(g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d);
        const auto inv = g.inverse();
        inverse_norms.push_back(inv.a * inv.a + inv.b * inv.b + inv.c * inv.c +
                                inv.d * inv.d);
    }
    std::sort(norms.begin(), norms.end());
    std::sort(inverse_norms.begin(), inverse_norms.end());
    h.check("ball-values/inverse-norm-multiset", norms == inverse_norms);

    double worst = 0.0;
    const auto sample = collect_ball({1, {0.3, 2.2}, 1000.0});
    const std::size_t stride = std::max<std::size_t>(1, sample.size() / 1000);
    for (std::size_t i = 0; i < sample.size(); i += stride) {
        const auto& el = sample[i];
        const double direct =
            hyperbolic_distance({0.3, 2.2}, mobius(el.gamma, {0.3, 2.2}));
        const double via = orbit_distance(el.gamma, {0.3, 2.2});
        worst = std::max(worst, std::abs(via - direct) / std::max(1.0, direct));
    }
    h.most("ball-values/orbit-distance-agreement", worst, 1e-9);
}

void suite_sector(Harness& h) {
    const double inf = std::numeric_limits<double>::infinity();
    h.check("sector/frozen-Q2-2", count_sector({{1, {0, 1}, 2.0}, inf}) == 10);
    for (const std::int64_t level : {1, 2})
        for (const Point z0 : {Point{0.0, 1.0}, Point{0.3, 0.7}})
            for (const double qsq : {20.0, 55.5}) {
                for (const double beta : {-2.0, -0.5, 0.0, 1.0, 3.0, inf}) {
                    const SectorSpec spec{{level, z0, qsq}, beta};
                    const auto got = count_sector(spec);
                    const auto want = brute_sector(spec);
                    std::ostringstream name;
                    name << "sector/brute-N" << level << "-z" << z0.x << "," << z0.y
                         << "-Q2=" << qsq << "-beta=" << beta;
                    std::ostringstream os;
                    os << "got " << got << ", brute " << want;
                    h.check(name.str(), got == want, os.str());
                }
            }
    h.check("sector/minus-infinity-empty",
            count_sector({{1, {0, 1}, 400.0}, -inf}) == 0);

    bool monotone = true;
    std::int64_t prev = -1;
    for (const double beta : {-inf, -3.0, -1.0, 0.0, 1.0, 3.0, inf}) {
        const auto n = count_sector({{1, {0.2, 1.1}, 300.0}, beta});
        if (n < prev) monotone = false;
        prev = n;
    }
    h.check("sector/monotone-in-beta", monotone);

    const double q = 300.0;
    const auto n_inf = count_sector({{1, {0, 1}, q * q}, inf}, h.workers);
    const double main_inf = sector_main_term(1, inf, q);
    h.most("sector/main-term-beta-inf",
           std::abs(static_cast<double>(n_inf) - main_inf) / main_inf, 0.05);
    h.check("sector/main-term-inf-matches-ball",
            sector_main_term(2, inf, q) == ball_main_term_from_norm(2, q * q));

    const double qb = 1000.0;
    const auto half = count_sector({{1, {0, 1}, qb * qb}, 0.0}, h.workers);
    const auto full = count_sector({{1, {0, 1}, qb * qb}, inf}, h.workers);
    h.close("sector/beta-zero-halves",
            static_cast<double>(half) / static_cast<double>(full), 0.5, 0.02);
}

void suite_boxes(Harness& h) {
    bool brute_ok = true;
    for (int i = 0; i < 60 && brute_ok; ++i) {
        CongruenceBox box;
        box.level = std::vector<std::int64_t>{1, 2, 3, 4, 6}[static_cast<std::size_t>(
            h.randint(0, 4))];
        box.c = h.randint(1, 40) * (h.randint(0, 1) == 0 ? 1 : -1);
        box.a_lo = h.randint(-200, 200);
        box.a_hi = box.a_lo + h.randint(0, 300);
        box.d_lo = h.randint(-200, 200);
        box.d_hi = box.d_lo + h.randint(0, 300);
        const std::int64_t m = box.level * std::abs(box.c);
        std::int64_t want = 0;
        for (std::int64_t a = box.a_lo; a <= box.a_hi; ++a) {
            if ((((a - 1) % box.level) + box.level) % box.level != 0) continue;
            for (std::int64_t d = box.d_lo; d <= box.d_hi; ++d) {
                if ((((d - 1) % box.level) + box.level) % box.level != 0) continue;
                if ((((a * d - 1) % m) + m) % m == 0) ++want;
            }
        }
        if (count_congruence_box(box) != want) brute_ok = false;
    }
    h.check("boxes/brute-agreement", brute_ok);

    bool phi_ok = true;
    for (std::int64_t c = 2; c <= 300; ++c) {
        const CongruenceBox box{c, 1, 0, c - 1, 0, c - 1};
        const std::int64_t count = count_congruence_box(box);
        const Rational main = phi_factor(c, 1) * c;
        if (count != euler_phi(c) || main.denominator() != 1 ||
            main.numerator() != count)
            phi_ok = false;
    }
    h.check("boxes/full-box-phi-identity", phi_ok);

    double worst = 0.0;
    bool band_ok = true;
    for (const std::int64_t level : {1, 2, 3, 5})
        for (const std::int64_t c : {503, 1009, 2003, 2048, 3000}) {
            const std::int64_t len = c / 2;
            CongruenceBox box;
            box.level = level;
            box.c = c;
            box.a_lo = h.randint(-c, c);
            box.a_hi = box.a_lo + len - 1;
            box.d_lo = h.randint(-c, c);
            box.d_hi = box.d_lo + len - 1;
            const double gap = std::abs(static_cast<double>(count_congruence_box(box)) -
                                        prop1_main_term(box));
            const double band = 50.0 * std::sqrt(static_cast<double>(c)) *
                                std::log(static_cast<double>(c));
            worst = std::max(worst, gap / band);
            if (gap > band) band_ok = false;
        }
    {
        std::ostringstream os;
        os << "worst gap/band " << worst;
        h.check("boxes/main-term-band", band_ok, os.str());
    }
}

void suite_kloosterman(Harness& h) {
    const auto s115 = kloosterman(1, 1, 5);
    h.close("kloosterman/s-1-1-5", s115.real(), (3.0 - std::sqrt(5.0)) / 2.0, 1e-12);
    h.most("kloosterman/s-1-1-5-imag", std::abs(s115.imag()), 1e-12);
    h.close("kloosterman/s-1-1-2", kloosterman(1, 1, 2).real(), 1.0, 1e-12);
    h.check("kloosterman/q-1-unit", kloosterman(3, 7, 1) == std::complex<double>(1, 0));

    bool phi_ok = true, ramanujan_ok = true;
    for (std::int64_t q = 1; q <= 50; ++q) {
        if (std::abs(kloosterman(0, 0, q).real() -
                     static_cast<double>(euler_phi(q))) > 1e-9)
            phi_ok = false;
        for (std::int64_t n = 1; n <= 10; ++n) {
            double want = 0.0;
            for (std::int64_t d = 1; d <= q; ++d)
                if (q % d == 0 && n % d == 0)
                    want += static_cast<double>(d * moebius(q / d));
            if (std::abs(kloosterman(0, n, q).real() - want) > 1e-9)
                ramanujan_ok = false;
        }
    }
    h.check("kloosterman/s-0-0-phi", phi_ok);
    h.check("kloosterman/ramanujan-sums", ramanujan_ok);

    bool symmetric = true, real_ok = true;
    for (std::int64_t q = 1; q <= 200; ++q)
        for (std::int64_t m = -5; m <= 5; ++m)
            for (std::int64_t n = -5; n <= 5; ++n) {
                const auto lhs = kloosterman(m, n, q);
                if (std::abs(lhs.imag()) > 1e-9 * static_cast<double>(q))
                    real_ok = false;
                const auto rhs = kloosterman(n, m, q);
                if (std::abs(lhs.real() - rhs.real()) > 1e-9 * static_cast<double>(q))
                    symmetric = false;
            }
    h.check("kloosterman/symmetry", symmetric);
    h.check("kloosterman/real-valued", real_ok);

    bool partition_ok = true;
    for (const std::int64_t q : {12, 13, 30}) {
        const auto whole = kloosterman(2, 3, q);
        const auto part1 = kloosterman_incomplete(2, 3, q, 0, q / 3);
        const auto part2 = kloosterman_incomplete(2, 3, q, q / 3 + 1, q - 1);
        if (std::abs(whole.real() - part1.real() - part2.real()) > 1e-10 ||
            std::abs(whole.imag() - part1.imag() - part2.imag()) > 1e-10)
            partition_ok = false;
    }
    h.check("kloosterman/incomplete-partition", partition_ok);

    const WeilReport report = weil_certificate(300, 5, 5);
    {
        std::ostringstream os;
        os << "checked " << report.checked << ", max ratio " << report.max_ratio
           << " at (" << report.argmax_m << "," << report.argmax_n << ";"
           << report.argmax_q << ")";
        h.check("kloosterman/weil-bound", report.violations == 0, os.str());
    }
    h.most("kloosterman/weil-max-ratio", report.max_ratio, 1.0);
}

void suite_xi(Harness& h) {
    double endpoint_gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const NormalizedTarget t{h.uniform(-8, 8), h.uniform(0.05, 8)};
        endpoint_gap = std::max(endpoint_gap, std::abs(h.xi_eval(t, -half_pi)));
        endpoint_gap =
            std::max(endpoint_gap, std::abs(h.xi_eval(t, half_pi) - 1.0));
        endpoint_gap = std::max(endpoint_gap, std::abs(h.xi_eval(t, -2.0)));
        endpoint_gap = std::max(endpoint_gap, std::abs(h.xi_eval(t, 2.0) - 1.0));
    }
    h.most("xi/endpoint-values", endpoint_gap, 1e-12);

    bool monotone = true;
    for (int i = 0; i < 50 && monotone; ++i) {
        const NormalizedTarget t{h.uniform(-4, 4), h.uniform(0.1, 4)};
        double prev = -1.0;
        for (int k = 0; k <= 10000; ++k) {
            const double w = -half_pi + pi * static_cast<double>(k) / 10000.0;
            const double v = h.xi_eval(t, w);
            if (v + 1e-15 < prev) monotone = false;
            prev = v;
        }
    }
    h.check("xi/monotone", monotone);

    double continuity_gap = 0.0;
    for (int i = 0; i < 200; ++i) {
        const NormalizedTarget t{h.uniform(-4, 4), h.uniform(0.1, 4)};
        const double at = h.xi_eval(t, 0.0);
        continuity_gap = std::max(continuity_gap, std::abs(h.xi_eval(t, 1e-8) - at));
        continuity_gap = std::max(continuity_gap, std::abs(h.xi_eval(t, -1e-8) - at));
    }
    h.most("xi/continuity-at-zero", continuity_gap, 1e-6);

    // Uniform case: base point equal to target reduces to (omega/pi) + 1/2.
    const NormalizedTarget unit{0.0, 1.0};
    double uniform_gap = 0.0;
    for (int k = 1; k < 64; ++k) {
        const double w = -half_pi + pi * static_cast<double>(k) / 64.0;
        uniform_gap =
            std::max(uniform_gap, std::abs(xi(unit, w) - (w / pi + 0.5)));
    }
    h.most("xi/uniform-case", uniform_gap, 1e-12);
}

void suite_density(Harness& h) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Point z0{h.uniform(-2, 2), h.uniform(0.3, 3)};
        const Point z1{h.uniform(-2, 2), h.uniform(0.3, 3)};
        const TheoryContext ctx = make_context(1, z0, z1);
        for (int k = 0; k <= 60; ++k) {
            const double t = -half_pi + 1e-3 + (pi - 2e-3) * k / 60.0;
            if (std::abs(t) < 1e-3) continue;
            const double hstep = 1e-5;
            const double fd =
                (xi(ctx.target, t + hstep) - xi(ctx.target, t - hstep)) /
                (2.0 * hstep);
            worst = std::max(worst, std::abs(fd - density_rho(ctx, t) / pi));
        }
    }
    h.most("density/derivative-identity", worst, 1e-5);

    double integral_gap = 0.0;
    bool positive = true;
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (int i = 0; i < 20; ++i) {
        const Point z0{h.uniform(-2, 2), h.uniform(0.3, 3)};
        const Point z1{h.uniform(-2, 2), h.uniform(0.3, 3)};
        const TheoryContext ctx = make_context(1, z0, z1);
        const double total = integrator.integrate(
            [&ctx](double t) { return density_rho(ctx, t); }, -half_pi, half_pi,
            1e-12);
        integral_gap = std::max(integral_gap, std::abs(total - pi));
        for (int k = 0; k <= 50; ++k) {
            const double t = -half_pi + pi * k / 50.0;
            if (!(density_rho(ctx, t) > 0.0)) positive = false;
        }
    }
    h.most("density/integral-pi", integral_gap, 1e-8);
    h.check("density/positive", positive);

    const TheoryContext ctx = make_context(1, {0, 1}, {0, 2});
    h.close("density/rho-i-2i-at-zero", density_rho(ctx, 0.0), 1.25, 1e-12);
}

void suite_rationality(Harness& h) {
    // pi^2 C_N / N^3 == 6 / index: with C_N = (6/pi^2) z the transcendental
    // part cancels and the claim is the rational identity z * index == N^3.
    bool exact_ok = true;
    for (std::int64_t level = 1; level <= 100; ++level) {
        const Rational zeta = coprime_zeta_factor(level);
        if (zeta * index_gamma_n(level) != Rational(level * level * level))
            exact_ok = false;
    }
    h.check("rationality/main-term-constant", exact_ok);

    const std::vector<std::int64_t> known{1, 6, 24, 48, 120, 144};
    bool index_ok = true;
    for (std::size_t i = 0; i < known.size(); ++i)
        if (index_gamma_n(static_cast<std::int64_t>(i) + 1) != known[i])
            index_ok = false;
    h.check("rationality/index-values", index_ok);

    bool series_ok = true;
    for (const std::int64_t level : {1, 2, 6}) {
        double partial = 0.0;
        for (std::int64_t n = 1; n <= 1000000; ++n) {
            if (std::gcd(n, level) != 1) continue;
            const int mu = moebius(n);
            if (mu != 0)
                partial += static_cast<double>(mu) /
                           (static_cast<double>(n) * static_cast<double>(n));
        }
        const double closed = c_n(level).value;
        if (std::abs(partial - closed) > 1e-6) series_ok = false;
    }
    h.check("rationality/moebius-series", series_ok);
}

void suite_moebius(Harness& h) {
    const double q = 2000.0;
    for (const std::int64_t level : {1, 2}) {
        const auto linear = moebius_weighted_sum(
            level, 1.0, q, [](double c) { return c; }, false);
        h.most("moebius/linear-weight-N" + std::to_string(level),
               std::abs(linear.sum - linear.main_term) / linear.main_term, 0.01);
        const auto circle = moebius_weighted_sum(
            level, 1.0, q, [q](double c) { return std::sqrt(q * q - c * c); },
            false);
        h.most("moebius/circle-weight-N" + std::to_string(level),
               std::abs(circle.sum - circle.main_term) / circle.main_term, 0.01);
        const auto multiples = moebius_weighted_sum(
            level, 1.0, q, [](double c) { return c; }, true);
        h.most("moebius/multiples-N" + std::to_string(level),
               std::abs(multiples.sum - multiples.main_term) / multiples.main_term,
               0.01);
    }
}

void suite_intervals(Harness& h) {
    double coherence = 0.0;
    bool predicate_ok = true;
    for (int i = 0; i < 2000; ++i) {
        const double y = h.uniform(0.1, 4.0);
        const double lam = h.uniform(-6.0, 6.0);
        const IntervalUnion s = build_s(y, lam);
        if (lam > 1e-9) {
            const double root = 1.0 + std::sqrt(1.0 + lam * lam);
            coherence = std::max(
                coherence, std::abs((root / lam) * (lam / root) - 1.0));
        }
        for (int k = 0; k < 40; ++k) {
            const double u = h.uniform(-10.0, 10.0);
            if (std::abs(std::abs(u) - y) < 1e-6) continue;
            if (std::abs(u * u - y * y) < 1e-9) continue;
            const double lhs = 2.0 * y * u / (y * y - u * u);
            if (std::abs(lhs - lam) < 1e-9) continue;
            if ((lhs < lam) != s.contains(u)) predicate_ok = false;
        }
    }
    h.most("intervals/root-coherence", coherence, 1e-12);
    h.check("intervals/predicate-equivalence", predicate_ok);

    const IntervalUnion example = build_s(1.0, 1.0);
    const auto parts = example.parts();
    const double r2 = std::sqrt(2.0);
    const bool shape =
        parts.size() == 3 && std::isinf(parts[0].lo) &&
        std::abs(parts[0].hi + 1.0 + r2) < 1e-12 &&
        std::abs(parts[1].lo + 1.0) < 1e-12 &&
        std::abs(parts[1].hi - (r2 - 1.0)) < 1e-12 &&
        std::abs(parts[2].lo - 1.0) < 1e-12 && std::isinf(parts[2].hi);
    h.check("intervals/unit-example-branches", shape);

    const IntervalUnion zero = build_s(1.5, 0.0);
    h.check("intervals/lambda-zero-branches",
            zero.parts().size() == 2 && zero.contains(-1.0) && !zero.contains(0.5) &&
                zero.contains(2.0) && !zero.contains(-2.0));
}

void suite_stats(Harness& h) {
    const Ecdf e({3.0, 1.0, 2.0});
    h.check("stats/ecdf-basic", e(0.5) == 0.0 && e(1.0) == 1.0 / 3.0 &&
                                    e(2.5) == 2.0 / 3.0 && e(9.0) == 1.0);

    // Quantile construction: samples at Xi^{-1}(k/(n+1)) give KS = 1/(n+1).
    const NormalizedTarget t{0.7, 1.3};
    const std::size_t n = 99;
    std::vector<double> qs;
    for (std::size_t k = 1; k <= n; ++k) {
        const double want = static_cast<double>(k) / (n + 1.0);
        double lo = -half_pi, hi = half_pi;
        for (int it = 0; it < 200; ++it) {
            const double mid = (lo + hi) / 2.0;
            (xi(t, mid) < want ? lo : hi) = mid;
        }
        qs.push_back((lo + hi) / 2.0);
    }
    const double ks = ks_distance(Ecdf(qs), [&t](double w) { return xi(t, w); });
    h.close("stats/ks-quantile-construction", ks, 1.0 / (n + 1.0), 1e-9);

    std::vector<double> uniform;
    for (int k = 0; k < 100; ++k) uniform.push_back((k + 0.5) / 100.0);
    const auto chi = chi_square(uniform, 0.0, 1.0, 2,
                                [](double lo, double hi) { return hi - lo; });
    h.check("stats/chi-square-uniform",
            chi.bins.size() == 2 && chi.bins[0].observed == 50 &&
                chi.bins[1].observed == 50 && chi.statistic == 0.0 &&
                chi.used_bins == 2);

    std::vector<double> lump(100, 0.25);
    const auto chi2 = chi_square(lump, 0.0, 1.0, 2,
                                 [](double lo, double hi) { return hi - lo; });
    h.close("stats/chi-square-lump", chi2.statistic, 100.0, 1e-12);

    const auto chi3 = chi_square(uniform, 0.0, 1.0, 40,
                                 [](double lo, double hi) { return hi - lo; });
    h.check("stats/chi-square-thin-bins-dropped",
            chi3.dropped_bins == 40 && chi3.used_bins == 0);
}

void suite_convergence(Harness& h) {
    const TheoryContext ctx = make_context(1, {0, 1}, {0, 1});
    const auto degenerate = convergence_table(ctx, {0.0}, h.workers);
    h.check("convergence/stabilizer-row",
            degenerate.size() == 1 && degenerate[0].count == 4 &&
                degenerate[0].undefined_count == 4 &&
                std::isnan(degenerate[0].ks));

    const auto rows = convergence_table(ctx, {6.0, 8.0}, h.workers);
    bool counts_match = true;
    for (const auto& row : rows) {
        const BallSpec spec{1, {0, 1}, 2.0 * std::cosh(row.radius)};
        if (row.count != count_ball(spec, h.workers)) counts_match = false;
    }
    h.check("convergence/count-cross-check", counts_match);
    h.most("convergence/rel-error-R8", rows[1].rel_error, 0.2);
    h.most("convergence/ks-R8", rows[1].ks, 0.05);
    h.check("convergence/ks-improves", rows[1].ks <= rows[0].ks * 1.5);
}

void suite_tables(Harness& h) {
    h.check("tables/format-trim", format_number(2.5000000) == "2.5" &&
                                      format_number(123456789.0) == "123456789" &&
                                      format_number(0.0) == "0");
    h.check("tables/format-sig-digits",
            format_number(3.14159265358979) == "3.14159265359");
    h.check("tables/format-small-positional",
            format_number(1e-7) == "0.0000001" &&
                format_number(-0.00025) == "-0.00025");
    h.check("tables/format-nan-inf", format_number(std::nan("")) == "nan" &&
                                         format_number(-INFINITY) == "-inf");

    Table t({"x", "note"});
    t.add_row({num_cell(1.5), str_cell("plain")});
    t.add_row({num_cell(std::nan("")), str_cell("a,b \"quoted\"")});
    const std::string csv = t.csv();
    h.check("tables/csv-shape",
            csv == "x,note\n1.5,plain\nnan,\"a,b \"\"quoted\"\"\"\n");
    const std::string json = t.json();
    h.check("tables/json-nan-string",
            json.find("\"x\":\"nan\"") != std::string::npos &&
                json.find("\"x\":1.5") != std::string::npos);

    JsonObject obj;
    obj.put_int("n", 42).put_num("v", 0.125).put_str("s", "hi").put_bool("ok", true);
    h.check("tables/json-object",
            obj.str() == "{\"n\":42,\"v\":0.125,\"s\":\"hi\",\"ok\":true}");
}

using Suite = void (*)(Harness&);

const std::vector<std::pair<std::string, Suite>>& suite_registry() {
    static const std::vector<std::pair<std::string, Suite>> reg{
        {"geometry", suite_geometry},
        {"membership", suite_membership},
        {"ball-small", suite_ball_small},
        {"ball-values", suite_ball_values},
        {"sector", suite_sector},
        {"boxes", suite_boxes},
        {"kloosterman", suite_kloosterman},
        {"xi", suite_xi},
        {"density", suite_density},
        {"rationality", suite_rationality},
        {"moebius", suite_moebius},
        {"intervals", suite_intervals},
        {"stats", suite_stats},
        {"convergence", suite_convergence},
        {"tables", suite_tables},
    };
    return reg;
}

}  // namespace

namespace tool {

std::vector<std::string> verify_suite_names() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suite_registry()) out.push_back(name);
    return out;
}

int run_verify(const VerifyConfig& cfg) {
    if (cfg.list_only) {
        for (const auto& name : verify_suite_names()) std::cout << name << '\n';
        return 0;
    }
    if (!cfg.fault.empty() && cfg.fault != "xi-zero-branch")
        throw std::invalid_argument("unknown fault: " + cfg.fault);

    std::vector<std::pair<std::string, Suite>> selected;
    if (cfg.suites.empty()) {
        selected = suite_registry();
    } else {
        for (const auto& want : cfg.suites) {
            bool found = false;
            for (const auto& entry : suite_registry())
                if (entry.first == want) {
                    selected.push_back(entry);
                    found = true;
                }
            if (!found) throw std::invalid_argument("unknown suite: " + want);
        }
    }

    hypangle::JsonObject report;
    report.put_str("command", "verify");
    report.put_int("seed", static_cast<std::int64_t>(cfg.seed));
    report.put_int("workers", cfg.workers);
    report.put_str("fault", cfg.fault);

    int checks = 0, failures = 0;
    std::vector<std::pair<std::string, bool>> results;
    for (const auto& [name, fn] : selected) {
        Harness h;
        h.rng.seed(cfg.seed);
        h.fault_xi_zero = cfg.fault == "xi-zero-branch";
        h.workers = cfg.workers;
        fn(h);
        checks += h.checks;
        failures += h.failures;
        results.emplace_back(name, h.failures == 0);
    }

    report.put_int("suites", static_cast<std::int64_t>(selected.size()));
    report.put_int("checks", checks);
    report.put_int("failures", failures);
    for (const auto& [name, pass] : results) {
        std::string key = "suite_" + name;
        for (auto& ch : key)
            if (ch == '-') ch = '_';
        report.put_bool(key, pass);
    }
    emit_summary(report, cfg.out);
    std::cout << (failures == 0 ? "PASS" : "FAIL") << " " << checks << " checks, "
              << failures << " failures\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace tool
