#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "hypangle/group.hpp"

using namespace hypangle;
using Catch::Approx;

namespace {

std::vector<GroupElement> sorted_elements(std::vector<BallElement> found) {
    std::vector<GroupElement> out;
    out.reserve(found.size());
    for (const auto& el : found) out.push_back(el.gamma);
    std::sort(out.begin(), out.end(), [](const GroupElement& l, const GroupElement& r) {
        return std::tie(l.a, l.b, l.c, l.d) < std::tie(r.a, r.b, r.c, r.d);
    });
    return out;
}

// Window-bounded quadruple loop; the conjugated-entry norm decides
// membership the same way the streaming enumerator does.
std::vector<GroupElement> brute_ball(const BallSpec& spec) {
    const double q = std::sqrt(spec.norm_bound_sq);
    const double x0 = spec.z0.x;
    const double y0 = spec.z0.y;
    const auto cmax = static_cast<std::int64_t>(std::floor(q / y0)) + 1;
    std::vector<GroupElement> out;
    for (std::int64_t c = -cmax; c <= cmax; ++c) {
        const double acenter = c * x0;
        const auto alo = static_cast<std::int64_t>(std::ceil(acenter - q)) - 1;
        const auto ahi = static_cast<std::int64_t>(std::floor(acenter + q)) + 1;
        const auto dlo = static_cast<std::int64_t>(std::ceil(-acenter - q)) - 1;
        const auto dhi = static_cast<std::int64_t>(std::floor(-acenter + q)) + 1;
        for (std::int64_t a = alo; a <= ahi; ++a)
            for (std::int64_t d = dlo; d <= dhi; ++d) {
                const double bcenter = d * x0 - (a - c * x0) * x0;
                const auto blo =
                    static_cast<std::int64_t>(std::ceil(bcenter - q * y0)) - 1;
                const auto bhi =
                    static_cast<std::int64_t>(std::floor(bcenter + q * y0)) + 1;
                for (std::int64_t b = blo; b <= bhi; ++b) {
                    const GroupElement g{a, b, c, d};
                    if (g.det() != 1) continue;
                    if (!g.is_level(spec.level)) continue;
                    if (conjugate_entries(g, spec.z0).norm_sq() <=
                        spec.norm_bound_sq)
                        out.push_back(g);
                }
            }
    }
    std::sort(out.begin(), out.end(), [](const GroupElement& l, const GroupElement& r) {
        return std::tie(l.a, l.b, l.c, l.d) < std::tie(r.a, r.b, r.c, r.d);
    });
    return out;
}

bool same_elements(const std::vector<GroupElement>& a,
                   const std::vector<GroupElement>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

}  // namespace

TEST_CASE("ball spec validation") {
    CHECK_THROWS_AS(validate(BallSpec{0, {0.0, 1.0}, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BallSpec{1, {0.0, -1.0}, 4.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BallSpec{1, {0.0, 1.0}, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(BallSpec{1, {0.0, 1.0}, 1e40}), std::overflow_error);
    CHECK_NOTHROW(validate(BallSpec{1, {0.0, 1.0}, 2.0}));
}

TEST_CASE("ball counts at reference points") {
    CHECK(count_ball({1, {0.0, 1.0}, 2.0}) == 4);
    CHECK(count_ball({1, {0.0, 1.0}, 4.0}) == 20);
    CHECK(count_ball({1, {0.0, 1.0}, 10.0}) == 52);
    CHECK(count_ball({2, {0.0, 1.0}, 10.0}) == 10);
}

TEST_CASE("counting, collecting, and streaming agree") {
    const BallSpec spec{2, {0.2, 0.8}, 40.0};
    const auto collected = collect_ball(spec);
    CHECK(count_ball(spec) == static_cast<std::int64_t>(collected.size()));
    std::int64_t streamed = 0;
    enumerate_ball(spec, [&](const GroupElement&, const ConjugatedEntries&) {
        ++streamed;
    });
    CHECK(streamed == static_cast<std::int64_t>(collected.size()));
}

TEST_CASE("enumeration equals the quadruple loop on small balls") {
    for (const std::int64_t level : {1, 2, 3})
        for (const Point z0 : {Point{0.0, 1.0}, Point{0.3, 1.1}}) {
            const BallSpec spec{level, z0, 30.0};
            CHECK(same_elements(sorted_elements(collect_ball(spec)),
                                brute_ball(spec)));
        }
}

TEST_CASE("fractional norm bounds take the float route to the same set") {
    // norms are integers at the lattice base point, so nothing lives
    // strictly between 52 and 52.5
    const auto exact = sorted_elements(collect_ball({1, {0.0, 1.0}, 52.0}));
    const auto fuzzy = sorted_elements(collect_ball({1, {0.0, 1.0}, 52.5}));
    CHECK(same_elements(exact, fuzzy));
}

TEST_CASE("worker count never changes the stream") {
    const BallSpec spec{2, {0.0, 1.0}, 80.0};
    const auto one = collect_ball(spec, 1);
    for (const int workers : {2, 3, 5, 8}) {
        const auto many = collect_ball(spec, workers);
        REQUIRE(many.size() == one.size());
        bool identical = true;
        for (std::size_t i = 0; i < one.size(); ++i)
            if (!(one[i].gamma == many[i].gamma)) identical = false;
        CHECK(identical);
    }
    CHECK(count_ball(spec, 7) == static_cast<std::int64_t>(one.size()));
}

TEST_CASE("levels nest") {
    const auto big = sorted_elements(collect_ball({1, {0.0, 1.0}, 60.0}));
    for (const std::int64_t level : {2, 3}) {
        const auto sub = sorted_elements(collect_ball({level, {0.0, 1.0}, 60.0}));
        CHECK(std::includes(big.begin(), big.end(), sub.begin(), sub.end(),
                            [](const GroupElement& l, const GroupElement& r) {
                                return std::tie(l.a, l.b, l.c, l.d) <
                                       std::tie(r.a, r.b, r.c, r.d);
                            }));
    }
}

TEST_CASE("collected entries match a fresh conjugation") {
    const BallSpec spec{1, {0.3, 2.2}, 100.0};
    for (const auto& el : collect_ball(spec)) {
        const auto fresh = conjugate_entries(el.gamma, spec.z0);
        CHECK(el.entries.a == fresh.a);
        CHECK(el.entries.b == fresh.b);
        CHECK(el.entries.c == fresh.c);
        CHECK(el.entries.d == fresh.d);
    }
}

TEST_CASE("angle collection splits defined and degenerate rays") {
    // only the four base-point stabilizers fit in the tightest ball, and
    // every one of them lands on the target
    const auto tight = collect_angles({1, {0.0, 1.0}, 2.0}, {0.0, 1.0}, 2);
    CHECK(tight.samples.empty());
    CHECK(tight.undefined_count == 4);

    const auto apart = collect_angles({1, {0.0, 1.0}, 4.0}, {0.0, 2.0}, 1);
    CHECK(apart.undefined_count == 0);
    CHECK(apart.samples.size() == 20);
    for (const auto& s : apart.samples) {
        CHECK(s.theta >= -half_pi);
        CHECK(s.theta <= half_pi);
        const auto direct = angle(s.gamma, {0.0, 1.0}, {0.0, 2.0});
        REQUIRE(direct.has_value());
        CHECK(s.theta == *direct);
        CHECK(s.dist ==
              Approx(orbit_distance(s.gamma, {0.0, 1.0})).margin(1e-12));
    }
}

TEST_CASE("sector count at the reference point") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(count_sector({{1, {0.0, 1.0}, 2.0}, inf}) == 10);
    CHECK(count_sector({{1, {0.0, 1.0}, 400.0}, -inf}) == 0);
}

TEST_CASE("sector counts are monotone in the slope cut") {
    const double inf = std::numeric_limits<double>::infinity();
    std::int64_t prev = -1;
    for (const double beta : {-inf, -2.0, -0.5, 0.0, 0.5, 2.0, inf}) {
        const std::int64_t n = count_sector({{1, {0.4, 0.9}, 250.0}, beta}, 2);
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("sector workers agree with the single-threaded count") {
    const SectorSpec spec{{2, {0.0, 1.0}, 900.0}, 1.5};
    const auto one = count_sector(spec, 1);
    CHECK(count_sector(spec, 4) == one);
    CHECK(count_sector(spec, 9) == one);
}
