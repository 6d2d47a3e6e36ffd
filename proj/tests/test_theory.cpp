#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hypangle/theory.hpp"

using namespace hypangle;
using Catch::Approx;

TEST_CASE("subgroup index by level") {
    CHECK(index_gamma_n(1) == 1);
    CHECK(index_gamma_n(2) == 6);
    CHECK(index_gamma_n(3) == 24);
    CHECK(index_gamma_n(4) == 48);
    CHECK(index_gamma_n(5) == 120);
    CHECK(index_gamma_n(6) == 144);
    CHECK_THROWS_AS(index_gamma_n(0), std::invalid_argument);
}

TEST_CASE("index times the coprime zeta factor is the level cubed") {
    for (std::int64_t n = 1; n <= 100; ++n)
        CHECK(coprime_zeta_factor(n) * Rational(index_gamma_n(n)) ==
              Rational(n * n * n));
}

TEST_CASE("density constant per level") {
    CHECK(c_n(1).rational_part == Rational(1));
    CHECK(c_n(1).value == Approx(6.0 / (pi * pi)).margin(1e-15));
    CHECK(c_n(2).rational_part == Rational(4, 3));
    CHECK(c_n(2).value == Approx(8.0 / (pi * pi)).margin(1e-15));
    CHECK(c_n(6).value == Approx(6.0 / (pi * pi) * 1.5).margin(1e-14));
}

TEST_CASE("context assembly") {
    const auto ctx = make_context(2, {0.0, 1.0}, {1.0, 2.0});
    CHECK(ctx.level == 2);
    CHECK(ctx.index == 6);
    CHECK(ctx.target.x == Approx(1.0));
    CHECK(ctx.target.y == Approx(2.0));
    CHECK_THROWS_AS(make_context(1, {0.0, -1.0}, {0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("limit cdf endpoints clamp exactly") {
    const NormalizedTarget ts[] = {{0.0, 1.0}, {0.0, 2.0}, {1.3, 0.4}, {-2.0, 3.0}};
    for (const auto& t : ts) {
        CHECK(xi(t, -half_pi) == 0.0);
        CHECK(xi(t, -2.0) == 0.0);
        CHECK(xi(t, half_pi) == 1.0);
        CHECK(xi(t, 2.0) == 1.0);
    }
}

TEST_CASE("limit cdf of the self-target is uniform") {
    const NormalizedTarget uniform{0.0, 1.0};
    for (const double w : {-1.5, -0.7, -0.1, 0.0, 0.2, 0.9, 1.55}) {
        CHECK(xi(uniform, w) == Approx(w / pi + 0.5).margin(1e-12));
    }
}

TEST_CASE("limit cdf is monotone and continuous at the branch point") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::uniform_real_distribution<double> uy(0.3, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        const NormalizedTarget t{ux(rng), uy(rng)};
        double prev = -1.0;
        for (int k = 0; k <= 400; ++k) {
            const double w = -half_pi + pi * k / 400.0;
            const double v = xi(t, w);
            CHECK(v >= prev - 1e-13);
            prev = v;
        }
        const double mid = xi(t, 0.0);
        CHECK(xi(t, 1e-9) == Approx(mid).margin(1e-7));
        CHECK(xi(t, -1e-9) == Approx(mid).margin(1e-7));
    }
}

TEST_CASE("density value at the vertical translate") {
    const auto ctx = make_context(1, {0.0, 1.0}, {0.0, 2.0});
    CHECK(density_rho(ctx, 0.0) == Approx(1.25).margin(1e-15));
    CHECK(density_rho(ctx, 0.4) > 0.0);
    CHECK(density_rho(ctx, -1.5) > 0.0);
}

TEST_CASE("density differentiates the limit cdf") {
    const auto ctx = make_context(1, {0.3, 0.8}, {-0.5, 1.9});
    const double h = 1e-5;
    for (int k = -14; k <= 14; ++k) {
        const double t = 0.1 * k + 0.005;
        const double fd = (xi(ctx.target, t + h) - xi(ctx.target, t - h)) / (2.0 * h);
        CHECK(fd == Approx(density_rho(ctx, t) / pi).margin(1e-6));
    }
}

TEST_CASE("interval union merges and answers strictly") {
    const IntervalUnion u({{0.0, 1.0}, {0.5, 2.0}, {3.0, 3.0}, {5.0, 4.0}});
    REQUIRE(u.parts().size() == 1);
    CHECK(u.parts()[0].lo == 0.0);
    CHECK(u.parts()[0].hi == 2.0);
    CHECK(u.contains(1.0));
    CHECK_FALSE(u.contains(0.0));
    CHECK_FALSE(u.contains(2.0));
    const IntervalUnion v({{0.0, 1.0}, {1.0, 2.0}});
    CHECK(v.parts().size() == 2);
    CHECK_FALSE(v.contains(1.0));
}

TEST_CASE("sublevel set of the angle slope map") {
    const IntervalUnion s = build_s(1.0, 1.0);
    const auto& parts = s.parts();
    const double r2 = std::sqrt(2.0);
    REQUIRE(parts.size() == 3);
    CHECK(std::isinf(parts[0].lo));
    CHECK(parts[0].hi == Approx(-1.0 - r2).margin(1e-12));
    CHECK(parts[1].lo == Approx(-1.0).margin(1e-12));
    CHECK(parts[1].hi == Approx(r2 - 1.0).margin(1e-12));
    CHECK(parts[2].lo == Approx(1.0).margin(1e-12));
    CHECK(std::isinf(parts[2].hi));

    const IntervalUnion z = build_s(1.5, 0.0);
    CHECK(z.parts().size() == 2);
    CHECK(z.contains(-1.0));
    CHECK_FALSE(z.contains(0.5));
    CHECK(z.contains(2.0));
    CHECK_FALSE(z.contains(-2.0));
    CHECK_THROWS_AS(build_s(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("sublevel set matches the defining inequality") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> uy(0.1, 4.0);
    std::uniform_real_distribution<double> ul(-6.0, 6.0);
    std::uniform_real_distribution<double> uu(-10.0, 10.0);
    for (int rep = 0; rep < 500; ++rep) {
        const double y = uy(rng);
        const double lam = ul(rng);
        const IntervalUnion s = build_s(y, lam);
        for (int k = 0; k < 20; ++k) {
            const double u = uu(rng);
            if (std::abs(std::abs(u) - y) < 1e-6) continue;
            const double value = 2.0 * y * u / (y * y - u * u);
            if (std::abs(value - lam) < 1e-9 * (1.0 + std::abs(lam))) continue;
            CHECK(s.contains(u) == (value < lam));
        }
    }
}

TEST_CASE("main terms") {
    CHECK(ball_main_term(1, 0.0) == 6.0);
    CHECK(ball_main_term(2, 3.0) == Approx(std::exp(3.0)).margin(1e-12));
    CHECK(ball_main_term_from_norm(1, 100.0) == 600.0);
    CHECK(ball_main_term_from_norm(3, 48.0) == 12.0);
    const double q = 17.0;
    CHECK(sector_main_term(1, std::numeric_limits<double>::infinity(), q) ==
          ball_main_term_from_norm(1, q * q));
    CHECK(sector_main_term(2, -std::numeric_limits<double>::infinity(), q) == 0.0);
    CHECK(sector_main_term(1, 0.0, q) == Approx(3.0 * q * q).margin(1e-9));
    // opposite slope cuts add back to the full ball
    CHECK(sector_main_term(1, -0.75, q) + sector_main_term(1, 0.75, q) ==
          Approx(6.0 * q * q).epsilon(1e-14));
    CHECK(sector_main_term(1, 1e9, q) == Approx(6.0 * q * q).epsilon(1e-8));
    const auto ctx = make_context(1, {0.0, 1.0}, {0.0, 1.0});
    CHECK(angle_count_main_term(ctx, half_pi, 2.0) ==
          Approx(6.0 * std::exp(2.0)).margin(1e-9));
    CHECK(angle_count_main_term(ctx, 0.0, 2.0) ==
          Approx(3.0 * std::exp(2.0)).margin(1e-9));
}
