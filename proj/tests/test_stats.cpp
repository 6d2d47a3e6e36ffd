#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypangle/stats.hpp"

using namespace hypangle;
using Catch::Approx;

TEST_CASE("empirical cdf steps") {
    const Ecdf e({3.0, 1.0, 2.0});
    CHECK(e.size() == 3);
    CHECK(e(0.5) == 0.0);
    CHECK(e(1.0) == Approx(1.0 / 3.0));
    CHECK(e(1.5) == Approx(1.0 / 3.0));
    CHECK(e(2.0) == Approx(2.0 / 3.0));
    CHECK(e(3.0) == 1.0);
    CHECK(e(9.0) == 1.0);
    CHECK(e.sorted().front() == 1.0);
    CHECK(e.sorted().back() == 3.0);
    CHECK_THROWS_AS(Ecdf({}), std::invalid_argument);
}

TEST_CASE("ks distance of two points against the uniform cdf") {
    const Ecdf e({0.25, 0.75});
    const double d = ks_distance(e, [](double x) { return x; });
    CHECK(d == Approx(0.25).margin(1e-15));
}

TEST_CASE("ks distance of plug-in quantiles is the spacing") {
    // placing n samples at F^{-1}(k / (n+1)) leaves gaps of exactly
    // 1 / (n+1) on both sides at every step
    for (const int n : {4, 9, 32}) {
        std::vector<double> xs;
        for (int k = 1; k <= n; ++k)
            xs.push_back(static_cast<double>(k) / (n + 1));
        const Ecdf e(xs);
        const double d = ks_distance(e, [](double x) { return x; });
        CHECK(d == Approx(1.0 / (n + 1)).margin(1e-12));
    }
}

TEST_CASE("ks distance detects a shifted distribution") {
    std::vector<double> xs;
    for (int k = 0; k < 1000; ++k) xs.push_back(0.5 + 0.5 * k / 1000.0);
    const Ecdf e(xs);
    const double d = ks_distance(e, [](double x) { return x; });
    CHECK(d == Approx(0.5).margin(1e-2));
}

TEST_CASE("chi square with a perfectly balanced sample") {
    std::vector<double> xs;
    for (int bin = 0; bin < 10; ++bin)
        for (int k = 0; k < 10; ++k) xs.push_back(bin / 10.0 + 0.05);
    const auto res = chi_square(xs, 0.0, 1.0, 10,
                                [](double lo, double hi) { return hi - lo; });
    CHECK(res.used_bins == 10);
    CHECK(res.dropped_bins == 0);
    CHECK(res.statistic == Approx(0.0).margin(1e-12));
    CHECK(res.bins.front().observed == 10);
    CHECK(res.bins.back().observed == 10);
}

TEST_CASE("chi square grows with a lump") {
    std::vector<double> xs;
    for (int k = 0; k < 100; ++k) xs.push_back(0.15);
    const auto res = chi_square(xs, 0.0, 1.0, 5,
                                [](double lo, double hi) { return hi - lo; });
    // everything in one bin of expected 20: (100-20)^2/20 + 4 * 20
    CHECK(res.statistic == Approx(320.0 + 80.0).margin(1e-9));
    CHECK(res.used_bins == 5);
}

TEST_CASE("chi square drops starved bins") {
    std::vector<double> xs(40, 0.5);
    const auto res = chi_square(xs, 0.0, 1.0, 4, [](double lo, double hi) {
        return (lo <= 0.5 && 0.5 < hi) ? 0.97 : 0.01;
    });
    CHECK(res.dropped_bins == 3);
    CHECK(res.used_bins == 1);
    for (const auto& bin : res.bins)
        if (!bin.used) CHECK(bin.expected < 5.0);
    CHECK_THROWS_AS(chi_square({}, 0.0, 1.0, 4,
                               [](double, double) { return 0.25; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(chi_square(xs, 1.0, 0.0, 4,
                               [](double, double) { return 0.25; }),
                    std::invalid_argument);
}

TEST_CASE("bin edges cover the range without gaps") {
    std::vector<double> xs{0.0, 0.999999, 1.0};
    const auto res = chi_square(xs, 0.0, 1.0, 3,
                                [](double lo, double hi) { return hi - lo; });
    std::int64_t seen = 0;
    for (const auto& bin : res.bins) seen += bin.observed;
    CHECK(seen == 3);  // the closing edge belongs to the last bin
    CHECK(res.bins.front().lo == 0.0);
    CHECK(res.bins.back().hi == 1.0);
}

TEST_CASE("convergence table at the degenerate radius") {
    const auto ctx = make_context(1, {0.0, 1.0}, {0.0, 1.0});
    const auto rows = convergence_table(ctx, {0.0});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].radius == 0.0);
    CHECK(rows[0].count == 4);
    CHECK(rows[0].undefined_count == 4);
    CHECK(rows[0].main_term == 6.0);
    CHECK(rows[0].rel_error == Approx(1.0 / 3.0).margin(1e-12));
    CHECK(std::isnan(rows[0].ks));
}

TEST_CASE("convergence table tracks the count and the angle law") {
    const auto ctx = make_context(1, {0.0, 1.0}, {0.0, 2.0});
    const auto rows = convergence_table(ctx, {4.0, 7.0}, 2);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        const auto check = count_ball({1, ctx.z0, 2.0 * std::cosh(row.radius)});
        CHECK(row.count == check);
        CHECK(row.undefined_count == 0);
        CHECK(row.rel_error < 0.25);
        CHECK(row.ks < 0.1);
    }
    CHECK(rows[1].ks < rows[0].ks * 1.5);
}
