#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hypangle/group.hpp"
#include "hypangle/theory.hpp"

namespace hypangle {

class Ecdf {
  public:
    explicit Ecdf(std::vector<double> samples) : xs_(std::move(samples)) {
        if (xs_.empty()) throw std::invalid_argument("empirical cdf needs samples");
        std::sort(xs_.begin(), xs_.end());
    }

    double operator()(double x) const {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
    }

    const std::vector<double>& sorted() const { return xs_; }
    std::size_t size() const { return xs_.size(); }

  private:
    std::vector<double> xs_;
};

// Two-sided Kolmogorov-Smirnov distance against a reference CDF.
template <class Cdf>
double ks_distance(const Ecdf& empirical, Cdf&& cdf) {
    const auto& xs = empirical.sorted();
    const auto n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

struct ChiSquareBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t observed = 0;
    double expected = 0.0;
    bool used = true;
};

struct ChiSquareResult {
    std::vector<ChiSquareBin> bins;
    double statistic = 0.0;
    int used_bins = 0;
    int dropped_bins = 0;
};

// Equal-width bins [lo, hi); the last bin is closed on the right.
// bin_probability(a, b) supplies the model mass of [a, b]; bins whose
// expected count falls below 5 are excluded from the statistic.
template <class Prob>
ChiSquareResult chi_square(const std::vector<double>& samples, double lo, double hi,
                           int nbins, Prob&& bin_probability) {
    if (!(hi > lo) || nbins < 1) throw std::invalid_argument("bad chi-square bins");
    if (samples.empty()) throw std::invalid_argument("chi-square needs samples");
    ChiSquareResult out;
    out.bins.resize(static_cast<std::size_t>(nbins));
    const double width = (hi - lo) / nbins;
    for (int k = 0; k < nbins; ++k) {
        auto& bin = out.bins[static_cast<std::size_t>(k)];
        bin.lo = lo + k * width;
        bin.hi = (k == nbins - 1) ? hi : lo + (k + 1) * width;
    }
    for (const double x : samples) {
        if (x < lo || x > hi) continue;
        auto k = static_cast<int>((x - lo) / width);
        k = std::min(k, nbins - 1);
        ++out.bins[static_cast<std::size_t>(k)].observed;
    }
    const auto n = static_cast<double>(samples.size());
    for (auto& bin : out.bins) {
        bin.expected = n * bin_probability(bin.lo, bin.hi);
        if (bin.expected < 5.0) {
            bin.used = false;
            ++out.dropped_bins;
            continue;
        }
        const double diff = static_cast<double>(bin.observed) - bin.expected;
        out.statistic += diff * diff / bin.expected;
        ++out.used_bins;
    }
    return out;
}

struct ConvergenceRow {
    double radius = 0.0;
    std::int64_t count = 0;
    double main_term = 0.0;
    double rel_error = 0.0;
    double ks = std::numeric_limits<double>::quiet_NaN();
    std::int64_t undefined_count = 0;
};

// One row per radius: orbit count against its main term, and the KS
// distance of the empirical angle distribution from the limit CDF.
inline std::vector<ConvergenceRow> convergence_table(const TheoryContext& ctx,
                                                     const std::vector<double>& radii,
                                                     int workers = 1) {
    std::vector<ConvergenceRow> rows;
    rows.reserve(radii.size());
    for (const double r : radii) {
        const BallSpec spec{ctx.level, ctx.z0, 2.0 * std::cosh(r)};
        const AngleCollection angles = collect_angles(spec, ctx.z1, workers);
        ConvergenceRow row;
        row.radius = r;
        row.count = static_cast<std::int64_t>(angles.samples.size()) + angles.undefined_count;
        row.main_term = ball_main_term(ctx.level, r);
        row.rel_error = std::abs(static_cast<double>(row.count) - row.main_term) / row.main_term;
        row.undefined_count = angles.undefined_count;
        if (!angles.samples.empty()) {
            std::vector<double> thetas;
            thetas.reserve(angles.samples.size());
            for (const auto& s : angles.samples) thetas.push_back(s.theta);
            const Ecdf emp(std::move(thetas));
            row.ks = ks_distance(emp, [&ctx](double w) { return xi(ctx.target, w); });
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hypangle
