#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hypangle/arith.hpp"
#include "hypangle/geometry.hpp"

namespace hypangle {

// Index of the principal congruence subgroup of the given level in SL(2,Z):
// N^3 times the product of (1 - p^{-2}) over primes p | N.
inline std::int64_t index_gamma_n(std::int64_t level) {
    if (level < 1) throw std::invalid_argument("index needs level >= 1");
    Rational r(level * level * level);
    for (const auto& [p, e] : factorize(level)) r *= Rational(p * p - 1, p * p);
    if (r.denominator() != 1) throw std::logic_error("index must be an integer");
    return r.numerator();
}

// The constant C_N = (1/zeta(2)) prod_{p|N} (1-p^{-2})^{-1}; rational_part is
// the product, value the float including the 6/pi^2 factor.
struct CnConstant {
    Rational rational_part{1};
    double value = 6.0 / (pi * pi);
};

inline CnConstant c_n(std::int64_t level) {
    if (level < 1) throw std::invalid_argument("c_n needs level >= 1");
    const Rational r = coprime_zeta_factor(level);
    return {r, 6.0 / (pi * pi) * boost::rational_cast<double>(r)};
}

struct TheoryContext {
    std::int64_t level = 1;
    Point z0{0.0, 1.0};
    Point z1{0.0, 1.0};
    NormalizedTarget target{0.0, 1.0};
    std::int64_t index = 1;
    CnConstant cn{};
};

inline TheoryContext make_context(std::int64_t level, const Point& z0,
                                  const Point& z1) {
    require_upper(z0);
    require_upper(z1);
    return {level, z0, z1, normalize_target(z0, z1), index_gamma_n(level),
            c_n(level)};
}

// Limiting CDF of the angle statistic on [-pi/2, pi/2].  The omega = 0 and
// endpoint values are the analytic limits of the tan/cot expression.
inline double xi(const NormalizedTarget& t, double omega) {
    if (!(t.y > 0.0)) throw std::invalid_argument("target needs y > 0");
    if (omega <= -half_pi) return 0.0;
    if (omega >= half_pi) return 1.0;
    const double base = std::atan(t.x + t.y) + std::atan(t.x - t.y);
    if (omega == 0.0) return (std::atan(t.x) + half_pi - base) / pi;
    const double th = std::tan(omega / 2.0);
    const double step = omega > 0.0 ? 1.0 : 0.0;
    return (std::atan(t.x + t.y * th) + std::atan(t.x - t.y / th) - base) / pi +
           step;
}

// Limiting density: 2 y0 y1 S / (S^2 - (T cos t + U sin t)^2) with
// S = y0^2 + dx^2 + y1^2, T = S - 2 y1^2, U = 2 dx y1.
inline double density_rho(const TheoryContext& ctx, double t) {
    const double dx = ctx.z1.x - ctx.z0.x;
    const double y0 = ctx.z0.y;
    const double y1 = ctx.z1.y;
    const double s = y0 * y0 + dx * dx + y1 * y1;
    const double tt = y0 * y0 + dx * dx - y1 * y1;
    const double u = 2.0 * dx * y1;
    const double w = tt * std::cos(t) + u * std::sin(t);
    return 2.0 * y0 * y1 * s / (s * s - w * w);
}

// Open interval; +-infinity endpoints allowed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

class IntervalUnion {
  public:
    IntervalUnion() = default;

    explicit IntervalUnion(std::vector<Interval> parts) : parts_(std::move(parts)) {
        for (auto it = parts_.begin(); it != parts_.end();) {
            if (!(it->lo < it->hi)) {
                it = parts_.erase(it);
            } else {
                ++it;
            }
        }
        std::sort(parts_.begin(), parts_.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> merged;
        for (const auto& iv : parts_) {
            // open intervals overlap only on strict crossing; (a,b) and
            // (b,c) stay separate
            if (!merged.empty() && iv.lo < merged.back().hi)
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            else
                merged.push_back(iv);
        }
        parts_ = std::move(merged);
    }

    bool contains(double x) const {
        for (const auto& iv : parts_)
            if (iv.lo < x && x < iv.hi) return true;
        return false;
    }

    const std::vector<Interval>& parts() const { return parts_; }

  private:
    std::vector<Interval> parts_;
};

// The union of open intervals characterizing 2 y* u / (y*^2 - u^2) < lambda
// in the variable u.  Roots are written in the forms that avoid cancellation
// for small lambda.
inline IntervalUnion build_s(double y_star, double lambda) {
    if (!(y_star > 0.0)) throw std::invalid_argument("build_s needs y* > 0");
    const double inf = std::numeric_limits<double>::infinity();
    if (lambda == 0.0) return IntervalUnion({{-y_star, 0.0}, {y_star, inf}});
    const double root = 1.0 + std::sqrt(1.0 + lambda * lambda);
    if (lambda > 0.0) {
        const double a1 = root / lambda;
        const double a2 = lambda / root;
        return IntervalUnion(
            {{-inf, -y_star * a1}, {-y_star, y_star * a2}, {y_star, inf}});
    }
    const double al = -lambda;
    const double a1s = -al / root;
    const double a2s = root / al;
    return IntervalUnion({{-y_star, y_star * a1s}, {y_star, y_star * a2s}});
}

inline double ball_main_term(std::int64_t level, double radius) {
    return 6.0 * std::exp(radius) / static_cast<double>(index_gamma_n(level));
}

inline double ball_main_term_from_norm(std::int64_t level, double norm_bound_sq) {
    return 6.0 * norm_bound_sq / static_cast<double>(index_gamma_n(level));
}

// pi (pi + 2 arctan beta) C_N Q^2 / (2 N^3); at beta = +inf this reduces
// exactly to the ball main term in the Q form.
inline double sector_main_term(std::int64_t level, double beta, double q) {
    if (level < 1) throw std::invalid_argument("sector_main_term: level >= 1");
    if (std::isinf(beta))
        return beta > 0 ? ball_main_term_from_norm(level, q * q) : 0.0;
    const double cn = c_n(level).value;
    const double n3 = static_cast<double>(level) * level * level;
    return pi * (pi + 2.0 * std::atan(beta)) * cn * q * q / (2.0 * n3);
}

inline double angle_count_main_term(const TheoryContext& ctx, double omega,
                                    double radius) {
    // pi^2 C_N / N^3 equals 6 / index exactly
    return 6.0 * std::exp(radius) * xi(ctx.target, omega) /
           static_cast<double>(ctx.index);
}

}  // namespace hypangle
