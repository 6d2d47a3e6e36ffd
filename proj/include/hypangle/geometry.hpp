#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "hypangle/group_element.hpp"

namespace hypangle {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double half_pi = pi / 2.0;

// Point x + iy of the upper half-plane.
struct Point {
    double x = 0.0;
    double y = 1.0;
};

inline void require_upper(const Point& z) {
    if (!(z.y > 0.0)) throw std::invalid_argument("point must have y > 0");
}

// cosh dist = 1 + |z - w|^2 / (2 Im z Im w).
inline double hyperbolic_distance(const Point& z, const Point& w) {
    require_upper(z);
    require_upper(w);
    const double dx = z.x - w.x;
    const double dy = z.y - w.y;
    const double ch = 1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    return std::acosh(std::max(1.0, ch));
}

// Entries of g0^{-1} gamma g0 where g0 maps i to z0, plus the quadratic
// forms e, f, g built from them.  norm_sq() is 2 cosh dist(z0, gamma z0).
struct ConjugatedEntries {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 1.0;

    double e() const { return c * c + d * d; }
    double f() const { return a * c + b * d; }
    double g() const { return a * a + b * b; }
    double norm_sq() const { return a * a + b * b + c * c + d * d; }
};

inline ConjugatedEntries conjugate_entries(const GroupElement& gamma,
                                           const Point& z0) {
    require_upper(z0);
    if (gamma.det() != 1) throw std::invalid_argument("determinant != 1");
    const double a = static_cast<double>(gamma.a);
    const double b = static_cast<double>(gamma.b);
    const double c = static_cast<double>(gamma.c);
    const double d = static_cast<double>(gamma.d);
    const double ca = a - c * z0.x;
    return {ca, (ca * z0.x + b - d * z0.x) / z0.y, c * z0.y, c * z0.x + d};
}

inline double orbit_distance(const GroupElement& gamma, const Point& z0) {
    const double n = conjugate_entries(gamma, z0).norm_sq();
    return std::acosh(std::max(1.0, n / 2.0));
}

// z1 seen from z0 after moving the base point to i.
struct NormalizedTarget {
    double x = 0.0;
    double y = 1.0;
};

inline NormalizedTarget normalize_target(const Point& z0, const Point& z1) {
    require_upper(z0);
    require_upper(z1);
    return {(z1.x - z0.x) / z0.y, z1.y / z0.y};
}

// Angle between the geodesic ray from z1 toward gamma z0 and the vertical
// through z1, folded into [-pi/2, pi/2].  Empty when gamma z0 = z1 (the ray
// degenerates); numerator and denominator both vanish exactly there.
inline std::optional<double> angle_from_entries(const ConjugatedEntries& ce,
                                                const NormalizedTarget& t) {
    const double e = ce.e();
    const double f = ce.f();
    const double g = ce.g();
    const double nm = 2.0 * t.y * (f - t.x * e);
    const double dn = (t.y * t.y - t.x * t.x) * e + 2.0 * t.x * f - g;
    constexpr double tol = 1e-12;
    if (std::abs(nm) <= tol && std::abs(dn) <= tol) return std::nullopt;
    if (dn == 0.0) return nm > 0.0 ? half_pi : -half_pi;
    return std::atan(nm / dn);
}

inline std::optional<double> angle(const GroupElement& gamma, const Point& z0,
                                   const Point& z1) {
    return angle_from_entries(conjugate_entries(gamma, z0),
                              normalize_target(z0, z1));
}

// Independent construction of the same angle: gamma z0 in normalized
// coordinates is (f + i)/e; find the center alpha of the half-circle
// geodesic through it and z* by equating distances to the real axis
// crossing, then read the tangent direction at z*.
inline std::optional<double> angle_oracle(const GroupElement& gamma,
                                          const Point& z0, const Point& z1) {
    const auto ce = conjugate_entries(gamma, z0);
    const auto t = normalize_target(z0, z1);
    const double e = ce.e();
    const double p = ce.f() / e;
    const double q = 1.0 / e;
    constexpr double tol = 1e-12;
    if (std::abs(p - t.x) <= tol && std::abs(q - t.y) <= tol)
        return std::nullopt;
    if (p == t.x) return 0.0;  // shared vertical geodesic
    const double alpha =
        (p * p + q * q - t.x * t.x - t.y * t.y) / (2.0 * (p - t.x));
    return std::atan(t.y / (t.x - alpha));
}

// One observation of the angle statistic.
struct AngleSample {
    GroupElement gamma;
    double theta = 0.0;
    double dist = 0.0;
};

}  // namespace hypangle
