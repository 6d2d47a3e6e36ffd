#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hypangle {

// Element of SL(2,Z), stored as the integer matrix (a b; c d).
struct GroupElement {
    std::int64_t a = 1;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d = 1;

    std::int64_t det() const { return a * d - b * c; }

    GroupElement inverse() const { return {d, -b, -c, a}; }

    GroupElement operator*(const GroupElement& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }

    bool operator==(const GroupElement&) const = default;

    // Membership in the principal congruence subgroup of the given level:
    // a, d congruent to 1 and b, c congruent to 0 modulo level.
    bool is_level(std::int64_t level) const {
        auto zero_mod = [level](std::int64_t v) { return v % level == 0; };
        return zero_mod(a - 1) && zero_mod(d - 1) && zero_mod(b) && zero_mod(c);
    }
};

inline GroupElement make_element(std::int64_t a, std::int64_t b, std::int64_t c,
                                 std::int64_t d) {
    GroupElement g{a, b, c, d};
    if (g.det() != 1)
        throw std::invalid_argument(
            "matrix (" + std::to_string(a) + "," + std::to_string(b) + ";" +
            std::to_string(c) + "," + std::to_string(d) + ") has determinant != 1");
    return g;
}

}  // namespace hypangle
