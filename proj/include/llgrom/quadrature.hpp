#ifndef LLGROM_QUADRATURE_HPP
#define LLGROM_QUADRATURE_HPP

#include <array>

namespace llgrom {

struct QuadPoint {
    // barycentric coordinates and weight; weights sum to 1 and are applied as
    // integral ~= area * sum_i w_i f(x_i)
    double l0, l1, l2, w;
};

// Symmetric 6-point triangle rule, exact for polynomials of degree 4
// (Dunavant). Used for every element integral in the library.
inline const std::array<QuadPoint, 6>& tri_quadrature() {
    static const double a1 = 0.816847572980459, b1 = 0.091576213509771,
                        w1 = 0.109951743655322;
    static const double a2 = 0.108103018168070, b2 = 0.445948490915965,
                        w2 = 0.223381589678011;
    static const std::array<QuadPoint, 6> rule = {{
        {a1, b1, b1, w1},
        {b1, a1, b1, w1},
        {b1, b1, a1, w1},
        {a2, b2, b2, w2},
        {b2, a2, b2, w2},
        {b2, b2, a2, w2},
    }};
    return rule;
}

}  // namespace llgrom

#endif
