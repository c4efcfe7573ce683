#pragma once
// Symmetric Gauss rules on the reference triangle (barycentric points,
// weights summing to the reference area 1/2).

#include <array>
#include <vector>

#include "chs/errors.hpp"

namespace chs {

struct QuadratureRule {
    int degree = 0;  // exact for all bivariate polynomials up to this degree
    std::vector<std::array<double, 3>> points;  // barycentric
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
};

namespace detail {

inline void push_orbit3(QuadratureRule& r, double a, double b, double w) {
    r.points.push_back({a, b, b});
    r.points.push_back({b, a, b});
    r.points.push_back({b, b, a});
    r.weights.insert(r.weights.end(), 3, 0.5 * w);
}

inline void push_orbit6(QuadratureRule& r, double a, double b, double c, double w) {
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    r.weights.insert(r.weights.end(), 6, 0.5 * w);
}

}  // namespace detail

inline QuadratureRule quadrature(int degree) {
    QuadratureRule r;
    switch (degree) {
        case 1:
            r.degree = 1;
            r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
            r.weights.push_back(0.5);
            break;
        case 2:
            r.degree = 2;
            detail::push_orbit3(r, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
            break;
        case 3:
        case 4:
            // 6-point degree-4 rule (all weights positive).
            r.degree = 4;
            detail::push_orbit3(r, 0.108103018168070, 0.445948490915965, 0.223381589678011);
            detail::push_orbit3(r, 0.816847572980459, 0.091576213509771, 0.109951743655322);
            break;
        case 5:
            r.degree = 5;
            r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
            r.weights.push_back(0.5 * 0.225);
            detail::push_orbit3(r, 0.059715871789770, 0.470142064105115, 0.132394152788506);
            detail::push_orbit3(r, 0.797426985353087, 0.101286507323456, 0.125939180544827);
            break;
        case 6:
            r.degree = 6;
            detail::push_orbit3(r, 0.501426509658179, 0.249286745170910, 0.116786275726379);
            detail::push_orbit3(r, 0.873821971016996, 0.063089014491502, 0.050844906370207);
            detail::push_orbit6(r, 0.053145049844817, 0.310352451033784, 0.636502499121399,
                                0.082851075618374);
            break;
        default:
            throw ValidationError("quadrature: unsupported degree " + std::to_string(degree));
    }
    return r;
}

}  // namespace chs
