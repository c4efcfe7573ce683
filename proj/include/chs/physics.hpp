#pragma once
// Nondimensional parameter set, the temperature-dependent Landau potential
//   f(c, beta) = 2 c^4 - (1 - beta) c^2,
// its convex-concave split
//   f+(c) = 2 c^4 + A c^2,   f-(c, beta) = -(A + 1 - beta) c^2,
// and the affine mixture laws for density and viscosity.

#include <algorithm>
#include <cmath>
#include <string>

#include "chs/errors.hpp"
#include "chs/mesh.hpp"

namespace chs {

struct Params {
    double pe = 1000.0;        // mass Peclet number
    double pe_theta = 10.0;    // thermal Peclet number
    double ch = 0.01;          // Cahn number (interface width / domain size)
    double lambda_rho = 1.0;   // density ratio rho1/rho2
    double lambda_eta = 1.0;   // viscosity ratio eta1/eta2
    double g = 0.0;            // gravitational parameter
    double dt = 0.01;          // time step
    double beta_max = 1.0;     // a priori bound for beta over the run
    double stab_a = 0.0;       // stabilization parameter A
    Vec2 g_hat{0.0, -1.0};     // unit gravity direction

    void validate() const {
        if (!(pe > 0.0)) throw ValidationError("Params: Pe must be positive");
        if (!(pe_theta > 0.0)) throw ValidationError("Params: Pe_theta must be positive");
        if (!(ch > 0.0)) throw ValidationError("Params: Ch must be positive");
        if (!(dt > 0.0)) throw ValidationError("Params: dt must be positive");
        if (!(lambda_rho > 0.0)) throw ValidationError("Params: lambda_rho must be positive");
        if (!(lambda_eta > 0.0)) throw ValidationError("Params: lambda_eta must be positive");
        if (stab_a < std::max(0.0, beta_max - 1.0) - 1e-12)
            throw ValidationError("Params: A = " + std::to_string(stab_a) +
                                  " violates A >= max(0, beta_max - 1) with beta_max = " +
                                  std::to_string(beta_max));
        if (std::abs(norm(g_hat) - 1.0) > 1e-12)
            throw ValidationError("Params: gravity direction must be a unit vector");
    }

    static double default_stab_a(double beta_max) { return std::max(0.0, beta_max - 1.0); }
};

// beta is the temperature itself in nondimensional variables.
inline double beta_of(double theta) { return theta; }

inline double bulk_f(double c, double beta) {
    const double c2 = c * c;
    return 2.0 * c2 * c2 - (1.0 - beta) * c2;
}

inline double bulk_f_c(double c, double beta) {
    return 8.0 * c * c * c - 2.0 * (1.0 - beta) * c;
}

// Implicit/explicit pieces of the split: the convex derivative is taken at
// the new iterate, the concave derivative at the previous time level.
inline double split_convex_derivative(double c_new, double A) {
    return 8.0 * c_new * c_new * c_new + 2.0 * A * c_new;
}

inline double split_concave_derivative(double c_old, double beta, double A) {
    return -2.0 * (A + 1.0 - beta) * c_old;
}

inline void check_split(double beta, double A) {
    if (A + 1.0 - beta < -1e-12)
        throw ValidationError("convex-concave split violated: A = " + std::to_string(A) +
                              " too small for beta = " + std::to_string(beta));
}

inline std::pair<double, double> split_derivatives(double c_new, double c_old, double beta,
                                                   double A) {
    check_split(beta, A);
    return {split_convex_derivative(c_new, A), split_concave_derivative(c_old, beta, A)};
}

struct PotentialEval {
    double value = 0.0;
    double derivative = 0.0;
    double convex_derivative = 0.0;
    double concave_derivative = 0.0;
};

inline PotentialEval potential_eval(double c, double beta, double A) {
    check_split(beta, A);
    return {bulk_f(c, beta), bulk_f_c(c, beta), split_convex_derivative(c, A),
            split_concave_derivative(c, beta, A)};
}

// Affine mixture laws evaluated at c clamped to [-0.5, 0.5]; the clamp keeps
// both coefficients strictly positive under phase-field overshoot.
inline double mixture_law(double c, double lambda) {
    const double cc = std::clamp(c, -0.5, 0.5);
    return (0.5 - cc) + (0.5 + cc) * lambda;
}

inline double rho_of(double c, double lambda_rho) { return mixture_law(c, lambda_rho); }
inline double eta_of(double c, double lambda_eta) { return mixture_law(c, lambda_eta); }

}  // namespace chs
