#include <catch2/catch_amalgamated.hpp>

#include "chs/physics.hpp"

using namespace chs;

TEST_CASE("beta is the identity map on the dimensionless temperature") {
    CHECK(beta_of(0.0) == 0.0);
    CHECK(beta_of(1.5) == 1.5);
    CHECK(beta_of(0.2) == 0.2);
}

TEST_CASE("bulk potential values") {
    CHECK(bulk_f(0.0, 0.7) == 0.0);
    CHECK_THAT(bulk_f(0.5, 0.0), Catch::Matchers::WithinAbs(-0.125, 1e-15));
    // at beta = 1 the quadratic term vanishes
    for (double c : {-0.7, 0.1, 0.4})
        CHECK_THAT(bulk_f(c, 1.0), Catch::Matchers::WithinULP(2.0 * c * c * c * c, 2));
}

TEST_CASE("bulk derivative roots") {
    CHECK(bulk_f_c(0.0, 0.3) == 0.0);
    CHECK_THAT(bulk_f_c(0.5, 0.0), Catch::Matchers::WithinAbs(0.0, 1e-15));
    const double root = std::sqrt(0.8) / 2.0;  // beta = 0.2
    CHECK_THAT(bulk_f_c(root, 0.2), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("bulk_f_c is the c-derivative of bulk_f (central differences)") {
    const double h = 1e-6;
    for (double beta : {0.0, 0.2, 1.0, 1.5})
        for (double c = -1.0; c <= 1.0; c += 0.05) {
            const double fd = (bulk_f(c + h, beta) - bulk_f(c - h, beta)) / (2.0 * h);
            CHECK_THAT(bulk_f_c(c, beta), Catch::Matchers::WithinAbs(fd, 1e-6));
        }
}

TEST_CASE("split derivatives recombine to the full derivative") {
    for (double beta = 0.0; beta <= 2.0; beta += 0.1) {
        const double A = Params::default_stab_a(beta);
        for (double c = -1.0; c <= 1.0; c += 0.02) {
            const auto [convex, concave] = split_derivatives(c, c, beta, A);
            CHECK_THAT(convex + concave, Catch::Matchers::WithinAbs(bulk_f_c(c, beta), 1e-13));
        }
    }
}

TEST_CASE("split examples") {
    // A = 0, beta = 1: the concave part vanishes
    CHECK(split_derivatives(0.7, 0.7, 1.0, 0.0).second == 0.0);
    // boundary case A = beta_max - 1
    CHECK_THAT(split_derivatives(0.0, 0.3, 1.5, 0.5).second,
               Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(split_derivatives(0.5, 0.0, 0.0, 0.0).first,
               Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("violated split is reported with the offending beta") {
    CHECK_THROWS_WITH(split_derivatives(0.0, 0.0, 1.5, 0.0),
                      Catch::Matchers::ContainsSubstring("1.5"));
}

TEST_CASE("potential_eval is internally consistent") {
    for (double beta : {0.0, 0.5, 1.2})
        for (double c : {-0.6, 0.0, 0.3, 0.9}) {
            const double A = Params::default_stab_a(beta) + 0.2;
            const PotentialEval e = potential_eval(c, beta, A);
            CHECK_THAT(e.convex_derivative + e.concave_derivative,
                       Catch::Matchers::WithinAbs(e.derivative, 1e-14));
        }
}

TEST_CASE("argmin of the bulk potential sits at the analytic minima") {
    for (double beta : {0.0, 0.2, 0.5, 1.0, 1.5}) {
        double best_c = -1.0, best_f = bulk_f(-1.0, beta);
        for (double c = -1.0; c <= 1.0; c += 1e-4) {
            const double f = bulk_f(c, beta);
            if (f < best_f) {
                best_f = f;
                best_c = c;
            }
        }
        const double expected = beta < 1.0 ? std::sqrt(1.0 - beta) / 2.0 : 0.0;
        CHECK(std::abs(std::abs(best_c) - expected) <= 2e-4);
    }
}

TEST_CASE("mixture laws hit the pure-phase anchors") {
    CHECK(rho_of(-0.5, 0.0009) == 1.0);
    CHECK(eta_of(-0.5, 0.08) == 1.0);
    CHECK_THAT(eta_of(0.5, 0.08), Catch::Matchers::WithinAbs(0.08, 1e-15));
    CHECK_THAT(rho_of(0.0, 0.0009), Catch::Matchers::WithinAbs(0.50045, 1e-15));
}

TEST_CASE("mixture laws clamp outside [-0.5, 0.5] and stay positive") {
    CHECK(rho_of(-0.8, 0.0009) == rho_of(-0.5, 0.0009));
    CHECK(eta_of(1.3, 0.08) == eta_of(0.5, 0.08));
    for (double c = -1.0; c <= 1.0; c += 0.01) {
        CHECK(rho_of(c, 0.0009) > 0.0);
        CHECK(eta_of(c, 0.08) > 0.0);
    }
}

TEST_CASE("mixture laws are monotone for lambda < 1 and constant at 1") {
    double prev = rho_of(-0.5, 0.3);
    for (double c = -0.45; c <= 0.5; c += 0.05) {
        const double cur = rho_of(c, 0.3);
        CHECK(cur < prev);
        prev = cur;
    }
    for (double c = -1.0; c <= 1.0; c += 0.1) CHECK(eta_of(c, 1.0) == 1.0);
}

TEST_CASE("Params validation") {
    Params p;
    p.beta_max = 1.575;
    p.stab_a = 0.575;
    CHECK_NOTHROW(p.validate());

    SECTION("split bound violation names beta_max") {
        p.stab_a = 0.1;
        CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("beta_max"));
    }
    SECTION("nonpositive groups rejected") {
        p.ch = -0.01;
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
    SECTION("gravity direction must be unit") {
        p.g_hat = {0.0, -2.0};
        CHECK_THROWS_AS(p.validate(), ValidationError);
    }
}
