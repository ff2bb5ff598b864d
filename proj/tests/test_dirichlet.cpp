#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "radialcap/dirichlet.hpp"
#include "radialcap/errors.hpp"
#include "support/fixtures.hpp"

#include <cmath>
#include <numbers>

using namespace radialcap;
using std::numbers::pi;
using testsupport::euclid;
using testsupport::hyperbolic;
using testsupport::make;

namespace {
// m = 2 with h = eta_w / 2: M_2 = eta_w, so Lambda = w(rho) is constant and psi
// is linear.
Constellation flat_weight() { return make(2, "sinh(r)", "1", "0", "0.5*coth(r)", Tangency::Upper); }
} // namespace

TEST_CASE("closed form, Euclidean m = 3") {
    const RadialSolution s = solve_dirichlet_closed(euclid(3), 2, 1, 2);
    for (double r : {1.0, 1.1, 1.5, 1.9, 2.0})
        CHECK(s.profile(r) == doctest::Approx(2 * (1 - 1 / r)).epsilon(1e-12));
    CHECK(s.profile(1) == 0.0);
    CHECK(s.profile(2) == 1.0);
    CHECK(s.derivative(1.5) == doctest::Approx(2 / (1.5 * 1.5)).epsilon(1e-12));
    CHECK(s.normalizer() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.increment(1.2, 1.7) == doctest::Approx(2 * (1 / 1.2 - 1 / 1.7)).epsilon(1e-12));
}

TEST_CASE("closed form, vanishing balance") {
    // h = eta_w: Lambda = w, so psi follows cosh.
    const RadialSolution s =
        solve_dirichlet_closed(make(2, "sinh(r)", "1", "0", "coth(r)", Tangency::Upper), 2, 1, 3);
    for (double r : {1.25, 2.0, 2.9})
        CHECK(s.profile(r) ==
              doctest::Approx((std::cosh(r) - std::cosh(1.0)) / (std::cosh(3.0) - std::cosh(1.0))).epsilon(1e-10));
}

TEST_CASE("closed form, constant weight") {
    const RadialSolution s = solve_dirichlet_closed(flat_weight(), 2, 1, 3);
    for (double r : {1.0, 1.25, 2.0, 2.9})
        CHECK(s.profile(r) == doctest::Approx((r - 1) / 2).epsilon(1e-10));
}

TEST_CASE("ODE solver against the closed form") {
    SUBCASE("Euclidean m = 3") {
        const SampledProfile ode = solve_dirichlet_ode(euclid(3), 2, 1, 2, 2000);
        double worst = 0;
        for (std::size_t i = 0; i < ode.r.size(); ++i)
            worst = std::max(worst, std::fabs(ode.psi[i] - 2 * (1 - 1 / ode.r[i])));
        CHECK(worst <= 1e-6);
    }
    SUBCASE("hyperbolic m = 2") {
        const auto c = hyperbolic(2);
        const RadialSolution s = solve_dirichlet_closed(c, 2, 1, 3);
        const SampledProfile ode = solve_dirichlet_ode(c, 2, 1, 3, 2000);
        double worst = 0;
        for (std::size_t i = 0; i < ode.r.size(); ++i)
            worst = std::max(worst, std::fabs(ode.psi[i] - s.profile(ode.r[i])));
        CHECK(worst <= 1e-6);
    }
    SUBCASE("constant weight") {
        const SampledProfile ode = solve_dirichlet_ode(flat_weight(), 2, 1, 3, 500);
        double worst = 0;
        for (std::size_t i = 0; i < ode.r.size(); ++i)
            worst = std::max(worst, std::fabs(ode.psi[i] - (ode.r[i] - 1) / 2));
        CHECK(worst <= 1e-10);
    }
    SUBCASE("lower tangency with g < 1") {
        const auto c = make(3, "sinh(r)", "0.6 + 0.4*exp(-r)", "0", "0.5", Tangency::Lower);
        const RadialSolution s = solve_dirichlet_closed(c, 3, 0.5, 4);
        const SampledProfile ode = solve_dirichlet_ode(c, 3, 0.5, 4, 4000);
        double worst = 0;
        for (std::size_t i = 0; i < ode.r.size(); ++i)
            worst = std::max(worst, std::fabs(ode.psi[i] - s.profile(ode.r[i])));
        CHECK(worst <= 1e-6);
    }
    CHECK_THROWS_AS(solve_dirichlet_ode(euclid(3), 2, 1, 2, 10), InvalidArgument);
}

TEST_CASE("drifted capacity") {
    CHECK(drifted_capacity(euclid(3), 2, 1, 2) == doctest::Approx(8 * pi).epsilon(1e-12));
    CHECK(drifted_capacity(euclid(3), 2, 1, 1e4) == doctest::Approx(4 * pi / (1 - 1e-4)).epsilon(1e-10));
    // Constant weight: Vol / (R - rho).
    const auto c = flat_weight();
    CHECK(drifted_capacity(c, 2, 1, 3) == doctest::Approx(c.model.sphere_volume(1) / 2).epsilon(1e-10));
    // Strictly decreasing in R.
    double prev = drifted_capacity(hyperbolic(3), 3, 1, 1.5);
    for (double R : {2.0, 4.0, 8.0, 16.0}) {
        const double cap = drifted_capacity(hyperbolic(3), 3, 1, R);
        CHECK(cap < prev);
        prev = cap;
    }
}

TEST_CASE("flux form equals the formula form") {
    const auto c = make(3, "sinh(r)", "0.7", "0.2*coth(r)", "0.1", Tangency::Lower);
    const RadialSolution s = solve_dirichlet_closed(c, 2.5, 1, 3);
    CHECK(flux_capacity(c, s) == doctest::Approx(drifted_capacity(c, 2.5, 1, 3)).epsilon(1e-12));
}

TEST_CASE("capacity upper bound") {
    CHECK(capacity_upper_bound(euclid(3), 2, 1, 2, 4 * pi) == doctest::Approx(8 * pi).epsilon(1e-12));
    CHECK_THROWS_AS(capacity_upper_bound(euclid(3), 2, 1, 2, 0.0), InvalidArgument);
    // With the model sphere as boundary, the bound is the model p-capacity
    // at every p.
    for (int m : {2, 3, 4})
        for (double p : {2.0, 2.5, 3.0, 4.0}) {
            CAPTURE(m);
            CAPTURE(p);
            for (const auto& c : {euclid(m), hyperbolic(m)}) {
                const double vol = c.model.sphere_volume(1);
                CHECK(capacity_upper_bound(c, p, 1, 3, vol) ==
                      doctest::Approx(c.model.exact_annulus_p_capacity(1, 3, p)).epsilon(1e-9));
            }
        }
    // Divergent weight: the bound goes to zero as R grows.
    double prev = capacity_upper_bound(euclid(3), 3, 1, 10, 4 * pi);
    for (double R : {1e3, 1e6, 1e9}) {
        const double b = capacity_upper_bound(euclid(3), 3, 1, R, 4 * pi);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(prev == doctest::Approx(4 * pi / std::pow(std::log(1e9), 2)).epsilon(1e-9));
}

TEST_CASE("operator residuals") {
    const auto c = euclid(3);
    const DriftOperator L(c, 2);
    const RadialSolution s = solve_dirichlet_closed(c, 2, 1, 2);
    const auto probes = chebyshev_nodes(1, 2, 65);
    CHECK(operator_residual(L, s, probes) <= 1e-6);

    const auto flat = flat_weight();
    const DriftOperator Lf(flat, 2);
    CHECK(operator_residual(Lf, [](double r) { return (r - 1) / 2; }, chebyshev_nodes(1, 3), 1e-3) <= 1e-10);

    // Negative control: a perturbed profile is not a solution.
    const auto bad = [&](double r) { return s.profile(r) + 0.01 * std::sin(r); };
    CHECK(operator_residual(L, bad, probes, 1e-4) > 1e-3);

    const SampledProfile ode = solve_dirichlet_ode(c, 2, 1, 2, 2000);
    CHECK(operator_residual(L, ode) <= 1e-6);
}

TEST_CASE("drift coefficient") {
    const auto c = euclid(3);
    // M_2 / 1 - eta = 3/r - 1/r.
    CHECK(DriftOperator(c, 2).coeff(2) == doctest::Approx(1.0));
    CHECK(DriftOperator(c, 2).apply(1.0, 1.0, 2) == doctest::Approx(2.0));
}

TEST_CASE("chebyshev nodes are interior and ordered") {
    const auto n = chebyshev_nodes(1, 2, 9);
    REQUIRE(n.size() == 9);
    for (std::size_t i = 0; i < n.size(); ++i) {
        CHECK(n[i] > 1);
        CHECK(n[i] < 2);
        if (i) CHECK(n[i] > n[i - 1]);
    }
}
