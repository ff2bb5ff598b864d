#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "radialcap/errors.hpp"
#include "radialcap/quadrature.hpp"

#include <cmath>
#include <limits>

using namespace radialcap;

TEST_CASE("reference integrals") {
    CHECK(integrate([](double t) { return 3.0 / t; }, 1, 2).value ==
          doctest::Approx(3 * std::log(2.0)).epsilon(1e-12));
    CHECK(integrate([](double t) { return 1.0 / t; }, 1, std::exp(1.0)).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate([](double t) { return std::sin(t); }, 0, M_PI).value ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("endpoint singularity") {
    const Integral in = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0, 1, 1e-10);
    CHECK(in.value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(in.error < 1e-8);
}

TEST_CASE("reversed limits and empty interval") {
    const auto f = [](double t) { return t * t; };
    CHECK(integrate(f, 2, 1).value == doctest::Approx(-7.0 / 3.0).epsilon(1e-13));
    CHECK(integrate(f, 1, 1).value == 0.0);
}

TEST_CASE("error estimate is honest on an oscillatory integrand") {
    const auto f = [](double t) { return std::cos(40 * t) * std::exp(-t); };
    const double exact = (1 - std::exp(-3.0) * (std::cos(120.0) - 40 * std::sin(120.0))) / 1601.0;
    const Integral in = integrate(f, 0, 3, 1e-12);
    CHECK(std::fabs(in.value - exact) <= std::max(in.error, 1e-15));
}

TEST_CASE("failures") {
    CHECK_THROWS_AS(integrate([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0, 1),
                    QuadratureError);
    QuadratureOptions tight;
    tight.rel_tol = 1e-15;
    tight.max_subdivisions = 3;
    CHECK_THROWS_AS(integrate([](double t) { return std::sin(1 / t); }, 1e-3, 1, tight),
                    QuadratureError);
}

TEST_CASE("tail classes of the reference integrands") {
    const TailClass harmonic = classify_tail([](double t) { return 1.0 / t; }, 1.0);
    CHECK(harmonic.kind == TailKind::Divergent);
    CHECK(harmonic.evidence.alpha_hat == doctest::Approx(-1.0).epsilon(0.01));

    const TailClass inv_sq = classify_tail([](double t) { return 1.0 / (t * t); }, 1.0);
    CHECK(inv_sq.kind == TailKind::Convergent);
    CHECK(inv_sq.value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(inv_sq.evidence.decided_by == TailTest::Cauchy);

    const TailClass root = classify_tail([](double t) { return 1.0 / std::sqrt(t); }, 1.0);
    CHECK(root.kind == TailKind::Divergent);
    CHECK(root.evidence.alpha_hat == doctest::Approx(-0.5).epsilon(0.01));
}

TEST_CASE("tail classes of other shapes") {
    const TailClass expo = classify_tail([](double t) { return std::exp(-t); }, 1.0);
    CHECK(expo.kind == TailKind::Convergent);
    CHECK(expo.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));

    const TailClass growth = classify_tail([](double t) { return std::exp(t); }, 1.0);
    CHECK(growth.kind == TailKind::Divergent);
    CHECK(growth.evidence.decided_by == TailTest::UnboundedGrowth);

    // 1/(t log t) diverges like log log t: increments shrink, slowly.
    const TailClass loglog = classify_tail([](double t) { return 1.0 / (t * std::log(t)); }, 2.0);
    CHECK(loglog.kind != TailKind::Convergent);

    // t^-1.01 converges, but far too slowly to see; it must not be called
    // divergent by the exponent test.
    const TailClass slow = classify_tail([](double t) { return std::pow(t, -1.01); }, 1.0);
    CHECK(slow.kind != TailKind::Divergent);

    const TailClass constant = classify_tail([](double) { return 2.0; }, 1.0);
    CHECK(constant.kind == TailKind::Divergent);
}

TEST_CASE("pure powers follow the exponent rule") {
    for (double alpha : {-3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 1.0}) {
        CAPTURE(alpha);
        const TailClass tc = classify_tail([alpha](double t) { return std::pow(t, alpha); }, 1.0);
        CHECK(tc.kind == (alpha >= -1.0 ? TailKind::Divergent : TailKind::Convergent));
        CHECK(std::fabs(tc.evidence.alpha_hat - alpha) <= 0.02);
        if (alpha < -1.0) CHECK(tc.value == doctest::Approx(-1.0 / (alpha + 1.0)).epsilon(1e-6));
    }
}

TEST_CASE("evidence bookkeeping") {
    TailConfig cfg;
    cfg.k_max = 10;
    const TailClass tc = classify_tail([](double t) { return 1.0 / t; }, 0.5, cfg);
    const auto& ev = tc.evidence;
    REQUIRE(ev.radii.size() == ev.partials.size());
    CHECK(ev.radii.front() == 0.5);
    CHECK(ev.partials.front() == 0.0);
    for (std::size_t k = 1; k < ev.radii.size(); ++k) {
        CHECK(ev.radii[k] == 2 * ev.radii[k - 1]);
        CHECK(ev.partials[k] == doctest::Approx(k * std::log(2.0)).epsilon(1e-9));
    }
    CHECK(tc.horizon() == ev.radii.back());
    CHECK_THROWS_AS(classify_tail([](double t) { return t; }, 0.0), InvalidArgument);
}

TEST_CASE("log-slope fit") {
    const auto [slope, rms] = fit_log_slope([](double t) { return 5 * std::pow(t, -2.5); }, 1, 100, 41);
    CHECK(slope == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(rms < 1e-12);
}
