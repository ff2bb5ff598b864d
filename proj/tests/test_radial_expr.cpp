#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "radialcap/errors.hpp"
#include "radialcap/radial_expr.hpp"
#include "support/random_expr.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace radialcap;

namespace {
const Expr r = Expr::variable();
Expr num(double v) { return Expr::number(v); }
} // namespace

TEST_CASE("parse builds the expected trees") {
    CHECK(parse("sinh(r)") == Expr::call(Func::Sinh, r));
    CHECK(parse("r^2 + 3*r") == Expr::binary(BinaryOp::Add, Expr::binary(BinaryOp::Pow, r, num(2)),
                                              Expr::binary(BinaryOp::Mul, num(3), r)));
    CHECK(parse("  ( r ) ") == r);
    CHECK(parse("1e-3*r") == Expr::binary(BinaryOp::Mul, num(1e-3), r));
    CHECK(parse("2^3^2")(1.0) == doctest::Approx(512.0));
    CHECK(parse("8/4/2")(1.0) == doctest::Approx(1.0));
    CHECK(parse("1-2-3")(1.0) == doctest::Approx(-4.0));
}

TEST_CASE("unary minus binds tighter than the power") {
    CHECK(parse("-r^2")(2.0) == doctest::Approx(4.0));
    CHECK(parse("-(r^2)")(2.0) == doctest::Approx(-4.0));
    CHECK(parse("2*-r")(3.0) == doctest::Approx(-6.0));
}

TEST_CASE("unicode minus sign") {
    CHECK(parse("r \xE2\x88\x92 1") == parse("r - 1"));
    CHECK(parse("\xE2\x88\x92r")(2.0) == doctest::Approx(-2.0));
}

TEST_CASE("syntax errors carry the byte position") {
    try {
        parse("r*(");
        FAIL("no exception");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == 3);
    }
    try {
        parse("r + * 2");
        FAIL("no exception");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(parse(""), SyntaxError);
    CHECK_THROWS_AS(parse("r r"), SyntaxError);
    CHECK_THROWS_AS(parse("sin r"), SyntaxError);
    CHECK_THROWS_AS(parse("(r"), SyntaxError);
    CHECK_THROWS_AS(parse("r)"), SyntaxError);
    CHECK_THROWS_AS(parse("1.2.3"), SyntaxError);
}

TEST_CASE("unknown identifiers") {
    try {
        parse("sinh(q)");
        FAIL("no exception");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.name() == "q");
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS(parse("foo(r)"), UnknownIdentifier);
    CHECK_THROWS_AS(parse("x"), UnknownIdentifier);
}

TEST_CASE("jets of the reference expressions") {
    const Jet2 a = parse("sinh(r)").jet(1e-12);
    CHECK(a.value == doctest::Approx(0.0));
    CHECK(a.d1 == doctest::Approx(1.0));
    CHECK(a.d2 == doctest::Approx(0.0));

    const Jet2 b = parse("r^2").jet(2.0);
    CHECK(b.value == 4.0);
    CHECK(b.d1 == 4.0);
    CHECK(b.d2 == 2.0);

    const Jet2 c = parse("exp(r)/r").jet(1.0);
    CHECK(c.value == doctest::Approx(std::numbers::e).epsilon(1e-14));
    CHECK(std::fabs(c.d1) < 1e-14);
    CHECK(c.d2 == doctest::Approx(std::numbers::e).epsilon(1e-14));
}

TEST_CASE("every function against closed-form derivatives") {
    const double x = 0.7;
    struct Case {
        const char* text;
        double v, d1, d2;
    };
    const double s = std::sin(x), c = std::cos(x), sh = std::sinh(x), ch = std::cosh(x);
    const double th = std::tanh(x), ct = 1 / th;
    const Case cases[] = {
        {"sin(r)", s, c, -s},
        {"cos(r)", c, -s, -c},
        {"sinh(r)", sh, ch, sh},
        {"cosh(r)", ch, sh, ch},
        {"tanh(r)", th, 1 - th * th, -2 * th * (1 - th * th)},
        {"coth(r)", ct, 1 - ct * ct, -2 * ct * (1 - ct * ct)},
        {"exp(r)", std::exp(x), std::exp(x), std::exp(x)},
        {"log(r)", std::log(x), 1 / x, -1 / (x * x)},
        {"sqrt(r)", std::sqrt(x), 0.5 / std::sqrt(x), -0.25 / (x * std::sqrt(x))},
        {"abs(r - 1)", 1 - x, -1, 0},
        {"r^r", std::pow(x, x), std::pow(x, x) * (std::log(x) + 1),
         std::pow(x, x) * ((std::log(x) + 1) * (std::log(x) + 1) + 1 / x)},
        {"r^0.5", std::sqrt(x), 0.5 / std::sqrt(x), -0.25 / (x * std::sqrt(x))},
        {"(r - 1)^3", std::pow(x - 1, 3), 3 * std::pow(x - 1, 2), 6 * (x - 1)},
    };
    for (const auto& k : cases) {
        CAPTURE(k.text);
        const Jet2 j = parse(k.text).jet(x);
        CHECK(j.value == doctest::Approx(k.v).epsilon(1e-13));
        CHECK(j.d1 == doctest::Approx(k.d1).epsilon(1e-13));
        CHECK(j.d2 == doctest::Approx(k.d2).epsilon(1e-12));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(parse("log(r - 1)")(0.5), DomainError);
    CHECK_THROWS_AS(parse("log(r - 1)")(1.0), DomainError);
    CHECK_THROWS_AS(parse("sqrt(r - 1)")(0.5), DomainError);
    CHECK_THROWS_AS(parse("1/(r - 1)")(1.0), DomainError);
    CHECK_THROWS_AS(parse("coth(r - 1)")(1.0), DomainError);
    CHECK_THROWS_AS(parse("(r - 2)^0.5")(1.0), DomainError);
    CHECK_THROWS_AS(parse("(r - 1)^r")(0.5), DomainError);
    try {
        parse("2*log(r - 1)")(0.5);
        FAIL("no exception");
    } catch (const DomainError& e) {
        CHECK(e.r() == 0.5);
        CHECK(e.subexpression() == "log((r - 1))");
    }
    // Integer powers of negative numbers are fine.
    CHECK(parse("(r - 2)^3")(1.0) == -1.0);
}

TEST_CASE("overflow to infinity is not a domain error") {
    const Jet2 j = parse("sinh(r)").jet(800.0);
    CHECK(std::isinf(j.value));
    CHECK(std::isinf(j.d1));
    // Constant factors keep vanishing derivative terms at zero.
    const Jet2 k = parse("2*sinh(r)").jet(800.0);
    CHECK(std::isinf(k.d1));
    CHECK_FALSE(std::isnan(k.d2));
}

TEST_CASE("printing round-trips") {
    const char* texts[] = {"sinh(r)", "r^2 + 3*r", "-r^2", "2*cosh(r)/sinh(r)", "1e-300*r",
                           "0.1 + 0.2", "exp(-r)*(1 + r)", "r^(1/3)", "-(-(r))"};
    for (const char* t : texts) {
        CAPTURE(t);
        const Expr e = parse(t);
        CHECK(parse(e.to_string()) == e);
        CHECK(parse(e.to_string()).to_string() == e.to_string());
    }
    CHECK(parse("r^2 + 3*r").to_string() == "((r ^ 2) + (3 * r))");

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const Expr e = parse(testsupport::random_expr(rng, 4));
        CHECK(parse(e.to_string()) == e);
    }
}

TEST_CASE("constant detection") {
    CHECK(parse("2*3 + sin(1)").is_constant());
    CHECK_FALSE(parse("2 + 0*r").is_constant());
}

TEST_CASE("forward derivatives agree with finite differences") {
    std::mt19937_64 rng(20090601);
    for (int i = 0; i < 200; ++i) {
        const auto s = testsupport::random_sample(rng);
        const auto chk = testsupport::check_against_fd(s.expr, s.r);
        CAPTURE(s.text);
        CAPTURE(s.r);
        CHECK(chk.d1_err <= 1e-6);
        CHECK(chk.d2_err <= 1e-4);
    }
}
