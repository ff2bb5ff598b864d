// Random expression strings for derivative checks.
#pragma once

#include "radialcap/errors.hpp"
#include "radialcap/radial_expr.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

namespace testsupport {

inline std::string random_number(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.25, 3.0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", u(rng));
    return buf;
}

inline std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    if (depth == 0) return pick(rng) < 6 ? "r" : random_number(rng);
    // abs is left out: its kink would defeat the finite-difference oracle.
    static const char* funcs[] = {"sin", "cos", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "coth", "exp"};
    const int k = pick(rng);
    switch (k) {
    case 0: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 1: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 2: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) + "/(1 + " + random_expr(rng, depth - 1) + "^2)";
    case 4: return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(1 + pick(rng) % 3);
    case 5: return "r^" + random_number(rng);
    default: {
        std::uniform_int_distribution<int> f(0, 9);
        return std::string(funcs[f(rng)]) + "(" + random_expr(rng, depth - 1) + ")";
    }
    }
}

struct Sample {
    radialcap::Expr expr;
    std::string text;
    double r;
};

/// An expression and a point in [0.5, 3] where it and its neighbourhood
/// evaluate to moderate finite values.
inline Sample random_sample(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ur(0.5, 3.0);
    std::uniform_int_distribution<int> depth(1, 3);
    for (;;) {
        const std::string text = random_expr(rng, depth(rng));
        const radialcap::Expr e = radialcap::parse(text);
        const double r = ur(rng);
        try {
            bool ok = true;
            for (double d : {-2e-4, 0.0, 2e-4}) {
                const radialcap::Jet2 j = e.jet(r + d);
                ok = ok && std::fabs(j.value) < 1e3 && std::fabs(j.d1) < 1e3 && std::fabs(j.d2) < 1e3;
            }
            if (ok) return {e, text, r};
        } catch (const radialcap::DomainError&) {
        }
    }
}

struct FdCheck {
    double d1_err;
    double d2_err;
};

/// Relative errors |ad - fd| / (1 + |fd|) against central differences.
inline FdCheck check_against_fd(const radialcap::Expr& e, double r) {
    const radialcap::Jet2 j = e.jet(r);
    const double h1 = 1e-5, h2 = 1e-4;
    const double fd1 = (e(r + h1) - e(r - h1)) / (2 * h1);
    const double fd2 = (e(r + h2) - 2 * e(r) + e(r - h2)) / (h2 * h2);
    return {std::fabs(j.d1 - fd1) / (1 + std::fabs(fd1)), std::fabs(j.d2 - fd2) / (1 + std::fabs(fd2))};
}

} // namespace testsupport
