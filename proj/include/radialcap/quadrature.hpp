#pragma once

#include <functional>
#include <string_view>
#include <string>
#include <vector>

namespace radialcap {

using RealFn = std::function<double(double)>;

struct Integral {
    double value = 0.0;
    double error = 0.0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_subdivisions = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature with interval bisection.
/// Nodes are interior, so integrable endpoint singularities are resolved by
/// repeated halving toward the singular end. b < a integrates backwards.
/// Throws QuadratureError when the subdivision limit is reached or the
/// integrand produces a non-finite value.
Integral integrate(const RealFn& f, double a, double b, const QuadratureOptions& opts);

inline Integral integrate(const RealFn& f, double a, double b, double rel_tol = 1e-10) {
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    return integrate(f, a, b, opts);
}

enum class TailKind { Divergent, Convergent, Undetermined };

/// Which test settled the classification.
enum class TailTest {
    None,
    Cauchy,            // last three relative increments below conv_eps
    GeometricDecay,    // exponent fit below -1 - band and increments shrinking geometrically
    Exponent,          // fitted exponent at or above -1 + band
    UnboundedGrowth,   // partial integral exceeded growth_factor * I_1 (or overflowed)
    ConstantIncrement, // per-doubling increments do not shrink (logarithmic or faster growth)
};

std::string_view to_string(TailKind k);
std::string_view to_string(TailTest t);

struct TailConfig {
    int k_max = 40;
    double conv_eps = 1e-8;
    double exp_band = 0.05;
    double growth_factor = 1e12;
    /// Increment ratios I_{k+1}-I_k over I_k-I_{k-1} at or above 1 - this
    /// count as non-shrinking.
    double increment_ratio_tol = 1e-6;
    double rel_tol = 1e-10;
    int fit_samples = 41;
};

struct TailEvidence {
    std::vector<double> radii;    // rho * 2^k, k = 0..K
    std::vector<double> partials; // I_k = integral of f over [rho, radii[k]]
    double alpha_hat = 0.0;       // slope of log f against log t over the fit window
    double fit_residual = 0.0;    // RMS residual of that fit
    double fit_lo = 0.0, fit_hi = 0.0;
    TailTest decided_by = TailTest::None;
    std::string stopped_early; // why doubling ended before k_max, if it did
};

struct TailClass {
    TailKind kind = TailKind::Undetermined;
    double value = 0.0; // Convergent only: estimate of the improper integral
    double error = 0.0;
    TailEvidence evidence;

    double horizon() const { return evidence.radii.back(); }
};

/// Decides whether the integral of a nonnegative f over [rho, infinity)
/// diverges, from partial integrals on doubling horizons rho * 2^k.
TailClass classify_tail(const RealFn& f, double rho, const TailConfig& cfg = {});

/// Least-squares slope of log f against log t at `samples` log-spaced points
/// in [lo, hi]. Points where f is not positive and finite are skipped.
/// Returns {slope, rms residual}; the slope is -inf when f underflowed to zero
/// on the whole window and +inf when it overflowed.
std::pair<double, double> fit_log_slope(const RealFn& f, double lo, double hi, int samples);

} // namespace radialcap
