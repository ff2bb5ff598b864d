#pragma once

#include "radialcap/model_space.hpp"
#include "radialcap/radial_expr.hpp"

#include <map>
#include <vector>

namespace radialcap {

enum class Tangency { Lower, Upper };

/// Comparison constellation datum: the model space M_w^m together with the
/// radial lower bounds g (tangency), lambda (radial second fundamental form
/// component) and h (radial mean convexity) of a submanifold S^m in N^n.
struct Constellation {
    int n;
    ModelSpace model;
    Expr g;
    Expr lambda;
    Expr h;
    Tangency tangency;

    /// Throws InvalidArgument unless 2 <= m <= n.
    Constellation(int n, ModelSpace model, Expr g, Expr lambda, Expr h, Tangency tangency);

    int m() const noexcept { return model.dim(); }

    /// The self-constellation S = N = M_w^m: g = 1, lambda = h = 0.
    static Constellation self(const ModelSpace& model, Tangency tangency = Tangency::Lower);

    /// g(r) in lower-tangency mode (must lie in [1e-8, 1]); 1 in upper mode.
    double tangency_bound(double r) const;
};

/// (m + p - 2) eta_w - m h - (p - 2) lambda.
double balance(const Constellation& c, double p, double r);

enum class SignSummary { NonNegative, NonPositive, Mixed };

struct BalanceProfile {
    double p = 2.0;
    std::vector<double> r;
    std::vector<double> values;
    SignSummary sign = SignSummary::NonNegative;
    /// Approximate sign-change locations (at most five) when Mixed.
    std::vector<double> witnesses;
    /// True when every sample lies in the zero band (counts for both signs).
    bool all_zero = false;

    bool non_negative() const { return sign == SignSummary::NonNegative || all_zero; }
    bool non_positive() const { return sign == SignSummary::NonPositive || all_zero; }
};

/// Magnitude below which a balance sample counts as zero. Scales with the
/// size of the terms being cancelled so that identities like h = eta_w at
/// small r do not flip sign on rounding noise.
double balance_zero_band(const Constellation& c, double p, double r);

/// Samples the balance on a geometric grid over [lo, hi].
BalanceProfile balance_sign(const Constellation& c, double p, double lo, double hi,
                            int grid_size);

/// Lambda weight w(r) exp(-int_rho^r M_p / ((p-1) g^2)), with g = 1 in
/// upper-tangency mode. The running integral is cached on a geometric knot
/// grid anchored at rho, so repeated evaluation (quadrature of the weight)
/// stays cheap. Not safe for concurrent use; give each thread its own.
class WeightFunction {
public:
    WeightFunction(const Constellation& c, double p, double rho, double rel_tol = 1e-12);

    double operator()(double r) const;
    /// log of the weight, finite even where the weight itself would
    /// overflow or underflow.
    double log_weight(double r) const;
    /// int_rho^r M_p / ((p-1) g^2).
    double exponent_integral(double r) const;
    /// M_p / ((p-1) g^2) at r.
    double integrand(double r) const;

    double rho() const noexcept { return rho_; }
    double p() const noexcept { return p_; }
    const Constellation& constellation() const noexcept { return c_; }

private:
    Constellation c_;
    double p_;
    double rho_;
    double rel_tol_;
    mutable std::map<int, double> knots_; // knot index j -> integral at rho 2^{j/8}

    double knot_radius(int j) const;
    double knot_value(int j) const;
    double segment(double a, double b) const;
};

/// One-shot evaluation of the weight at r.
double lambda_weight(const Constellation& c, double p, double rho, double r);

/// max over r of |M_p - M_q - (p-q)(eta_w - lambda)|, relative to the size
/// of the terms involved.
double balance_shift_identity_check(const Constellation& c, double p, double q,
                                    const std::vector<double>& grid);

/// n log-spaced points covering [lo, hi], endpoints included.
std::vector<double> geometric_grid(double lo, double hi, int n);

} // namespace radialcap
