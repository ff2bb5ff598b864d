#include "radialcap/constellation.hpp"

#include "radialcap/errors.hpp"
#include "radialcap/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace radialcap {

namespace {

constexpr int kKnotsPerOctave = 8;
constexpr double kMinTangency = 1e-8;

} // namespace

Constellation::Constellation(int n_, ModelSpace model_, Expr g_, Expr lambda_, Expr h_,
                             Tangency tangency_)
    : n(n_), model(std::move(model_)), g(std::move(g_)), lambda(std::move(lambda_)),
      h(std::move(h_)), tangency(tangency_) {
    if (model.dim() > n)
        throw InvalidArgument("submanifold dimension m must not exceed ambient dimension n");
}

Constellation Constellation::self(const ModelSpace& model, Tangency tangency) {
    return Constellation(model.dim(), model, Expr::number(1.0), Expr::number(0.0),
                         Expr::number(0.0), tangency);
}

double Constellation::tangency_bound(double r) const {
    if (tangency == Tangency::Upper) return 1.0;
    const double v = g(r);
    if (!(v >= kMinTangency))
        throw DomainError(r, g.to_string(), "tangency bound g must be at least 1e-8");
    if (v > 1.0 + 1e-12)
        throw DomainError(r, g.to_string(), "tangency bound g cannot exceed 1");
    return v;
}

double balance(const Constellation& c, double p, double r) {
    const int m = c.m();
    return (m + p - 2.0) * c.model.eta(r) - m * c.h(r) - (p - 2.0) * c.lambda(r);
}

double balance_zero_band(const Constellation& c, double p, double r) {
    const int m = c.m();
    const double scale = (m + p - 2.0) * std::fabs(c.model.eta(r)) + m * std::fabs(c.h(r)) +
                         std::fabs(p - 2.0) * std::fabs(c.lambda(r));
    return 1e-12 * (1.0 + scale);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw InvalidArgument("bad geometric grid");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = lo * std::exp(step * i);
    out.back() = hi;
    return out;
}

BalanceProfile balance_sign(const Constellation& c, double p, double lo, double hi,
                            int grid_size) {
    BalanceProfile prof;
    prof.p = p;
    prof.r = geometric_grid(lo, hi, grid_size);
    prof.values.reserve(prof.r.size());
    std::vector<int> signs;
    signs.reserve(prof.r.size());
    bool pos = false, neg = false;
    for (double r : prof.r) {
        const double v = balance(c, p, r);
        const double band = balance_zero_band(c, p, r);
        prof.values.push_back(v);
        const int s = v > band ? 1 : (v < -band ? -1 : 0);
        signs.push_back(s);
        pos = pos || s > 0;
        neg = neg || s < 0;
    }
    prof.all_zero = !pos && !neg;
    if (!neg) {
        prof.sign = SignSummary::NonNegative;
    } else if (!pos) {
        prof.sign = SignSummary::NonPositive;
    } else {
        prof.sign = SignSummary::Mixed;
        // Locate sign changes between consecutive signed samples by bisection.
        std::size_t last = prof.r.size();
        for (std::size_t i = 0; i < prof.r.size() && prof.witnesses.size() < 5; ++i) {
            if (signs[i] == 0) continue;
            if (last != prof.r.size() && signs[last] != signs[i]) {
                double a = prof.r[last], b = prof.r[i];
                const int sa = signs[last];
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (a + b);
                    if (mid <= a || mid >= b) break;
                    const double v = balance(c, p, mid);
                    if ((v > 0.0 ? 1 : -1) == sa)
                        a = mid;
                    else
                        b = mid;
                }
                prof.witnesses.push_back(0.5 * (a + b));
            }
            last = i;
        }
    }
    return prof;
}

WeightFunction::WeightFunction(const Constellation& c, double p, double rho, double rel_tol)
    : c_(c), p_(p), rho_(rho), rel_tol_(rel_tol) {
    if (!(rho > 0.0)) throw InvalidArgument("weight base radius must be positive");
    if (!(p > 1.0)) throw InvalidArgument("weight needs p > 1");
    knots_[0] = 0.0;
}

double WeightFunction::integrand(double r) const {
    const double g = c_.tangency_bound(r);
    return balance(c_, p_, r) / ((p_ - 1.0) * g * g);
}

double WeightFunction::knot_radius(int j) const {
    return rho_ * std::exp2(static_cast<double>(j) / kKnotsPerOctave);
}

double WeightFunction::segment(double a, double b) const {
    // When the balance vanishes identically the integrand is pure rounding
    // noise; the absolute floor (a hundredth of the zero band) stops the
    // quadrature from chasing it.
    const double mid = 0.5 * (a + b);
    const double g = c_.tangency_bound(mid);
    QuadratureOptions opts;
    opts.rel_tol = rel_tol_;
    opts.abs_tol = 1e-2 * balance_zero_band(c_, p_, mid) * std::fabs(b - a) / ((p_ - 1.0) * g * g);
    return integrate([this](double t) { return integrand(t); }, a, b, opts).value;
}

double WeightFunction::knot_value(int j) const {
    if (auto it = knots_.find(j); it != knots_.end()) return it->second;
    if (j > 0) {
        auto it = std::prev(knots_.upper_bound(j));
        int k = it->first;
        double v = it->second;
        for (; k < j; ++k) {
            v += segment(knot_radius(k), knot_radius(k + 1));
            knots_[k + 1] = v;
        }
        return v;
    }
    auto it = knots_.lower_bound(j);
    int k = it->first;
    double v = it->second;
    for (; k > j; --k) {
        v += segment(knot_radius(k), knot_radius(k - 1));
        knots_[k - 1] = v;
    }
    return v;
}

double WeightFunction::exponent_integral(double r) const {
    if (!(r > 0.0)) throw InvalidArgument("weight needs r > 0");
    if (r == rho_) return 0.0;
    const int j = static_cast<int>(std::floor(kKnotsPerOctave * std::log2(r / rho_)));
    const double base = knot_value(j);
    const double a = knot_radius(j);
    if (r == a) return base;
    return base + segment(a, r);
}

double WeightFunction::log_weight(double r) const {
    const double w = c_.model.warping()(r);
    if (!(w > 0.0)) throw DomainError(r, c_.model.warping().to_string(), "warping function must be positive");
    return std::log(w) - exponent_integral(r);
}

double WeightFunction::operator()(double r) const {
    const double w = c_.model.warping()(r);
    if (!(w > 0.0)) throw DomainError(r, c_.model.warping().to_string(), "warping function must be positive");
    const double I = exponent_integral(r);
    const double v = w * std::exp(-I);
    if (std::isnan(v)) return std::exp(std::log(w) - I);
    return v;
}

double lambda_weight(const Constellation& c, double p, double rho, double r) {
    return WeightFunction(c, p, rho)(r);
}

double balance_shift_identity_check(const Constellation& c, double p, double q,
                                    const std::vector<double>& grid) {
    double worst = 0.0;
    const int m = c.m();
    for (double r : grid) {
        const double eta = c.model.eta(r);
        const double lam = c.lambda(r);
        const double h = c.h(r);
        const double dev = balance(c, p, r) - balance(c, q, r) - (p - q) * (eta - lam);
        const double scale = 1.0 + (2.0 * m + p + q) * std::fabs(eta) + 2.0 * m * std::fabs(h) +
                             (std::fabs(p - 2.0) + std::fabs(q - 2.0) + std::fabs(p - q)) *
                                 std::fabs(lam);
        worst = std::max(worst, std::fabs(dev) / scale);
    }
    return worst;
}

} // namespace radialcap
