#include "radialcap/dirichlet.hpp"

#include "radialcap/errors.hpp"
#include "radialcap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace radialcap {

namespace {

constexpr double kRelTol = 1e-12;

void check_annulus(double rho, double R) {
    if (!(rho > 0.0) || !(R > rho)) throw InvalidArgument("annulus needs 0 < rho < R");
}

} // namespace

DriftOperator::DriftOperator(const Constellation& c, double p) : c_(c), p_(p) {
    if (!(p > 1.0)) throw InvalidArgument("drift operator needs p > 1");
}

double DriftOperator::coeff(double r) const {
    const double g = c_.tangency_bound(r);
    return balance(c_, p_, r) / ((p_ - 1.0) * g * g) - c_.model.eta(r);
}

RadialSolution::RadialSolution(const Constellation& c, double p, double rho, double R)
    : rho_(rho), R_(R), p_(p) {
    check_annulus(rho, R);
    auto weight = std::make_shared<WeightFunction>(c, p, rho, kRelTol);
    // Warm the knot cache slightly beyond [rho, R] so later reads never insert.
    weight->exponent_integral(rho * 0.9);
    weight->exponent_integral(R * 1.1);
    weight_ = weight;

    const RealFn f = [w = weight_.get()](double t) { return (*w)(t); };
    nodes_ = {rho};
    cumulative_ = {0.0};
    for (double x = rho * std::exp2(0.125); x < R; x *= std::exp2(0.125)) nodes_.push_back(x);
    nodes_.push_back(R);
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        cumulative_.push_back(cumulative_.back() +
                              integrate(f, nodes_[i - 1], nodes_[i], kRelTol).value);
    normalizer_ = cumulative_.back();
    if (!(normalizer_ > 0.0) || !std::isfinite(normalizer_))
        throw NumericalError("weight integral over the annulus is not positive and finite");
}

double RadialSolution::increment(double a, double b) const {
    const WeightFunction* w = weight_.get();
    return integrate([w](double t) { return (*w)(t); }, a, b, kRelTol).value / normalizer_;
}

double RadialSolution::profile(double r) const {
    if (r == rho_) return 0.0;
    if (r == R_) return 1.0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (i >= nodes_.size()) i = nodes_.size() - 1;
    return cumulative_[i] / normalizer_ + increment(nodes_[i], r);
}

double RadialSolution::derivative(double r) const { return (*weight_)(r) / normalizer_; }

RadialSolution solve_dirichlet_closed(const Constellation& c, double p, double rho, double R) {
    return RadialSolution(c, p, rho, R);
}

SampledProfile solve_dirichlet_ode(const Constellation& c, double p, double rho, double R,
                                   int step_count) {
    check_annulus(rho, R);
    if (step_count < 100) throw InvalidArgument("ODE solve needs at least 100 steps");
    const DriftOperator L(c, p);
    const double h = (R - rho) / step_count;
    SampledProfile out;
    out.r.resize(step_count + 1);
    out.psi.resize(step_count + 1);
    out.dpsi.resize(step_count + 1);
    double psi = 0.0, y = 1.0;
    out.r[0] = rho;
    out.psi[0] = psi;
    out.dpsi[0] = y;
    constexpr double kRescale = 1e200;
    for (int i = 0; i < step_count; ++i) {
        const double r = rho + i * h;
        const double c1 = L.coeff(r);
        const double c2 = L.coeff(r + 0.5 * h);
        const double c4 = L.coeff(i + 1 == step_count ? R : r + h);
        // y' = -c y, psi' = y
        const double ky1 = -c1 * y;
        const double kp1 = y;
        const double y2 = y + 0.5 * h * ky1;
        const double ky2 = -c2 * y2;
        const double kp2 = y2;
        const double y3 = y + 0.5 * h * ky2;
        const double ky3 = -c2 * y3;
        const double kp3 = y3;
        const double y4 = y + h * ky3;
        const double ky4 = -c4 * y4;
        const double kp4 = y4;
        y += h / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
        psi += h / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
        out.r[i + 1] = i + 1 == step_count ? R : r + h;
        if (std::fabs(psi) > kRescale || std::fabs(y) > kRescale) {
            const double s = 1.0 / std::max(std::fabs(psi), std::fabs(y));
            psi *= s;
            y *= s;
            for (int k = 0; k <= i; ++k) {
                out.psi[k] *= s;
                out.dpsi[k] *= s;
            }
        }
        if (!std::isfinite(psi) || !std::isfinite(y))
            throw OverflowError("ODE profile left the floating-point range");
        out.psi[i + 1] = psi;
        out.dpsi[i + 1] = y;
    }
    const double scale = out.psi.back();
    if (!(scale > 0.0)) throw NumericalError("ODE profile does not reach a positive value at R");
    for (int k = 0; k <= step_count; ++k) {
        out.psi[k] /= scale;
        out.dpsi[k] /= scale;
    }
    return out;
}

double drifted_capacity(const Constellation& c, double p, double rho, double R) {
    check_annulus(rho, R);
    const WeightFunction weight(c, p, rho, kRelTol);
    const RealFn f = [&weight](double t) { return weight(t); };
    const double norm = integrate(f, rho, R, kRelTol).value;
    return c.model.sphere_volume(rho) * weight(rho) / norm;
}

double flux_capacity(const Constellation& c, const RadialSolution& s) {
    return c.model.sphere_volume(s.rho()) * s.derivative(s.rho());
}

double capacity_upper_bound(const Constellation& c, double p, double rho, double R,
                            double boundary_flux) {
    if (!(boundary_flux > 0.0) || !std::isfinite(boundary_flux))
        throw InvalidArgument("boundary flux must be positive and finite");
    const double cap = drifted_capacity(c, p, rho, R);
    return boundary_flux * std::pow(cap / c.model.sphere_volume(rho), p - 1.0);
}

std::vector<double> chebyshev_nodes(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double x = std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * n));
        out[n - 1 - k] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    }
    return out;
}

double operator_residual(const DriftOperator& L, const RadialSolution& s,
                         const std::vector<double>& probes) {
    double worst = 0.0;
    for (double r : probes) {
        const double h = 2e-5 * r;
        const double up = s.increment(r, r + h);
        const double down = s.increment(r, r - h);
        const double d1 = (up - down) / (2.0 * h);
        const double d2 = (up + down) / (h * h);
        worst = std::max(worst, std::fabs(L.apply(d1, d2, r)));
    }
    return worst;
}

double operator_residual(const DriftOperator& L, const std::function<double(double)>& psi,
                         const std::vector<double>& probes, double h) {
    double worst = 0.0;
    for (double r : probes) {
        const double f0 = psi(r), fp = psi(r + h), fm = psi(r - h);
        const double d1 = (fp - fm) / (2.0 * h);
        const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
        worst = std::max(worst, std::fabs(L.apply(d1, d2, r)));
    }
    return worst;
}

double operator_residual(const DriftOperator& L, const SampledProfile& s) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < s.r.size(); ++i) {
        const double h = s.r[i + 1] - s.r[i];
        const double d1 = (s.psi[i + 1] - s.psi[i - 1]) / (2.0 * h);
        const double d2 = (s.psi[i + 1] - 2.0 * s.psi[i] + s.psi[i - 1]) / (h * h);
        worst = std::max(worst, std::fabs(L.apply(d1, d2, s.r[i])));
    }
    return worst;
}

} // namespace radialcap
