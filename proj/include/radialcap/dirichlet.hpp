#pragma once

#include "radialcap/constellation.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace radialcap {

/// Radial drifted operator L psi = psi'' + c(r) psi' on the model space, with
/// c(r) = M_p(r) / ((p-1) g(r)^2) - eta_w(r) (g = 1 for upper tangency).
class DriftOperator {
public:
    DriftOperator(const Constellation& c, double p);

    double coeff(double r) const;
    double apply(double psi_d1, double psi_d2, double r) const {
        return psi_d2 + coeff(r) * psi_d1;
    }

    const Constellation& constellation() const noexcept { return c_; }
    double p() const noexcept { return p_; }

private:
    Constellation c_;
    double p_;
};

/// Closed-form Dirichlet solution psi(r) = int_rho^r Lambda / int_rho^R Lambda
/// of L psi = 0, psi(rho) = 0, psi(R) = 1. Copies share the underlying weight;
/// evaluation within [rho, R] only reads precomputed data.
class RadialSolution {
public:
    RadialSolution(const Constellation& c, double p, double rho, double R);

    double rho() const noexcept { return rho_; }
    double R() const noexcept { return R_; }
    double p() const noexcept { return p_; }
    /// int_rho^R Lambda.
    double normalizer() const noexcept { return normalizer_; }

    double profile(double r) const;
    double derivative(double r) const;
    /// psi(b) - psi(a), computed directly from the weight on [a, b].
    double increment(double a, double b) const;

    const WeightFunction& weight() const { return *weight_; }

private:
    double rho_, R_, p_;
    std::shared_ptr<const WeightFunction> weight_;
    std::vector<double> nodes_;      // breakpoints in [rho, R]
    std::vector<double> cumulative_; // int_rho^{nodes_[i]} Lambda
    double normalizer_ = 0.0;
};

RadialSolution solve_dirichlet_closed(const Constellation& c, double p, double rho, double R);

struct SampledProfile {
    std::vector<double> r;
    std::vector<double> psi;
    std::vector<double> dpsi;
};

/// Integrates psi' = y, y' = -c(r) y with classical RK4 on `step_count`
/// uniform steps from psi(rho) = 0, y(rho) = 1, then divides by psi(R).
/// Intermediate values are renormalised whenever they grow past 1e200.
SampledProfile solve_dirichlet_ode(const Constellation& c, double p, double rho, double R,
                                   int step_count);

/// Vol(boundary of D_rho) Lambda(rho) / int_rho^R Lambda.
double drifted_capacity(const Constellation& c, double p, double rho, double R);

/// Vol(boundary of D_rho) psi'(rho) for a computed solution.
double flux_capacity(const Constellation& c, const RadialSolution& s);

/// boundary_flux * (Cap_L / Vol(boundary of D_rho))^{p-1}; bounds the
/// p-capacity of the extrinsic condenser (D_rho, D_R) on the submanifold.
double capacity_upper_bound(const Constellation& c, double p, double rho, double R,
                            double boundary_flux);

/// n Chebyshev-Gauss nodes in the open interval (a, b).
std::vector<double> chebyshev_nodes(double a, double b, int n = 257);

/// max |psi'' + c psi'| over `probes`, by central differences on the closed
/// form (step 2e-5 r).
double operator_residual(const DriftOperator& L, const RadialSolution& s,
                         const std::vector<double>& probes);

/// Same for an arbitrary profile callable, with finite-difference step h.
double operator_residual(const DriftOperator& L, const std::function<double(double)>& psi,
                         const std::vector<double>& probes, double h);

/// Residual at the interior nodes of a uniformly sampled profile.
double operator_residual(const DriftOperator& L, const SampledProfile& s);

} // namespace radialcap
