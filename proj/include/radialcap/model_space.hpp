#pragma once

#include "radialcap/radial_expr.hpp"

#include <string>
#include <vector>

namespace radialcap {

/// Rotationally symmetric model space: [0, L) x_w S^{m-1} with warping
/// function w, w(0) = 0, w'(0) = 1, w > 0 away from the center.
class ModelSpace {
public:
    /// Throws InvalidArgument when m < 2. The warping conditions are not
    /// enforced here; see validate_warping.
    ModelSpace(int m, Expr w);

    int dim() const noexcept { return m_; }
    const Expr& warping() const noexcept { return w_; }

    /// Mean curvature w'/w of the distance sphere of radius r.
    double eta(double r) const;
    /// Radial sectional curvature -w''/w.
    double radial_curvature(double r) const;
    /// omega_{m-1} * w(r)^{m-1}.
    double sphere_volume(double r) const;

    /// Radial p-Laplacian of f(r): |f'|^{p-2} ((p-1) f'' + (m-1) eta f').
    double p_laplacian_radial(const Expr& f, double p, double r) const;

    /// p-capacity of the condenser (closed ball rho, open ball R):
    /// omega_{m-1} (int_rho^R w^{(1-m)/(p-1)})^{1-p}.
    double exact_annulus_p_capacity(double rho, double R, double p) const;

    /// Radial p-harmonic profile int_rho^r w^{(1-m)/(p-1)} dt.
    double p_harmonic_profile(double rho, double r, double p) const;

private:
    int m_;
    Expr w_;
};

/// Volume of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
double unit_sphere_volume(int m);

struct WarpingViolation {
    std::string condition; // "w(0)=0", "w'(0)=1", "w>0", "evaluable"
    double r;
    double value;
};

struct ValidationReport {
    std::vector<WarpingViolation> violations;
    bool valid() const { return violations.empty(); }
};

/// Checks |w(1e-6)| <= 1e-4, |w'(1e-6) - 1| <= 1e-4, and w > 0 on a
/// 1024-point geometric grid in (1e-6, r_max].
ValidationReport validate_warping(const Expr& w, double r_max);

} // namespace radialcap
