#include "radialcap/model_space.hpp"

#include "radialcap/errors.hpp"
#include "radialcap/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace radialcap {

namespace {

Jet2 positive_warp(const Expr& w, double r) {
    const Jet2 j = w.jet(r);
    if (j.value == 0.0) throw DomainError(r, w.to_string(), "warping function vanishes");
    return j;
}

} // namespace

double unit_sphere_volume(int m) {
    const double half = 0.5 * m;
    return 2.0 * std::exp(half * std::log(std::numbers::pi) - std::lgamma(half));
}

ModelSpace::ModelSpace(int m, Expr w) : m_(m), w_(std::move(w)) {
    if (m < 2) throw InvalidArgument("model space dimension must be at least 2");
}

double ModelSpace::eta(double r) const {
    const Jet2 j = positive_warp(w_, r);
    const double e = j.d1 / j.value;
    if (std::isnan(e)) throw DomainError(r, w_.to_string(), "w'/w is not representable");
    return e;
}

double ModelSpace::radial_curvature(double r) const {
    const Jet2 j = positive_warp(w_, r);
    const double k = -j.d2 / j.value;
    if (std::isnan(k)) throw DomainError(r, w_.to_string(), "w''/w is not representable");
    return k;
}

double ModelSpace::sphere_volume(double r) const {
    return unit_sphere_volume(m_) * std::pow(w_(r), m_ - 1);
}

double ModelSpace::p_laplacian_radial(const Expr& f, double p, double r) const {
    if (p < 2.0) throw InvalidArgument("p-Laplacian is provided for p >= 2");
    const Jet2 fj = f.jet(r);
    const double inner = (p - 1.0) * fj.d2 + (m_ - 1) * eta(r) * fj.d1;
    if (p == 2.0) return inner;
    if (fj.d1 == 0.0) return 0.0;
    return std::pow(std::fabs(fj.d1), p - 2.0) * inner;
}

double ModelSpace::p_harmonic_profile(double rho, double r, double p) const {
    const double expo = (1.0 - m_) / (p - 1.0);
    const Expr& w = w_;
    return integrate([&](double t) { return std::pow(w(t), expo); }, rho, r, 1e-12).value;
}

double ModelSpace::exact_annulus_p_capacity(double rho, double R, double p) const {
    if (!(rho > 0.0) || !(R > rho)) throw InvalidArgument("annulus needs 0 < rho < R");
    if (p < 2.0) throw InvalidArgument("capacity is provided for p >= 2");
    const double J = p_harmonic_profile(rho, R, p);
    return unit_sphere_volume(m_) * std::pow(J, 1.0 - p);
}

ValidationReport validate_warping(const Expr& w, double r_max) {
    if (!(r_max > 0.0)) throw InvalidArgument("validate_warping needs r_max > 0");
    constexpr double eps = 1e-6;
    ValidationReport rep;
    try {
        const Jet2 j = w.jet(eps);
        if (std::fabs(j.value) > 1e-4) rep.violations.push_back({"w(0)=0", eps, j.value});
        if (std::fabs(j.d1 - 1.0) > 1e-4) rep.violations.push_back({"w'(0)=1", eps, j.d1});
    } catch (const DomainError& e) {
        rep.violations.push_back({"evaluable", e.r(), std::nan("")});
    }
    constexpr int n = 1024;
    const double ratio = std::log(r_max / eps) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double r = i == n - 1 ? r_max : eps * std::exp(ratio * i);
        try {
            const double v = w(r);
            if (!(v > 0.0)) {
                rep.violations.push_back({"w>0", r, v});
                break;
            }
        } catch (const DomainError& e) {
            rep.violations.push_back({"evaluable", r, std::nan("")});
            break;
        }
    }
    return rep;
}

} // namespace radialcap
