#include "radialcap/quadrature.hpp"

#include "radialcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace radialcap {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    double abs_value; // integral of |f|, for the rounding floor
    bool operator<(const Panel& o) const { return error < o.error; }
};

double checked(const RealFn& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        throw QuadratureError("integrand is not finite at " + std::to_string(x), x, x);
    }
    return y;
}

Panel gauss_kronrod(const RealFn& f, double a, double b) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::fabs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = checked(f, center - dx);
        const double f2 = checked(f, center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
    const double ahalf = std::fabs(half);
    const double result = resk * half;
    resabs *= ahalf;
    resasc *= ahalf;
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
    return {a, b, result, err, resabs};
}

} // namespace

Integral integrate(const RealFn& f, double a, double b, const QuadratureOptions& opts) {
    if (a == b) return {};
    if (b < a) {
        Integral r = integrate(f, b, a, opts);
        return {-r.value, r.error};
    }
    std::priority_queue<Panel> heap;
    Panel first = gauss_kronrod(f, a, b);
    double total = first.value;
    double error = first.error;
    double abs_total = first.abs_value;
    heap.push(first);
    // Panels too narrow to split further; their error is final.
    double frozen_error = 0.0;
    int subdivisions = 0;
    // Below `floor` the estimate is dominated by rounding in the rule itself
    // (every panel's error is at least 50 eps times its integral of |f|).
    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto converged = [&] {
        const double floor = 100.0 * eps * abs_total;
        return error <= std::max({opts.rel_tol * std::fabs(total), opts.abs_tol, floor});
    };
    while (!converged()) {
        if (heap.empty() || subdivisions >= opts.max_subdivisions) {
            const Panel worst = heap.empty() ? first : heap.top();
            throw QuadratureError("quadrature did not reach tolerance after " +
                                      std::to_string(subdivisions) + " subdivisions",
                                  worst.a, worst.b);
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            frozen_error += worst.error;
            continue;
        }
        const Panel left = gauss_kronrod(f, worst.a, mid);
        const Panel right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_total += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Recompute from the panels to shed accumulated cancellation in `total`.
    double sum = 0.0, err = frozen_error;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err};
}

std::string_view to_string(TailKind k) {
    switch (k) {
    case TailKind::Divergent: return "divergent";
    case TailKind::Convergent: return "convergent";
    case TailKind::Undetermined: return "undetermined";
    }
    return "?";
}

std::string_view to_string(TailTest t) {
    switch (t) {
    case TailTest::None: return "none";
    case TailTest::Cauchy: return "cauchy";
    case TailTest::GeometricDecay: return "geometric_decay";
    case TailTest::Exponent: return "exponent";
    case TailTest::UnboundedGrowth: return "unbounded_growth";
    case TailTest::ConstantIncrement: return "constant_increment";
    }
    return "?";
}

std::pair<double, double> fit_log_slope(const RealFn& f, double lo, double hi, int samples) {
    samples = std::max(samples, 2);
    std::vector<double> xs, ys;
    bool saw_zero = false, saw_inf = false;
    const double step = std::log(hi / lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double t = i == samples - 1 ? hi : lo * std::exp(step * i);
        const double y = f(t);
        if (y > 0.0 && std::isfinite(y)) {
            xs.push_back(std::log(t));
            ys.push_back(std::log(y));
        } else if (y == 0.0) {
            saw_zero = true;
        } else if (std::isinf(y)) {
            saw_inf = true;
        }
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (xs.size() < 2) {
        if (saw_inf) return {inf, 0.0};
        if (saw_zero) return {-inf, 0.0};
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (my + slope * (xs[i] - mx));
        ss += e * e;
    }
    return {slope, std::sqrt(ss / n)};
}

TailClass classify_tail(const RealFn& f, double rho, const TailConfig& cfg) {
    if (!(rho > 0.0)) throw InvalidArgument("classify_tail needs rho > 0");
    if (cfg.k_max < 4) throw InvalidArgument("classify_tail needs k_max >= 4");

    TailClass out;
    auto& ev = out.evidence;
    ev.radii.push_back(rho);
    ev.partials.push_back(0.0);
    double quad_error = 0.0;
    // pieces[k] = integral over [rho 2^{k-1}, rho 2^k]; differences of the
    // partial sums would lose tiny increments to rounding.
    std::vector<double> pieces{0.0};

    auto decide = [&](TailKind kind, TailTest test) {
        out.kind = kind;
        ev.decided_by = test;
    };

    for (int k = 1; k <= cfg.k_max && ev.decided_by == TailTest::None; ++k) {
        const double a = ev.radii.back();
        const double b = 2.0 * a;
        double piece = 0.0;
        try {
            const Integral in = integrate(f, a, b, cfg.rel_tol);
            piece = in.value;
            quad_error += in.error;
        } catch (const QuadratureError&) {
            // An overflowing integrand is itself evidence of unbounded growth.
            if (!std::isinf(f(b)) && !std::isinf(f(0.5 * (a + b)))) throw;
            piece = std::numeric_limits<double>::infinity();
        } catch (const DomainError& e) {
            // Typically the data overflow (sinh(r) past r = 710) while the
            // weight itself is still tiny. Stop here and let the post-loop
            // tests decide from the horizons reached so far.
            if (k <= 4) throw;
            ev.stopped_early = std::string("integrand not evaluable beyond r = ") +
                               std::to_string(a) + ": " + e.what();
            break;
        }
        pieces.push_back(piece);
        const double total = ev.partials.back() + piece;
        ev.radii.push_back(b);
        ev.partials.push_back(total);
        const auto& I = ev.partials;

        if (!std::isfinite(total) || (I[1] > 0.0 && total > cfg.growth_factor * I[1])) {
            decide(TailKind::Divergent, TailTest::UnboundedGrowth);
            break;
        }
        if (k >= 4) {
            bool cauchy = true;
            for (int j = k - 3; j < k; ++j) {
                const double inc = pieces[j + 1];
                if (I[j] > 0.0) {
                    cauchy = cauchy && inc / I[j] < cfg.conv_eps;
                } else {
                    cauchy = cauchy && inc == 0.0;
                }
            }
            if (cauchy) {
                decide(TailKind::Convergent, TailTest::Cauchy);
                out.value = total;
                out.error = quad_error + pieces[k];
            }
        }
    }

    const double T = ev.radii.back();
    ev.fit_hi = T;
    ev.fit_lo = std::max(rho, T / 100.0);
    std::tie(ev.alpha_hat, ev.fit_residual) = fit_log_slope(f, ev.fit_lo, ev.fit_hi, cfg.fit_samples);

    if (ev.decided_by != TailTest::None) return out;

    const auto& I = ev.partials;
    const std::size_t K = I.size() - 1;
    if (K < 4) {
        out.kind = TailKind::Undetermined;
        return out;
    }
    const double alpha = ev.alpha_hat;
    const double band = cfg.exp_band;
    double ratios[3];
    bool non_shrinking = true;
    bool geometric = true;
    const double q_max = std::pow(2.0, -band / 2.0);
    for (int i = 0; i < 3; ++i) {
        const std::size_t j = K - 2 + i; // ratios of pieces ending at K-2, K-1, K
        const double prev = pieces[j - 1];
        const double cur = pieces[j];
        ratios[i] = prev > 0.0 ? cur / prev : std::numeric_limits<double>::quiet_NaN();
        non_shrinking = non_shrinking && ratios[i] >= 1.0 - cfg.increment_ratio_tol;
        geometric = geometric && ratios[i] > 0.0 && ratios[i] <= q_max;
    }

    if (alpha >= -1.0 + band) {
        decide(TailKind::Divergent, TailTest::Exponent);
    } else if (non_shrinking && alpha > -1.0 - band) {
        decide(TailKind::Divergent, TailTest::ConstantIncrement);
    } else if (alpha <= -1.0 - band && geometric) {
        decide(TailKind::Convergent, TailTest::GeometricDecay);
        const double q = ratios[2];
        const double last = pieces[K];
        const double tail = last * q / (1.0 - q);
        out.value = I[K] + tail;
        out.error = quad_error + std::fabs(tail) * std::fabs(ratios[2] - ratios[1]) / (1.0 - q) +
                    std::numeric_limits<double>::epsilon() * out.value;
    } else {
        out.kind = TailKind::Undetermined;
    }
    return out;
}

} // namespace radialcap
