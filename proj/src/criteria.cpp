#include "radialcap/criteria.hpp"

#include "parallel.hpp"
#include "radialcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace radialcap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TailConfig effective_tail(const ClassifyConfig& cfg, double rho) {
    TailConfig t = cfg.tail;
    if (cfg.horizon > 0.0) {
        if (!(cfg.horizon > rho)) throw InvalidArgument("horizon must exceed rho");
        const int k = static_cast<int>(std::floor(std::log2(cfg.horizon / rho) + 1e-12));
        t.k_max = std::min(t.k_max, k);
        if (t.k_max < 4) throw InvalidArgument("horizon must be at least 16 * rho");
    }
    return t;
}

void check_p_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("rho must be positive");
}

// Evaluates g on the grid so that lower-tangency bounds out of (0, 1] are
// reported even where the weight quadrature never samples.
void check_tangency(const Constellation& c, const std::vector<double>& grid) {
    if (c.tangency != Tangency::Lower) return;
    for (double r : grid) c.tangency_bound(r);
}

std::string interval_note(double lo, double hi, bool tail = true) {
    std::ostringstream os;
    os.precision(6);
    os << "hypotheses certified numerically on [" << lo << ", " << hi << "] only";
    if (tail) os << "; behaviour beyond the horizon is inferred from the tail fit";
    return os.str();
}

Verdict below_two(double p, double rho) {
    Verdict v;
    v.p = p;
    v.rho = rho;
    v.reason = Reason::PBelow2;
    v.notes.push_back("criteria require p >= 2");
    return v;
}

void fail_hypothesis(Verdict& v, std::string what, std::vector<double> witnesses) {
    v.outcome = Outcome::Inconclusive;
    v.by = Criterion::None;
    v.reason = Reason::BalanceFails;
    v.failed_hypothesis = std::move(what);
    v.witnesses = std::move(witnesses);
}

// Witnesses for a balance profile failing the required sign: the recorded
// sign changes, or the first offending sample when the sign is uniformly wrong.
std::vector<double> balance_witnesses(const Constellation& c, const BalanceProfile& prof,
                                      bool want_non_negative) {
    if (!prof.witnesses.empty()) return prof.witnesses;
    for (std::size_t i = 0; i < prof.r.size(); ++i) {
        const double band = balance_zero_band(c, prof.p, prof.r[i]);
        if (want_non_negative ? prof.values[i] < -band : prof.values[i] > band)
            return {prof.r[i]};
    }
    return {};
}

void apply_tail(Verdict& v, const TailClass& tail, Criterion by) {
    switch (tail.kind) {
    case TailKind::Divergent:
        v.outcome = Outcome::PParabolic;
        v.by = by;
        v.reason = Reason::None;
        break;
    case TailKind::Convergent:
        v.reason = Reason::TailConvergent;
        break;
    case TailKind::Undetermined:
        v.reason = Reason::TailUndetermined;
        break;
    }
}

} // namespace

std::string_view to_string(Outcome o) {
    return o == Outcome::PParabolic ? "p_parabolic" : "inconclusive";
}

std::string_view to_string(Criterion c) {
    switch (c) {
    case Criterion::None: return "none";
    case Criterion::LowerTangency: return "theorem_1_lower_tangency";
    case Criterion::UpperTangency: return "theorem_2_upper_tangency";
    case Criterion::BoundedWarping: return "corollary_bounded_warping";
    case Criterion::MonotoneInP: return "corollary_monotone_in_p";
    }
    return "?";
}

std::string_view to_string(Reason r) {
    switch (r) {
    case Reason::None: return "none";
    case Reason::BalanceFails: return "balance_fails";
    case Reason::TailConvergent: return "tail_convergent";
    case Reason::TailUndetermined: return "tail_undetermined";
    case Reason::PBelow2: return "p_below_2";
    }
    return "?";
}

std::string_view to_string(SignSummary s) {
    switch (s) {
    case SignSummary::NonNegative: return "non_negative";
    case SignSummary::NonPositive: return "non_positive";
    case SignSummary::Mixed: return "mixed";
    }
    return "?";
}

Verdict classify(const Constellation& c, double p, double rho, const ClassifyConfig& cfg) {
    check_p_rho(rho);
    if (!(p >= 2.0)) return below_two(p, rho);

    const TailConfig tcfg = effective_tail(cfg, rho);
    const WeightFunction weight(c, p, rho);
    TailClass tail = classify_tail([&weight](double t) { return weight(t); }, rho, tcfg);

    Verdict v;
    v.p = p;
    v.rho = rho;
    v.certified_lo = std::min(rho, cfg.grid_min);
    v.certified_hi = tail.horizon();
    BalanceProfile prof = balance_sign(c, p, v.certified_lo, v.certified_hi, cfg.grid_size);
    check_tangency(c, prof.r);

    const bool lower = c.tangency == Tangency::Lower;
    const bool balanced = lower ? prof.non_negative() : prof.non_positive();
    if (!balanced) {
        fail_hypothesis(v, "balance", balance_witnesses(c, prof, lower));
    } else {
        apply_tail(v, tail, lower ? Criterion::LowerTangency : Criterion::UpperTangency);
    }
    v.balance = std::move(prof);
    v.tail = std::move(tail);
    v.notes.push_back(interval_note(v.certified_lo, v.certified_hi));
    return v;
}

Verdict classify_bounded_w(const Constellation& c, double p, double rho, double r0,
                           double lower_const, const ClassifyConfig& cfg) {
    check_p_rho(rho);
    if (c.tangency != Tangency::Upper)
        throw InvalidArgument("the bounded-warping criterion needs an upper-tangency constellation");
    if (!(lower_const > 0.0)) throw InvalidArgument("lower bound for w must be positive");
    if (!(r0 > 0.0)) throw InvalidArgument("r0 must be positive");
    if (!(p >= 2.0)) return below_two(p, rho);

    Verdict v;
    v.p = p;
    v.rho = rho;
    v.certified_lo = std::min(rho, cfg.grid_min);
    // No tail quadrature here, so the hypothesis grid defaults to a moderate
    // horizon where hyperbolic-type expressions stay representable.
    v.certified_hi = cfg.horizon > 0.0 ? cfg.horizon : 512.0 * std::max(r0, rho);
    if (!(v.certified_hi > r0)) throw InvalidArgument("horizon must exceed r0");
    BalanceProfile prof = balance_sign(c, p, v.certified_lo, v.certified_hi, cfg.grid_size);
    if (!prof.non_positive()) {
        fail_hypothesis(v, "balance", balance_witnesses(c, prof, false));
    } else {
        const Expr& w = c.model.warping();
        for (double r : geometric_grid(r0, v.certified_hi, cfg.grid_size)) {
            if (!(w(r) >= lower_const)) {
                fail_hypothesis(v, "warping_lower_bound", {r});
                break;
            }
        }
    }
    if (v.reason == Reason::None) {
        // Lambda_p >= w on [rho, horizon] follows from balance <= 0; record the
        // smallest observed ratio as a diagnostic.
        const WeightFunction weight(c, p, rho);
        double worst = std::numeric_limits<double>::infinity();
        for (double r : geometric_grid(rho, std::min(v.certified_hi, rho * 1024.0), 64))
            worst = std::min(worst, std::exp(weight.log_weight(r) - std::log(c.model.warping()(r))));
        if (worst < 1.0 - 1e-9)
            throw NumericalError("weight fell below the warping function despite balance <= 0");
        v.outcome = Outcome::PParabolic;
        v.by = Criterion::BoundedWarping;
        std::ostringstream os;
        os << "min Lambda_p / w on [rho, " << std::min(v.certified_hi, rho * 1024.0)
           << "] = " << worst;
        v.notes.push_back(os.str());
    }
    v.balance = std::move(prof);
    v.notes.push_back(interval_note(v.certified_lo, v.certified_hi, false));
    return v;
}

Verdict classify_monotone(const Constellation& c, double q, double p, double rho,
                          const ClassifyConfig& cfg) {
    check_p_rho(rho);
    if (c.tangency != Tangency::Upper)
        throw InvalidArgument("the monotone criterion needs an upper-tangency constellation");
    if (!(q >= 2.0) || !(p >= 2.0)) return below_two(std::min(p, q), rho);
    if (q > p) throw InvalidArgument("monotone criterion needs q <= p");

    const TailConfig tcfg = effective_tail(cfg, rho);
    const WeightFunction weight_q(c, q, rho);
    TailClass tail = classify_tail([&weight_q](double t) { return weight_q(t); }, rho, tcfg);

    Verdict v;
    v.p = p;
    v.rho = rho;
    v.certified_lo = std::min(rho, cfg.grid_min);
    v.certified_hi = tail.horizon();
    const auto grid = geometric_grid(v.certified_lo, v.certified_hi, cfg.grid_size);

    for (double r : grid) {
        const double eta = c.model.eta(r);
        const double band = balance_zero_band(c, q, r);
        if (c.h(r) > eta + band || eta > c.lambda(r) + band) {
            fail_hypothesis(v, "sandwich", {r});
            break;
        }
    }
    BalanceProfile prof = balance_sign(c, q, v.certified_lo, v.certified_hi, cfg.grid_size);
    if (v.reason == Reason::None && !prof.non_positive())
        fail_hypothesis(v, "balance", balance_witnesses(c, prof, false));

    if (v.reason == Reason::None && p > q) {
        // Comparison used to transfer divergence from q to p.
        for (double r : grid) {
            const double mp = balance(c, p, r), mq = balance(c, q, r);
            const double band = balance_zero_band(c, p, r) + balance_zero_band(c, q, r);
            if (mp > mq + band || mp / (p - 1.0) > mq / (q - 1.0) + band) {
                std::ostringstream os;
                os.precision(17);
                os << "balance comparison between p and q failed at r=" << r;
                throw NumericalError(os.str());
            }
        }
        const WeightFunction weight_p(c, p, rho);
        const RealFn fp = [&weight_p](double t) { return weight_p(t); };
        double Ip = 0.0;
        const auto& radii = tail.evidence.radii;
        for (std::size_t k = 1; k < radii.size(); ++k) {
            const double Iq = tail.evidence.partials[k];
            if (!std::isfinite(Iq)) break;
            Ip += integrate(fp, radii[k - 1], radii[k], cfg.tail.rel_tol).value;
            if (Ip < Iq * (1.0 - 1e-8)) {
                std::ostringstream os;
                os.precision(17);
                os << "weight integral at p fell below the one at q on [rho, " << radii[k] << "]";
                throw NumericalError(os.str());
            }
            if (!std::isfinite(Ip)) break;
        }
    }
    if (v.reason == Reason::None) apply_tail(v, tail, Criterion::MonotoneInP);
    v.balance = std::move(prof);
    v.tail = std::move(tail);
    {
        std::ostringstream os;
        os << "hypotheses checked at q=" << q;
        v.notes.push_back(os.str());
    }
    v.notes.push_back(interval_note(v.certified_lo, v.certified_hi));
    return v;
}

std::vector<SweepRow> sweep(const Constellation& c, double p_from, double p_to, double p_step,
                            double rho, const ClassifyConfig& cfg) {
    if (!(p_step > 0.0) || !(p_to >= p_from) || !std::isfinite(p_from) || !std::isfinite(p_to))
        throw InvalidArgument("empty p range");
    const auto count = static_cast<std::size_t>(std::floor((p_to - p_from) / p_step + 1e-9)) + 1;
    std::vector<SweepRow> rows(count);
    detail::parallel_for(count, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.p = p_from + static_cast<double>(i) * p_step;
        row.alpha_hat = kNaN;
        row.cap_at_horizon = kNaN;
        try {
            Verdict v = classify(c, row.p, rho, cfg);
            if (v.tail) {
                row.alpha_hat = v.tail->evidence.alpha_hat;
                const double I = v.tail->evidence.partials.back();
                row.cap_at_horizon =
                    c.model.sphere_volume(rho) * c.model.warping()(rho) / I;
            }
            row.verdict = std::move(v);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

} // namespace radialcap
