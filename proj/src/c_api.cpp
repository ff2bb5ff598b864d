#include "radialcap/radialcap.h"

#include "radialcap/config.hpp"
#include "radialcap/criteria.hpp"
#include "radialcap/diffusion_mc.hpp"
#include "radialcap/dirichlet.hpp"
#include "radialcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

struct rc_expr {
    radialcap::Expr expr;
};

struct rc_constellation {
    radialcap::Constellation c;
};

struct rc_verdict {
    radialcap::Verdict v;
};

struct rc_sweep {
    std::vector<radialcap::SweepRow> rows;
};

struct rc_profile {
    std::vector<rc_profile_row> rows;
    double max_node_error = 0.0;
    double max_residual = 0.0;
};

namespace {

using namespace radialcap;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string g_error;
thread_local long g_error_pos = -1;

rc_status fail(rc_status s, const std::string& msg, long pos = -1) {
    g_error = msg;
    g_error_pos = pos;
    return s;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
rc_status guarded(F&& body) {
    g_error.clear();
    g_error_pos = -1;
    try {
        body();
        return RC_OK;
    } catch (const SyntaxError& e) {
        return fail(RC_ERR_SYNTAX, e.what(), static_cast<long>(e.position()));
    } catch (const UnknownIdentifier& e) {
        return fail(RC_ERR_UNKNOWN_IDENTIFIER, e.what(), static_cast<long>(e.position()));
    } catch (const ConfigError& e) {
        return fail(RC_ERR_CONFIG, e.what());
    } catch (const DomainError& e) {
        return fail(RC_ERR_DOMAIN, e.what());
    } catch (const QuadratureError& e) {
        return fail(RC_ERR_QUADRATURE, e.what());
    } catch (const OverflowError& e) {
        return fail(RC_ERR_OVERFLOW, e.what());
    } catch (const NumericalError& e) {
        return fail(RC_ERR_NUMERIC, e.what());
    } catch (const InvalidArgument& e) {
        return fail(RC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RC_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ClassifyConfig to_config(const rc_classify_options* opts) {
    ClassifyConfig cfg;
    if (!opts) return cfg;
    cfg.tail.k_max = opts->k_max;
    cfg.tail.conv_eps = opts->conv_eps;
    cfg.tail.exp_band = opts->exp_band;
    cfg.tail.growth_factor = opts->growth_factor;
    cfg.horizon = opts->horizon;
    cfg.grid_size = opts->grid_size;
    cfg.grid_min = opts->grid_min;
    if (cfg.tail.k_max < 4 || cfg.tail.k_max > 1000)
        throw InvalidArgument("k_max must lie in [4, 1000]");
    if (!(cfg.tail.conv_eps > 0.0)) throw InvalidArgument("conv_eps must be positive");
    if (!(cfg.tail.exp_band > 0.0)) throw InvalidArgument("exp_band must be positive");
    if (!(cfg.tail.growth_factor > 1.0)) throw InvalidArgument("growth_factor must exceed 1");
    if (!(cfg.horizon >= 0.0)) throw InvalidArgument("horizon must be non-negative");
    if (cfg.grid_size < 2) throw InvalidArgument("grid_size must be at least 2");
    if (!(cfg.grid_min > 0.0)) throw InvalidArgument("grid_min must be positive");
    return cfg;
}

rc_outcome to_c(Outcome o) {
    return o == Outcome::PParabolic ? RC_OUTCOME_P_PARABOLIC : RC_OUTCOME_INCONCLUSIVE;
}

rc_criterion to_c(Criterion c) {
    switch (c) {
    case Criterion::LowerTangency: return RC_CRITERION_LOWER_TANGENCY;
    case Criterion::UpperTangency: return RC_CRITERION_UPPER_TANGENCY;
    case Criterion::BoundedWarping: return RC_CRITERION_BOUNDED_WARPING;
    case Criterion::MonotoneInP: return RC_CRITERION_MONOTONE_IN_P;
    case Criterion::None: break;
    }
    return RC_CRITERION_NONE;
}

rc_reason to_c(Reason r) {
    switch (r) {
    case Reason::BalanceFails: return RC_REASON_BALANCE_FAILS;
    case Reason::TailConvergent: return RC_REASON_TAIL_CONVERGENT;
    case Reason::TailUndetermined: return RC_REASON_TAIL_UNDETERMINED;
    case Reason::PBelow2: return RC_REASON_P_BELOW_2;
    case Reason::None: break;
    }
    return RC_REASON_NONE;
}

rc_tail_kind to_c(TailKind k) {
    switch (k) {
    case TailKind::Divergent: return RC_TAIL_DIVERGENT;
    case TailKind::Convergent: return RC_TAIL_CONVERGENT;
    case TailKind::Undetermined: break;
    }
    return RC_TAIL_UNDETERMINED;
}

Outcome from_c(rc_outcome o) {
    return o == RC_OUTCOME_P_PARABOLIC ? Outcome::PParabolic : Outcome::Inconclusive;
}

#define RC_REQUIRE(cond, msg)                                                                      \
    do {                                                                                           \
        if (!(cond)) return fail(RC_ERR_INVALID_ARGUMENT, msg);                                    \
    } while (0)

} // namespace

extern "C" {

const char* rc_last_error(void) { return g_error.c_str(); }

long rc_last_error_position(void) { return g_error_pos; }

const char* rc_status_name(rc_status status) {
    switch (status) {
    case RC_OK: return "ok";
    case RC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RC_ERR_SYNTAX: return "syntax_error";
    case RC_ERR_UNKNOWN_IDENTIFIER: return "unknown_identifier";
    case RC_ERR_CONFIG: return "config_error";
    case RC_ERR_DOMAIN: return "domain_error";
    case RC_ERR_QUADRATURE: return "quadrature_error";
    case RC_ERR_OVERFLOW: return "overflow_error";
    case RC_ERR_NUMERIC: return "numerical_error";
    case RC_ERR_IO: return "io_error";
    case RC_ERR_INTERNAL: return "internal_error";
    }
    return "unknown_status";
}

const char* rc_version(void) { return "0.1.0"; }

void rc_string_free(char* s) { std::free(s); }

rc_status rc_expr_parse(const char* text, rc_expr** out) {
    RC_REQUIRE(text && out, "rc_expr_parse: null argument");
    *out = nullptr;
    return guarded([&] { *out = new rc_expr{parse(text)}; });
}

void rc_expr_destroy(rc_expr* e) { delete e; }

rc_status rc_expr_eval_jet2(const rc_expr* e, double r, double out[3]) {
    RC_REQUIRE(e && out, "rc_expr_eval_jet2: null argument");
    return guarded([&] {
        const Jet2 j = e->expr.jet(r);
        out[0] = j.value;
        out[1] = j.d1;
        out[2] = j.d2;
    });
}

char* rc_expr_to_string(const rc_expr* e) {
    if (!e) return nullptr;
    return dup_string(e->expr.to_string());
}

rc_status rc_constellation_create(const rc_constellation_desc* d, rc_constellation** out) {
    RC_REQUIRE(d && out, "rc_constellation_create: null argument");
    RC_REQUIRE(d->w && d->lambda && d->h, "rc_constellation_create: w, lambda and h are required");
    RC_REQUIRE(d->tangency == RC_TANGENCY_LOWER || d->tangency == RC_TANGENCY_UPPER,
               "rc_constellation_create: bad tangency");
    RC_REQUIRE(d->g || d->tangency == RC_TANGENCY_UPPER,
               "rc_constellation_create: g is required for lower tangency");
    *out = nullptr;
    return guarded([&] {
        const Tangency t = d->tangency == RC_TANGENCY_LOWER ? Tangency::Lower : Tangency::Upper;
        Expr g = d->g ? parse(d->g) : Expr::number(1.0);
        *out = new rc_constellation{
            Constellation(d->n, ModelSpace(d->m, parse(d->w)), std::move(g), parse(d->lambda),
                          parse(d->h), t)};
    });
}

rc_status rc_constellation_from_json(const char* json, rc_constellation** out) {
    RC_REQUIRE(json && out, "rc_constellation_from_json: null argument");
    *out = nullptr;
    return guarded([&] { *out = new rc_constellation{constellation_from_json(json)}; });
}

rc_status rc_constellation_load(const char* path, rc_constellation** out) {
    RC_REQUIRE(path && out, "rc_constellation_load: null argument");
    *out = nullptr;
    return guarded([&] { *out = new rc_constellation{load_constellation(path)}; });
}

void rc_constellation_destroy(rc_constellation* c) { delete c; }

int rc_constellation_is_self(const rc_constellation* c) {
    return c && is_self_constellation(c->c) ? 1 : 0;
}

int rc_constellation_dim(const rc_constellation* c) { return c ? c->c.m() : 0; }

char* rc_constellation_to_json(const rc_constellation* c) {
    if (!c) return nullptr;
    return dup_string(to_json(c->c).dump());
}

rc_status rc_balance(const rc_constellation* c, double p, double r, double* out) {
    RC_REQUIRE(c && out, "rc_balance: null argument");
    return guarded([&] { *out = balance(c->c, p, r); });
}

rc_status rc_lambda_weight(const rc_constellation* c, double p, double rho, double r, double* out) {
    RC_REQUIRE(c && out, "rc_lambda_weight: null argument");
    return guarded([&] { *out = lambda_weight(c->c, p, rho, r); });
}

rc_status rc_eta(const rc_constellation* c, double r, double* out) {
    RC_REQUIRE(c && out, "rc_eta: null argument");
    return guarded([&] { *out = c->c.model.eta(r); });
}

rc_status rc_sphere_volume(const rc_constellation* c, double r, double* out) {
    RC_REQUIRE(c && out, "rc_sphere_volume: null argument");
    return guarded([&] { *out = c->c.model.sphere_volume(r); });
}

void rc_classify_options_default(rc_classify_options* opts) {
    if (!opts) return;
    const ClassifyConfig cfg;
    opts->k_max = cfg.tail.k_max;
    opts->conv_eps = cfg.tail.conv_eps;
    opts->exp_band = cfg.tail.exp_band;
    opts->growth_factor = cfg.tail.growth_factor;
    opts->horizon = cfg.horizon;
    opts->grid_size = cfg.grid_size;
    opts->grid_min = cfg.grid_min;
}

rc_status rc_classify(const rc_constellation* c, double p, double rho,
                      const rc_classify_options* opts, rc_verdict** out) {
    RC_REQUIRE(c && out, "rc_classify: null argument");
    *out = nullptr;
    return guarded([&] { *out = new rc_verdict{classify(c->c, p, rho, to_config(opts))}; });
}

rc_status rc_classify_bounded_w(const rc_constellation* c, double p, double rho, double r0,
                                double lower_const, const rc_classify_options* opts,
                                rc_verdict** out) {
    RC_REQUIRE(c && out, "rc_classify_bounded_w: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new rc_verdict{classify_bounded_w(c->c, p, rho, r0, lower_const, to_config(opts))};
    });
}

rc_status rc_classify_monotone(const rc_constellation* c, double q, double p, double rho,
                               const rc_classify_options* opts, rc_verdict** out) {
    RC_REQUIRE(c && out, "rc_classify_monotone: null argument");
    *out = nullptr;
    return guarded(
        [&] { *out = new rc_verdict{classify_monotone(c->c, q, p, rho, to_config(opts))}; });
}

void rc_verdict_summary_get(const rc_verdict* v, rc_verdict_summary* out) {
    if (!v || !out) return;
    const Verdict& d = v->v;
    out->outcome = to_c(d.outcome);
    out->criterion = to_c(d.by);
    out->reason = to_c(d.reason);
    out->p = d.p;
    out->rho = d.rho;
    out->certified_lo = d.certified_lo;
    out->certified_hi = d.certified_hi;
    if (d.tail) {
        out->tail_kind = to_c(d.tail->kind);
        out->alpha_hat = d.tail->evidence.alpha_hat;
        out->tail_value = d.tail->kind == TailKind::Convergent ? d.tail->value : kNaN;
        out->horizon = d.tail->horizon();
    } else {
        out->tail_kind = RC_TAIL_NOT_COMPUTED;
        out->alpha_hat = kNaN;
        out->tail_value = kNaN;
        out->horizon = kNaN;
    }
}

char* rc_verdict_evidence_json(const rc_verdict* v) {
    if (!v) return nullptr;
    return dup_string(evidence_json(v->v).dump());
}

void rc_verdict_destroy(rc_verdict* v) { delete v; }

const char* rc_outcome_name(rc_outcome o) { return to_string(from_c(o)).data(); }

const char* rc_criterion_name(rc_criterion c) {
    switch (c) {
    case RC_CRITERION_LOWER_TANGENCY: return to_string(Criterion::LowerTangency).data();
    case RC_CRITERION_UPPER_TANGENCY: return to_string(Criterion::UpperTangency).data();
    case RC_CRITERION_BOUNDED_WARPING: return to_string(Criterion::BoundedWarping).data();
    case RC_CRITERION_MONOTONE_IN_P: return to_string(Criterion::MonotoneInP).data();
    case RC_CRITERION_NONE: break;
    }
    return to_string(Criterion::None).data();
}

const char* rc_reason_name(rc_reason r) {
    switch (r) {
    case RC_REASON_BALANCE_FAILS: return to_string(Reason::BalanceFails).data();
    case RC_REASON_TAIL_CONVERGENT: return to_string(Reason::TailConvergent).data();
    case RC_REASON_TAIL_UNDETERMINED: return to_string(Reason::TailUndetermined).data();
    case RC_REASON_P_BELOW_2: return to_string(Reason::PBelow2).data();
    case RC_REASON_NONE: break;
    }
    return to_string(Reason::None).data();
}

rc_status rc_sweep_run(const rc_constellation* c, double p_from, double p_to, double p_step,
                       double rho, const rc_classify_options* opts, rc_sweep** out) {
    RC_REQUIRE(c && out, "rc_sweep_run: null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new rc_sweep{sweep(c->c, p_from, p_to, p_step, rho, to_config(opts))};
    });
}

size_t rc_sweep_size(const rc_sweep* s) { return s ? s->rows.size() : 0; }

rc_status rc_sweep_row_get(const rc_sweep* s, size_t i, rc_sweep_row* out) {
    RC_REQUIRE(s && out, "rc_sweep_row_get: null argument");
    RC_REQUIRE(i < s->rows.size(), "rc_sweep_row_get: index out of range");
    const SweepRow& row = s->rows[i];
    out->p = row.p;
    if (row.verdict) {
        out->outcome = to_c(row.verdict->outcome);
        out->criterion = to_c(row.verdict->by);
        out->reason = to_c(row.verdict->reason);
    } else {
        out->outcome = RC_OUTCOME_INCONCLUSIVE;
        out->criterion = RC_CRITERION_NONE;
        out->reason = RC_REASON_NONE;
    }
    out->alpha_hat = row.alpha_hat;
    out->cap_at_horizon = row.cap_at_horizon;
    out->error = row.error.empty() ? nullptr : row.error.c_str();
    return RC_OK;
}

void rc_sweep_destroy(rc_sweep* s) { delete s; }

rc_status rc_capacity(const rc_constellation* c, double p, double rho, double R,
                      double boundary_flux, rc_capacity_report* out) {
    RC_REQUIRE(c && out, "rc_capacity: null argument");
    return guarded([&] {
        if (!(p >= 2.0)) throw InvalidArgument("capacity needs p >= 2");
        if (!(rho > 0.0 && rho < R)) throw InvalidArgument("capacity needs 0 < rho < R");
        const RadialSolution sol = solve_dirichlet_closed(c->c, p, rho, R);
        rc_capacity_report rep{};
        rep.sphere_volume = c->c.model.sphere_volume(rho);
        rep.drifted_capacity = drifted_capacity(c->c, p, rho, R);
        rep.flux_form = flux_capacity(c->c, sol);
        rep.upper_bound = capacity_upper_bound(c->c, p, rho, R, boundary_flux);
        rep.is_self = is_self_constellation(c->c) ? 1 : 0;
        rep.exact_model_capacity =
            rep.is_self ? c->c.model.exact_annulus_p_capacity(rho, R, p) : kNaN;
        *out = rep;
    });
}

rc_status rc_solve(const rc_constellation* c, double p, double rho, double R, size_t samples,
                   int ode_steps, rc_profile** out) {
    RC_REQUIRE(c && out, "rc_solve: null argument");
    RC_REQUIRE(samples >= 2, "rc_solve: need at least two samples");
    *out = nullptr;
    return guarded([&] {
        if (!(p >= 2.0)) throw InvalidArgument("solve needs p >= 2");
        if (!(rho > 0.0 && rho < R)) throw InvalidArgument("solve needs 0 < rho < R");
        if (ode_steps < 100) throw InvalidArgument("solve needs at least 100 ODE steps");
        const RadialSolution sol = solve_dirichlet_closed(c->c, p, rho, R);
        const DriftOperator L(c->c, p);
        // Sample on the ODE grid so both profiles are compared at the same radii.
        const SampledProfile ode = solve_dirichlet_ode(c->c, p, rho, R, ode_steps);
        auto prof = std::make_unique<rc_profile>();
        const std::size_t n = samples;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = (i * static_cast<std::size_t>(ode_steps)) / (n - 1);
            const double r = ode.r[k];
            rc_profile_row row{};
            row.r = r;
            row.psi_closed = sol.profile(r);
            row.psi_ode = ode.psi[k];
            row.residual = (i == 0 || i + 1 == n) ? 0.0 : operator_residual(L, sol, {r});
            prof->max_node_error =
                std::max(prof->max_node_error, std::abs(row.psi_closed - row.psi_ode));
            prof->max_residual = std::max(prof->max_residual, row.residual);
            prof->rows.push_back(row);
        }
        *out = prof.release();
    });
}

size_t rc_profile_size(const rc_profile* prof) { return prof ? prof->rows.size() : 0; }

rc_status rc_profile_row_get(const rc_profile* prof, size_t i, rc_profile_row* out) {
    RC_REQUIRE(prof && out, "rc_profile_row_get: null argument");
    RC_REQUIRE(i < prof->rows.size(), "rc_profile_row_get: index out of range");
    *out = prof->rows[i];
    return RC_OK;
}

void rc_profile_errors(const rc_profile* prof, double* max_node_error, double* max_residual) {
    if (!prof) return;
    if (max_node_error) *max_node_error = prof->max_node_error;
    if (max_residual) *max_residual = prof->max_residual;
}

void rc_profile_destroy(rc_profile* prof) { delete prof; }

void rc_diffusion_config_default(rc_diffusion_config* cfg) {
    if (!cfg) return;
    const DiffusionConfig d;
    cfg->dt = d.dt;
    cfg->paths = d.paths;
    cfg->seed = d.seed;
    cfg->r_inner = d.r_inner;
    cfg->r_outer = d.r_outer;
    cfg->max_time = d.max_time;
    cfg->bridge_correction = d.bridge_correction ? 1 : 0;
}

rc_status rc_simulate(const rc_constellation* c, double r0, const rc_diffusion_config* cfg,
                      rc_hitting_stats* out) {
    RC_REQUIRE(c && out, "rc_simulate: null argument");
    return guarded([&] {
        DiffusionConfig d;
        if (cfg) {
            d.dt = cfg->dt;
            d.paths = cfg->paths;
            d.seed = cfg->seed;
            d.r_inner = cfg->r_inner;
            d.r_outer = cfg->r_outer;
            d.max_time = cfg->max_time;
            d.bridge_correction = cfg->bridge_correction != 0;
        }
        const HittingStats s = simulate_radial(c->c.model, r0, d);
        out->p_inner = s.p_inner;
        out->std_error = s.std_error;
        out->paths = s.paths;
        out->inner_hits = s.inner_hits;
        out->outer_hits = s.outer_hits;
        out->censored = s.censored;
        out->mean_exit_time = s.mean_exit_time;
    });
}

rc_status rc_exact_hitting_prob(const rc_constellation* c, double r0, double rho, double R,
                                double* out) {
    RC_REQUIRE(c && out, "rc_exact_hitting_prob: null argument");
    return guarded([&] { *out = exact_hitting_prob(c->c.model, r0, rho, R); });
}

} // extern "C"
