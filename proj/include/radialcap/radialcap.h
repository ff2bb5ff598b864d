/*
 * C interface to the radialcap library.
 *
 * Every object is an opaque handle created by a rc_*_create / rc_*_load
 * function and released with the matching rc_*_destroy. Functions return an
 * rc_status; on failure the thread-local message from rc_last_error()
 * describes the problem. Strings returned as `char*` are owned by the caller
 * and must be released with rc_string_free.
 */
#ifndef RADIALCAP_RADIALCAP_H
#define RADIALCAP_RADIALCAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RADIALCAP_BUILD)
#    define RADIALCAP_API __declspec(dllexport)
#  else
#    define RADIALCAP_API __declspec(dllimport)
#  endif
#else
#  define RADIALCAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rc_status {
    RC_OK = 0,
    RC_ERR_INVALID_ARGUMENT = 1,
    RC_ERR_SYNTAX = 2,
    RC_ERR_UNKNOWN_IDENTIFIER = 3,
    RC_ERR_CONFIG = 4,
    RC_ERR_DOMAIN = 5,
    RC_ERR_QUADRATURE = 6,
    RC_ERR_OVERFLOW = 7,
    RC_ERR_NUMERIC = 8,
    RC_ERR_IO = 9,
    RC_ERR_INTERNAL = 10
} rc_status;

typedef enum rc_tangency { RC_TANGENCY_LOWER = 0, RC_TANGENCY_UPPER = 1 } rc_tangency;

typedef enum rc_outcome { RC_OUTCOME_P_PARABOLIC = 0, RC_OUTCOME_INCONCLUSIVE = 1 } rc_outcome;

typedef enum rc_criterion {
    RC_CRITERION_NONE = 0,
    RC_CRITERION_LOWER_TANGENCY = 1,
    RC_CRITERION_UPPER_TANGENCY = 2,
    RC_CRITERION_BOUNDED_WARPING = 3,
    RC_CRITERION_MONOTONE_IN_P = 4
} rc_criterion;

typedef enum rc_reason {
    RC_REASON_NONE = 0,
    RC_REASON_BALANCE_FAILS = 1,
    RC_REASON_TAIL_CONVERGENT = 2,
    RC_REASON_TAIL_UNDETERMINED = 3,
    RC_REASON_P_BELOW_2 = 4
} rc_reason;

typedef enum rc_tail_kind {
    RC_TAIL_DIVERGENT = 0,
    RC_TAIL_CONVERGENT = 1,
    RC_TAIL_UNDETERMINED = 2,
    RC_TAIL_NOT_COMPUTED = 3
} rc_tail_kind;

typedef struct rc_expr rc_expr;
typedef struct rc_constellation rc_constellation;
typedef struct rc_verdict rc_verdict;
typedef struct rc_sweep rc_sweep;
typedef struct rc_profile rc_profile;

/* Thread-local description of the last failure on this thread. */
RADIALCAP_API const char* rc_last_error(void);
/* Byte offset of the last syntax error, or -1. */
RADIALCAP_API long rc_last_error_position(void);
RADIALCAP_API const char* rc_status_name(rc_status status);
RADIALCAP_API const char* rc_version(void);
RADIALCAP_API void rc_string_free(char* s);

/* ---- radial expressions ---- */
RADIALCAP_API rc_status rc_expr_parse(const char* text, rc_expr** out);
RADIALCAP_API void rc_expr_destroy(rc_expr* e);
/* out[0] = f(r), out[1] = f'(r), out[2] = f''(r). */
RADIALCAP_API rc_status rc_expr_eval_jet2(const rc_expr* e, double r, double out[3]);
RADIALCAP_API char* rc_expr_to_string(const rc_expr* e);

/* ---- constellations ---- */
typedef struct rc_constellation_desc {
    int n;
    int m;
    const char* w;
    const char* g; /* ignored for upper tangency; NULL means "1" */
    const char* lambda;
    const char* h;
    rc_tangency tangency;
} rc_constellation_desc;

RADIALCAP_API rc_status rc_constellation_create(const rc_constellation_desc* desc,
                                                rc_constellation** out);
/* Strict JSON: exactly the fields n, m, w, g, lambda, h, tangency. */
RADIALCAP_API rc_status rc_constellation_from_json(const char* json, rc_constellation** out);
RADIALCAP_API rc_status rc_constellation_load(const char* path, rc_constellation** out);
RADIALCAP_API void rc_constellation_destroy(rc_constellation* c);
/* Nonzero when g = 1 and lambda = h = 0 (S is the model space itself). */
RADIALCAP_API int rc_constellation_is_self(const rc_constellation* c);
RADIALCAP_API int rc_constellation_dim(const rc_constellation* c);
RADIALCAP_API char* rc_constellation_to_json(const rc_constellation* c);

RADIALCAP_API rc_status rc_balance(const rc_constellation* c, double p, double r, double* out);
RADIALCAP_API rc_status rc_lambda_weight(const rc_constellation* c, double p, double rho, double r,
                                         double* out);
RADIALCAP_API rc_status rc_eta(const rc_constellation* c, double r, double* out);
RADIALCAP_API rc_status rc_sphere_volume(const rc_constellation* c, double r, double* out);

/* ---- classification ---- */
typedef struct rc_classify_options {
    int k_max;            /* 40 */
    double conv_eps;      /* 1e-8 */
    double exp_band;      /* 0.05 */
    double growth_factor; /* 1e12 */
    double horizon;       /* 0: rho * 2^k_max */
    int grid_size;        /* 512 */
    double grid_min;      /* 1e-3 */
} rc_classify_options;

RADIALCAP_API void rc_classify_options_default(rc_classify_options* opts);

typedef struct rc_verdict_summary {
    rc_outcome outcome;
    rc_criterion criterion;
    rc_reason reason;
    rc_tail_kind tail_kind;
    double p;
    double rho;
    double alpha_hat;   /* NaN when no tail test ran */
    double tail_value;  /* convergent tails only, else NaN */
    double horizon;     /* largest radius reached by the tail test, else NaN */
    double certified_lo;
    double certified_hi;
} rc_verdict_summary;

/* opts may be NULL for defaults. */
RADIALCAP_API rc_status rc_classify(const rc_constellation* c, double p, double rho,
                                    const rc_classify_options* opts, rc_verdict** out);
RADIALCAP_API rc_status rc_classify_bounded_w(const rc_constellation* c, double p, double rho,
                                              double r0, double lower_const,
                                              const rc_classify_options* opts, rc_verdict** out);
RADIALCAP_API rc_status rc_classify_monotone(const rc_constellation* c, double q, double p,
                                             double rho, const rc_classify_options* opts,
                                             rc_verdict** out);
RADIALCAP_API void rc_verdict_summary_get(const rc_verdict* v, rc_verdict_summary* out);
/* Evidence document: balance profile summary, tail class, certified interval. */
RADIALCAP_API char* rc_verdict_evidence_json(const rc_verdict* v);
RADIALCAP_API void rc_verdict_destroy(rc_verdict* v);
RADIALCAP_API const char* rc_outcome_name(rc_outcome o);
RADIALCAP_API const char* rc_criterion_name(rc_criterion c);
RADIALCAP_API const char* rc_reason_name(rc_reason r);

/* ---- p sweeps ---- */
typedef struct rc_sweep_row {
    double p;
    rc_outcome outcome;
    rc_criterion criterion;
    rc_reason reason;
    double alpha_hat;      /* NaN when unavailable */
    double cap_at_horizon; /* NaN when unavailable */
    const char* error;     /* NULL unless the row failed; owned by the sweep */
} rc_sweep_row;

RADIALCAP_API rc_status rc_sweep_run(const rc_constellation* c, double p_from, double p_to,
                                     double p_step, double rho, const rc_classify_options* opts,
                                     rc_sweep** out);
RADIALCAP_API size_t rc_sweep_size(const rc_sweep* s);
RADIALCAP_API rc_status rc_sweep_row_get(const rc_sweep* s, size_t i, rc_sweep_row* out);
RADIALCAP_API void rc_sweep_destroy(rc_sweep* s);

/* ---- capacities ---- */
typedef struct rc_capacity_report {
    double sphere_volume;    /* Vol of the model sphere of radius rho */
    double drifted_capacity; /* Cap_L of the model annulus */
    double flux_form;        /* Vol * psi'(rho) */
    double upper_bound;      /* bound on Cap_p of the extrinsic condenser */
    int is_self;
    double exact_model_capacity; /* classical p-capacity; NaN unless is_self */
} rc_capacity_report;

RADIALCAP_API rc_status rc_capacity(const rc_constellation* c, double p, double rho, double R,
                                    double boundary_flux, rc_capacity_report* out);

/* ---- Dirichlet profiles ---- */
typedef struct rc_profile_row {
    double r;
    double psi_closed;
    double psi_ode;
    double residual; /* |L psi| of the closed form at r */
} rc_profile_row;

RADIALCAP_API rc_status rc_solve(const rc_constellation* c, double p, double rho, double R,
                                 size_t samples, int ode_steps, rc_profile** out);
RADIALCAP_API size_t rc_profile_size(const rc_profile* prof);
RADIALCAP_API rc_status rc_profile_row_get(const rc_profile* prof, size_t i, rc_profile_row* out);
/* max |psi_closed - psi_ode| over the rows and max residual. */
RADIALCAP_API void rc_profile_errors(const rc_profile* prof, double* max_node_error,
                                     double* max_residual);
RADIALCAP_API void rc_profile_destroy(rc_profile* prof);

/* ---- radial diffusion ---- */
typedef struct rc_diffusion_config {
    double dt;
    int64_t paths;
    uint64_t seed;
    double r_inner;
    double r_outer;
    double max_time;
    int bridge_correction;
} rc_diffusion_config;

typedef struct rc_hitting_stats {
    double p_inner;
    double std_error;
    int64_t paths;
    int64_t inner_hits;
    int64_t outer_hits;
    int64_t censored;
    double mean_exit_time;
} rc_hitting_stats;

RADIALCAP_API void rc_diffusion_config_default(rc_diffusion_config* cfg);
/* Uses the constellation's model space (m, w). */
RADIALCAP_API rc_status rc_simulate(const rc_constellation* c, double r0,
                                    const rc_diffusion_config* cfg, rc_hitting_stats* out);
RADIALCAP_API rc_status rc_exact_hitting_prob(const rc_constellation* c, double r0, double rho,
                                              double R, double* out);

#ifdef __cplusplus
}
#endif

#endif /* RADIALCAP_RADIALCAP_H */
