// radialcap command line: classify / sweep / capacity / solve / simulate.
//
// Exit codes: 0 success or p-parabolic, 10 inconclusive, 2 input error,
// 3 numerical failure.

#include "radialcap/radialcap.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconclusive = 10;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(rc_status s) {
    switch (s) {
    case RC_OK: return kExitOk;
    case RC_ERR_INVALID_ARGUMENT:
    case RC_ERR_SYNTAX:
    case RC_ERR_UNKNOWN_IDENTIFIER:
    case RC_ERR_CONFIG:
    case RC_ERR_IO: return kExitInput;
    default: return kExitNumeric;
    }
}

// Thrown by the command bodies on a failed C call; carries the status.
struct call_failure {
    rc_status status;
    std::string message;
    long position;
};

void check(rc_status s) {
    if (s != RC_OK) throw call_failure{s, rc_last_error(), rc_last_error_position()};
}

template <class T, void (*Destroy)(T*)>
struct handle {
    T* ptr = nullptr;
    handle() = default;
    handle(const handle&) = delete;
    handle& operator=(const handle&) = delete;
    ~handle() { Destroy(ptr); }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using constellation_h = handle<rc_constellation, rc_constellation_destroy>;
using verdict_h = handle<rc_verdict, rc_verdict_destroy>;
using sweep_h = handle<rc_sweep, rc_sweep_destroy>;
using profile_h = handle<rc_profile, rc_profile_destroy>;

std::string take_string(char* s) {
    std::string out = s ? s : "";
    rc_string_free(s);
    return out;
}

json num(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

struct common_args {
    std::string config;
    bool json_out = false;
};

struct tail_args {
    rc_classify_options opts{};
    tail_args() { rc_classify_options_default(&opts); }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--horizon", opts.horizon, "largest radius examined (0: rho*2^k_max)")
            ->capture_default_str();
        cmd->add_option("--k-max", opts.k_max, "doubling steps of the tail test")
            ->capture_default_str();
        cmd->add_option("--conv-eps", opts.conv_eps, "Cauchy tolerance")->capture_default_str();
        cmd->add_option("--exp-band", opts.exp_band, "exponent band around -1")
            ->capture_default_str();
        cmd->add_option("--growth-factor", opts.growth_factor, "unbounded growth threshold")
            ->capture_default_str();
        cmd->add_option("--grid-size", opts.grid_size, "samples for the hypothesis grids")
            ->capture_default_str();
        cmd->add_option("--grid-min", opts.grid_min, "hypotheses are checked from here upward")
            ->capture_default_str();
    }

    json to_json() const {
        return {{"k_max", opts.k_max},         {"conv_eps", opts.conv_eps},
                {"exp_band", opts.exp_band},   {"growth_factor", opts.growth_factor},
                {"horizon", opts.horizon},     {"grid_size", opts.grid_size},
                {"grid_min", opts.grid_min}};
    }
};

// Document emitted in --json mode.
struct report {
    std::string command;
    json inputs = json::object();
    json outcome = json::object();
    json evidence = nullptr;
    clock_type::time_point t0 = clock_type::now();
    double compute_ms = 0.0;

    json document() const {
        return {{"command", command},
                {"inputs", inputs},
                {"outcome", outcome},
                {"evidence", evidence},
                {"timings", {{"compute_ms", compute_ms}, {"total_ms", ms_since(t0)}}}};
    }
};

void load(const std::string& path, constellation_h& c, report& rep) {
    check(rc_constellation_load(path.c_str(), c.out()));
    rep.inputs["config"] = path;
    rep.inputs["constellation"] = json::parse(take_string(rc_constellation_to_json(c.get())));
}

std::string headline(const rc_verdict_summary& s) {
    if (s.outcome == RC_OUTCOME_P_PARABOLIC) {
        switch (s.criterion) {
        case RC_CRITERION_LOWER_TANGENCY: return "PParabolic (Theorem 1)";
        case RC_CRITERION_UPPER_TANGENCY: return "PParabolic (Theorem 2)";
        case RC_CRITERION_BOUNDED_WARPING: return "PParabolic (bounded warping corollary)";
        case RC_CRITERION_MONOTONE_IN_P: return "PParabolic (monotone in p corollary)";
        default: return "PParabolic";
        }
    }
    switch (s.reason) {
    case RC_REASON_BALANCE_FAILS: return "Inconclusive (balance fails)";
    case RC_REASON_TAIL_CONVERGENT: return "Inconclusive (tail convergent)";
    case RC_REASON_TAIL_UNDETERMINED: return "Inconclusive (tail undetermined)";
    case RC_REASON_P_BELOW_2: return "Inconclusive (p below 2)";
    default: return "Inconclusive";
    }
}

void print_evidence(const json& ev) {
    if (!ev["failed_hypothesis"].is_null())
        std::cout << "  failed hypothesis: " << ev["failed_hypothesis"].get<std::string>() << "\n";
    if (const auto& b = ev["balance"]; !b.is_null()) {
        std::cout << "  balance (p = " << fmt(b["p"].get<double>())
                  << "): " << b["sign"].get<std::string>() << " over " << b["samples"]
                  << " samples";
        if (!b["sign_changes"].empty()) std::cout << ", sign changes near " << b["sign_changes"];
        std::cout << "\n";
    }
    if (const auto& t = ev["tail"]; !t.is_null()) {
        std::cout << "  tail: " << t["kind"].get<std::string>() << " (by "
                  << t["decided_by"].get<std::string>() << "), alpha_hat = "
                  << (t["alpha_hat"].is_null() ? std::string("n/a")
                                               : fmt(t["alpha_hat"].get<double>()))
                  << ", horizon " << fmt(t["horizon"].get<double>()) << "\n";
        if (!t["value"].is_null())
            std::cout << "  tail integral: " << fmt(t["value"].get<double>()) << "\n";
    }
    const auto& ci = ev["certified_interval"];
    if (!ci[0].is_null() && !ci[1].is_null() && ci[1].get<double>() > 0.0)
        std::cout << "  certified interval: [" << fmt(ci[0].get<double>()) << ", "
                  << fmt(ci[1].get<double>()) << "]\n";
    for (const auto& note : ev["notes"]) std::cout << "  note: " << note.get<std::string>() << "\n";
}

// ---- classify ----

struct classify_args {
    common_args common;
    tail_args tail;
    double p = 2.0;
    double rho = 1.0;
    std::string mode = "tangency";
    double q = 2.0;
    double r0 = 1.0;
    double lower_const = 0.0;
};

int run_classify(const classify_args& a, report& rep) {
    constellation_h c;
    load(a.common.config, c, rep);
    rep.inputs["p"] = a.p;
    rep.inputs["rho"] = a.rho;
    rep.inputs["mode"] = a.mode;
    rep.inputs["options"] = a.tail.to_json();
    verdict_h v;
    const auto t = clock_type::now();
    if (a.mode == "tangency") {
        check(rc_classify(c.get(), a.p, a.rho, &a.tail.opts, v.out()));
    } else if (a.mode == "bounded_w") {
        rep.inputs["r0"] = a.r0;
        rep.inputs["lower_const"] = a.lower_const;
        check(rc_classify_bounded_w(c.get(), a.p, a.rho, a.r0, a.lower_const, &a.tail.opts,
                                    v.out()));
    } else {
        rep.inputs["q"] = a.q;
        check(rc_classify_monotone(c.get(), a.q, a.p, a.rho, &a.tail.opts, v.out()));
    }
    rep.compute_ms = ms_since(t);
    rc_verdict_summary s;
    rc_verdict_summary_get(v.get(), &s);
    rep.outcome = {{"verdict", rc_outcome_name(s.outcome)},
                   {"criterion", rc_criterion_name(s.criterion)},
                   {"reason", rc_reason_name(s.reason)},
                   {"summary", headline(s)}};
    rep.evidence = json::parse(take_string(rc_verdict_evidence_json(v.get())));
    if (!a.common.json_out) {
        std::cout << headline(s) << "\n";
        print_evidence(rep.evidence);
    }
    return s.outcome == RC_OUTCOME_P_PARABOLIC ? kExitOk : kExitInconclusive;
}

// ---- sweep ----

struct sweep_args {
    common_args common;
    tail_args tail;
    double p_from = 2.0, p_to = 8.0, p_step = 0.5;
    double rho = 1.0;
    std::string out;
};

int run_sweep(const sweep_args& a, report& rep) {
    constellation_h c;
    load(a.common.config, c, rep);
    rep.inputs["p_from"] = a.p_from;
    rep.inputs["p_to"] = a.p_to;
    rep.inputs["p_step"] = a.p_step;
    rep.inputs["rho"] = a.rho;
    rep.inputs["options"] = a.tail.to_json();
    sweep_h sw;
    const auto t = clock_type::now();
    check(rc_sweep_run(c.get(), a.p_from, a.p_to, a.p_step, a.rho, &a.tail.opts, sw.out()));
    rep.compute_ms = ms_since(t);

    std::ostringstream csv;
    csv << "p,outcome,alpha_hat,cap_at_horizon\r\n";
    json rows = json::array();
    bool failed = false;
    for (size_t i = 0; i < rc_sweep_size(sw.get()); ++i) {
        rc_sweep_row row;
        check(rc_sweep_row_get(sw.get(), i, &row));
        const std::string outcome = row.error ? "error" : rc_outcome_name(row.outcome);
        failed = failed || row.error;
        csv << fmt(row.p) << ',' << outcome << ',' << fmt(row.alpha_hat) << ','
            << fmt(row.cap_at_horizon) << "\r\n";
        json r = {{"p", row.p},
                  {"outcome", outcome},
                  {"criterion", rc_criterion_name(row.criterion)},
                  {"reason", rc_reason_name(row.reason)},
                  {"alpha_hat", num(row.alpha_hat)},
                  {"cap_at_horizon", num(row.cap_at_horizon)}};
        if (row.error) r["error"] = row.error;
        rows.push_back(std::move(r));
    }
    if (!a.out.empty() && a.out != "-") {
        std::ofstream f(a.out, std::ios::binary);
        if (!(f << csv.str())) throw call_failure{RC_ERR_IO, "cannot write " + a.out, -1};
        rep.inputs["out"] = a.out;
    } else if (!a.common.json_out) {
        std::cout << csv.str();
    }
    rep.outcome = {{"rows", rows.size()}, {"failed_rows", failed}};
    rep.evidence = {{"rows", rows}};
    return failed ? kExitNumeric : kExitOk;
}

// ---- capacity ----

struct capacity_args {
    common_args common;
    double p = 2.0, rho = 1.0, R = 2.0;
    std::optional<double> flux;
};

int run_capacity(const capacity_args& a, report& rep) {
    constellation_h c;
    load(a.common.config, c, rep);
    rep.inputs["p"] = a.p;
    rep.inputs["rho"] = a.rho;
    rep.inputs["R"] = a.R;
    double flux = 0.0;
    if (a.flux) {
        flux = *a.flux;
    } else {
        // Without a measured boundary flux, use the model sphere itself.
        check(rc_sphere_volume(c.get(), a.rho, &flux));
    }
    rep.inputs["flux"] = flux;
    rc_capacity_report r;
    const auto t = clock_type::now();
    check(rc_capacity(c.get(), a.p, a.rho, a.R, flux, &r));
    rep.compute_ms = ms_since(t);
    rep.outcome = {{"drifted_capacity", num(r.drifted_capacity)},
                   {"exact_model_capacity", num(r.exact_model_capacity)},
                   {"upper_bound", num(r.upper_bound)}};
    rep.evidence = {{"sphere_volume", num(r.sphere_volume)},
                    {"flux_form", num(r.flux_form)},
                    {"is_self", r.is_self != 0}};
    if (!a.common.json_out) {
        std::cout << "drifted capacity:        " << fmt(r.drifted_capacity) << "\n";
        std::cout << "flux form:               " << fmt(r.flux_form) << "\n";
        if (r.is_self)
            std::cout << "exact model capacity:    " << fmt(r.exact_model_capacity) << "\n";
        std::cout << "submanifold upper bound: " << fmt(r.upper_bound) << "\n";
        std::cout << "sphere volume at rho:    " << fmt(r.sphere_volume) << "\n";
    }
    return kExitOk;
}

// ---- solve ----

struct solve_args {
    common_args common;
    double p = 2.0, rho = 1.0, R = 2.0;
    size_t samples = 21;
    int ode_steps = 4000;
    std::string out;
};

int run_solve(const solve_args& a, report& rep) {
    constellation_h c;
    load(a.common.config, c, rep);
    rep.inputs["p"] = a.p;
    rep.inputs["rho"] = a.rho;
    rep.inputs["R"] = a.R;
    rep.inputs["samples"] = a.samples;
    rep.inputs["ode_steps"] = a.ode_steps;
    profile_h prof;
    const auto t = clock_type::now();
    check(rc_solve(c.get(), a.p, a.rho, a.R, a.samples, a.ode_steps, prof.out()));
    rep.compute_ms = ms_since(t);
    std::ostringstream csv;
    csv << "r,psi_closed,psi_ode,residual\r\n";
    json rows = json::array();
    for (size_t i = 0; i < rc_profile_size(prof.get()); ++i) {
        rc_profile_row row;
        check(rc_profile_row_get(prof.get(), i, &row));
        csv << fmt(row.r) << ',' << fmt(row.psi_closed) << ',' << fmt(row.psi_ode) << ','
            << fmt(row.residual) << "\r\n";
        rows.push_back({row.r, row.psi_closed, row.psi_ode, row.residual});
    }
    double node_err = 0.0, residual = 0.0;
    rc_profile_errors(prof.get(), &node_err, &residual);
    if (!a.out.empty() && a.out != "-") {
        std::ofstream f(a.out, std::ios::binary);
        if (!(f << csv.str())) throw call_failure{RC_ERR_IO, "cannot write " + a.out, -1};
        rep.inputs["out"] = a.out;
    } else if (!a.common.json_out) {
        std::cout << csv.str();
    }
    rep.outcome = {{"max_node_error", node_err}, {"max_residual", residual}};
    rep.evidence = {{"columns", {"r", "psi_closed", "psi_ode", "residual"}}, {"rows", rows}};
    return kExitOk;
}

// ---- simulate ----

struct simulate_args {
    common_args common;
    rc_diffusion_config cfg{};
    double r0 = 1.0;
    bool no_bridge = false;
    simulate_args() { rc_diffusion_config_default(&cfg); }
};

int run_simulate(const simulate_args& a, report& rep) {
    constellation_h c;
    load(a.common.config, c, rep);
    rc_diffusion_config cfg = a.cfg;
    if (a.no_bridge) cfg.bridge_correction = 0;
    rep.inputs["r0"] = a.r0;
    rep.inputs["r_inner"] = cfg.r_inner;
    rep.inputs["r_outer"] = cfg.r_outer;
    rep.inputs["paths"] = cfg.paths;
    rep.inputs["dt"] = cfg.dt;
    rep.inputs["seed"] = cfg.seed;
    rep.inputs["max_time"] = cfg.max_time;
    rep.inputs["bridge_correction"] = cfg.bridge_correction != 0;
    rc_hitting_stats s;
    const auto t = clock_type::now();
    check(rc_simulate(c.get(), a.r0, &cfg, &s));
    rep.compute_ms = ms_since(t);
    rep.outcome = {{"p_inner", s.p_inner},
                   {"std_error", s.std_error},
                   {"inner_hits", s.inner_hits},
                   {"outer_hits", s.outer_hits},
                   {"censored", s.censored},
                   {"mean_exit_time", s.mean_exit_time}};
    rep.evidence = json::object();
    // The radial process only sees the model space, so the exact value is
    // always available; it is reported as the comparison for self-constellations.
    const bool self = rc_constellation_is_self(c.get()) != 0;
    double exact = NAN;
    if (self) {
        check(rc_exact_hitting_prob(c.get(), a.r0, cfg.r_inner, cfg.r_outer, &exact));
        const double z = s.std_error > 0 ? (s.p_inner - exact) / s.std_error : NAN;
        rep.evidence = {{"exact_p_inner", exact}, {"z_score", num(z)}};
    }
    if (!a.common.json_out) {
        std::cout << "p_inner = " << fmt(s.p_inner) << " +- " << fmt(s.std_error) << " ("
                  << s.inner_hits << " inner, " << s.outer_hits << " outer, " << s.censored
                  << " censored of " << s.paths << ")\n";
        std::cout << "mean exit time = " << fmt(s.mean_exit_time) << "\n";
        if (self) std::cout << "exact p_inner = " << fmt(exact) << "\n";
    }
    return kExitOk;
}

template <class F>
int dispatch(const std::string& command, bool json_out, F&& body) {
    report rep;
    rep.command = command;
    int code = kExitOk;
    try {
        code = body(rep);
    } catch (const call_failure& f) {
        code = exit_code_for(f.status);
        std::cerr << "error (" << rc_status_name(f.status) << "): " << f.message;
        if (f.position >= 0) std::cerr << " [position " << f.position << "]";
        std::cerr << "\n";
        rep.outcome = {{"error", rc_status_name(f.status)}, {"message", f.message}};
        if (f.position >= 0) rep.outcome["position"] = f.position;
        rep.evidence = nullptr;
    }
    if (json_out) std::cout << rep.document().dump(2) << "\n";
    return code;
}

void add_config(CLI::App* cmd, common_args& c) {
    cmd->add_option("config", c.config, "constellation JSON file")->required();
    cmd->add_flag("--json", c.json_out, "emit one JSON document");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radialcap: p-parabolicity criteria and radial capacities on model spaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rc_version());

    classify_args ca;
    auto* classify = app.add_subcommand("classify", "decide p-parabolicity by the tangency criteria");
    add_config(classify, ca.common);
    classify->add_option("--p", ca.p, "exponent p")->required();
    classify->add_option("--rho", ca.rho, "base radius")->capture_default_str();
    classify->add_option("--mode", ca.mode, "tangency | bounded_w | monotone")
        ->check(CLI::IsMember({"tangency", "bounded_w", "monotone"}))
        ->capture_default_str();
    classify->add_option("--q", ca.q, "base exponent for --mode monotone")->capture_default_str();
    classify->add_option("--r0", ca.r0, "start of the w >= c range for --mode bounded_w")
        ->capture_default_str();
    classify->add_option("--lower-const", ca.lower_const, "c in w >= c for --mode bounded_w")
        ->capture_default_str();
    ca.tail.add_to(classify);

    sweep_args sa;
    auto* sweep = app.add_subcommand("sweep", "classify over a range of p, CSV output");
    add_config(sweep, sa.common);
    sweep->add_option("--p-from", sa.p_from)->capture_default_str();
    sweep->add_option("--p-to", sa.p_to)->capture_default_str();
    sweep->add_option("--p-step", sa.p_step)->capture_default_str();
    sweep->add_option("--rho", sa.rho)->capture_default_str();
    sweep->add_option("--out", sa.out, "CSV file (default stdout)");
    sa.tail.add_to(sweep);

    capacity_args pa;
    auto* capacity = app.add_subcommand("capacity", "drifted capacity and upper bound");
    add_config(capacity, pa.common);
    capacity->add_option("--p", pa.p)->capture_default_str();
    capacity->add_option("--rho", pa.rho)->capture_default_str();
    capacity->add_option("--R", pa.R)->capture_default_str();
    capacity->add_option("--flux", pa.flux, "boundary flux (default: model sphere volume)");

    solve_args va;
    auto* solve = app.add_subcommand("solve", "radial Dirichlet profile, CSV output");
    add_config(solve, va.common);
    solve->add_option("--p", va.p)->capture_default_str();
    solve->add_option("--rho", va.rho)->capture_default_str();
    solve->add_option("--R", va.R)->capture_default_str();
    solve->add_option("--samples", va.samples)->capture_default_str();
    solve->add_option("--ode-steps", va.ode_steps)->capture_default_str();
    solve->add_option("--out", va.out, "CSV file (default stdout)");

    simulate_args ma;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo radial diffusion");
    add_config(simulate, ma.common);
    simulate->add_option("--r0", ma.r0)->capture_default_str();
    simulate->add_option("--rin", ma.cfg.r_inner)->capture_default_str();
    simulate->add_option("--rout", ma.cfg.r_outer)->capture_default_str();
    simulate->add_option("--paths", ma.cfg.paths)->capture_default_str();
    simulate->add_option("--dt", ma.cfg.dt)->capture_default_str();
    simulate->add_option("--seed", ma.cfg.seed)->capture_default_str();
    simulate->add_option("--max-time", ma.cfg.max_time)->capture_default_str();
    simulate->add_flag("--no-bridge", ma.no_bridge, "disable the Brownian-bridge crossing test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    if (*classify)
        return dispatch("classify", ca.common.json_out, [&](report& r) { return run_classify(ca, r); });
    if (*sweep)
        return dispatch("sweep", sa.common.json_out, [&](report& r) { return run_sweep(sa, r); });
    if (*capacity)
        return dispatch("capacity", pa.common.json_out,
                        [&](report& r) { return run_capacity(pa, r); });
    if (*solve)
        return dispatch("solve", va.common.json_out, [&](report& r) { return run_solve(va, r); });
    return dispatch("simulate", ma.common.json_out, [&](report& r) { return run_simulate(ma, r); });
}
