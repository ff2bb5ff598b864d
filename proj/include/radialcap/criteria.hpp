#pragma once

#include "radialcap/constellation.hpp"
#include "radialcap/quadrature.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radialcap {

enum class Outcome { PParabolic, Inconclusive };

/// Which sufficient criterion certified p-parabolicity.
enum class Criterion {
    None,
    LowerTangency,  // balance >= 0 and divergent Lambda_{g,p}
    UpperTangency,  // balance <= 0 and divergent Lambda_p
    BoundedWarping, // balance <= 0 and w bounded below by a positive constant
    MonotoneInP,    // certified at q, inherited by every p >= q
};

enum class Reason { None, BalanceFails, TailConvergent, TailUndetermined, PBelow2 };

std::string_view to_string(Outcome o);
std::string_view to_string(Criterion c);
std::string_view to_string(Reason r);
std::string_view to_string(SignSummary s);

struct ClassifyConfig {
    TailConfig tail;
    /// Samples for the hypothesis grids.
    int grid_size = 512;
    /// Largest radius examined; 0 means rho * 2^k_max (512 * max(r0, rho) for
    /// the bounded-warping criterion).
    double horizon = 0.0;
    /// Hypotheses are checked from min(rho, grid_min) upward.
    double grid_min = 1e-3;
};

/// Outcome of a classification. PParabolic is only emitted when every
/// hypothesis of the cited criterion held on [certified_lo, certified_hi]
/// and (where the criterion needs it) the weight integral was classified
/// divergent. The engine never claims p-hyperbolicity.
struct Verdict {
    Outcome outcome = Outcome::Inconclusive;
    Criterion by = Criterion::None;
    Reason reason = Reason::None;
    double p = 0.0;
    double rho = 0.0;
    double certified_lo = 0.0;
    double certified_hi = 0.0;
    /// "balance", "sandwich" or "warping_lower_bound" when reason is BalanceFails.
    std::string failed_hypothesis;
    std::vector<double> witnesses;
    std::optional<BalanceProfile> balance;
    std::optional<TailClass> tail;
    std::vector<std::string> notes;

    bool parabolic() const { return outcome == Outcome::PParabolic; }
};

/// Lower tangency: balance >= 0 and divergent Lambda_{g,p}.
/// Upper tangency: balance <= 0 and divergent Lambda_p.
Verdict classify(const Constellation& c, double p, double rho, const ClassifyConfig& cfg = {});

/// Upper tangency only: balance <= 0 and w >= lower_const on [r0, horizon];
/// the weight then dominates w and its integral diverges without quadrature.
Verdict classify_bounded_w(const Constellation& c, double p, double rho, double r0,
                           double lower_const, const ClassifyConfig& cfg = {});

/// Upper tangency only: h <= eta_w <= lambda, balance at q <= 0 and
/// divergent Lambda_q certify every p >= q. Throws NumericalError if the
/// comparison M_p/(p-1) <= M_q/(q-1) or the horizon-wise domination of the
/// weight integrals fails numerically.
Verdict classify_monotone(const Constellation& c, double q, double p, double rho,
                          const ClassifyConfig& cfg = {});

struct SweepRow {
    double p = 0.0;
    std::optional<Verdict> verdict;
    double alpha_hat = 0.0;
    /// Drifted capacity of (rho, horizon reached by the tail test).
    double cap_at_horizon = 0.0;
    std::string error; // non-empty when the row failed
};

/// Rows for p = p_from, p_from + p_step, ... <= p_to, computed in parallel
/// and returned in order. Throws InvalidArgument for an empty range.
std::vector<SweepRow> sweep(const Constellation& c, double p_from, double p_to, double p_step,
                            double rho, const ClassifyConfig& cfg = {});

} // namespace radialcap
