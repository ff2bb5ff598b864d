#pragma once

#include "radialcap/model_space.hpp"

#include <cstdint>

namespace radialcap {

struct DiffusionConfig {
    double dt = 1e-4;
    std::int64_t paths = 20000;
    std::uint64_t seed = 20090601;
    double r_inner = 0.5;
    double r_outer = 8.0;
    double max_time = 1000.0;
    /// Brownian-bridge test for barrier crossings between grid times. Removes
    /// the O(sqrt(dt)) bias of discrete barrier monitoring.
    bool bridge_correction = true;
};

struct HittingStats {
    double p_inner = 0.0;      // inner hits / paths
    double std_error = 0.0;    // sqrt(p (1 - p) / paths)
    std::int64_t paths = 0;
    std::int64_t inner_hits = 0;
    std::int64_t outer_hits = 0;
    std::int64_t censored = 0; // paths still inside at max_time
    double mean_exit_time = 0.0; // over absorbed paths
};

/// Euler-Maruyama simulation of the radial part of Brownian motion,
/// dr = dB + ((m-1)/2) eta_w(r) dt, started at r0 and absorbed at r_inner or
/// r_outer. Each path draws from its own counter-based stream keyed by
/// (seed, path index), so results do not depend on the worker count.
/// Throws ConfigError for invalid configurations.
HittingStats simulate_radial(const ModelSpace& ms, double r0, const DiffusionConfig& cfg);

/// Probability of reaching radius rho before R from r0:
/// int_{r0}^R w^{1-m} / int_rho^R w^{1-m}.
double exact_hitting_prob(const ModelSpace& ms, double r0, double rho, double R);

} // namespace radialcap
