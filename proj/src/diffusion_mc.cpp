#include "radialcap/diffusion_mc.hpp"

#include "parallel.hpp"
#include "radialcap/errors.hpp"
#include "radialcap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

namespace radialcap {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based generator: output n of stream `key` is mix64(key + n * golden).
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(seed ^ mix64(stream + kGolden))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * kGolden); }

    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// 256-layer ziggurat for N(0, 1) (Marsaglia and Tsang). One 64-bit draw
// feeds the fast path: the low 8 bits pick the layer and the top 53 bits give
// a signed uniform in [-1, 1).
class Ziggurat {
public:
    Ziggurat() {
        x_[0] = kV / pdf(kR);
        x_[1] = kR;
        for (int i = 2; i < 256; ++i) x_[i] = std::sqrt(-2.0 * std::log(kV / x_[i - 1] + pdf(x_[i - 1])));
        x_[256] = 0.0;
        for (int i = 0; i <= 256; ++i) f_[i] = pdf(x_[i]);
    }

    double operator()(CounterRng& rng) const {
        const std::uint64_t bits = rng();
        const int i = static_cast<int>(bits & 0xff);
        const double u = static_cast<double>(static_cast<std::int64_t>(bits) >> 11) * 0x1.0p-52;
        const double x = u * x_[i];
        if (std::fabs(x) < x_[i + 1]) [[likely]]
            return x;
        return slow(rng, i, u, x);
    }

private:
    static constexpr double kR = 3.6541528853610088;
    static constexpr double kV = 0.00492867323399;

    static double pdf(double x) { return std::exp(-0.5 * x * x); }

    // Rejected fast-path draw (layer i, uniform u, candidate x); retries
    // from scratch on rejection.
    [[gnu::noinline]] double slow(CounterRng& rng, int i, double u, double x) const {
        for (;;) {
            if (i == 0) return tail(rng, u < 0.0);
            if (f_[i + 1] + (f_[i] - f_[i + 1]) * rng.uniform01() < pdf(x)) return x;
            const std::uint64_t bits = rng();
            i = static_cast<int>(bits & 0xff);
            u = static_cast<double>(static_cast<std::int64_t>(bits) >> 11) * 0x1.0p-52;
            x = u * x_[i];
            if (std::fabs(x) < x_[i + 1]) return x;
        }
    }

    static double tail(CounterRng& rng, bool negative) {
        double a, b;
        do {
            a = -std::log1p(-rng.uniform01()) / kR;
            b = -std::log1p(-rng.uniform01());
        } while (2.0 * b < a * a);
        return negative ? -(kR + a) : kR + a;
    }

    std::array<double, 257> x_, f_;
};

// Drift ((m-1)/2) eta_w tabulated on [a, b] as cubic Hermite pieces (stored
// in power form); eta' = w''/w - eta^2 comes from the same jets.
class DriftTable {
public:
    DriftTable(const ModelSpace& ms, double a, double b, int cells)
        : a_(a), inv_h_(cells / (b - a)), cells_(cells), coef_(cells) {
        const double half = 0.5 * (ms.dim() - 1);
        const double h = (b - a) / cells;
        std::vector<double> value(cells + 1), slope(cells + 1);
        for (int i = 0; i <= cells; ++i) {
            const double r = i == cells ? b : a + i * h;
            const Jet2 j = ms.warping().jet(r);
            if (!(j.value > 0.0))
                throw DomainError(r, ms.warping().to_string(), "warping function must be positive");
            const double eta = j.d1 / j.value;
            value[i] = half * eta;
            slope[i] = half * (j.d2 / j.value - eta * eta) * h;
        }
        for (int i = 0; i < cells; ++i) {
            const double v0 = value[i], v1 = value[i + 1], s0 = slope[i], s1 = slope[i + 1];
            coef_[i] = {v0, s0, 3 * (v1 - v0) - 2 * s0 - s1, 2 * (v0 - v1) + s0 + s1};
        }
    }

    double operator()(double r) const {
        const double s = (r - a_) * inv_h_;
        int i = static_cast<int>(s);
        i = std::clamp(i, 0, cells_ - 1);
        const double t = s - i;
        const Cubic& c = coef_[i];
        return c.c0 + t * (c.c1 + t * (c.c2 + t * c.c3));
    }

private:
    struct alignas(32) Cubic {
        double c0, c1, c2, c3;
    };
    double a_, inv_h_;
    int cells_;
    std::vector<Cubic> coef_;
};

enum class Exit { Inner, Outer, Censored };

struct Tally {
    std::int64_t inner = 0, outer = 0, censored = 0;
    double time_sum = 0.0;

    void add(Exit e, double t) {
        switch (e) {
        case Exit::Inner: ++inner; time_sum += t; break;
        case Exit::Outer: ++outer; time_sum += t; break;
        case Exit::Censored: ++censored; break;
        }
    }
};

// Paths [begin, end) advanced a few at a time in lockstep. Each path still
// draws only from its own stream, so the outcome of path i does not depend
// on which paths share its batch; interleaving just hides the latency of the
// drift lookup.
Tally run_paths(const DriftTable& drift, double r0, const DiffusionConfig& cfg,
                std::uint64_t begin, std::uint64_t end) {
    constexpr int kLanes = 8;
    struct Lane {
        CounterRng rng{0, 0};
        double r = 0.0;
        std::int64_t step = 0;
        bool active = false;
    };
    static const Ziggurat normal;
    const double dt = cfg.dt;
    const double sdt = std::sqrt(dt);
    const double lo = cfg.r_inner, hi = cfg.r_outer;
    // Crossing probabilities below exp(-40) are skipped.
    const double bridge_cut = 20.0 * dt;
    const double bridge_scale = -2.0 / dt;
    const bool bridge = cfg.bridge_correction;
    // Closer than this to a barrier a step may cross it or trigger the
    // bridge test; farther away nothing can happen.
    const double margin = std::sqrt(bridge_cut) * (1.0 + 1e-9);
    const double safe_lo = lo + margin, safe_hi = hi - margin;
    const auto steps = static_cast<std::int64_t>(std::ceil(cfg.max_time / dt));

    Tally tally;
    std::array<Lane, kLanes> lanes;
    std::uint64_t next = begin;
    auto start = [&](Lane& lane) {
        lane.active = next < end;
        if (!lane.active) return;
        lane.rng = CounterRng(cfg.seed, next++);
        lane.r = r0;
        lane.step = 0;
    };
    for (auto& lane : lanes) start(lane);

    for (bool any = true; any;) {
        any = false;
        for (auto& lane : lanes) {
            if (!lane.active) continue;
            any = true;
            const double r = lane.r;
            const double next_r = r + drift(r) * dt + sdt * normal(lane.rng);
            ++lane.step;
            // Far from both barriers nothing can happen in this step.
            if (std::min(r, next_r) > safe_lo && std::max(r, next_r) < safe_hi &&
                lane.step < steps) {
                lane.r = next_r;
                continue;
            }
            const double t = static_cast<double>(lane.step - 1) * dt;
            if (next_r <= lo) {
                tally.add(Exit::Inner, t + dt * (r - lo) / (r - next_r));
                start(lane);
                continue;
            }
            if (next_r >= hi) {
                tally.add(Exit::Outer, t + dt * (hi - r) / (next_r - r));
                start(lane);
                continue;
            }
            if (bridge) {
                const double din = (r - lo) * (next_r - lo);
                if (din < bridge_cut && lane.rng.uniform01() < std::exp(bridge_scale * din)) {
                    tally.add(Exit::Inner, t + 0.5 * dt);
                    start(lane);
                    continue;
                }
                const double dout = (hi - r) * (hi - next_r);
                if (dout < bridge_cut && lane.rng.uniform01() < std::exp(bridge_scale * dout)) {
                    tally.add(Exit::Outer, t + 0.5 * dt);
                    start(lane);
                    continue;
                }
            }
            if (lane.step >= steps) {
                tally.add(Exit::Censored, cfg.max_time);
                start(lane);
                continue;
            }
            lane.r = next_r;
        }
    }
    return tally;
}

} // namespace

HittingStats simulate_radial(const ModelSpace& ms, double r0, const DiffusionConfig& cfg) {
    if (!(cfg.r_inner > 0.0) || !(cfg.r_inner < r0) || !(r0 < cfg.r_outer))
        throw ConfigError("diffusion needs 0 < r_inner < r0 < r_outer");
    if (!(cfg.dt > 0.0)) throw ConfigError("diffusion needs dt > 0");
    if (cfg.paths < 1) throw ConfigError("diffusion needs at least one path");
    if (!(cfg.max_time > 0.0)) throw ConfigError("diffusion needs max_time > 0");

    const DriftTable drift(ms, cfg.r_inner, cfg.r_outer, 2048);

    const auto paths = static_cast<std::size_t>(cfg.paths);
    const std::size_t chunk = 256;
    const std::size_t chunks = (paths + chunk - 1) / chunk;
    std::mutex mutex;
    HittingStats stats;
    double time_sum = 0.0;
    detail::parallel_for(chunks, [&](std::size_t c) {
        const Tally t = run_paths(drift, r0, cfg, c * chunk, std::min(paths, (c + 1) * chunk));
        std::lock_guard lock(mutex);
        stats.inner_hits += t.inner;
        stats.outer_hits += t.outer;
        stats.censored += t.censored;
        time_sum += t.time_sum;
    });
    stats.paths = cfg.paths;
    const double n = static_cast<double>(cfg.paths);
    stats.p_inner = static_cast<double>(stats.inner_hits) / n;
    stats.std_error = std::sqrt(stats.p_inner * (1.0 - stats.p_inner) / n);
    const auto absorbed = stats.inner_hits + stats.outer_hits;
    stats.mean_exit_time = absorbed > 0 ? time_sum / static_cast<double>(absorbed) : 0.0;
    return stats;
}

double exact_hitting_prob(const ModelSpace& ms, double r0, double rho, double R) {
    if (!(rho > 0.0) || !(rho <= r0) || !(r0 <= R) || !(rho < R))
        throw InvalidArgument("hitting probability needs 0 < rho <= r0 <= R");
    if (r0 == rho) return 1.0;
    if (r0 == R) return 0.0;
    const int m = ms.dim();
    const Expr& w = ms.warping();
    const RealFn f = [&](double t) { return std::pow(w(t), 1 - m); };
    const double outer = integrate(f, r0, R, 1e-13).value;
    const double whole = outer + integrate(f, rho, r0, 1e-13).value;
    return outer / whole;
}

} // namespace radialcap
