#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "fraccond/core/parallel.hpp"
#include "fraccond/walk/params.hpp"

namespace fraccond {

/// Position value of a particle that has jumped beyond the lattice (absorbed).
inline constexpr std::int64_t kEscaped = -1;

struct Ensemble {
    std::vector<std::int64_t> positions; ///< site index, or kEscaped
    std::uint64_t rng_seed = 0;
    std::int64_t step_count = 0;

    static Ensemble at_site(Index site, Index particles, std::uint64_t seed) {
        return Ensemble{std::vector<std::int64_t>(static_cast<std::size_t>(particles), site), seed, 0};
    }
};

struct Histogram {
    std::vector<std::int64_t> counts; ///< per site
    std::int64_t escaped = 0;
    std::int64_t total = 0;

    NodeField fractions() const {
        NodeField f(static_cast<Index>(counts.size()));
        for (std::size_t i = 0; i < counts.size(); ++i)
            f[static_cast<Index>(i)] = total > 0 ? static_cast<double>(counts[i]) / static_cast<double>(total) : 0.0;
        return f;
    }
};

inline Histogram histogram_of(const Ensemble& e, Index sites) {
    Histogram h{std::vector<std::int64_t>(static_cast<std::size_t>(sites), 0), 0,
                static_cast<std::int64_t>(e.positions.size())};
    for (std::int64_t p : e.positions) {
        if (p == kEscaped)
            ++h.escaped;
        else
            ++h.counts[static_cast<std::size_t>(p)];
    }
    return h;
}

/// Total variation between an empirical histogram and a (sub-probability) distribution,
/// counting escaped particles against the missing mass.
inline double total_variation(const Histogram& h, const NodeField& u) {
    const NodeField f = h.fractions();
    double tv = (f - u).cwiseAbs().sum();
    const double esc = h.total > 0 ? static_cast<double>(h.escaped) / static_cast<double>(h.total) : 0.0;
    tv += std::abs(esc - (1.0 - u.sum()));
    return 0.5 * tv;
}

/// Outgoing jump law Q(y -> x) = P(x, (y-x)/h) / sum_{x'} P(x', (y-x')/h), tabulated per site
/// as a CDF over in-lattice targets followed by one escape bucket.
class JumpTables {
public:
    explicit JumpTables(const WalkParams& wp) : N_(wp.sites()), K_(wp.K()) {
        const Index N = N_;
        const Index K = K_;
        // 1/D at every index the walk can reach, including the band beyond the lattice
        const Index band = K;
        std::vector<double> inv_d(static_cast<std::size_t>(N + 2 * band));
        const bool trivial = wp.conductivity().is_trivial();
        for (Index e = -band; e < N + band; ++e) {
            const double d = (e >= 0 && e < N) ? wp.normalization(e)
                             : trivial           ? wp.truncated_sum()
                                                 : wp.normalization_anywhere(e);
            inv_d[static_cast<std::size_t>(e + band)] = 1.0 / d;
        }
        lo_.resize(static_cast<std::size_t>(N));
        hi_.resize(static_cast<std::size_t>(N));
        cdf_.resize(static_cast<std::size_t>(N));
        for (Index y = 0; y < N; ++y) {
            const Index lo = std::max<Index>(0, y - K);
            const Index hi = std::min<Index>(N - 1, y + K);
            lo_[static_cast<std::size_t>(y)] = lo;
            hi_[static_cast<std::size_t>(y)] = hi;
            std::vector<double>& c = cdf_[static_cast<std::size_t>(y)];
            c.reserve(static_cast<std::size_t>(hi - lo + 1));
            NeumaierSum acc;
            for (Index x = lo; x <= hi; ++x) {
                if (x == y) continue;
                acc.add(wp.power(x - y) * inv_d[static_cast<std::size_t>(x + band)]);
                c.push_back(acc.value());
            }
            // targets beyond the lattice
            for (Index x = y - K; x < 0; ++x) acc.add(wp.power(x - y) * inv_d[static_cast<std::size_t>(x + band)]);
            for (Index x = N; x <= y + K; ++x) acc.add(wp.power(x - y) * inv_d[static_cast<std::size_t>(x + band)]);
            c.push_back(acc.value());
            const double total = c.back();
            for (double& v : c) v /= total;
            c.back() = 1.0;
        }
    }

    Index sites() const { return N_; }

    /// Target of a jump from site y given a uniform variate in [0, 1).
    std::int64_t sample(Index y, double uniform) const {
        const std::vector<double>& c = cdf_[static_cast<std::size_t>(y)];
        const std::size_t pos = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), uniform) - c.begin());
        const std::size_t in_lattice = c.size() - 1;
        if (pos >= in_lattice) return kEscaped;
        const Index lo = lo_[static_cast<std::size_t>(y)];
        Index x = lo + static_cast<Index>(pos);
        if (x >= y) ++x; // skip the source itself
        return x;
    }

    /// Q(y -> x) for in-lattice x; 0 when x = y.
    double probability(Index y, Index x) const {
        if (x == y || x < lo_[static_cast<std::size_t>(y)] || x > hi_[static_cast<std::size_t>(y)]) return 0.0;
        const std::vector<double>& c = cdf_[static_cast<std::size_t>(y)];
        const Index pos = x - lo_[static_cast<std::size_t>(y)] - (x > y ? 1 : 0);
        return c[static_cast<std::size_t>(pos)] - (pos > 0 ? c[static_cast<std::size_t>(pos - 1)] : 0.0);
    }

private:
    Index N_;
    Index K_;
    std::vector<Index> lo_, hi_;
    std::vector<std::vector<double>> cdf_;
};

/// Forward evolution of a distribution under the outgoing law Q; escaped mass is dropped.
inline NodeField outgoing_master_step(const NodeField& u, const JumpTables& tables) {
    const Index N = tables.sites();
    if (u.size() != N) throw ValidationError("outgoing_master_step: distribution length mismatch");
    NodeField out = NodeField::Zero(N);
    for (Index y = 0; y < N; ++y) {
        if (u[y] == 0.0) continue;
        for (Index x = 0; x < N; ++x) out[x] += tables.probability(y, x) * u[y];
    }
    return out;
}

struct SimulationResult {
    Ensemble ensemble;
    Histogram histogram;
    std::vector<Index> checkpoint_steps;
    std::vector<Histogram> checkpoints;
};

namespace detail {
/// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }
} // namespace detail

/// Advances every particle by `steps` jumps. Particle p draws from its own mt19937_64
/// seeded with (seed, p, step_count), so results do not depend on the thread count.
inline SimulationResult simulate(const Ensemble& start, const JumpTables& tables, Index steps,
                                 std::vector<Index> checkpoints = {}) {
    if (steps < 0) throw ValidationError("simulate: steps must be >= 0");
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    for (Index c : checkpoints)
        if (c < 0 || c > steps) throw ValidationError("simulate: checkpoint outside [0, steps]");
    for (std::int64_t p : start.positions)
        if (p != kEscaped && (p < 0 || p >= tables.sites()))
            throw ValidationError("simulate: particle position outside the lattice");

    const Index M = static_cast<Index>(start.positions.size());
    const std::size_t C = checkpoints.size();
    // positions at each checkpoint, particle-major, filled independently per particle
    std::vector<std::int64_t> snap(static_cast<std::size_t>(M) * C);
    SimulationResult res{start, {}, checkpoints, {}};
    const std::uint64_t seed = start.rng_seed;
    const std::uint64_t step0 = static_cast<std::uint64_t>(start.step_count);
    parallel_for(0, M, [&](Index p) {
        std::int64_t pos = start.positions[static_cast<std::size_t>(p)];
        const std::uint64_t pid = static_cast<std::uint64_t>(p);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(pid), static_cast<std::uint32_t>(pid >> 32),
                          static_cast<std::uint32_t>(step0), static_cast<std::uint32_t>(step0 >> 32)};
        std::mt19937_64 eng(seq);
        std::size_t next = 0;
        for (Index t = 0; t <= steps; ++t) {
            while (next < C && checkpoints[next] == t) snap[static_cast<std::size_t>(p) * C + next++] = pos;
            if (t == steps) break;
            if (pos != kEscaped) pos = tables.sample(static_cast<Index>(pos), detail::to_unit(eng()));
        }
        res.ensemble.positions[static_cast<std::size_t>(p)] = pos;
    });
    res.ensemble.step_count = start.step_count + steps;
    res.histogram = histogram_of(res.ensemble, tables.sites());
    for (std::size_t c = 0; c < C; ++c) {
        Ensemble e{std::vector<std::int64_t>(static_cast<std::size_t>(M)), seed, start.step_count + checkpoints[c]};
        for (Index p = 0; p < M; ++p) e.positions[static_cast<std::size_t>(p)] = snap[static_cast<std::size_t>(p) * C + c];
        res.checkpoints.push_back(histogram_of(e, tables.sites()));
    }
    return res;
}

inline SimulationResult simulate(const Ensemble& start, const WalkParams& wp, Index steps,
                                 std::vector<Index> checkpoints = {}) {
    return simulate(start, JumpTables(wp), steps, std::move(checkpoints));
}

} // namespace fraccond
