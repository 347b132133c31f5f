#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "fraccond/operators/conductivity.hpp"

namespace fraccond {

/// Compensated (Neumaier) running sum.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sum over all k != 0 of |k|^{-n-2s}, n = 1.
inline double jump_weight_total(double s) { return 2.0 * boost::math::zeta(1.0 + 2.0 * s); }

/// Sum over |k| > K of |k|^{-1-2s}.
inline double jump_tail_mass(double s, Index K) {
    const double p = 1.0 + 2.0 * s;
    if (K < 64) {
        NeumaierSum head;
        for (Index k = 1; k <= K; ++k) head.add(std::pow(static_cast<double>(k), -p));
        return 2.0 * (boost::math::zeta(p) - head.value());
    }
    // direct terms up to M, then Euler-Maclaurin for sum_{k > M} k^{-p}
    const Index M = std::max<Index>(K, 1024);
    NeumaierSum side;
    for (Index k = M; k > K; --k) side.add(std::pow(static_cast<double>(k), -p));
    const double m = static_cast<double>(M);
    side.add(std::pow(m, 1.0 - p) / (p - 1.0) - 0.5 * std::pow(m, -p) + p / 12.0 * std::pow(m, -p - 1.0) -
             p * (p + 1.0) * (p + 2.0) / 720.0 * std::pow(m, -p - 3.0));
    return 2.0 * side.value();
}

/// Largest cutoff the default rule will pick; small s would otherwise need K near 1e10.
inline constexpr Index kMaxJumpCutoff = Index{1} << 20;

/// Smallest K whose tail mass is at most rel_tail times the full weight sum, capped at
/// kMaxJumpCutoff (the tail mass actually reached is reported by WalkParams::tail_mass).
inline Index default_jump_cutoff(double s, double rel_tail = 1e-6) {
    const double target = rel_tail * jump_weight_total(s);
    if (jump_tail_mass(s, kMaxJumpCutoff) > target) return kMaxJumpCutoff;
    Index hi = 1;
    while (jump_tail_mass(s, hi) > target) hi *= 2;
    Index lo = hi / 2;
    while (hi - lo > 1) {
        const Index mid = lo + (hi - lo) / 2;
        (jump_tail_mass(s, mid) > target ? lo : hi) = mid;
    }
    return hi;
}

/// Lattice walk on the grid nodes with jump weights gamma^{1/2}(x+hk)|k|^{-n-2s}, 0 < |k| <= K.
class WalkParams {
public:
    WalkParams(const Grid& lattice, const FracParams& fp, const Conductivity& gamma, Index K = 0)
        : grid_(lattice), s_(fp.s()), n_(fp.n()), h_(lattice.spacing()), gamma_(gamma) {
        require_node_field(lattice, gamma.values(), "walk");
        K_ = K > 0 ? K : default_jump_cutoff(s_);
        tau_ = std::pow(h_, 2.0 * s_);
        sqrt_gamma_ = gamma.sqrt_values();
        const double p = n_ + 2.0 * s_;
        power_.assign(static_cast<std::size_t>(K_ + 1), 0.0);
        prefix_.assign(static_cast<std::size_t>(K_ + 1), 0.0);
        NeumaierSum acc;
        for (Index k = 1; k <= K_; ++k) {
            power_[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k), -p);
            acc.add(power_[static_cast<std::size_t>(k)]);
            prefix_[static_cast<std::size_t>(k)] = acc.value();
        }
        truncated_sum_ = 2.0 * prefix_.back();

        const Index N = lattice.size();
        outside_.resize(N);
        inside_.resize(N);
        normalization_.resize(N);
        for (Index i = 0; i < N; ++i) {
            NeumaierSum in;
            for (Index j = std::max<Index>(0, i - K_); j <= std::min<Index>(N - 1, i + K_); ++j)
                if (j != i) in.add(sqrt_gamma_[j] * power(j - i));
            inside_[i] = in.value();
            outside_[i] = (prefix_.back() - prefix(N - 1 - i)) + (prefix_.back() - prefix(i));
            normalization_[i] = inside_[i] + outside_[i];
        }
    }

    const Grid& lattice() const { return grid_; }
    const Conductivity& conductivity() const { return gamma_; }
    Index sites() const { return grid_.size(); }
    double h() const { return h_; }
    double tau() const { return tau_; }
    Index K() const { return K_; }
    double s() const { return s_; }
    int n() const { return n_; }
    const NodeField& sqrt_gamma() const { return sqrt_gamma_; }

    /// |k|^{-n-2s} for 0 < |k| <= K, else 0.
    double power(Index k) const {
        const Index a = k < 0 ? -k : k;
        return a <= K_ ? power_[static_cast<std::size_t>(a)] : 0.0;
    }
    /// sum_{k=1}^{min(m, K)} k^{-n-2s}
    double prefix(Index m) const { return m <= 0 ? 0.0 : prefix_[static_cast<std::size_t>(std::min(m, K_))]; }

    /// S_K = sum_{0<|k|<=K} |k|^{-n-2s}.
    double truncated_sum() const { return truncated_sum_; }
    double tail_mass() const { return jump_tail_mass(s_, K_); }

    /// D(x_i, h) = sum_k f(x_i, k); gamma^{1/2} = 1 beyond the lattice.
    double normalization(Index i) const { return normalization_[i]; }
    /// Part of D(x_i, h) from jumps whose source lies beyond the lattice.
    double outside_weight(Index i) const { return outside_[i]; }
    double inside_weight(Index i) const { return inside_[i]; }

    /// D at an arbitrary lattice index, also beyond the window (where gamma^{1/2} = 1).
    double normalization_anywhere(std::int64_t idx) const {
        if (idx >= 0 && idx < grid_.size()) return normalization_[static_cast<Index>(idx)];
        NeumaierSum d;
        d.add(truncated_sum_);
        const Index N = grid_.size();
        const std::int64_t lo = std::max<std::int64_t>(0, idx - K_);
        const std::int64_t hi = std::min<std::int64_t>(N - 1, idx + K_);
        for (std::int64_t j = lo; j <= hi; ++j) {
            const double m = sqrt_gamma_[static_cast<Index>(j)] - 1.0;
            if (m != 0.0) d.add(m * power(static_cast<Index>(j - idx)));
        }
        return d.value();
    }

private:
    Grid grid_;
    double s_;
    int n_;
    double h_;
    Conductivity gamma_;
    Index K_ = 0;
    double tau_ = 0.0;
    NodeField sqrt_gamma_;
    std::vector<double> power_;
    std::vector<double> prefix_;
    double truncated_sum_ = 0.0;
    NodeField inside_, outside_, normalization_;
};

/// Probability per lattice site, zero beyond the lattice.
class LatticeDistribution {
public:
    explicit LatticeDistribution(NodeField u) : u_(std::move(u)) {
        for (Index i = 0; i < u_.size(); ++i)
            if (!(u_[i] >= 0.0)) throw ValidationError("lattice distribution: entries must be nonnegative");
    }
    static LatticeDistribution point_mass(Index sites, Index at) {
        NodeField u = NodeField::Zero(sites);
        u[at] = 1.0;
        return LatticeDistribution(std::move(u));
    }
    const NodeField& values() const { return u_; }
    double mass() const { return u_.sum(); }

private:
    NodeField u_;
};

/// P(x_i, k) for k in [-K, K], stored at offset K + k; P(x_i, 0) = 0.
struct IncomingWeights {
    Index K;
    std::vector<double> p;
    double operator()(Index k) const { return p[static_cast<std::size_t>(K + k)]; }
};

inline IncomingWeights incoming_weights(Index site, const WalkParams& wp) {
    if (site < 0 || site >= wp.sites()) throw ValidationError("incoming_weights: site outside the lattice");
    const Index K = wp.K();
    const Index N = wp.sites();
    IncomingWeights w{K, std::vector<double>(static_cast<std::size_t>(2 * K + 1), 0.0)};
    const double D = wp.normalization(site);
    for (Index k = -K; k <= K; ++k) {
        if (k == 0) continue;
        const Index j = site + k;
        const double g = (j >= 0 && j < N) ? wp.sqrt_gamma()[j] : 1.0;
        w.p[static_cast<std::size_t>(K + k)] = g * wp.power(k) / D;
    }
    return w;
}

namespace detail {
template <class Body>
void for_lattice_neighbours(const WalkParams& wp, Index i, Body&& body) {
    const Index N = wp.sites();
    const Index lo = std::max<Index>(0, i - wp.K());
    const Index hi = std::min<Index>(N - 1, i + wp.K());
    for (Index j = lo; j <= hi; ++j)
        if (j != i) body(j);
}
} // namespace detail

/// u(x, t + tau) = sum_{k != 0} P(x, k) u(x + hk, t), with u = 0 beyond the lattice.
inline NodeField master_step(const NodeField& u, const WalkParams& wp) {
    require_node_field(wp.lattice(), u, "master_step");
    NodeField out(u.size());
    for (Index i = 0; i < u.size(); ++i) {
        double acc = 0.0;
        detail::for_lattice_neighbours(wp, i, [&](Index j) { acc += wp.sqrt_gamma()[j] * wp.power(j - i) * u[j]; });
        out[i] = acc / wp.normalization(i);
    }
    return out;
}

inline LatticeDistribution master_step(const LatticeDistribution& u, const WalkParams& wp) {
    return LatticeDistribution(master_step(u.values(), wp));
}

/// h^{-2s} D^{-1} sum_k gamma^{1/2}(x+hk)|k|^{-n-2s}(u(x+hk) - u(x)), the weighted kernel sum.
inline NodeField lattice_generator(const NodeField& u, const WalkParams& wp) {
    require_node_field(wp.lattice(), u, "lattice_generator");
    NodeField out(u.size());
    const double scale = std::pow(wp.h(), -2.0 * wp.s());
    for (Index i = 0; i < u.size(); ++i) {
        double acc = 0.0;
        detail::for_lattice_neighbours(
            wp, i, [&](Index j) { acc += wp.sqrt_gamma()[j] * wp.power(j - i) * (u[j] - u[i]); });
        acc -= wp.outside_weight(i) * u[i];
        out[i] = scale * acc / wp.normalization(i);
    }
    return out;
}

/// Change of total mass in one master step; nonzero for non-constant gamma and at the edges.
inline double mass_drift(const NodeField& u, const WalkParams& wp) { return master_step(u, wp).sum() - u.sum(); }

} // namespace fraccond
