#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraccond/core/error.hpp"
#include "fraccond/core/special.hpp"

namespace fraccond {

using Index = Eigen::Index;

/// One real per grid node.
using NodeField = Eigen::VectorXd;

/// Fractional order s, dimension n and the cached constant C_{n,s}.
class FracParams {
public:
    static constexpr double kMinOrder = 0.05;
    static constexpr double kMaxOrder = 0.99;

    explicit FracParams(double s, int n = 1) : s_(s), n_(n) {
        if (!(s >= kMinOrder && s <= kMaxOrder))
            throw ValidationError("frac.s must lie in [0.05, 0.99], got " + std::to_string(s));
        if (n < 1) throw ValidationError("frac.n must be >= 1");
        cns_ = fraccond::cns(n, s);
    }

    double s() const { return s_; }
    int n() const { return n_; }
    double cns() const { return cns_; }

private:
    double s_;
    int n_;
    double cns_;
};

/// Uniform lattice on [-L, L] with the open set Omega = (a, b) inside it.
///
/// Nodes falling exactly on the boundary of Omega belong to the exterior set.
class Grid {
public:
    Grid(double half_width, Index node_count, double omega_lo, double omega_hi, int dimension = 1)
        : n_(dimension), L_(half_width), N_(node_count), a_(omega_lo), b_(omega_hi) {
        if (dimension != 1) throw ValidationError("grid: only dimension n = 1 is supported");
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw ValidationError("grid.L must be positive");
        if (node_count < 3) throw ValidationError("grid.N must be at least 3");
        if (!(omega_lo < omega_hi)) throw ValidationError("grid.omega: omega bounds must satisfy a < b");
        if (!(omega_lo > -half_width && omega_hi < half_width))
            throw ValidationError("grid.omega: omega bounds must lie strictly inside (-L, L)");

        h_ = 2.0 * L_ / static_cast<double>(N_ - 1);
        const double unit = L_ / static_cast<double>(N_ - 1);
        nodes_.resize(static_cast<std::size_t>(N_));
        interior_mask_.assign(static_cast<std::size_t>(N_), false);
        for (Index i = 0; i < N_; ++i) {
            // (2i - (N-1)) is an exact integer, so x_{N-1-i} = -x_i bit for bit.
            const double x = static_cast<double>(2 * i - (N_ - 1)) * unit;
            nodes_[static_cast<std::size_t>(i)] = x;
            if (x > a_ && x < b_) {
                interior_.push_back(i);
                interior_mask_[static_cast<std::size_t>(i)] = true;
            } else {
                exterior_.push_back(i);
            }
        }
        if (interior_.empty()) throw ValidationError("grid.omega: no grid node lies inside omega");
    }

    int dimension() const { return n_; }
    double half_width() const { return L_; }
    Index size() const { return N_; }
    double spacing() const { return h_; }
    double omega_lo() const { return a_; }
    double omega_hi() const { return b_; }

    double node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<Index>& interior() const { return interior_; }
    const std::vector<Index>& exterior() const { return exterior_; }
    bool is_interior(Index i) const { return interior_mask_[static_cast<std::size_t>(i)]; }

    /// Radius beyond which fields vanish: the outer edge of the last Riemann cell.
    double truncation_radius() const { return L_ + 0.5 * h_; }

    /// Samples a callable at every node.
    template <class F>
    NodeField sample(F&& f) const {
        NodeField u(N_);
        for (Index i = 0; i < N_; ++i) u[i] = f(node(i));
        return u;
    }

private:
    int n_;
    double L_;
    Index N_;
    double a_, b_;
    double h_ = 0.0;
    std::vector<double> nodes_;
    std::vector<Index> interior_;
    std::vector<Index> exterior_;
    std::vector<bool> interior_mask_;
};

/// C_{n,s} h^n / |x_i - x_j|^{n+2s}, with the distance taken as h|i-j|.
inline double kernel_weight(const Grid& grid, const FracParams& fp, Index i, Index j) {
    if (i == j) throw DomainError("kernel_weight: diagonal entry i == j is singular");
    const double h = grid.spacing();
    const double dist = h * static_cast<double>(i > j ? i - j : j - i);
    return fp.cns() * std::pow(h, fp.n()) / std::pow(dist, fp.n() + 2.0 * fp.s());
}

/// Integral of the kernel over |y| > R for a point x, n = 1.
inline double closed_form_tail(double x, double R, const FracParams& fp) {
    if (!(std::abs(x) < R)) throw DomainError("tail: point lies on or beyond the truncation radius");
    const double s = fp.s();
    return fp.cns() / (2.0 * s) * (std::pow(R - x, -2.0 * s) + std::pow(R + x, -2.0 * s));
}

inline double tail_weight(const Grid& grid, const FracParams& fp, Index i) {
    return closed_form_tail(grid.node(i), grid.truncation_radius(), fp);
}

/// Kernel weights indexed by lattice offset, plus the tail weight of every node.
struct KernelTable {
    std::vector<double> by_offset; ///< by_offset[d] = weight at offset d >= 1; entry 0 unused
    NodeField tail;

    double operator()(Index i, Index j) const {
        return by_offset[static_cast<std::size_t>(i > j ? i - j : j - i)];
    }
};

inline KernelTable make_kernel_table(const Grid& grid, const FracParams& fp) {
    KernelTable t;
    const Index N = grid.size();
    t.by_offset.assign(static_cast<std::size_t>(N), 0.0);
    for (Index d = 1; d < N; ++d) t.by_offset[static_cast<std::size_t>(d)] = kernel_weight(grid, fp, 0, d);
    t.tail.resize(N);
    for (Index i = 0; i < N; ++i) t.tail[i] = tail_weight(grid, fp, i);
    return t;
}

/// Node inner product, sum times h^n.
inline double node_inner(const Grid& grid, const NodeField& u, const NodeField& v) {
    return std::pow(grid.spacing(), grid.dimension()) * u.dot(v);
}

inline void require_node_field(const Grid& grid, const NodeField& u, const char* what) {
    if (u.size() != grid.size())
        throw ValidationError(std::string(what) + ": node field length " + std::to_string(u.size()) +
                              " does not match grid size " + std::to_string(grid.size()));
}

} // namespace fraccond
