#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "fraccond/core/grid.hpp"
#include "fraccond/core/parallel.hpp"

namespace fraccond {

/// Discrete field on node pairs, e.g. the fractional gradient.
///
/// pairs(i, j) holds the value at (x_i, x_j); the diagonal is unused and kept 0.
/// outside(i) aggregates all pairs (x_i, y) with y beyond the window, where fields
/// vanish; its squared norm carries weight h^n instead of h^{2n}.
struct PairField {
    Eigen::MatrixXd pairs;
    NodeField outside;

    static PairField zero(Index N) { return {Eigen::MatrixXd::Zero(N, N), NodeField::Zero(N)}; }
};

namespace detail {

/// Direction-and-kernel factor a_ij = -(C^{1/2}/sqrt2) sign(x_j - x_i) / |x_j - x_i|^{n/2+s}.
inline Eigen::VectorXd gradient_factor_by_offset(const Grid& grid, const FracParams& fp) {
    const Index N = grid.size();
    const double h = grid.spacing();
    const double scale = std::sqrt(fp.cns()) / std::sqrt(2.0);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
    for (Index d = 1; d < N; ++d)
        a[d] = scale / std::pow(h * static_cast<double>(d), 0.5 * fp.n() + fp.s());
    return a;
}

inline double gradient_factor(const Eigen::VectorXd& by_offset, Index i, Index j) {
    return j > i ? -by_offset[j - i] : by_offset[i - j];
}

} // namespace detail

inline PairField frac_gradient(const Grid& grid, const FracParams& fp, const NodeField& u) {
    require_node_field(grid, u, "frac_gradient");
    const Index N = grid.size();
    const Eigen::VectorXd a = detail::gradient_factor_by_offset(grid, fp);
    PairField out = PairField::zero(N);
    parallel_for(0, N, [&](Index i) {
        for (Index j = 0; j < N; ++j) {
            if (j == i) continue;
            out.pairs(i, j) = detail::gradient_factor(a, i, j) * (u[j] - u[i]);
        }
        out.outside[i] = std::sqrt(tail_weight(grid, fp, i)) * u[i];
    });
    return out;
}

/// Pair inner product: pair sum times h^{2n} plus outside channel times h^n.
inline double pair_inner(const Grid& grid, const PairField& v, const PairField& w) {
    const double hn = std::pow(grid.spacing(), grid.dimension());
    return hn * hn * (v.pairs.array() * w.pairs.array()).sum() + hn * v.outside.dot(w.outside);
}

/// The node field d with <d, u> = <v, grad^s u> for every u.
inline NodeField frac_divergence_adjoint(const Grid& grid, const FracParams& fp, const PairField& v) {
    const Index N = grid.size();
    if (v.pairs.rows() != N || v.pairs.cols() != N || v.outside.size() != N)
        throw ValidationError("frac_divergence_adjoint: pair field shape does not match the grid");
    const double hn = std::pow(grid.spacing(), grid.dimension());
    const Eigen::VectorXd a = detail::gradient_factor_by_offset(grid, fp);
    NodeField d(N);
    parallel_for(0, N, [&](Index k) {
        double acc = 0.0;
        for (Index i = 0; i < N; ++i) {
            if (i == k) continue;
            acc += v.pairs(i, k) * detail::gradient_factor(a, i, k) -
                   v.pairs(k, i) * detail::gradient_factor(a, k, i);
        }
        d[k] = hn * acc + std::sqrt(tail_weight(grid, fp, k)) * v.outside[k];
    });
    return d;
}

} // namespace fraccond
