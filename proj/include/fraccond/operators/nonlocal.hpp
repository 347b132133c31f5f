#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "fraccond/core/grid.hpp"
#include "fraccond/core/parallel.hpp"
#include "fraccond/operators/conductivity.hpp"

namespace fraccond {

enum class OperatorKind { laplacian, conductivity, schrodinger };

inline const char* to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::laplacian: return "laplacian";
    case OperatorKind::conductivity: return "conductivity";
    case OperatorKind::schrodinger: return "schrodinger";
    }
    return "unknown";
}

/// Dense symmetric matrix of a discrete nonlocal operator together with its grid.
class NonlocalOperator {
public:
    NonlocalOperator(Grid grid, Eigen::MatrixXd matrix, OperatorKind kind)
        : grid_(std::move(grid)), matrix_(std::move(matrix)), kind_(kind) {
        if (matrix_.rows() != grid_.size() || matrix_.cols() != grid_.size())
            throw ValidationError("operator: matrix shape does not match the grid");
    }

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    OperatorKind kind() const { return kind_; }

    NodeField apply(const NodeField& u) const {
        require_node_field(grid_, u, "operator apply");
        return matrix_ * u;
    }

private:
    Grid grid_;
    Eigen::MatrixXd matrix_;
    OperatorKind kind_;
};

namespace detail {

/// A_ij = -g_i g_j w_ij, A_ii = g_i (sum_j g_j w_ij + tail_i); each pair written once.
inline Eigen::MatrixXd assemble_weighted(const Grid& grid, const FracParams& fp, const NodeField& g) {
    const Index N = grid.size();
    const KernelTable w = make_kernel_table(grid, fp);
    Eigen::MatrixXd A(N, N);
    parallel_for(0, N, [&](Index i) {
        double row = 0.0;
        for (Index j = 0; j < N; ++j) {
            if (j == i) continue;
            const double wij = w(i, j);
            row += g[j] * wij;
            if (j > i) {
                const double a = -(g[i] * g[j] * wij);
                A(i, j) = a;
                A(j, i) = a;
            }
        }
        A(i, i) = g[i] * (row + w.tail[i]);
    });
    return A;
}

/// Matrix-free version of the same operator, O(N^2) time and O(N) memory.
inline NodeField weighted_action(const Grid& grid, const FracParams& fp, const NodeField& g,
                                 const NodeField& u) {
    const Index N = grid.size();
    const KernelTable w = make_kernel_table(grid, fp);
    NodeField out(N);
    parallel_for(0, N, [&](Index i) {
        double acc = 0.0;
        for (Index j = 0; j < N; ++j) {
            if (j == i) continue;
            acc += g[j] * w(i, j) * (u[i] - u[j]);
        }
        out[i] = g[i] * (acc + w.tail[i] * u[i]);
    });
    return out;
}

} // namespace detail

inline NonlocalOperator assemble_laplacian(const Grid& grid, const FracParams& fp) {
    return NonlocalOperator(grid, detail::assemble_weighted(grid, fp, NodeField::Ones(grid.size())),
                            OperatorKind::laplacian);
}

inline NonlocalOperator assemble_conductivity(const Grid& grid, const FracParams& fp,
                                              const Conductivity& gamma) {
    require_node_field(grid, gamma.values(), "assemble_conductivity");
    return NonlocalOperator(grid, detail::assemble_weighted(grid, fp, gamma.sqrt_values()),
                            OperatorKind::conductivity);
}

/// (-Delta)^s u without assembling the matrix.
inline NodeField laplacian_action(const Grid& grid, const FracParams& fp, const NodeField& u) {
    require_node_field(grid, u, "laplacian_action");
    return detail::weighted_action(grid, fp, NodeField::Ones(grid.size()), u);
}

/// C_gamma^s u without assembling the matrix.
inline NodeField conductivity_action(const Grid& grid, const FracParams& fp, const Conductivity& gamma,
                                     const NodeField& u) {
    require_node_field(grid, u, "conductivity_action");
    return detail::weighted_action(grid, fp, gamma.sqrt_values(), u);
}

/// u_{i+k} + u_{i-k} - 2 u_i; reads outside the node range return 0.
inline double delta_diff(const NodeField& u, Index i, Index k) {
    auto at = [&](Index j) { return (j >= 0 && j < u.size()) ? u[j] : 0.0; };
    return at(i + k) + at(i - k) - 2.0 * at(i);
}

/// Weighted form B_gamma^s[u, v] from its symmetric pair expansion plus the tail.
///
/// Pair sum carries h^{2n}, the tail term h^n, so that B[u, v] = h u.(A v).
inline double bilinear_form(const Grid& grid, const FracParams& fp, const Conductivity& gamma,
                            const NodeField& u, const NodeField& v) {
    require_node_field(grid, u, "bilinear_form");
    require_node_field(grid, v, "bilinear_form");
    const Index N = grid.size();
    const double h = grid.spacing();
    const double c = fp.cns();
    const double expo = fp.n() + 2.0 * fp.s();
    const NodeField g = gamma.sqrt_values();
    // pairs i < j: the 1/2 in front of the ordered-pair sum cancels
    double pairs = 0.0;
    for (Index d = 1; d < N; ++d) {
        const double k = 1.0 / std::pow(h * static_cast<double>(d), expo);
        double acc = 0.0;
        for (Index i = 0; i + d < N; ++i)
            acc += g[i] * g[i + d] * (u[i + d] - u[i]) * (v[i + d] - v[i]);
        pairs += k * acc;
    }
    double tail = 0.0;
    for (Index i = 0; i < N; ++i) tail += g[i] * u[i] * v[i] * tail_weight(grid, fp, i);
    return c * pairs * std::pow(h, 2 * fp.n()) + tail * std::pow(h, fp.n());
}

} // namespace fraccond
