#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraccond/core/parallel.hpp"
#include "fraccond/forward/dirichlet.hpp"
#include "fraccond/forward/potential.hpp"

namespace fraccond {

/// DN map restricted to sources W1 (columns) and observations W2 (rows).
struct DnMatrix {
    std::vector<Index> source_idx;
    std::vector<Index> obs_idx;
    Eigen::MatrixXd matrix; ///< matrix(l, k): source source_idx[k], observation obs_idx[l]

    /// max |M - M^T| / max |M|; requires W1 = W2.
    double symmetry_defect() const {
        if (source_idx != obs_idx) throw ValidationError("dn: symmetry requires W1 = W2");
        const double scale = matrix.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() / scale;
    }
};

inline void require_exterior_set(const Grid& grid, const std::vector<Index>& w, const char* name) {
    for (Index i : w) {
        if (i < 0 || i >= grid.size() || grid.is_interior(i))
            throw ValidationError(std::string("dn: ") + name + " contains node " + std::to_string(i) +
                                  " which is not an exterior node");
    }
}

/// Column k: u_k solves the Dirichlet problem with datum e_k; entry (l, k) = B[u_k, e_l].
/// B[u, e_l] = h^n (A u)_l since A is the matrix of the form.
inline DnMatrix assemble_dn(const DirichletSolver& solver, const std::vector<Index>& w1, const std::vector<Index>& w2) {
    const NonlocalOperator& op = solver.op();
    const Grid& grid = op.grid();
    require_exterior_set(grid, w1, "W1");
    require_exterior_set(grid, w2, "W2");
    const double hn = std::pow(grid.spacing(), grid.dimension());
    const auto& I = grid.interior();
    const Eigen::MatrixXd A_I1 = detail::take(op.matrix(), I, w1);
    const Eigen::MatrixXd G = solver.solve_interior(A_I1); // u_k on interior = -G(:, k)
    const Eigen::MatrixXd A_21 = detail::take(op.matrix(), w2, w1);
    const Eigen::MatrixXd A_2I = detail::take(op.matrix(), w2, I);

    DnMatrix dn{w1, w2, Eigen::MatrixXd(static_cast<Index>(w2.size()), static_cast<Index>(w1.size()))};
    parallel_for(0, static_cast<Index>(w1.size()), [&](Index k) {
        dn.matrix.col(k) = hn * (A_21.col(k) - A_2I * G.col(k));
    });
    return dn;
}

inline DnMatrix assemble_dn(const NonlocalOperator& op, const std::vector<Index>& w1, const std::vector<Index>& w2) {
    return assemble_dn(DirichletSolver(op), w1, w2);
}

inline DnMatrix assemble_dn(const Grid& grid, const FracParams& fp, const Conductivity& gamma,
                            const std::vector<Index>& w1, const std::vector<Index>& w2) {
    return assemble_dn(assemble_conductivity(grid, fp, gamma), w1, w2);
}

inline DnMatrix assemble_dn_schrodinger(const Grid& grid, const FracParams& fp, const Potential& q,
                                        const std::vector<Index>& w1, const std::vector<Index>& w2) {
    return assemble_dn(assemble_schrodinger(grid, fp, q), w1, w2);
}

/// <Lambda[f], g> = B[u_f, g] for arbitrary extensions of f and g into omega.
inline double dn_pairing(const DirichletSolver& solver, const NodeField& f_extension, const NodeField& g_extension) {
    const Grid& grid = solver.op().grid();
    const NodeField u = solver.solve_lifted(f_extension, NodeField::Zero(grid.size()));
    return std::pow(grid.spacing(), grid.dimension()) * g_extension.dot(solver.op().apply(u));
}

/// Pointwise DN map: (A u_f) on exterior nodes, ordered as grid.exterior().
inline NodeField dn_pointwise(const DirichletSolver& solver, const ExteriorDatum& f) {
    const Grid& grid = solver.op().grid();
    const NodeField u = solver.solve(f, NodeField::Zero(grid.size()));
    const NodeField Au = solver.op().apply(u);
    NodeField out(static_cast<Index>(grid.exterior().size()));
    for (std::size_t k = 0; k < grid.exterior().size(); ++k) out[static_cast<Index>(k)] = Au[grid.exterior()[k]];
    return out;
}

inline NodeField dn_pointwise(const NonlocalOperator& op, const ExteriorDatum& f) {
    return dn_pointwise(DirichletSolver(op), f);
}

} // namespace fraccond
