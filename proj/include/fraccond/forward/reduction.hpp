#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "fraccond/forward/dn_map.hpp"

namespace fraccond {

/// Output of the Liouville reduction q = -(-Delta)^s m / gamma^{1/2}.
struct ReducedPotential {
    NodeField full;            ///< q evaluated on every window node
    Potential interior;        ///< q restricted to interior nodes
    NodeField laplacian_of_m;  ///< (-Delta)^s m on every window node
    bool compactly_supported;  ///< true when q vanishes on all exterior nodes
};

inline ReducedPotential liouville_reduce(const Grid& grid, const FracParams& fp, const Conductivity& gamma) {
    require_node_field(grid, gamma.values(), "liouville_reduce");
    const NodeField Lm = assemble_laplacian(grid, fp).apply(gamma.m_values());
    const NodeField full = (-Lm.array() / gamma.sqrt_values().array()).matrix();
    double outside = 0.0;
    for (Index i : grid.exterior()) outside = std::max(outside, std::abs(full[i]));
    return ReducedPotential{full, Potential::restrict_to_interior(grid, full), Lm, outside == 0.0};
}

/// max over interior rows of |C_gamma D_{gamma^{-1/2}} - D_{gamma^{1/2}} (L + diag q)|,
/// divided by max |C_gamma|.
inline double verify_reduction(const Grid& grid, const FracParams& fp, const Conductivity& gamma) {
    const Eigen::MatrixXd C = assemble_conductivity(grid, fp, gamma).matrix();
    const Eigen::MatrixXd L = assemble_laplacian(grid, fp).matrix();
    const ReducedPotential red = liouville_reduce(grid, fp, gamma);
    const NodeField g = gamma.sqrt_values();
    const Index N = grid.size();
    double defect = 0.0;
    for (Index i : grid.interior()) {
        for (Index j = 0; j < N; ++j) {
            const double lhs = C(i, j) / g[j];
            const double rhs = g[i] * (L(i, j) + (i == j ? red.full[i] : 0.0));
            defect = std::max(defect, std::abs(lhs - rhs));
        }
    }
    const double scale = C.cwiseAbs().maxCoeff();
    return scale > 0.0 ? defect / scale : defect;
}

struct DnGap {
    double left;  ///< Lambda_q[f](v) - Lambda_gamma[f](v)
    double right; ///< h^n sum over exterior of f v (-Delta)^s m
};

/// Both sides of the DN gap identity, computed independently.
inline DnGap dn_gap(const Grid& grid, const FracParams& fp, const Conductivity& gamma, const ExteriorDatum& f,
                    const ExteriorDatum& v) {
    const ReducedPotential red = liouville_reduce(grid, fp, gamma);
    const DirichletSolver cond(assemble_conductivity(grid, fp, gamma));
    const DirichletSolver schr(assemble_schrodinger(grid, fp, red.interior));
    const NodeField fe = f.extend_by_zero();
    const NodeField ve = v.extend_by_zero();
    const double lambda_gamma = dn_pairing(cond, fe, ve);
    const double lambda_q = dn_pairing(schr, fe, ve);
    const double hn = std::pow(grid.spacing(), grid.dimension());
    double right = 0.0;
    for (Index i : grid.exterior()) right += fe[i] * ve[i] * red.laplacian_of_m[i];
    return DnGap{lambda_q - lambda_gamma, hn * right};
}

} // namespace fraccond
