#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fraccond/operators/nonlocal.hpp"

namespace fraccond {

/// Exterior values, one per entry of grid.exterior(); zero beyond the window.
class ExteriorDatum {
public:
    ExteriorDatum(const Grid& grid, NodeField exterior_values)
        : N_(grid.size()), exterior_(grid.exterior()), values_(std::move(exterior_values)) {
        if (values_.size() != static_cast<Index>(exterior_.size()))
            throw ValidationError("exterior datum: expected one value per exterior node");
    }

    static ExteriorDatum zero(const Grid& grid) {
        return ExteriorDatum(grid, NodeField::Zero(static_cast<Index>(grid.exterior().size())));
    }

    /// Takes the exterior entries of a full node field; interior entries are ignored.
    static ExteriorDatum from_node_field(const Grid& grid, const NodeField& f) {
        require_node_field(grid, f, "exterior datum");
        NodeField v(static_cast<Index>(grid.exterior().size()));
        for (std::size_t k = 0; k < grid.exterior().size(); ++k) v[static_cast<Index>(k)] = f[grid.exterior()[k]];
        return ExteriorDatum(grid, std::move(v));
    }

    /// Indicator of a single exterior node.
    static ExteriorDatum unit(const Grid& grid, Index node) {
        if (node < 0 || node >= grid.size() || grid.is_interior(node))
            throw ValidationError("exterior datum: node " + std::to_string(node) + " is not exterior");
        NodeField f = NodeField::Zero(grid.size());
        f[node] = 1.0;
        return from_node_field(grid, f);
    }

    const NodeField& values() const { return values_; }

    /// The canonical representative: extension by zero into omega.
    NodeField extend_by_zero() const {
        NodeField f = NodeField::Zero(N_);
        for (std::size_t k = 0; k < exterior_.size(); ++k) f[exterior_[k]] = values_[static_cast<Index>(k)];
        return f;
    }

private:
    Index N_;
    std::vector<Index> exterior_;
    NodeField values_;
};

namespace detail {
inline Eigen::MatrixXd take(const Eigen::MatrixXd& A, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(static_cast<Index>(r), static_cast<Index>(c)) = A(rows[r], cols[c]);
    return out;
}
} // namespace detail

/// Factorization of the interior block A_II, shared by every solve on one operator.
class DirichletSolver {
public:
    explicit DirichletSolver(NonlocalOperator op) : op_(std::move(op)) {
        const Grid& grid = op_.grid();
        A_II_ = detail::take(op_.matrix(), grid.interior(), grid.interior());
        lu_.compute(A_II_);
        rcond_ = lu_.rcond();
        if (!(rcond_ > kMinRcond) || !std::isfinite(rcond_)) {
            const double cond = rcond_ > 0.0 ? 1.0 / rcond_ : std::numeric_limits<double>::infinity();
            throw SolverError(std::string("dirichlet: singular interior block of ") + to_string(op_.kind()) +
                                  " operator (condition estimate " + std::to_string(cond) + ")",
                              cond);
        }
    }

    const NonlocalOperator& op() const { return op_; }
    double condition_estimate() const { return 1.0 / rcond_; }

    /// A_II^{-1} rhs for a block of interior right-hand sides.
    Eigen::MatrixXd solve_interior(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

    /// u = extension on exterior nodes, (A u)_I = F_I. The extension's interior values
    /// are a lift only and do not change the result.
    NodeField solve_lifted(const NodeField& extension, const NodeField& F) const {
        const Grid& grid = op_.grid();
        require_node_field(grid, extension, "solve_dirichlet");
        require_node_field(grid, F, "solve_dirichlet");
        const NodeField Aext = op_.matrix() * extension;
        const auto& I = grid.interior();
        Eigen::VectorXd rhs(static_cast<Index>(I.size()));
        for (std::size_t k = 0; k < I.size(); ++k) rhs[static_cast<Index>(k)] = F[I[k]] - Aext[I[k]];
        const Eigen::VectorXd corr = lu_.solve(rhs);
        NodeField u = extension;
        for (std::size_t k = 0; k < I.size(); ++k) u[I[k]] += corr[static_cast<Index>(k)];
        return u;
    }

    NodeField solve(const ExteriorDatum& g, const NodeField& F) const { return solve_lifted(g.extend_by_zero(), F); }

private:
    static constexpr double kMinRcond = 1e-14;

    NonlocalOperator op_;
    Eigen::MatrixXd A_II_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
};

inline NodeField solve_dirichlet(const NonlocalOperator& op, const ExteriorDatum& g, const NodeField& F) {
    return DirichletSolver(op).solve(g, F);
}

/// max_I |(A u)_i - F_i|, the interior residual of a Dirichlet solution.
inline double interior_residual(const NonlocalOperator& op, const NodeField& u, const NodeField& F) {
    const NodeField Au = op.apply(u);
    double r = 0.0;
    for (Index i : op.grid().interior()) r = std::max(r, std::abs(Au[i] - F[i]));
    return r;
}

/// Gains of the linear map (F_I, g_E) -> u in the Euclidean norm:
/// |u| <= rhs_gain |F| + datum_gain |g|.
struct StabilityConstants {
    double rhs_gain = 0.0;
    double datum_gain = 0.0;
    double c() const { return std::max(rhs_gain, datum_gain); }
};

inline StabilityConstants stability_constants(const NonlocalOperator& op) {
    const Grid& grid = op.grid();
    const Eigen::MatrixXd A_II = detail::take(op.matrix(), grid.interior(), grid.interior());
    const Eigen::MatrixXd A_IE = detail::take(op.matrix(), grid.interior(), grid.exterior());
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A_II);
    const Eigen::MatrixXd inv = lu.inverse();
    const Eigen::MatrixXd G = lu.solve(A_IE);
    StabilityConstants sc;
    sc.rhs_gain = Eigen::JacobiSVD<Eigen::MatrixXd>(inv).singularValues()[0];
    // u_E = g and u_I = -G g, so the datum gain is the norm of [I; -G]
    const double g_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(G).singularValues()[0];
    sc.datum_gain = std::sqrt(1.0 + g_norm * g_norm);
    return sc;
}

} // namespace fraccond
