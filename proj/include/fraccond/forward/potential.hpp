#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "fraccond/operators/nonlocal.hpp"

namespace fraccond {

/// Schrodinger potential q, supported on interior nodes.
class Potential {
public:
    Potential(const Grid& grid, NodeField q) : q_(std::move(q)) {
        require_node_field(grid, q_, "potential");
        for (Index i : grid.exterior()) {
            if (q_[i] != 0.0)
                throw ValidationError("potential: q must vanish on exterior node " + std::to_string(i));
        }
        for (Index i = 0; i < q_.size(); ++i)
            if (!std::isfinite(q_[i])) throw ValidationError("potential: non-finite value");
    }

    static Potential zero(const Grid& grid) { return Potential(grid, NodeField::Zero(grid.size())); }

    /// Keeps the interior entries of a full-length field and zeroes the rest.
    static Potential restrict_to_interior(const Grid& grid, const NodeField& full) {
        require_node_field(grid, full, "potential");
        NodeField q = NodeField::Zero(grid.size());
        for (Index i : grid.interior()) q[i] = full[i];
        return Potential(grid, std::move(q));
    }

    const NodeField& values() const { return q_; }

private:
    NodeField q_;
};

/// (-Delta)^s + q.
inline NonlocalOperator assemble_schrodinger(const Grid& grid, const FracParams& fp, const Potential& q) {
    require_node_field(grid, q.values(), "assemble_schrodinger");
    Eigen::MatrixXd A = assemble_laplacian(grid, fp).matrix();
    A.diagonal() += q.values();
    return NonlocalOperator(grid, std::move(A), OperatorKind::schrodinger);
}

} // namespace fraccond
