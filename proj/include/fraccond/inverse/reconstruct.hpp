#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "fraccond/core/parallel.hpp"
#include "fraccond/forward/dn_map.hpp"
#include "fraccond/inverse/gauss_newton.hpp"

namespace fraccond {

namespace detail {

/// Schrodinger operator blocks needed by the inverse models.
struct SchrodingerBlocks {
    Eigen::MatrixXd S;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu; ///< of S_II
};

inline SchrodingerBlocks schrodinger_blocks(const Grid& grid, const Eigen::MatrixXd& L, const Eigen::VectorXd& q_interior) {
    SchrodingerBlocks b{L, {}};
    const auto& I = grid.interior();
    for (std::size_t k = 0; k < I.size(); ++k) b.S(I[k], I[k]) += q_interior[static_cast<Index>(k)];
    b.lu.compute(take(b.S, I, I));
    const double rc = b.lu.rcond();
    if (!(rc > 1e-14)) throw SolverError("inverse: singular interior block of (-Delta)^s + q", rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    return b;
}

inline Potential potential_from_interior(const Grid& grid, const Eigen::VectorXd& q_interior) {
    NodeField q = NodeField::Zero(grid.size());
    const auto& I = grid.interior();
    for (std::size_t k = 0; k < I.size(); ++k) q[I[k]] = q_interior[static_cast<Index>(k)];
    return Potential(grid, std::move(q));
}

inline PotentialFit to_fit(const Grid& grid, GaussNewtonResult&& gn) {
    PotentialFit fit{potential_from_interior(grid, gn.q), std::move(gn.objective), std::move(gn.relative_residual),
                     gn.converged, gn.iterations, gn.lambda, gn.condition, std::move(gn.status)};
    return fit;
}

} // namespace detail

/// Fits q to full DN data. Only entries whose source and observation nodes differ
/// enter the misfit: on the diagonal the conductivity and Schrodinger DN maps differ
/// by the exterior term h (-Delta)^s m.
inline PotentialFit recover_potential_full(const DnMatrix& observed, const Grid& grid, const FracParams& fp,
                                           const InversionConfig& cfg) {
    cfg.validate();
    require_exterior_set(grid, observed.source_idx, "W1");
    require_exterior_set(grid, observed.obs_idx, "W2");
    const auto& w1 = observed.source_idx;
    const auto& w2 = observed.obs_idx;
    if (observed.matrix.rows() != static_cast<Index>(w2.size()) || observed.matrix.cols() != static_cast<Index>(w1.size()))
        throw ValidationError("inverse: observed DN matrix shape does not match its index sets");

    std::vector<std::pair<Index, Index>> entries; // (l, k)
    for (Index k = 0; k < static_cast<Index>(w1.size()); ++k)
        for (Index l = 0; l < static_cast<Index>(w2.size()); ++l)
            if (w2[static_cast<std::size_t>(l)] != w1[static_cast<std::size_t>(k)]) entries.emplace_back(l, k);
    if (entries.empty()) throw ValidationError("inverse: no off-diagonal DN entries to fit");

    Eigen::VectorXd obs(static_cast<Index>(entries.size()));
    for (std::size_t e = 0; e < entries.size(); ++e) obs[static_cast<Index>(e)] = observed.matrix(entries[e].first, entries[e].second);

    const Eigen::MatrixXd L = assemble_laplacian(grid, fp).matrix();
    const auto& I = grid.interior();
    const Index nI = static_cast<Index>(I.size());
    const double hn = std::pow(grid.spacing(), grid.dimension());

    auto model = [&](const Eigen::VectorXd& q, bool with_jacobian) {
        const detail::SchrodingerBlocks b = detail::schrodinger_blocks(grid, L, q);
        const Eigen::MatrixXd G1 = b.lu.solve(detail::take(b.S, I, w1));
        const Eigen::MatrixXd G2 = (w1 == w2) ? G1 : Eigen::MatrixXd(b.lu.solve(detail::take(b.S, I, w2)));
        const Eigen::MatrixXd S21 = detail::take(b.S, w2, w1);
        const Eigen::MatrixXd lam = hn * (S21 - G2.transpose() * detail::take(b.S, I, w1));
        detail::ModelEval ev;
        ev.prediction.resize(static_cast<Index>(entries.size()));
        for (std::size_t e = 0; e < entries.size(); ++e)
            ev.prediction[static_cast<Index>(e)] = lam(entries[e].first, entries[e].second);
        if (with_jacobian) {
            // d Lambda_lk / d q_i = h G2(i, l) G1(i, k)
            ev.jacobian.resize(static_cast<Index>(entries.size()), nI);
            parallel_for(0, nI, [&](Index i) {
                for (std::size_t e = 0; e < entries.size(); ++e)
                    ev.jacobian(static_cast<Index>(e), i) = hn * G2(i, entries[e].first) * G1(i, entries[e].second);
            });
        }
        return ev;
    };
    return detail::to_fit(grid, detail::gauss_newton(model, obs, nI, cfg));
}

/// Solves (-Delta)^s m + q m = -q in omega, m = 0 outside.
inline NodeField recover_m_from_q(const Potential& q, const Grid& grid, const FracParams& fp) {
    require_node_field(grid, q.values(), "recover_m_from_q");
    const auto& I = grid.interior();
    Eigen::MatrixXd A = detail::take(assemble_laplacian(grid, fp).matrix(), I, I);
    Eigen::VectorXd rhs(static_cast<Index>(I.size()));
    for (std::size_t k = 0; k < I.size(); ++k) {
        A(static_cast<Index>(k), static_cast<Index>(k)) += q.values()[I[k]];
        rhs[static_cast<Index>(k)] = -q.values()[I[k]];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rc = lu.rcond();
    if (!(rc > 1e-14))
        throw SolverError("recover_m_from_q: interior block of (-Delta)^s + q is singular "
                          "(0 is a Dirichlet eigenvalue of the Schrodinger operator)",
                          rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    const Eigen::VectorXd mI = lu.solve(rhs);
    NodeField m = NodeField::Zero(grid.size());
    for (std::size_t k = 0; k < I.size(); ++k) m[I[k]] = mI[static_cast<Index>(k)];
    return m;
}

namespace detail {
inline InversionReport finish_report(PotentialFit&& fit, const Grid& grid, const FracParams& fp) {
    InversionReport rep{std::move(fit), {}, std::nullopt};
    rep.m = recover_m_from_q(rep.fit.q, grid, fp);
    for (Index i = 0; i < rep.m.size(); ++i) {
        if (!(1.0 + rep.m[i] > 0.0))
            throw ReconstructionError("reconstruct_gamma: 1 + m <= 0 at node " + std::to_string(i) +
                                      " (gamma lower bound violated)");
    }
    rep.gamma = Conductivity::from_m(grid, rep.m);
    return rep;
}
} // namespace detail

/// Full-data pipeline: fit q, solve for m, gamma = (1 + m)^2.
inline InversionReport reconstruct_gamma(const DnMatrix& observed, const Grid& grid, const FracParams& fp,
                                         const InversionConfig& cfg) {
    return detail::finish_report(recover_potential_full(observed, grid, fp, cfg), grid, fp);
}

/// Fits q from the single response Lambda[g] observed on W2 (ascending or not; order is irrelevant).
inline InversionReport single_measurement_fit(const ExteriorDatum& g, const std::vector<Index>& w2,
                                              const NodeField& observed_response, const Grid& grid,
                                              const FracParams& fp, const InversionConfig& cfg) {
    cfg.validate();
    require_exterior_set(grid, w2, "W2");
    if (observed_response.size() != static_cast<Index>(w2.size()))
        throw ValidationError("single_measurement_fit: one observation per W2 node is required");
    const NodeField ge = g.extend_by_zero();
    std::set<Index> w1;
    for (Index i = 0; i < ge.size(); ++i)
        if (ge[i] != 0.0) w1.insert(i);
    if (w1.empty()) throw ValidationError("single_measurement_fit: g must be nonzero");
    for (Index i : w1) {
        const bool touches = (i > 0 && grid.is_interior(i - 1)) || (i + 1 < grid.size() && grid.is_interior(i + 1));
        if (touches) throw ValidationError("single_measurement_fit: closure of W1 meets closure of omega");
    }
    for (Index l : w2)
        if (w1.count(l)) throw ValidationError("single_measurement_fit: W1 and W2 must be disjoint");

    // canonical order so the objective is independent of how W2 was listed
    std::vector<std::size_t> order(w2.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w2[a] < w2[b]; });
    std::vector<Index> obs_nodes(w2.size());
    Eigen::VectorXd obs(static_cast<Index>(w2.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
        obs_nodes[k] = w2[order[k]];
        obs[static_cast<Index>(k)] = observed_response[static_cast<Index>(order[k])];
    }
    for (std::size_t k = 1; k < obs_nodes.size(); ++k)
        if (obs_nodes[k] == obs_nodes[k - 1]) throw ValidationError("single_measurement_fit: W2 has repeated nodes");

    const Eigen::MatrixXd L = assemble_laplacian(grid, fp).matrix();
    const auto& I = grid.interior();
    const Index nI = static_cast<Index>(I.size());
    const double hn = std::pow(grid.spacing(), grid.dimension());
    const std::vector<Index>& E = grid.exterior();
    Eigen::VectorXd gE(static_cast<Index>(E.size()));
    for (std::size_t k = 0; k < E.size(); ++k) gE[static_cast<Index>(k)] = ge[E[k]];

    auto model = [&](const Eigen::VectorXd& q, bool with_jacobian) {
        const detail::SchrodingerBlocks b = detail::schrodinger_blocks(grid, L, q);
        const Eigen::VectorXd v = b.lu.solve(detail::take(b.S, I, E) * gE); // u_I = -v
        const Eigen::MatrixXd S2E = detail::take(b.S, obs_nodes, E);
        const Eigen::MatrixXd S2I = detail::take(b.S, obs_nodes, I);
        detail::ModelEval ev;
        ev.prediction = hn * (S2E * gE - S2I * v);
        if (with_jacobian) {
            const Eigen::MatrixXd G2 = b.lu.solve(S2I.transpose());
            ev.jacobian.resize(static_cast<Index>(obs_nodes.size()), nI);
            for (Index l = 0; l < ev.jacobian.rows(); ++l)
                for (Index i = 0; i < nI; ++i) ev.jacobian(l, i) = hn * G2(i, l) * v[i];
        }
        return ev;
    };
    return detail::finish_report(detail::to_fit(grid, detail::gauss_newton(model, obs, nI, cfg)), grid, fp);
}

} // namespace fraccond
