#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fraccond/walk/params.hpp"

namespace fraccond {

struct GeneratorResidual {
    /// sup |DQ - I_R / D|: D(x, h) carried exactly.
    double exact_normalization = 0.0;
    /// sup |DQ - I_R / (gamma^{1/2}(x) S_K)|: the h -> 0 normalization.
    double limit_normalization = 0.0;
    /// sup |DQ - lattice_generator(u)|, identical up to rounding.
    double lattice_identity = 0.0;
    bool edge_warning = false;
};

/// Compares the master-equation difference quotient DQ = (master_step(u) - u)/tau with
/// the continuum kernel integral over the jump range R = K h,
///   I_R(x) = int_{|z| <= R} gamma^{1/2}(x+z) (u(x+z) - u(x)) |z|^{-1-2s} dz.
///
/// Without truncation I_R(x) = -(C_gamma^s u)(x) / (C_{1,s} gamma^{1/2}(x)), so the walk
/// evolves by du/dt = -c(x) C_gamma^s u in the positive-operator convention.
inline GeneratorResidual generator_residual(const WalkParams& wp, const std::function<double(double)>& u,
                                            const ConductivityProfile& gamma) {
    const Grid& grid = wp.lattice();
    const NodeField us = grid.sample(u);
    const NodeField dq = ((master_step(us, wp) - us).array() / wp.tau()).matrix();
    const NodeField lg = lattice_generator(us, wp);
    const double R = static_cast<double>(wp.K()) * wp.h();
    const double expo = -1.0 - 2.0 * wp.s();

    GeneratorResidual res;
    const Index N = grid.size();
    res.edge_warning = std::abs(us[0]) > 1e-10 || std::abs(us[N - 1]) > 1e-10;
    for (Index i = 0; i < N; ++i) {
        const double x = grid.node(i);
        const double ux = u(x);
        auto integrand = [&](double z) {
            if (z <= 0.0) return 0.0;
            const double plus = gamma.sqrt_gamma(x + z) * (u(x + z) - ux);
            const double minus = gamma.sqrt_gamma(x - z) * (u(x - z) - ux);
            return (plus + minus) * std::pow(z, expo);
        };
        const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, R, 12, 1e-10);
        res.exact_normalization = std::max(res.exact_normalization, std::abs(dq[i] - I / wp.normalization(i)));
        res.limit_normalization = std::max(
            res.limit_normalization, std::abs(dq[i] - I / (gamma.sqrt_gamma(x) * wp.truncated_sum())));
        res.lattice_identity = std::max(res.lattice_identity, std::abs(dq[i] - lg[i]));
    }
    return res;
}

} // namespace fraccond
