#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "fraccond/core/grid.hpp"

namespace fraccond {

struct SpectralResult {
    NodeField values;
    bool boundary_warning = false; ///< |u| >= 1e-12 at a window edge
};

/// Applies the symbol |xi|^{2s} by FFT on a periodic window.
///
/// The samples are zero-padded to padding * N points before the transform. padding = 1
/// treats the window itself as the period; larger padding suppresses periodic images.
inline SpectralResult spectral_laplacian_oracle(const NodeField& u, double spacing, double s, int padding = 8) {
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("spectral oracle: s must lie in (0, 1]");
    if (!(spacing > 0.0)) throw DomainError("spectral oracle: spacing must be positive");
    if (padding < 1) throw DomainError("spectral oracle: padding must be >= 1");
    const Index N = u.size();
    const Index M = N * padding;

    SpectralResult out;
    out.boundary_warning = N > 0 && (std::abs(u[0]) >= 1e-12 || std::abs(u[N - 1]) >= 1e-12);

    std::vector<double> buf(static_cast<std::size_t>(M), 0.0);
    for (Index i = 0; i < N; ++i) buf[static_cast<std::size_t>(i)] = u[i];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);
    const double base = 2.0 * std::numbers::pi / (static_cast<double>(M) * spacing);
    for (Index k = 0; k < M; ++k) {
        const Index kk = (2 * k <= M) ? k : k - M;
        const double xi = base * static_cast<double>(kk);
        spec[static_cast<std::size_t>(k)] *= std::pow(std::abs(xi), 2.0 * s);
    }
    std::vector<double> back;
    fft.inv(back, spec);
    out.values.resize(N);
    for (Index i = 0; i < N; ++i) out.values[i] = back[static_cast<std::size_t>(i)];
    return out;
}

inline SpectralResult spectral_laplacian_oracle(const Grid& grid, const NodeField& u, double s, int padding = 8) {
    require_node_field(grid, u, "spectral oracle");
    return spectral_laplacian_oracle(u, grid.spacing(), s, padding);
}

} // namespace fraccond
