#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fraccond/core/grid.hpp"

namespace fraccond {

/// Standard C-infinity bump exp(1 - 1/(1 - t^2)) on |t| < 1, peak value 1 at t = 0.
inline double smooth_bump(double t) {
    if (!(std::abs(t) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

/// Continuum description of gamma through m = gamma^{1/2} - 1.
class ConductivityProfile {
public:
    using Function = std::function<double(double)>;

    ConductivityProfile(Function m, double support_lo, double support_hi, std::string name)
        : m_(std::move(m)), lo_(support_lo), hi_(support_hi), name_(std::move(name)) {}

    static ConductivityProfile constant() {
        return ConductivityProfile([](double) { return 0.0; }, 0.0, 0.0, "constant");
    }

    /// m(x) = amplitude * bump((x - center)/width).
    static ConductivityProfile bump(double amplitude, double center, double width) {
        if (!(width > 0.0)) throw ValidationError("gamma.width must be positive");
        if (!(amplitude > -1.0)) throw ValidationError("gamma.amplitude must exceed -1");
        return ConductivityProfile(
            [=](double x) { return amplitude * smooth_bump((x - center) / width); }, center - width,
            center + width, "bump");
    }

    /// Two bumps of equal width centred at center -+ separation/2.
    static ConductivityProfile double_bump(double amplitude, double center, double width,
                                           double separation) {
        if (!(width > 0.0)) throw ValidationError("gamma.width must be positive");
        if (!(separation >= 2.0 * width))
            throw ValidationError("gamma.separation must be at least twice gamma.width");
        if (!(amplitude > -1.0)) throw ValidationError("gamma.amplitude must exceed -1");
        const double c1 = center - 0.5 * separation;
        const double c2 = center + 0.5 * separation;
        return ConductivityProfile(
            [=](double x) {
                return amplitude * (smooth_bump((x - c1) / width) + smooth_bump((x - c2) / width));
            },
            c1 - width, c2 + width, "double-bump");
    }

    /// Piecewise-linear interpolation of tabulated (x, gamma); gamma = 1 off the table.
    static ConductivityProfile tabulated(std::vector<double> xs, std::vector<double> gammas) {
        if (xs.size() != gammas.size() || xs.size() < 2)
            throw ValidationError("gamma table needs at least two (x, gamma) rows");
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k > 0 && !(xs[k] > xs[k - 1]))
                throw ValidationError("gamma table x column must be strictly increasing");
            if (!(gammas[k] > 0.0)) throw ValidationError("gamma table values must be positive");
        }
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (gammas[k] != 1.0) {
                // the interpolant departs from 1 on the neighbouring cells too
                const double l = xs[k > 0 ? k - 1 : 0];
                const double r = xs[std::min(k + 1, xs.size() - 1)];
                lo = any ? std::min(lo, l) : l;
                hi = any ? std::max(hi, r) : r;
                any = true;
            }
        }
        auto f = [xs = std::move(xs), gammas = std::move(gammas)](double x) {
            if (x <= xs.front() || x >= xs.back()) return 0.0;
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t k = static_cast<std::size_t>(it - xs.begin());
            const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
            const double g = (1.0 - t) * gammas[k - 1] + t * gammas[k];
            return std::sqrt(g) - 1.0;
        };
        return ConductivityProfile(std::move(f), lo, hi, "from-file");
    }

    double m(double x) const { return m_(x); }
    double sqrt_gamma(double x) const { return 1.0 + m_(x); }
    double gamma(double x) const {
        const double r = 1.0 + m_(x);
        return r * r;
    }
    /// Closed interval containing supp m; degenerate for the constant profile.
    std::pair<double, double> support() const { return {lo_, hi_}; }
    const std::string& name() const { return name_; }

private:
    Function m_;
    double lo_, hi_;
    std::string name_;
};

/// Nodal conductivity with m = gamma^{1/2} - 1 supported on interior nodes.
class Conductivity {
public:
    /// Builds from nodal m values; gamma = (1 + m)^2.
    static Conductivity from_m(const Grid& grid, NodeField m) {
        require_node_field(grid, m, "conductivity");
        for (Index i = 0; i < m.size(); ++i) {
            if (!std::isfinite(m[i]) || !(1.0 + m[i] > 0.0))
                throw ValidationError("conductivity: 1 + m must be positive at node " + std::to_string(i));
        }
        for (Index i : grid.exterior()) {
            if (std::abs(m[i]) > kExteriorTolerance)
                throw ValidationError("conductivity: m must vanish on exterior node " + std::to_string(i) +
                                      " (gamma = 1 outside omega)");
            m[i] = 0.0;
        }
        NodeField g = (1.0 + m.array()).square().matrix();
        return Conductivity(std::move(g), std::move(m));
    }

    static Conductivity from_values(const Grid& grid, const NodeField& gamma) {
        require_node_field(grid, gamma, "conductivity");
        NodeField m(gamma.size());
        for (Index i = 0; i < gamma.size(); ++i) {
            if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i]))
                throw ValidationError("conductivity: gamma must be positive and finite at node " +
                                      std::to_string(i));
            m[i] = std::sqrt(gamma[i]) - 1.0;
        }
        return from_m(grid, std::move(m));
    }

    /// As from_values, additionally enforcing given bounds lower <= gamma_i <= upper.
    static Conductivity from_values(const Grid& grid, const NodeField& gamma, double lower, double upper) {
        if (!(lower > 0.0 && lower <= upper && std::isfinite(upper)))
            throw ValidationError("conductivity: bounds must satisfy 0 < lower <= upper < inf");
        Conductivity c = from_values(grid, gamma);
        if (c.lower_ < lower || c.upper_ > upper)
            throw ValidationError("conductivity: violated gamma bounds");
        c.lower_ = lower;
        c.upper_ = upper;
        return c;
    }

    static Conductivity sample(const Grid& grid, const ConductivityProfile& profile) {
        return from_m(grid, grid.sample([&](double x) { return profile.m(x); }));
    }

    static Conductivity uniform(const Grid& grid) { return from_m(grid, NodeField::Zero(grid.size())); }

    const NodeField& values() const { return gamma_; }
    const NodeField& m_values() const { return m_; }
    /// gamma^{1/2} = 1 + m, exactly as used by the assembled operators.
    NodeField sqrt_values() const { return (1.0 + m_.array()).matrix(); }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool is_trivial() const { return m_.cwiseAbs().maxCoeff() == 0.0; }

private:
    static constexpr double kExteriorTolerance = 1e-12;

    Conductivity(NodeField gamma, NodeField m) : gamma_(std::move(gamma)), m_(std::move(m)) {
        // gamma = 1 beyond the window, so the global bounds bracket 1
        lower_ = std::min(1.0, gamma_.minCoeff());
        upper_ = std::max(1.0, gamma_.maxCoeff());
    }

    NodeField gamma_;
    NodeField m_;
    double lower_ = 1.0;
    double upper_ = 1.0;
};

} // namespace fraccond
