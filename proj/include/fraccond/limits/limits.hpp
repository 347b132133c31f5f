#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fraccond/core/parallel.hpp"
#include "fraccond/forward/dirichlet.hpp"
#include "fraccond/operators/nonlocal.hpp"

namespace fraccond {

using ScalarFunction = std::function<double(double)>;
using PairFunction = std::function<double(double, double)>;

/// Decides whether the window-edge values of u are negligible.
inline bool decays_at_edges(const NodeField& u, double threshold = 1e-10) {
    return u.size() == 0 || (std::abs(u[0]) < threshold && std::abs(u[u.size() - 1]) < threshold);
}

enum class TailTerm { include, exclude };

/// |grad^s u|^2 = h u.(L u), evaluated matrix-free.
inline double grad_norm_sq(const Grid& grid, const FracParams& fp, const NodeField& u,
                           TailTerm tail = TailTerm::include) {
    require_node_field(grid, u, "grad_norm_sq");
    const Index N = grid.size();
    const KernelTable w = make_kernel_table(grid, fp);
    const double hn = std::pow(grid.spacing(), grid.dimension());
    // sum over i < j of w_ij (u_j - u_i)^2 equals half the ordered-pair sum
    std::vector<double> by_offset(static_cast<std::size_t>(N), 0.0);
    parallel_for(1, N, [&](Index d) {
        double acc = 0.0;
        for (Index i = 0; i + d < N; ++i) {
            const double du = u[i + d] - u[i];
            acc += du * du;
        }
        by_offset[static_cast<std::size_t>(d)] = acc * w.by_offset[static_cast<std::size_t>(d)];
    });
    double pairs = 0.0;
    for (double v : by_offset) pairs += v;
    double t = 0.0;
    if (tail == TailTerm::include)
        for (Index i = 0; i < N; ++i) t += w.tail[i] * u[i] * u[i];
    return hn * (pairs + t);
}

/// Central-difference approximation of int gamma u' v'.
inline double central_difference_energy(const Grid& grid, const NodeField& gamma, const NodeField& u,
                                        const NodeField& v) {
    const Index N = grid.size();
    const double h = grid.spacing();
    auto diff = [&](const NodeField& f, Index i) {
        const double left = i > 0 ? f[i - 1] : 0.0;
        const double right = i + 1 < N ? f[i + 1] : 0.0;
        return (right - left) / (2.0 * h);
    };
    double acc = 0.0;
    for (Index i = 0; i < N; ++i) acc += gamma[i] * diff(u, i) * diff(v, i);
    return acc * h;
}

/// Refinement by h-halving: intervals N-1 = start, 2 start, ... up to max.
struct RefinementSchedule {
    double half_width = 8.0;
    Index intervals_start = 512;
    Index intervals_max = 8192;
    double rel_change = 0.005;
};

/// Value of a discretized quantity extrapolated to h -> 0.
struct ConvergedValue {
    double value = 0.0;        ///< Richardson extrapolant at the finest level used
    double raw = 0.0;          ///< plain value at the finest level
    double reference = 0.0;    ///< reference quantity at the finest level
    Index nodes = 0;
    bool converged = false;
};

/// Per level the callback returns (discrete, reference). The discrete value is
/// extrapolated with the punctured-sum error exponent p = 2 - 2s; refinement stops once
/// successive extrapolants differ by less than rel_change.
inline ConvergedValue h_converged(const std::function<std::pair<double, double>(const Grid&)>& level,
                                  double s, const RefinementSchedule& sched, double omega_half = 0.0) {
    const double L = sched.half_width;
    const double oh = omega_half > 0.0 ? omega_half : 0.5 * L;
    const double factor = std::pow(2.0, 2.0 - 2.0 * s);
    ConvergedValue out;
    double prev_raw = 0.0, prev_ext = 0.0;
    bool have_prev = false, have_ext = false;
    for (Index intervals = sched.intervals_start; intervals <= sched.intervals_max; intervals *= 2) {
        const Grid grid(L, intervals + 1, -oh, oh);
        const auto [raw, ref] = level(grid);
        out.raw = raw;
        out.reference = ref;
        out.nodes = grid.size();
        if (!have_prev) {
            out.value = raw;
        } else {
            const double ext = (factor * raw - prev_raw) / (factor - 1.0);
            out.value = ext;
            if (have_ext) {
                const double scale = std::max(std::abs(ext), 1e-300);
                if (std::abs(ext - prev_ext) <= sched.rel_change * scale || ext == prev_ext) {
                    out.converged = true;
                    return out;
                }
            }
            prev_ext = ext;
            have_ext = true;
        }
        prev_raw = raw;
        have_prev = true;
    }
    return out;
}

struct LimitRow {
    double s = 0.0;
    std::string label;
    double discrete = 0.0;
    double reference = 0.0;
    double gap = 0.0;
    Index nodes = 0;
    bool converged = false;
};

struct LimitStudy {
    std::string name;
    std::vector<double> s_list;
    std::vector<LimitRow> rows;
    std::vector<std::string> warnings;

    std::vector<LimitRow> rows_labelled(const std::string& label) const {
        std::vector<LimitRow> out;
        for (const auto& r : rows)
            if (r.label == label) out.push_back(r);
        return out;
    }
};

/// |a - b| / |b|, with 0/0 = 0 and x/0 = |x|.
inline double relative_gap(double discrete, double reference) {
    if (reference == 0.0) return std::abs(discrete);
    return std::abs(discrete - reference) / std::abs(reference);
}

namespace detail {
inline void check_s_list(const std::vector<double>& s_list, LimitStudy& study) {
    if (s_list.empty()) throw ValidationError("limits: s_list must not be empty");
    for (std::size_t k = 0; k < s_list.size(); ++k) {
        if (!(s_list[k] > 0.0 && s_list[k] < 1.0)) throw ValidationError("limits: s values must lie in (0, 1)");
        if (k > 0 && !(s_list[k] > s_list[k - 1])) throw ValidationError("limits: s_list must be strictly increasing");
        if (s_list[k] > 0.95)
            study.warnings.push_back("s = " + std::to_string(s_list[k]) + " above 0.95: quadrature accuracy degrades");
    }
    study.s_list = s_list;
}

inline void note_edges(const NodeField& u, LimitStudy& study, const char* what) {
    if (!decays_at_edges(u)) study.warnings.push_back(std::string(what) + " does not decay below 1e-10 at the window edges");
}

inline LimitRow make_row(double s, std::string label, const ConvergedValue& cv) {
    return LimitRow{s, std::move(label), cv.value, cv.reference, relative_gap(cv.value, cv.reference), cv.nodes,
                    cv.converged};
}

inline NodeField ones(const Grid& g) { return NodeField::Ones(g.size()); }
} // namespace detail

/// |grad^s u|^2 against |u'|^2 for each s.
inline LimitStudy grad_limit_study(const ScalarFunction& u, const std::vector<double>& s_list,
                                   const RefinementSchedule& sched = {}) {
    LimitStudy study{"grad", {}, {}, {}};
    detail::check_s_list(s_list, study);
    for (double s : s_list) {
        const FracParams fp(s);
        bool warned = false;
        const ConvergedValue cv = h_converged(
            [&](const Grid& g) {
                const NodeField us = g.sample(u);
                if (!warned) {
                    detail::note_edges(us, study, "u");
                    warned = true;
                }
                return std::pair{grad_norm_sq(g, fp, us), central_difference_energy(g, detail::ones(g), us, us)};
            },
            s, sched);
        study.rows.push_back(detail::make_row(s, "grad", cv));
    }
    return study;
}

/// B_gamma^s[u, v] against int gamma u' v'.
inline LimitStudy bilinear_limit_study(const ConductivityProfile& gamma, const ScalarFunction& u,
                                       const ScalarFunction& v, const std::vector<double>& s_list,
                                       const RefinementSchedule& sched = {}) {
    LimitStudy study{"bilinear", {}, {}, {}};
    detail::check_s_list(s_list, study);
    const auto [lo, hi] = gamma.support();
    const double oh = std::max({std::abs(lo), std::abs(hi), 0.5 * sched.half_width}) + 1e-9;
    if (!(oh < sched.half_width)) throw ValidationError("bilinear_limit_study: gamma support exceeds the window");
    for (double s : s_list) {
        const FracParams fp(s);
        const ConvergedValue cv = h_converged(
            [&](const Grid& g) {
                const Conductivity c = Conductivity::sample(g, gamma);
                const NodeField us = g.sample(u), vs = g.sample(v);
                return std::pair{bilinear_form(g, fp, c, us, vs), central_difference_energy(g, c.values(), us, vs)};
            },
            s, sched, oh);
        study.rows.push_back(detail::make_row(s, "bilinear", cv));
    }
    return study;
}

/// Local exterior problem: (gamma u')' = 0 in omega, u = f outside, sampled on the grid.
inline NodeField local_exterior_solution(const Grid& grid, const NodeField& gamma, const ScalarFunction& f) {
    NodeField u = grid.sample(f);
    const double a = grid.omega_lo(), b = grid.omega_hi();
    // u(x) = f(a) + (f(b) - f(a)) int_a^x 1/gamma / int_a^b 1/gamma, trapezoid in the nodal values
    const auto& I = grid.interior();
    std::vector<double> cum(I.size() + 1, 0.0);
    const double h = grid.spacing();
    const Index first = I.front(), last = I.back();
    const double left_gap = grid.node(first) - a;
    double acc = left_gap / gamma[first];
    std::vector<double> at(I.size());
    for (std::size_t k = 0; k < I.size(); ++k) {
        if (k > 0) acc += 0.5 * h * (1.0 / gamma[I[k - 1]] + 1.0 / gamma[I[k]]);
        at[k] = acc;
    }
    const double total = acc + (b - grid.node(last)) / gamma[last];
    const double fa = f(a), fb = f(b);
    for (std::size_t k = 0; k < I.size(); ++k) u[I[k]] = fa + (fb - fa) * at[k] / total;
    return u;
}

/// DN form: B_gamma^s[u_f, g] = <Lambda_gamma^s f, g> against int gamma u_f' g' with
/// u_f the local exterior-problem solution. Uses dense solves, so the schedule should stay small.
inline LimitStudy dn_form_limit_study(const ConductivityProfile& gamma, double omega_lo, double omega_hi,
                                      const ScalarFunction& f, const ScalarFunction& g,
                                      const std::vector<double>& s_list, const RefinementSchedule& sched) {
    LimitStudy study{"dn-form", {}, {}, {}};
    detail::check_s_list(s_list, study);
    for (double s : s_list) {
        const FracParams fp(s);
        const double L = sched.half_width;
        const double factor = std::pow(2.0, 2.0 - 2.0 * s);
        ConvergedValue cv;
        double prev = 0.0, prev_ext = 0.0;
        bool have_prev = false, have_ext = false;
        for (Index intervals = sched.intervals_start; intervals <= sched.intervals_max; intervals *= 2) {
            const Grid grid(L, intervals + 1, omega_lo, omega_hi);
            const Conductivity c = Conductivity::sample(grid, gamma);
            const NonlocalOperator op = assemble_conductivity(grid, fp, c);
            const NodeField fs = grid.sample(f), gs = grid.sample(g);
            const NodeField uf = solve_dirichlet(op, ExteriorDatum::from_node_field(grid, fs), NodeField::Zero(grid.size()));
            const double raw = grid.spacing() * gs.dot(op.apply(uf));
            cv.raw = raw;
            cv.reference = central_difference_energy(grid, c.values(), local_exterior_solution(grid, c.values(), f), gs);
            cv.nodes = grid.size();
            cv.value = raw;
            if (have_prev) {
                const double ext = (factor * raw - prev) / (factor - 1.0);
                cv.value = ext;
                if (have_ext && std::abs(ext - prev_ext) <= sched.rel_change * std::abs(ext)) {
                    cv.converged = true;
                    break;
                }
                prev_ext = ext;
                have_ext = true;
            }
            prev = raw;
            have_prev = true;
        }
        study.rows.push_back(detail::make_row(s, "dn-form", cv));
    }
    return study;
}

/// Fixed panel of test functions for operator_limit_check.
inline std::vector<std::pair<std::string, ScalarFunction>> default_test_panel() {
    return {
        {"phi(-1.0)", [](double x) { return std::exp(-0.5 * (x + 1.0) * (x + 1.0)); }},
        {"phi(0.3)", [](double x) { return std::exp(-0.5 * (x - 0.3) * (x - 0.3)); }},
        {"phi(1.2)", [](double x) { return std::exp(-0.5 * (x - 1.2) * (x - 1.2)); }},
    };
}

/// Weak form: <phi, C_gamma^s u> against <phi', gamma u'>.
inline LimitStudy operator_limit_check(const ConductivityProfile& gamma, const ScalarFunction& u,
                                       const std::vector<double>& s_list, const RefinementSchedule& sched = {},
                                       std::vector<std::pair<std::string, ScalarFunction>> panel = default_test_panel()) {
    LimitStudy study{"operator", {}, {}, {}};
    detail::check_s_list(s_list, study);
    const auto [lo, hi] = gamma.support();
    const double oh = std::max({std::abs(lo), std::abs(hi), 0.5 * sched.half_width}) + 1e-9;
    if (!(oh < sched.half_width)) throw ValidationError("operator_limit_check: gamma support exceeds the window");
    for (double s : s_list) {
        const FracParams fp(s);
        for (const auto& [label, phi] : panel) {
            const ConvergedValue cv = h_converged(
                [&](const Grid& g) {
                    const Conductivity c = Conductivity::sample(g, gamma);
                    const NodeField us = g.sample(u), ps = g.sample(phi);
                    const NodeField Cu = conductivity_action(g, fp, c, us);
                    return std::pair{g.spacing() * ps.dot(Cu), central_difference_energy(g, c.values(), ps, us)};
                },
                s, sched, oh);
            study.rows.push_back(detail::make_row(s, label, cv));
        }
    }
    return study;
}

/// Distributional gradient: <grad^s u, phi> over node pairs, one value per s.
inline std::vector<double> gradient_distributional_decay(const ScalarFunction& u, const PairFunction& phi,
                                                         const std::vector<double>& s_list, double half_width = 6.0,
                                                         Index nodes = 1024) {
    std::vector<double> out;
    const Grid grid(half_width, nodes, -0.5 * half_width, 0.5 * half_width);
    const NodeField us = grid.sample(u);
    const Index N = grid.size();
    const double h = grid.spacing();
    Eigen::MatrixXd ph(N, N);
    for (Index i = 0; i < N; ++i)
        for (Index j = 0; j < N; ++j) ph(i, j) = phi(grid.node(i), grid.node(j));
    for (double s : s_list) {
        const FracParams fp(s);
        const double scale = std::sqrt(fp.cns()) / std::sqrt(2.0);
        std::vector<double> rows(static_cast<std::size_t>(N), 0.0);
        parallel_for(0, N, [&](Index i) {
            double acc = 0.0;
            for (Index j = 0; j < N; ++j) {
                if (j == i) continue;
                const double dx = grid.node(j) - grid.node(i);
                // -(C^{1/2}/sqrt2) (u(y) - u(x)) (y - x) / |y - x|^{n/2+s+1}
                const double grad = -scale * (us[j] - us[i]) * dx / std::pow(std::abs(dx), 0.5 + s + 1.0);
                acc += grad * ph(i, j);
            }
            rows[static_cast<std::size_t>(i)] = acc;
        });
        double total = 0.0;
        for (double r : rows) total += r;
        out.push_back(total * h * h);
    }
    return out;
}

} // namespace fraccond
