#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fraccond/cli/config.hpp"
#include "fraccond/cli/output.hpp"
#include "fraccond/forward/reduction.hpp"
#include "fraccond/inverse/reconstruct.hpp"
#include "fraccond/limits/limits.hpp"
#include "fraccond/walk/generator.hpp"
#include "fraccond/walk/monte_carlo.hpp"

namespace fraccond::cli {

namespace fs = std::filesystem;

namespace detail {

/// Exterior nodes with lo <= x <= hi, or all exterior nodes.
inline std::vector<Index> exterior_window(const Grid& grid, const std::optional<std::pair<double, double>>& iv) {
    std::vector<Index> out;
    for (Index i : grid.exterior())
        if (!iv || (grid.node(i) >= iv->first && grid.node(i) <= iv->second)) out.push_back(i);
    return out;
}

/// amplitude * bump((x - center)/width) on exterior nodes.
inline ExteriorDatum exterior_bump(const Grid& grid, double center, double width, double amplitude = 1.0) {
    NodeField f = grid.sample([&](double x) { return amplitude * smooth_bump((x - center) / width); });
    return ExteriorDatum::from_node_field(grid, f);
}

inline double right_gap_center(const Grid& g) { return 0.5 * (g.omega_hi() + g.half_width()); }
inline double right_gap_width(const Grid& g) { return 0.5 * (g.half_width() - g.omega_hi()); }

inline Index nearest_exterior(const Grid& grid, double x) {
    Index best = grid.exterior().front();
    for (Index i : grid.exterior())
        if (std::abs(grid.node(i) - x) < std::abs(grid.node(best) - x)) best = i;
    return best;
}

inline bool gap_matches(double left, double right) {
    return std::abs(left - right) <= 1e-9 * std::max(std::abs(left), std::abs(right)) + 1e-14;
}

inline std::string dn_csv(const Grid& grid, const DnMatrix& dn) {
    CsvTable t({"source_idx", "obs_idx", "source_x", "obs_x", "value"});
    for (std::size_t k = 0; k < dn.source_idx.size(); ++k)
        for (std::size_t l = 0; l < dn.obs_idx.size(); ++l)
            t.row(dn.source_idx[k], dn.obs_idx[l], grid.node(dn.source_idx[k]), grid.node(dn.obs_idx[l]),
                  dn.matrix(static_cast<Index>(l), static_cast<Index>(k)));
    return t.text();
}

/// Reads a long-form DN file written by the dn command.
inline DnMatrix read_dn_csv(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open observed DN file " + path);
    std::string line;
    std::getline(in, line); // header
    std::map<std::pair<Index, Index>, double> entries;
    std::vector<Index> src, obs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c, d, e;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
            !std::getline(ss, d, ',') || !std::getline(ss, e, ','))
            throw ConfigError("observed DN file " + path + ": malformed row");
        Index k = 0, l = 0;
        double xs = 0.0, xo = 0.0, value = 0.0;
        try {
            k = std::stoll(a);
            l = std::stoll(b);
            xs = std::stod(c);
            xo = std::stod(d);
            value = std::stod(e);
        } catch (const std::logic_error&) {
            throw ConfigError("observed DN file " + path + ": malformed number");
        }
        const double tol = 1e-9 * grid.half_width();
        if (k < 0 || k >= grid.size() || l < 0 || l >= grid.size() || std::abs(xs - grid.node(k)) > tol ||
            std::abs(xo - grid.node(l)) > tol)
            throw ConfigError("observed DN file " + path + " does not match the configured grid");
        entries[{l, k}] = value;
        src.push_back(k);
        obs.push_back(l);
    }
    auto uniq = [](std::vector<Index> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    DnMatrix dn{uniq(src), uniq(obs), {}};
    require_exterior_set(grid, dn.source_idx, "W1");
    require_exterior_set(grid, dn.obs_idx, "W2");
    dn.matrix.resize(static_cast<Index>(dn.obs_idx.size()), static_cast<Index>(dn.source_idx.size()));
    for (std::size_t k = 0; k < dn.source_idx.size(); ++k)
        for (std::size_t l = 0; l < dn.obs_idx.size(); ++l) {
            const auto it = entries.find({dn.obs_idx[l], dn.source_idx[k]});
            if (it == entries.end()) throw ConfigError("observed DN file " + path + " is missing entries");
            dn.matrix(static_cast<Index>(l), static_cast<Index>(k)) = it->second;
        }
    return dn;
}

} // namespace detail

inline Json cmd_forward(const RunConfig& rc, const fs::path& out) {
    RunManifest man("forward", rc, out);
    const Block task(rc.task, "task", {"datum", "x", "width", "amplitude", "rhs"});
    const Grid grid = make_grid(rc);
    const FracParams fp(rc.s, rc.n);
    const Conductivity gamma = Conductivity::sample(grid, make_profile(rc.gamma));

    const std::string kind = task.string("datum", std::string("bump"));
    ExteriorDatum g = ExteriorDatum::zero(grid);
    if (kind == "unit") {
        g = ExteriorDatum::unit(grid, detail::nearest_exterior(grid, task.number("x", detail::right_gap_center(grid))));
    } else if (kind == "bump") {
        g = detail::exterior_bump(grid, task.number("x", detail::right_gap_center(grid)),
                                  task.number("width", detail::right_gap_width(grid)), task.number("amplitude", 1.0));
    } else if (kind != "zero") {
        throw ConfigError("config: task.datum must be zero, unit or bump");
    }
    NodeField F = NodeField::Zero(grid.size());
    const double rhs = task.number("rhs", 0.0);
    for (Index i : grid.interior()) F[i] = rhs;

    const DirichletSolver solver(assemble_conductivity(grid, fp, gamma));
    const NodeField u = solver.solve(g, F);
    const double res = interior_residual(solver.op(), u, F);
    const double scale = solver.op().matrix().cwiseAbs().rowwise().sum().maxCoeff() * std::max(u.cwiseAbs().maxCoeff(), 1e-300);

    CsvTable t({"x", "u"});
    for (Index i = 0; i < grid.size(); ++i) t.row(grid.node(i), u[i]);
    man.write_file("solution.csv", t.text());
    man.record("interior_residual", res);
    man.record("condition_estimate", solver.condition_estimate());
    man.check_at_most("interior_residual_relative", u.cwiseAbs().maxCoeff() == 0.0 ? res : res / scale, 1e-10);
    return man.finish();
}

inline Json cmd_dn(const RunConfig& rc, const fs::path& out) {
    RunManifest man("dn", rc, out);
    const Block task(rc.task, "task", {"w1", "w2"});
    const Grid grid = make_grid(rc);
    const FracParams fp(rc.s, rc.n);
    const Conductivity gamma = Conductivity::sample(grid, make_profile(rc.gamma));
    const auto w1 = detail::exterior_window(grid, task.interval("w1"));
    const auto w2 = detail::exterior_window(grid, task.interval("w2"));
    if (w1.empty() || w2.empty()) throw ConfigError("config: task.w1/task.w2 select no exterior nodes");

    const DirichletSolver solver(assemble_conductivity(grid, fp, gamma));
    const DnMatrix dn = assemble_dn(solver, w1, w2);
    man.write_file("dn.csv", detail::dn_csv(grid, dn));
    if (w1 == w2) man.check_at_most("symmetry", dn.symmetry_defect(), 1e-10);
    if (w2 == grid.exterior()) {
        // second path: the pointwise DN map of the first source against its column
        const NodeField pw = dn_pointwise(solver, ExteriorDatum::unit(grid, w1.front())) * grid.spacing();
        const double scale = std::max(dn.matrix.cwiseAbs().maxCoeff(), 1e-300);
        man.check_at_most("pointwise_consistency", (pw - dn.matrix.col(0)).cwiseAbs().maxCoeff() / scale, 1e-9);
    }
    man.record("sources", static_cast<double>(w1.size()));
    man.record("observations", static_cast<double>(w2.size()));
    return man.finish();
}

inline Json cmd_reduce(const RunConfig& rc, const fs::path& out) {
    RunManifest man("reduce", rc, out);
    const Block task(rc.task, "task", {"f", "v"});
    const Grid grid = make_grid(rc);
    const FracParams fp(rc.s, rc.n);
    const Conductivity gamma = Conductivity::sample(grid, make_profile(rc.gamma));

    const double res = verify_reduction(grid, fp, gamma);
    const ReducedPotential red = liouville_reduce(grid, fp, gamma);
    auto datum = [&](const char* key) {
        const Block b = task.child(key, {"center", "width"});
        return detail::exterior_bump(grid, b.number("center", detail::right_gap_center(grid)),
                                     b.number("width", detail::right_gap_width(grid)));
    };
    const DnGap gap = dn_gap(grid, fp, gamma, datum("f"), datum("v"));

    CsvTable t({"x", "m", "q", "laplacian_m"});
    for (Index i = 0; i < grid.size(); ++i) t.row(grid.node(i), gamma.m_values()[i], red.full[i], red.laplacian_of_m[i]);
    man.write_file("reduction.csv", t.text());
    CsvTable s({"quantity", "value"});
    s.row("reduction_residual", res);
    s.row("gap_left", gap.left);
    s.row("gap_right", gap.right);
    s.row("q_compactly_supported", red.compactly_supported ? 1.0 : 0.0);
    man.write_file("summary.csv", s.text());
    man.check_at_most("reduction_residual", res, 1e-10);
    man.check_flag("dn_gap_identity", detail::gap_matches(gap.left, gap.right));
    man.record("gap_left", gap.left);
    man.record("gap_right", gap.right);
    return man.finish();
}

inline Json cmd_invert(const RunConfig& rc, const fs::path& out) {
    RunManifest man("invert", rc, out);
    const Block task(rc.task, "task", {"mode", "observed", "lambda", "max_iter", "tol", "step_damping", "noise", "g", "w2"});
    const Grid grid = make_grid(rc);
    const FracParams fp(rc.s, rc.n);
    const Conductivity truth = Conductivity::sample(grid, make_profile(rc.gamma));
    const std::string mode = task.string("mode", std::string("full"));
    if (mode != "full" && mode != "single") throw ConfigError("config: task.mode must be full or single");
    const double noise = task.number("noise", 0.0);
    if (!(noise >= 0.0)) throw ConfigError("config: task.noise must be >= 0");

    InversionConfig cfg = (mode == "single" || noise > 0.0) ? InversionConfig::regularized() : InversionConfig{};
    cfg.reg_lambda = task.number("lambda", cfg.reg_lambda);
    cfg.max_iter = static_cast<int>(task.integer("max_iter", cfg.max_iter));
    cfg.tol = task.number("tol", cfg.tol);
    cfg.step_damping = task.number("step_damping", cfg.step_damping);
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("config: task.") + e.what());
    }

    std::mt19937_64 rng(rc.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto perturb = [&](double v) { return noise > 0.0 ? v * (1.0 + noise * normal(rng)) : v; };

    InversionReport rep = [&] {
        if (mode == "full") {
            DnMatrix obs = task.has("observed") ? detail::read_dn_csv(task.string("observed"), grid)
                                                : assemble_dn(grid, fp, truth, grid.exterior(), grid.exterior());
            for (Index c = 0; c < obs.matrix.cols(); ++c)
                for (Index r = 0; r < obs.matrix.rows(); ++r) obs.matrix(r, c) = perturb(obs.matrix(r, c));
            return reconstruct_gamma(obs, grid, fp, cfg);
        }
        const Block gb = task.child("g", {"center", "width"});
        const double L = grid.half_width(), b = grid.omega_hi();
        const ExteriorDatum g = detail::exterior_bump(grid, gb.number("center", b + 0.75 * (L - b)),
                                                      gb.number("width", 0.2 * (L - b)));
        const auto iv = task.interval("w2");
        const double a = grid.omega_lo();
        const auto w2 = detail::exterior_window(grid, iv ? iv : std::optional{std::pair{-L, a - 0.25 * (a + L)}});
        if (w2.empty()) throw ConfigError("config: task.w2 selects no exterior nodes");
        const DirichletSolver solver(assemble_conductivity(grid, fp, truth));
        const NodeField Au = solver.op().apply(solver.solve(g, NodeField::Zero(grid.size())));
        NodeField y(static_cast<Index>(w2.size()));
        for (std::size_t l = 0; l < w2.size(); ++l) y[static_cast<Index>(l)] = perturb(grid.spacing() * Au[w2[l]]);
        return single_measurement_fit(g, w2, y, grid, fp, cfg);
    }();

    CsvTable it({"iteration", "objective", "relative_residual"});
    for (std::size_t k = 0; k < rep.fit.objective_history.size(); ++k)
        it.row(static_cast<std::int64_t>(k), rep.fit.objective_history[k], rep.fit.residual_history[k]);
    man.write_file("iterations.csv", it.text());
    CsvTable prof({"x", "q", "m", "gamma", "gamma_true"});
    for (Index i = 0; i < grid.size(); ++i)
        prof.row(grid.node(i), rep.q().values()[i], rep.m[i], rep.gamma->values()[i], truth.values()[i]);
    man.write_file("profile.csv", prof.text());

    const double err = (rep.gamma->values() - truth.values()).cwiseAbs().maxCoeff() / truth.values().cwiseAbs().maxCoeff();
    man.record("recovery_error", err);
    man.record("final_relative_residual", rep.fit.residual_history.back());
    man.record("lambda_used", rep.fit.lambda_used);
    man.record("condition_estimate", rep.fit.condition_estimate);
    man.record("status", rep.fit.status);
    man.check_flag("converged", rep.converged());
    bool monotone = true;
    for (std::size_t k = 1; k < rep.fit.objective_history.size(); ++k)
        monotone = monotone && rep.fit.objective_history[k] <= rep.fit.objective_history[k - 1];
    man.check_flag("objective_non_increasing", monotone);
    if (mode == "full" && noise == 0.0) man.check_at_most("recovery_error", err, 0.01);
    return man.finish();
}

inline Json cmd_walk(const RunConfig& rc, const fs::path& out) {
    RunManifest man("walk", rc, out);
    const Block task(rc.task, "task", {"K", "steps", "checkpoints", "particles", "start_x", "monte_carlo"});
    const Grid grid = make_grid(rc);
    const FracParams fp(rc.s, rc.n);
    const Conductivity gamma = Conductivity::sample(grid, make_profile(rc.gamma));
    const Index K = static_cast<Index>(task.integer("K", 0));
    if (K < 0) throw ConfigError("config: task.K must be >= 0 (0 selects the default cutoff)");
    const Index steps = static_cast<Index>(task.integer("steps", 10));
    if (steps < 0) throw ConfigError("config: task.steps must be >= 0");
    std::vector<Index> checkpoints;
    for (double c : task.numbers("checkpoints", std::vector<double>{static_cast<double>(steps)})) {
        if (c < 0 || c > steps || c != std::floor(c)) throw ConfigError("config: task.checkpoints must be integers in [0, steps]");
        checkpoints.push_back(static_cast<Index>(c));
    }
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    const Index particles = static_cast<Index>(task.integer("particles", 100000));
    if (particles < 1) throw ConfigError("config: task.particles must be >= 1");
    const bool mc = task.boolean("monte_carlo", true);

    const WalkParams wp(grid, fp, gamma, K);
    const Index start = [&] {
        const double x0 = task.number("start_x", 0.0);
        Index best = 0;
        for (Index i = 0; i < grid.size(); ++i)
            if (std::abs(grid.node(i) - x0) < std::abs(grid.node(best) - x0)) best = i;
        return best;
    }();

    // normalization and the lattice identity on a smooth field
    double norm_defect = 0.0;
    for (Index i = 0; i < grid.size(); ++i) {
        const IncomingWeights w = incoming_weights(i, wp);
        NeumaierSum acc;
        for (double p : w.p) acc.add(p);
        norm_defect = std::max(norm_defect, std::abs(acc.value() - 1.0));
    }
    const NodeField probe = grid.sample([](double x) { return std::exp(-0.5 * x * x); });
    const NodeField dq = ((master_step(probe, wp) - probe).array() / wp.tau()).matrix();
    const NodeField lg = lattice_generator(probe, wp);
    const double identity = (dq - lg).cwiseAbs().maxCoeff() / std::max(lg.cwiseAbs().maxCoeff(), 1e-300);

    const JumpTables tables(wp);
    std::vector<NodeField> incoming, outgoing;
    NodeField u_in = NodeField::Zero(grid.size()), u_out = u_in;
    u_in[start] = u_out[start] = 1.0;
    std::vector<double> drift;
    for (Index t = 0, c = 0; t <= steps; ++t) {
        while (c < static_cast<Index>(checkpoints.size()) && checkpoints[static_cast<std::size_t>(c)] == t) {
            incoming.push_back(u_in);
            outgoing.push_back(u_out);
            ++c;
        }
        if (t == steps) break;
        const NodeField next = master_step(u_in, wp);
        drift.push_back(next.sum() - u_in.sum());
        u_in = next;
        u_out = outgoing_master_step(u_out, tables);
    }

    std::optional<SimulationResult> sim;
    if (mc) sim = simulate(Ensemble::at_site(start, particles, rc.seed), tables, steps, checkpoints);

    CsvTable t({"step", "site", "x", "master_incoming", "master_outgoing", "mc_count", "mc_fraction"});
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const NodeField frac = sim ? sim->checkpoints[c].fractions() : NodeField::Zero(grid.size());
        for (Index i = 0; i < grid.size(); ++i)
            t.row(checkpoints[c], i, grid.node(i), incoming[c][i], outgoing[c][i],
                  sim ? sim->checkpoints[c].counts[static_cast<std::size_t>(i)] : std::int64_t{0}, frac[i]);
    }
    man.write_file("walk.csv", t.text());
    CsvTable d({"step", "mass_drift"});
    for (std::size_t k = 0; k < drift.size(); ++k) d.row(static_cast<std::int64_t>(k), drift[k]);
    man.write_file("mass_drift.csv", d.text());

    man.record("K", static_cast<double>(wp.K()));
    man.record("tail_mass", wp.tail_mass());
    man.record("tau", wp.tau());
    man.check_at_most("normalization", norm_defect, 1e-14);
    man.check_at_most("lattice_identity", identity, 1e-13);
    if (sim) {
        const double tv = total_variation(sim->checkpoints.back(), outgoing.back());
        man.record("total_variation", tv);
        man.check_at_most("mc_vs_master_total_variation", tv, 0.02);
        CsvTable e({"step", "escaped", "total"});
        for (std::size_t c = 0; c < checkpoints.size(); ++c) e.row(checkpoints[c], sim->checkpoints[c].escaped, sim->checkpoints[c].total);
        man.write_file("escaped.csv", e.text());
    }
    return man.finish();
}

inline Json cmd_limits(const RunConfig& rc, const fs::path& out) {
    RunManifest man("limits", rc, out);
    const Block task(rc.task, "task", {"study", "s_list", "L", "intervals_start", "intervals_max", "rel_change",
                                       "u_center", "v_center", "phi", "decay_nodes", "decay_L"});
    const std::string which = task.string("study", std::string("all"));
    static const std::set<std::string> studies = {"all", "grad", "bilinear", "operator", "decay"};
    if (!studies.count(which)) throw ConfigError("config: task.study must be all, grad, bilinear, operator or decay");
    const std::vector<double> s_list = task.numbers("s_list", std::vector<double>{0.6, 0.8, 0.9, 0.95});
    RefinementSchedule sched;
    sched.half_width = task.number("L", 8.0);
    sched.intervals_start = static_cast<Index>(task.integer("intervals_start", 512));
    sched.intervals_max = static_cast<Index>(task.integer("intervals_max", 8192));
    sched.rel_change = task.number("rel_change", 0.005);
    if (sched.intervals_start < 4 || sched.intervals_max < sched.intervals_start)
        throw ConfigError("config: task.intervals_start/intervals_max must satisfy 4 <= start <= max");
    const double uc = task.number("u_center", 0.0);
    const double vc = task.number("v_center", 0.0);
    const ScalarFunction u = [uc](double x) { return std::exp(-0.5 * (x - uc) * (x - uc)); };
    const ScalarFunction v = [vc](double x) { return std::exp(-0.5 * (x - vc) * (x - vc)); };
    const ConductivityProfile profile = make_profile(rc.gamma);

    auto at_s = [](const LimitStudy& st, double s, const std::string& label) -> const LimitRow* {
        for (const auto& r : st.rows)
            if (r.s == s && r.label == label) return &r;
        return nullptr;
    };
    auto table = [&](const LimitStudy& st, const std::string& file) {
        CsvTable t({"s", "label", "discrete", "reference", "gap", "nodes", "converged"});
        for (const auto& r : st.rows) t.row(r.s, r.label, r.discrete, r.reference, r.gap, r.nodes, r.converged);
        man.write_file(file, t.text());
        for (const auto& w : st.warnings) man.warn(st.name + ": " + w);
        for (const auto& r : st.rows)
            if (!r.converged) man.warn(st.name + ": refinement cap reached at s = " + fmt(r.s) + " (" + r.label + ")");
    };

    if (which == "all" || which == "grad") {
        const LimitStudy st = grad_limit_study(u, s_list, sched);
        table(st, "limits_grad.csv");
        if (const LimitRow* r = at_s(st, 0.9, "grad")) man.check_at_most("grad_gap_s0.9", r->gap, 0.10);
    }
    if (which == "all" || which == "bilinear") {
        const LimitStudy st = bilinear_limit_study(profile, u, v, s_list, sched);
        table(st, "limits_bilinear.csv");
        if (const LimitRow* r = at_s(st, 0.9, "bilinear")) man.check_at_most("bilinear_gap_s0.9", r->gap, 0.15);
    }
    if (which == "all" || which == "operator") {
        const LimitStudy st = operator_limit_check(profile, u, s_list, sched);
        table(st, "limits_operator.csv");
        // the test function next to the mass of u; the others are recorded only
        if (const LimitRow* r = at_s(st, 0.95, "phi(0.3)")) man.check_at_most("operator_gap_s0.95", r->gap, 0.10);
    }
    if (which == "all" || which == "decay") {
        const auto phi_p = task.numbers("phi", std::vector<double>{-1.0, 1.0, 0.5});
        if (phi_p.size() != 3 || !(phi_p[2] > 0.0)) throw ConfigError("config: task.phi must be [a, b, sigma] with sigma > 0");
        const double pa = phi_p[0], pb = phi_p[1], ps = phi_p[2];
        const PairFunction phi = [=](double x, double y) {
            return std::exp(-((x - pa) * (x - pa) + (y - pb) * (y - pb)) / (2.0 * ps * ps));
        };
        const ScalarFunction ud = [](double x) { return std::exp(-0.5 * (x - 0.3) * (x - 0.3)); };
        const auto vals = gradient_distributional_decay(ud, phi, s_list, task.number("decay_L", 6.0),
                                                        static_cast<Index>(task.integer("decay_nodes", 1024)));
        CsvTable t({"s", "pairing"});
        for (std::size_t k = 0; k < s_list.size(); ++k) t.row(s_list[k], vals[k]);
        man.write_file("limits_decay.csv", t.text());
        if (s_list.size() >= 2 && vals.front() != 0.0)
            man.check_at_most("decay_ratio", std::abs(vals.back() / vals.front()), 0.5);
    }
    return man.finish();
}

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"forward", "dn", "reduce", "invert", "walk", "limits"};
    return names;
}

/// Runs one command and writes its outputs under out_dir.
inline Json run_command(const std::string& command, const RunConfig& rc, const fs::path& out_dir) {
    if (command == "forward") return cmd_forward(rc, out_dir);
    if (command == "dn") return cmd_dn(rc, out_dir);
    if (command == "reduce") return cmd_reduce(rc, out_dir);
    if (command == "invert") return cmd_invert(rc, out_dir);
    if (command == "walk") return cmd_walk(rc, out_dir);
    if (command == "limits") return cmd_limits(rc, out_dir);
    throw ConfigError("unknown command " + command);
}

enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

/// Loads the config, applies overrides, runs, and maps failures to exit codes.
inline int run(const std::string& command, const std::string& config_path, const std::optional<std::string>& out_override,
               const std::optional<std::uint64_t>& seed_override, int threads, std::ostream& log) {
    try {
        RunConfig rc = load_config(config_path);
        if (seed_override) rc.seed = *seed_override;
        if (threads > 0) set_thread_count(threads);
        const fs::path out = out_override ? fs::path(*out_override) : fs::path(rc.output);
        const Json man = run_command(command, rc, out);
        for (const auto& c : man.at("checks"))
            log << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>() << "\n";
        for (const auto& w : man.at("warnings")) log << "warning: " << w.get<std::string>() << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const NumericalError& e) {
        log << "error: " << command << ": " << e.what() << "\n";
        return kNumericalError;
    } catch (const DomainError& e) {
        log << "error: " << command << ": " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        log << "error: " << command << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "error: " << e.what() << "\n";
        return kIoError;
    }
}

} // namespace fraccond::cli
