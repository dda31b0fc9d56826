#include "sddhopf/cli.hpp"

#include "sddhopf/errors.hpp"
#include "sddhopf/hopf.hpp"
#include "sddhopf/orbit.hpp"
#include "sddhopf/spectrum.hpp"
#include "sddhopf/stationary.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace sddhopf::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string flag(bool v) { return v ? "true" : "false"; }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
            os << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
    }
};

struct Outcome {
    Table table;
    json results = json::object();
    json checks = json::object();
};

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "nan"; }

Vec initial_state(const RunConfig& cfg, const StationaryState& st) {
    if (cfg.options.x0) return Eigen::Map<const Vec>(cfg.options.x0->data(), 3);
    Vec x0 = st.x;
    x0[0] += cfg.options.perturbation;
    return x0;
}

IntegratorConfig integrator_config(const RunConfig& cfg) {
    IntegratorConfig ic;
    ic.step = cfg.options.step;
    return ic;
}

OrbitDetectionConfig detection_config(const RunOptions& o) {
    OrbitDetectionConfig d;
    d.transient_fraction = o.transient_fraction;
    d.returns = o.returns;
    d.samples = o.samples;
    d.max_return_spread = o.max_return_spread;
    d.max_closure = o.max_closure;
    return d;
}

BranchScanConfig scan_config(const RunOptions& o) {
    BranchScanConfig s;
    s.t_end = o.t_end;
    s.perturbation = o.perturbation;
    s.fourier_modes = o.fourier_modes;
    return s;
}

Outcome cmd_stationary(const RunConfig& cfg) {
    const auto st = goodwin_stationary(cfg.params);
    Outcome o;
    o.table.header = {"x", "y", "z", "tau", "det_sum", "s3_ok", "residual"};
    o.table.rows.push_back(
        {num(st.x[0]), num(st.x[1]), num(st.x[2]), num(st.tau), num(st.det_sum), flag(st.s3_ok), num(st.residual_norm)});
    o.results = {{"x", {st.x[0], st.x[1], st.x[2]}}, {"tau", st.tau}, {"det_sum", st.det_sum}, {"s3_ok", st.s3_ok},
                 {"residual", st.residual_norm}};
    o.checks["residual_below_1e-10"] = st.residual_norm < 1e-10;
    o.checks["state_positive"] = (st.x.array() > 0.0).all();
    return o;
}

Outcome cmd_eigs(const RunConfig& cfg) {
    const auto st = goodwin_stationary(cfg.params);
    const auto cr = goodwin_eigenvalues(cfg.params, st);
    Outcome o;
    o.table.header = {"re", "im"};
    json roots = json::array();
    for (const auto& r : cr.roots) {
        o.table.rows.push_back({num(r.real()), num(r.imag())});
        roots.push_back({r.real(), r.imag()});
    }
    o.results = {{"roots", roots}, {"discriminant", cr.discriminant}, {"real_and_pair", cr.real_and_pair},
                 {"loop_gain", goodwin_loop_gain(cfg.params, st)}};
    o.checks["conjugate_symmetric"] = cr.real_and_pair ? std::abs(cr.roots[0].imag() + cr.roots[1].imag()) <= 1e-12 *
                                                                 (1.0 + std::abs(cr.roots[0].imag()))
                                                       : true;
    return o;
}

Outcome cmd_crossing(const RunConfig& cfg) {
    const auto& opt = cfg.options;
    double alpha0 = 0.0;
    double beta0 = 0.0;
    if (!opt.crossing_alpha || !opt.crossing_beta) {
        const auto cert = find_critical(cfg.params, {opt.alpha_max, opt.grid_points});
        if (!cert.exists && (!opt.crossing_alpha || !opt.crossing_beta))
            throw NoConvergence("no critical parameter found; set crossing_alpha and crossing_beta");
        alpha0 = cert.alpha_m_star;
        beta0 = cert.v_star;
    }
    if (opt.crossing_alpha) alpha0 = *opt.crossing_alpha;
    if (opt.crossing_beta) beta0 = *opt.crossing_beta;
    ContourRectangle rect;
    rect.alpha_lo = 0.0;
    rect.alpha_hi = opt.omega_half;
    rect.beta_lo = beta0 - opt.omega_half;
    rect.beta_hi = beta0 + opt.omega_half;
    rect.delta = opt.delta ? *opt.delta : default_crossing_delta(alpha0);
    const auto rep = goodwin_crossing_number(cfg.params, alpha0, beta0, rect, opt.min_depth, opt.max_depth);
    Outcome o;
    o.table.header = {"alpha_m0", "beta0", "delta", "gamma_minus", "gamma_plus", "gamma", "boundary_min_modulus",
                      "refinement_depth"};
    o.table.rows.push_back({num(alpha0), num(beta0), num(rect.delta), std::to_string(rep.gamma_minus),
                            std::to_string(rep.gamma_plus), std::to_string(rep.gamma), num(rep.boundary_min_modulus),
                            std::to_string(rep.refinement_depth)});
    o.results = {{"alpha_m0", alpha0},
                 {"beta0", beta0},
                 {"omega", {rect.alpha_lo, rect.alpha_hi, rect.beta_lo, rect.beta_hi}},
                 {"delta", rect.delta},
                 {"gamma_minus", rep.gamma_minus},
                 {"gamma_plus", rep.gamma_plus},
                 {"gamma", rep.gamma},
                 {"boundary_min_modulus", rep.boundary_min_modulus},
                 {"refinement_depth", rep.refinement_depth}};
    o.checks["gamma_nonzero"] = rep.gamma != 0;
    return o;
}

Outcome cmd_hopf(const RunConfig& cfg) {
    const auto& opt = cfg.options;
    const auto cert = find_critical(cfg.params, {opt.alpha_max, opt.grid_points});
    Outcome o;
    o.table.header = {"exists", "alpha_m_star", "x_star", "v_star", "c0_star", "du_dalpha", "gamma"};
    o.table.rows.push_back({flag(cert.exists), num(cert.alpha_m_star), num(cert.x_star), num(cert.v_star),
                            num(cert.c0_star), num(cert.du_dalpha), std::to_string(cert.gamma)});
    o.results = {{"exists", cert.exists},
                 {"alpha_m_star", cert.alpha_m_star},
                 {"x_star", cert.x_star},
                 {"v_star", cert.v_star},
                 {"c0_star", cert.c0_star},
                 {"s_star", cert.s_star},
                 {"du_dalpha", cert.du_dalpha},
                 {"gamma", cert.gamma},
                 {"alpha_m_closed_form", cert.alpha_m_closed_form},
                 {"max_real_part_scan", cert.max_real_part_scan},
                 {"critical_gain", critical_gain(cfg.params)},
                 {"critical_frequency_squared", critical_frequency_squared(cfg.params)}};
    if (cert.exists) {
        const auto tr = transversality(cfg.params, cert, opt.fd_step);
        o.results["transversality"] = {{"value", tr.value},
                                       {"value_printed_form", tr.value_printed},
                                       {"finite_difference", tr.finite_difference},
                                       {"denominator", tr.denominator},
                                       {"denominator_printed_form", tr.denominator_printed}};
        o.checks["transversality_positive"] = tr.value > 0.0;
        o.checks["closed_form_agrees"] =
            std::abs(cert.alpha_m_closed_form - cert.alpha_m_star) <= 1e-8 * (1.0 + cert.alpha_m_star);
        o.checks["gamma_is_minus_one"] = cert.gamma == -1;
    } else {
        o.checks["spectrum_stable_on_scan"] = cert.max_real_part_scan < 0.0;
    }
    try {
        const auto pf = solve_closed_form_critical(cfg.params);
        o.results["printed_critical_system"] = {
            {"x", pf.x}, {"alpha_m", pf.alpha_m}, {"r1", pf.residual.r1}, {"r2", pf.residual.r2}};
    } catch (const Error& e) {
        o.results["printed_critical_system"] = {{"error", e.what()}};
    }
    return o;
}

Outcome cmd_simulate(const RunConfig& cfg) {
    const auto& opt = cfg.options;
    const auto st = goodwin_stationary(cfg.params);
    const auto model = make_goodwin_model(cfg.params);
    const auto init = InitialHistory::constant(initial_state(cfg, st));
    const auto ic = integrator_config(cfg);
    const auto traj = opt.frozen ? integrate_frozen(model, cfg.params.alpha_m, st.tau, init, opt.t0, opt.t1, ic)
                                 : integrate(model, cfg.params.alpha_m, init, opt.t0, opt.t1, ic);
    Outcome o;
    o.table.header = {"t", "x", "y", "z", "tau", "tau_dot"};
    const auto& ts = traj.times();
    const auto& xs = traj.states();
    double min_tau = std::numeric_limits<double>::infinity();
    double min_state = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& d = traj.delays[i];
        o.table.rows.push_back({num(ts[i]), num(xs[i][0]), num(xs[i][1]), num(xs[i][2]), num(d.tau), num(d.tau_dot)});
        min_tau = std::min(min_tau, d.tau);
        min_state = std::min(min_state, xs[i].minCoeff());
    }
    const double margin = contraction_margin(model, traj.history, cfg.params.alpha_m, opt.t0, opt.t1);
    json bps = json::array();
    for (const auto& b : traj.breaking_points) bps.push_back({{"time", b.time}, {"order", b.order}});
    o.results = {{"nodes", ts.size()},
                 {"pre_history", traj.pre_history_rule},
                 {"breaking_points", bps},
                 {"max_delay_residual", traj.max_delay_residual()},
                 {"min_tau", min_tau},
                 {"contraction_margin", margin},
                 {"stationary_tau", st.tau}};
    o.checks["tau_nonnegative"] = min_tau >= 0.0;
    o.checks["state_positive"] = min_state > 0.0;
    o.checks["contraction_margin_below_one"] = margin < 1.0;
    return o;
}

std::vector<std::string> branch_row(const BranchPoint& b) {
    return {num(b.alpha_m),       flag(b.detected),        num(b.period),
            num(b.amplitude[0]),  num(b.amplitude[1]),     num(b.amplitude[2]),
            opt_num(b.bounds.ii), num(b.fourier_residual), std::to_string(b.epsilon)};
}

const std::vector<std::string> branch_header = {"alpha_m",     "detected",    "period",   "amplitude_x",
                                                "amplitude_y", "amplitude_z", "bound_ii", "fourier_residual",
                                                "epsilon"};

json point_json(const BranchPoint& b) {
    return {{"alpha_m", b.alpha_m},
            {"detected", b.detected},
            {"failed", b.failed},
            {"diagnostic", b.diagnostic},
            {"period", b.period},
            {"max_real_part", b.max_real_part},
            {"epsilon", b.epsilon},
            {"tau_sup", b.tau_sup},
            {"tau_dot_sup", b.tau_dot_sup},
            {"xdot_sup", b.xdot_sup},
            {"contraction_margin", b.contraction_margin},
            {"fourier_residual", b.fourier_residual},
            {"bound_i_printed_form", opt_json(b.bounds.i_printed)},
            {"bound_i", opt_json(b.bounds.i_rederived)},
            {"bound_ii", opt_json(b.bounds.ii)},
            {"bound_iii", opt_json(b.bounds.iii)},
            {"bounds_ok", b.bounds_ok},
            {"box_ok", b.box_ok}};
}

bool point_valid(const BranchPoint& b) { return !b.detected || (b.box_ok && b.bounds_ok && b.fourier_residual < 1e-3); }

Outcome cmd_orbit(const RunConfig& cfg) {
    const auto& opt = cfg.options;
    const auto bp = branch_point(cfg.params, cfg.params.alpha_m, integrator_config(cfg), detection_config(opt),
                                 scan_config(opt));
    if (bp.failed) throw Error(bp.diagnostic);
    Outcome o;
    o.table.header = branch_header;
    o.table.rows.push_back(branch_row(bp));
    o.results = point_json(bp);
    o.checks["orbit_valid"] = point_valid(bp);
    return o;
}

Outcome cmd_branch(const RunConfig& cfg) {
    const auto& opt = cfg.options;
    std::vector<double> grid(static_cast<std::size_t>(opt.branch_points));
    for (int i = 0; i < opt.branch_points; ++i)
        grid[static_cast<std::size_t>(i)] =
            opt.branch_points == 1 ? opt.branch_lo
                                   : opt.branch_lo + (opt.branch_hi - opt.branch_lo) * i / (opt.branch_points - 1);
    const auto scan = branch_scan(cfg.params, grid, integrator_config(cfg), detection_config(opt), scan_config(opt));
    Outcome o;
    o.table.header = branch_header;
    json points = json::array();
    bool valid = true;
    bool eps_constant = true;
    for (const auto& b : scan.points) {
        o.table.rows.push_back(branch_row(b));
        points.push_back(point_json(b));
        valid = valid && point_valid(b);
        eps_constant = eps_constant && b.epsilon == scan.points.front().epsilon;
    }
    o.results = {{"classification", to_string(scan.classification)},
                 {"period_proxy", scan.period_proxy},
                 {"alpha_m_star", scan.alpha_m_star},
                 {"points", points}};
    o.checks["detected_orbits_valid"] = valid;
    o.checks["epsilon_constant"] = eps_constant;
    return o;
}

Outcome cmd_bounds(const RunConfig& cfg) {
    const auto& opt = cfg.options;
    const auto lip = lipschitz_constants(cfg.params);
    const auto b = period_bounds(lip.L_f, lip.L_g, {opt.tau_sup, opt.tau_dot_sup, opt.xdot_sup, true});
    Outcome o;
    o.table.header = {"L_f", "L_g", "h0", "bound_i_printed_form", "bound_i", "bound_ii", "bound_iii"};
    o.table.rows.push_back({num(lip.L_f), num(lip.L_g), num(lip.h0), opt_num(b.i_printed), opt_num(b.i_rederived),
                            opt_num(b.ii), opt_num(b.iii)});
    o.results = {{"L_f", lip.L_f},
                 {"L_g", lip.L_g},
                 {"h0", lip.h0},
                 {"bound_i_printed_form", opt_json(b.i_printed)},
                 {"bound_i", opt_json(b.i_rederived)},
                 {"bound_ii", opt_json(b.ii)},
                 {"bound_iii", opt_json(b.iii)},
                 {"box", {goodwin_box(cfg.params)[0], goodwin_box(cfg.params)[1], goodwin_box(cfg.params)[2]}}};
    o.checks["delay_differentiable_regime"] = cfg.params.c * cfg.params.alpha_m < 1.0;
    return o;
}

const std::vector<std::pair<std::string, std::string>> commands = {
    {"stationary", "equilibrium and its admissibility checks"},
    {"eigs", "characteristic roots at the equilibrium"},
    {"crossing", "winding-number crossing count on the half rectangle"},
    {"hopf", "critical alpha_m, frequency and transversality"},
    {"simulate", "integrate the delay system on [t0, t1]"},
    {"orbit", "detect a periodic orbit at alpha_m"},
    {"branch", "orbit scan over an alpha_m grid"},
    {"bounds", "Lipschitz constants and period bounds"},
};

Outcome dispatch(const std::string& command, const RunConfig& cfg) {
    if (command == "stationary") return cmd_stationary(cfg);
    if (command == "eigs") return cmd_eigs(cfg);
    if (command == "crossing") return cmd_crossing(cfg);
    if (command == "hopf") return cmd_hopf(cfg);
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "orbit") return cmd_orbit(cfg);
    if (command == "branch") return cmd_branch(cfg);
    if (command == "bounds") return cmd_bounds(cfg);
    throw std::invalid_argument("unknown command '" + command + "'");
}

}  // namespace

int run(const std::string& command, const RunConfig& cfg, const std::optional<std::string>& out_dir, std::ostream& out,
        std::ostream& err) {
    Outcome o;
    try {
        o = dispatch(command, cfg);
    } catch (const Error& e) {
        err << "sdd_hopf " << command << ": " << e.what() << '\n';
        return exit_numerical;
    } catch (const ConfigError& e) {
        err << "sdd_hopf " << command << ": " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "sdd_hopf " << command << ": " << e.what() << '\n';
        return exit_usage;
    }

    if (!out_dir) {
        o.table.write(out);
        return exit_ok;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(*out_dir, ec);
    const fs::path dir(*out_dir);
    std::ofstream csv(dir / (command + ".csv"));
    std::ofstream summary(dir / (command + ".json"));
    if (!csv || !summary) {
        err << "sdd_hopf " << command << ": cannot write to '" << *out_dir << "'\n";
        return exit_usage;
    }
    o.table.write(csv);
    json doc = {{"command", command}, {"config", to_json(cfg)}, {"results", o.results}, {"checks", o.checks}};
    summary << doc.dump(2) << '\n';
    err << "wrote " << (dir / (command + ".csv")).string() << " and " << (dir / (command + ".json")).string() << '\n';
    return exit_ok;
}

int main(int argc, char** argv) {
    CLI::App app{"Hopf bifurcation diagnostics for state-dependent delay equations"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    for (const auto& [name, about] : commands) {
        auto* sub = app.add_subcommand(name, about);
        sub->add_option("--config", config_path, "JSON or TOML parameter file")->required();
        sub->add_option("--set", overrides, "key=value override (repeatable)");
        sub->add_option("--out", out_dir, "directory for CSV and JSON outputs");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        cfg = parse_config(config_path, overrides);
    } catch (const ConfigError& e) {
        std::cerr << "sdd_hopf " << command << ": " << e.what() << '\n';
        return exit_usage;
    }
    return run(command, cfg, out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir), std::cout,
               std::cerr);
}

}  // namespace sddhopf::cli
