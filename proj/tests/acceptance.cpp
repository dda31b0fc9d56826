// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "sddhopf/errors.hpp"
#include "sddhopf/hopf.hpp"
#include "sddhopf/orbit.hpp"
#include "sddhopf/spectrum.hpp"
#include "sddhopf/stationary.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace sddhopf;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt3 = std::sqrt(3.0);

GoodwinParameters equal_rates(int h, double alpha_m = 1.0) {
    GoodwinParameters p;
    p.h = h;
    p.alpha_m = alpha_m;
    p.c = 0.1;
    return p;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Verdict stationary_exactness() {
    double worst_x = 0.0;
    double worst_res = 0.0;
    for (int h = 2; h <= 20; h += 2) {
        const auto st = goodwin_stationary(equal_rates(h, 2.0));
        worst_x = std::max(worst_x, std::abs(st.x[0] - 1.0));
        worst_res = std::max(worst_res, st.residual_norm);
    }
    return {worst_x == 0.0 && worst_res < 1e-12, fmt("h=2..20: max|x0-1|=%.3g, max residual=%.3g", worst_x, worst_res)};
}

Verdict critical_point() {
    const auto cert = find_critical(equal_rates(10));
    const double a = 5.0 * std::pow(4.0, 0.1);
    const double x = std::pow(4.0, 0.1);
    const double da = std::abs(cert.alpha_m_star - a);
    const double dx = std::abs(cert.x_star - x);
    const double dv = std::abs(cert.v_star - sqrt3);
    const double dcf = std::abs(cert.alpha_m_closed_form - cert.alpha_m_star);
    return {cert.exists && da < 1e-8 && dx < 1e-8 && dv < 1e-10 && dcf < 1e-8 && std::abs(cert.s_star - 4.0) < 1e-8,
            fmt("alpha_m*=%.12f (err %.2g), x*=%.12f (err %.2g), v*=%.12f (err %.2g), closed form diff %.2g",
                cert.alpha_m_star, da, cert.x_star, dx, cert.v_star, dv, dcf)};
}

Verdict spectrum_at_criticality() {
    const auto cert = find_critical(equal_rates(10));
    const auto p = equal_rates(10, cert.alpha_m_star);
    const auto r = goodwin_eigenvalues(p, goodwin_stationary(p)).roots;
    const double e0 = std::abs(r[0] - Complex(0.0, sqrt3));
    const double e1 = std::abs(r[1] - Complex(0.0, -sqrt3));
    const double e2 = std::abs(r[2] - Complex(-3.0, 0.0));
    const double worst = std::max({e0, e1, e2});
    return {worst < 1e-10, fmt("roots %.3g%+.12fi, %.3g%+.12fi, %.12f; max error %.2g", r[0].real(), r[0].imag(),
                               r[1].real(), r[1].imag(), r[2].real(), worst)};
}

Verdict crossing_number_check() {
    const auto cert = find_critical(equal_rates(10));
    const ContourRectangle omega{0.0, 0.5, sqrt3 - 0.5, sqrt3 + 0.5, 1e-3};
    const auto p = equal_rates(10, cert.alpha_m_star);
    const auto d6 = goodwin_crossing_number(p, cert.alpha_m_star, sqrt3, omega, 6);
    const auto d12 = goodwin_crossing_number(p, cert.alpha_m_star, sqrt3, omega, 12);
    const bool ok = d6.gamma_minus == 0 && d6.gamma_plus == 1 && d6.gamma == -1 && d12.gamma_minus == 0 &&
                    d12.gamma_plus == 1 && d12.gamma == -1;
    return {ok, fmt("depth 6: (%d, %d, %d), depth 12: (%d, %d, %d), boundary min |det| %.3g", d6.gamma_minus,
                    d6.gamma_plus, d6.gamma, d12.gamma_minus, d12.gamma_plus, d12.gamma, d6.boundary_min_modulus)};
}

Verdict transversality_check() {
    const auto p = equal_rates(10);
    const auto cert = find_critical(p);
    const auto t = transversality(p, cert, 1e-4);
    const double rel = std::abs(t.value_printed - t.finite_difference) / std::abs(t.finite_difference);
    const double rel_rederived = std::abs(t.value - t.finite_difference) / std::abs(t.finite_difference);
    const bool ok = std::abs(t.value_printed - 0.0171961) < 5e-7 && rel < 1e-5 && t.value_printed > 0.0;
    return {ok, fmt("printed form %.7f (denominator %.0f), central difference %.7f, relative gap %.3g; "
                    "re-derived form %.7f (denominator %.0f) gap %.3g",
                    t.value_printed, t.denominator_printed, t.finite_difference, rel, t.value, t.denominator,
                    rel_rederived)};
}

Verdict secant_condition() {
    bool ok = true;
    std::string detail;
    for (int h : {2, 4, 6, 8}) {
        const auto p = equal_rates(h);
        const auto cert = find_critical(p, {1e4, 1000});
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 1000; ++k)
            worst = std::max(worst, goodwin_max_real_part(p, std::pow(10.0, -4.0 + 8.0 * k / 999.0)));
        const auto pf = solve_closed_form_critical(p);
        ok = ok && !cert.exists && worst < 0.0;
        detail += fmt("h=%d exists=%s maxRe=%.4f printed-system x=%.6f alpha_m=%.6f r1=%.2g; ", h,
                      cert.exists ? "true" : "false", worst, pf.x, pf.alpha_m, pf.residual.r1);
    }
    return {ok, detail};
}

Verdict h0_check() {
    bool ok = true;
    std::string detail;
    for (int h : {2, 4, 6, 8, 10}) {
        double grid = 0.0;
        for (double t = 1e-5; t < 3.0; t += 1e-5) grid = std::max(grid, h * std::pow(t, h - 1) / std::pow(1 + std::pow(t, h), 2));
        const double cf = hill_slope_bound(h);
        ok = ok && std::abs(cf - grid) < 1e-4;
        detail += fmt("h=%d %.7f/%.7f; ", h, cf, grid);
    }
    ok = ok && std::abs(hill_slope_bound(10) - 2.525171) < 1e-5;
    return {ok, detail};
}

Verdict integrator_order() {
    auto p = equal_rates(10, 7.0);
    p.eps0 = 0.5;
    const auto model = make_goodwin_model(p);
    const Vec x0 = 2.0 * goodwin_stationary(p).x;
    std::vector<Vec> ends;
    for (double h : {4e-3, 2e-3, 1e-3, 5e-4}) {
        IntegratorConfig cfg;
        cfg.step = h;
        cfg.inner_tol = 1e-15;
        ends.push_back(integrate(model, p.alpha_m, InitialHistory::constant(x0), 0.0, 40.0, cfg).states().back());
    }
    double d[3];
    for (int i = 0; i < 3; ++i) d[i] = (ends[i] - ends[i + 1]).lpNorm<Eigen::Infinity>();
    const double o1 = std::log2(d[0] / d[1]);
    const double o2 = std::log2(d[1] / d[2]);

    auto q = equal_rates(10, 7.0);
    q.c = 0.0;
    const Vec y0{{0.5, 1.5, 1.0}};
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    const Vec sdd = integrate(make_goodwin_model(q), q.alpha_m, InitialHistory::constant(y0), 0.0, 10.0, cfg).states().back();
    auto f = [&](const Vec& s) {
        return Vec{{-s[0] + q.alpha_m / (1.0 + std::pow(s[2], q.h)), -s[1] + s[0], -s[2] + s[1]}};
    };
    Vec y = y0;
    for (int i = 0; i < 10000; ++i) {
        const Vec k1 = f(y);
        const Vec k2 = f(y + 0.5e-3 * k1);
        const Vec k3 = f(y + 0.5e-3 * k2);
        const Vec k4 = f(y + 1e-3 * k3);
        y += (1e-3 / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double ode_gap = (sdd - y).lpNorm<Eigen::Infinity>();
    return {std::min(o1, o2) >= 3.8 && ode_gap < 1e-10,
            fmt("self-convergence orders %.3f, %.3f (differences %.2g, %.2g, %.2g); c=0 vs RK4 ODE gap %.2g", o1, o2,
                d[0], d[1], d[2], ode_gap)};
}

Verdict delay_regime() {
    const auto p = equal_rates(10, 7.0);
    const auto model = make_goodwin_model(p);
    Vec x0 = goodwin_stationary(p).x;
    x0[0] += 1e-3;
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    const auto traj = integrate(model, p.alpha_m, InitialHistory::constant(x0), 0.0, 100.0, cfg);
    double worst = 0.0;
    for (const auto& s : traj.delays) worst = std::max(worst, std::abs(s.tau));
    const double margin = contraction_margin(model, traj.history, p.alpha_m, 0.0, 100.0);
    return {worst <= 1e-12 && margin < 1.0,
            fmt("%zu steps, max|tau|=%.2g, contraction margin %.4f", traj.delays.size(), worst, margin)};
}

Verdict orbit_validity() {
    std::vector<double> grid;
    for (int i = 0; i < 21; ++i) grid.push_back(5.8 + 0.2 * i);
    IntegratorConfig cfg;
    cfg.step = 0.02;
    BranchScanConfig sc;
    sc.t_end = 1500.0;
    const auto scan = branch_scan(equal_rates(10), grid, cfg, {}, sc);
    int detected = 0;
    int valid = 0;
    bool eps = true;
    double worst_fourier = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& b : scan.points) {
        eps = eps && b.epsilon == -1;
        if (!b.detected) continue;
        ++detected;
        const bool ii = b.bounds.ii && b.period >= *b.bounds.ii;
        if (b.box_ok && ii && b.bounds_ok && b.fourier_residual < 1e-3) ++valid;
        worst_fourier = std::max(worst_fourier, b.fourier_residual);
        if (b.bounds.ii) min_slack = std::min(min_slack, b.period - *b.bounds.ii);
    }
    const bool ok = eps && valid == detected && (detected > 0 || scan.classification == BranchClass::Inconclusive);
    return {ok, fmt("%d/21 detected, %d valid, max fourier residual %.2g, min period - bound(ii) %.3f, eps=-1 %s, "
                    "classification %s",
                    detected, valid, worst_fourier, min_slack, eps ? "everywhere" : "NOT everywhere",
                    to_string(scan.classification).c_str())};
}

Verdict fourier_oracle() {
    ModelDefinition lin(
        1, [](const Vec&, const Vec& b, double) -> Vec { return -b; },
        [](const Vec&, const Vec&, double) { return pi / 2.0; });
    std::vector<Vec> prof;
    for (int j = 0; j < 256; ++j) prof.push_back(Vec::Constant(1, std::cos(2.0 * pi * j / 256)));
    const auto orbit = make_orbit(2.0 * pi, prof, std::vector<double>(256, pi / 2.0));
    const double r = fourier_residual(orbit, lin, 0.0, 32);
    return {r < 1e-10, fmt("residual %.3g at 32 modes", r)};
}

Verdict period_bound_ledger() {
    const auto lip = lipschitz_constants(equal_rates(10, 7.0));
    const auto b = period_bounds(lip.L_f, lip.L_g, {0.0, 0.0, 0.0, true});
    const double between = 0.5 * (2.0 / lip.L_f + 2.0);
    const bool ok = b.i_printed && b.i_rederived && std::abs(*b.i_printed - 2.0) < 1e-15 &&
                    std::abs(*b.i_rederived - 2.0 / lip.L_f) < 1e-15 && lip.L_f > 1.0 &&
                    period_bounds(lip.L_f, 0.0, {0.0, 0.0, 0.0, false}).satisfied_by(between);
    return {ok, fmt("L_f=%.6f: printed (i)=%.6f, re-derived (i)=%.6f; a period of %.4f passes the gate", lip.L_f,
                    *b.i_printed, *b.i_rederived, between)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"stationary exactness", stationary_exactness},
        {"critical point", critical_point},
        {"spectrum at criticality", spectrum_at_criticality},
        {"crossing number", crossing_number_check},
        {"transversality", transversality_check},
        {"secant condition", secant_condition},
        {"h0 closed form", h0_check},
        {"integrator order", integrator_order},
        {"delay regime", delay_regime},
        {"orbit validity", orbit_validity},
        {"Fourier residual oracle", fourier_oracle},
        {"period bound (i) forms", period_bound_ledger},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += v.pass ? 0 : 1;
        std::printf("%s %2d %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", index, name, secs, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
