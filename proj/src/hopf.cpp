#include "sddhopf/hopf.hpp"

#include "sddhopf/errors.hpp"
#include "sddhopf/roots.hpp"
#include "sddhopf/stationary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sddhopf {

GainForms gain_c0(const GoodwinParameters& p, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("gain_c0 requires x > 0");
    const double z = p.z_over_x() * x;
    GainForms g;
    g.saturation = p.saturation(z);
    g.alpha_m = p.mu_m * x * (1.0 + g.saturation);
    const auto q = p.with_alpha_m(g.alpha_m);
    g.c0_direct = -goodwin_hill_slope(z, q) * p.alpha_p * p.alpha_e;
    g.c0_paper = p.h * std::pow(g.alpha_m, 3) / (std::pow(p.z_tilde, p.h) * p.mu_m * p.mu_m) *
                 std::pow(p.z_over_x(), p.h - 1) * std::pow(x, p.h - 3);
    return g;
}

double critical_gain(const GoodwinParameters& p) {
    return (p.mu_m + p.mu_p) * (p.mu_e + p.mu_p) * (p.mu_e + p.mu_m);
}

double critical_frequency_squared(const GoodwinParameters& p) {
    return p.mu_m * p.mu_p + p.mu_e * (p.mu_m + p.mu_p);
}

HopfCertificate find_critical(const GoodwinParameters& p, const CriticalSearch& search) {
    if (search.grid_points < 2 || !(search.alpha_max > 0.0))
        throw std::invalid_argument("critical search needs at least two grid points and alpha_max > 0");
    HopfCertificate cert;
    cert.max_real_part_scan = -std::numeric_limits<double>::infinity();

    const double log_hi = std::log10(search.alpha_max);
    const double log_lo = log_hi - 8.0;
    auto grid = [&](int i) {
        return std::pow(10.0, log_lo + (log_hi - log_lo) * static_cast<double>(i) / (search.grid_points - 1));
    };
    auto rate = [&](double a) { return goodwin_max_real_part(p, a); };

    double a_prev = grid(0);
    double u_prev = rate(a_prev);
    cert.max_real_part_scan = u_prev;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool found = false;
    for (int i = 1; i < search.grid_points; ++i) {
        const double a = grid(i);
        const double u = rate(a);
        cert.max_real_part_scan = std::max(cert.max_real_part_scan, u);
        if (!found && u_prev < 0.0 && u >= 0.0) {
            bracket_lo = a_prev;
            bracket_hi = a;
            found = true;
        }
        a_prev = a;
        u_prev = u;
    }

    // Closed-form cross-check: c0 = h mu_m mu_p mu_e s / (1 + s) on the equilibrium branch.
    const double c0_crit = critical_gain(p);
    const double ceiling = p.h * p.mu_m * p.mu_p * p.mu_e;
    if (ceiling > c0_crit) {
        const double s = c0_crit / (ceiling - c0_crit);
        const double x = p.z_tilde / p.z_over_x() * std::pow(s, 1.0 / p.h);
        cert.alpha_m_closed_form = p.mu_m * x * (1.0 + s);
    } else {
        cert.alpha_m_closed_form = std::numeric_limits<double>::quiet_NaN();
    }
    if (!found) return cert;

    const double star = roots::bisect(rate, bracket_lo, bracket_hi, 0.0, 400).value();
    const auto q = p.with_alpha_m(star);
    const auto st = goodwin_stationary(q);
    const auto spec = goodwin_eigenvalues(q, st);

    cert.exists = true;
    cert.alpha_m_star = star;
    cert.x_star = st.x[0];
    cert.v_star = std::abs(spec.roots[0].imag());
    cert.c0_star = goodwin_loop_gain(q, st);
    cert.s_star = q.saturation(st.x[2]);
    cert.du_dalpha = transversality(p, cert).value;

    const double half = std::min(0.5, 0.5 * cert.v_star);
    ContourRectangle rect{0.0, half, cert.v_star - half, cert.v_star + half, default_crossing_delta(star)};
    cert.gamma = goodwin_crossing_number(p, star, cert.v_star, rect).gamma;
    return cert;
}

Transversality transversality(const GoodwinParameters& p, const HopfCertificate& cert, double fd_step) {
    if (!cert.exists) throw std::invalid_argument("transversality requires an existing critical point");
    const double x = cert.x_star;
    const double s = p.saturation(p.z_over_x() * x);
    const double loop = p.h * p.mu_m * p.mu_p * p.mu_e;
    const double dc0_dx = loop * (p.h * s / x) / ((1.0 + s) * (1.0 + s));
    const double dx_dalpha = 1.0 / (p.mu_m + p.mu_m * (p.h + 1) * s);

    Transversality t;
    t.c0_prime = dc0_dx * dx_dalpha;
    const double a1 = p.mu_e * p.mu_p + p.mu_e * p.mu_m + p.mu_m * p.mu_p;
    const double v2 = cert.v_star * cert.v_star;
    const double sum = p.mu_m + p.mu_p + p.mu_e;
    const double lead = (a1 - 3.0 * v2) * (a1 - 3.0 * v2);
    t.denominator_printed = lead + 4.0 * v2 * (p.mu_m + p.mu_p) * sum;
    t.denominator = lead + 4.0 * v2 * sum * sum;
    t.value_printed = 2.0 * t.c0_prime * a1 / t.denominator_printed;
    t.value = 2.0 * t.c0_prime * a1 / t.denominator;

    const double a = cert.alpha_m_star;
    t.finite_difference = (goodwin_max_real_part(p, a + fd_step) - goodwin_max_real_part(p, a - fd_step)) / (2.0 * fd_step);
    if (std::abs(t.value - t.finite_difference) > 1e-4 * std::abs(t.value))
        throw DisagreementError("transversality closed form " + std::to_string(t.value) +
                                " disagrees with finite difference " + std::to_string(t.finite_difference));
    return t;
}

double hill_slope_bound(int h) {
    if (h < 1) throw std::invalid_argument("Hill exponent must be positive");
    const double hd = h;
    return hd * std::pow(1.0 - 2.0 / (hd + 1.0), (hd - 1.0) / hd) /
           std::pow(1.0 + (hd - 1.0) / (hd + 1.0), 2);
}

LipschitzBundle lipschitz_constants(const GoodwinParameters& p) {
    p.validate();
    LipschitzBundle b;
    b.h0 = hill_slope_bound(p.h);
    b.L_f = std::max({p.mu_m, p.mu_p, p.mu_e, p.alpha_p, p.alpha_e, p.alpha_m * b.h0 / p.z_tilde});
    b.L_g = p.c;
    return b;
}

ClosedFormResidual lemma41_residual(const GoodwinParameters& p, double x, double alpha_m) {
    if (!(x > 0.0 && alpha_m > 0.0)) throw std::invalid_argument("lemma41_residual requires x, alpha_m > 0");
    const double k = p.z_over_x() / p.z_tilde;
    ClosedFormResidual r;
    r.r1 = critical_gain(p) - p.h * std::pow(alpha_m, 3) / (std::pow(p.z_tilde, p.h) * p.mu_m * p.mu_m) *
                                  std::pow(p.z_over_x(), p.h - 1) * std::pow(x, p.h - 3);
    r.r2 = p.mu_m * x - alpha_m / (1.0 + std::pow(k * x, p.h));
    return r;
}

ClosedFormSolution solve_closed_form_critical(const GoodwinParameters& p) {
    // Along the equilibrium relation the printed gain is increasing in x,
    // from 0 at x = 0 to infinity.
    const double target = critical_gain(p);
    auto excess = [&](double x) { return gain_c0(p, x).c0_paper - target; };
    double hi = p.z_tilde / p.z_over_x();
    while (excess(hi) < 0.0) hi *= 2.0;
    const double x = roots::bisect(excess, 0.0 + std::numeric_limits<double>::min(), hi, 0.0, 400).value();
    ClosedFormSolution out;
    out.x = x;
    out.alpha_m = gain_c0(p, x).alpha_m;
    out.residual = lemma41_residual(p, out.x, out.alpha_m);
    return out;
}

}  // namespace sddhopf
