#pragma once

#include "sddhopf/model.hpp"
#include "sddhopf/spectrum.hpp"

namespace sddhopf {

/// Loop gain at an equilibrium with mRNA level x, alpha_m eliminated through
/// the equilibrium relation alpha_m = mu_m x (1 + s), s = (z/z_tilde)^h.
struct GainForms {
    double c0_direct = 0.0;  ///< constant term of det(l I - J): alpha_p alpha_e |repression slope|
    double c0_paper = 0.0;   ///< h alpha_m^3 / (z_tilde^h mu_m^2) (z/x)^(h-1) x^(h-3), as printed
    double saturation = 0.0;
    double alpha_m = 0.0;
};

[[nodiscard]] GainForms gain_c0(const GoodwinParameters& p, double x);

/// (mu_m + mu_p)(mu_e + mu_p)(mu_e + mu_m): the loop gain at which the
/// complex pair reaches the imaginary axis.
[[nodiscard]] double critical_gain(const GoodwinParameters& p);

/// Squared crossing frequency mu_m mu_p + mu_e (mu_m + mu_p).
[[nodiscard]] double critical_frequency_squared(const GoodwinParameters& p);

struct HopfCertificate {
    bool exists = false;
    double alpha_m_star = 0.0;
    double x_star = 0.0;
    double v_star = 0.0;
    double c0_star = 0.0;
    double s_star = 0.0;
    double du_dalpha = 0.0;
    int gamma = 0;
    double alpha_m_closed_form = 0.0;  ///< alpha_m from the saturation closed form
    double max_real_part_scan = 0.0;   ///< largest real part seen on the scan grid
};

struct CriticalSearch {
    double alpha_max = 1e4;
    int grid_points = 1000;
};

/// Tracks the leading eigenvalue real part on a log grid of alpha_m, brackets
/// the sign change and bisects it; the alpha_m field of `p` is ignored.
/// Returns exists=false when the scan finds no crossing.
[[nodiscard]] HopfCertificate find_critical(const GoodwinParameters& p, const CriticalSearch& search = {});

/// Speed of the critical pair's real part at alpha_m*.
///
/// The printed closed form carries 4 v^2 (mu_m + mu_p)(mu_m + mu_p + mu_e) in
/// its denominator. Differentiating the real part of the cubic at u = 0 gives
/// 4 v^2 (mu_m + mu_p + mu_e)^2 instead; both are reported and the second one
/// is the value checked against the finite difference.
struct Transversality {
    double value = 0.0;                  ///< du/dalpha_m with the re-derived denominator
    double value_printed = 0.0;          ///< du/dalpha_m with the printed denominator
    double finite_difference = 0.0;      ///< central difference of Re(l) across alpha_m*
    double denominator = 0.0;            ///< re-derived
    double denominator_printed = 0.0;
    double c0_prime = 0.0;               ///< total derivative of the loop gain along the equilibrium branch
};

/// Throws DisagreementError when the re-derived closed form and the finite
/// difference differ by more than 1e-4 relative.
[[nodiscard]] Transversality transversality(const GoodwinParameters& p, const HopfCertificate& cert,
                                            double fd_step = 1e-4);

struct LipschitzBundle {
    double L_f = 0.0;
    double L_g = 0.0;
    double h0 = 0.0;
};

/// sup_t h t^(h-1) / (1 + t^h)^2 in closed form.
[[nodiscard]] double hill_slope_bound(int h);
[[nodiscard]] LipschitzBundle lipschitz_constants(const GoodwinParameters& p);

struct ClosedFormResidual {
    double r1 = 0.0;
    double r2 = 0.0;
};

/// Residuals of the two printed critical-point equations at (x, alpha_m).
[[nodiscard]] ClosedFormResidual lemma41_residual(const GoodwinParameters& p, double x, double alpha_m);

/// Solution of the printed critical-point system (bisection on x with alpha_m
/// eliminated by the equilibrium relation).
struct ClosedFormSolution {
    double x = 0.0;
    double alpha_m = 0.0;
    ClosedFormResidual residual;
};
[[nodiscard]] ClosedFormSolution solve_closed_form_critical(const GoodwinParameters& p);

}  // namespace sddhopf
