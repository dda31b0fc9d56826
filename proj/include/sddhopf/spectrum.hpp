#pragma once

#include "sddhopf/model.hpp"
#include "sddhopf/stationary.hpp"

#include <array>
#include <complex>
#include <functional>

namespace sddhopf {

using Complex = std::complex<double>;

/// Linearization data for Delta(w) = w I - d1f - d2f exp(-w tau).
struct CharacteristicContext {
    Mat d1f;
    Mat d2f;
    double tau = 0.0;
    double sigma = 0.0;
};

[[nodiscard]] CharacteristicContext characteristic_context(const ModelDefinition& model, const StationaryState& st);

/// det Delta(w), via complex LU with partial pivoting.
[[nodiscard]] Complex char_det(const CharacteristicContext& ctx, Complex omega);

/// Roots of (l + mu_m)(l + mu_p)(l + mu_e) + c0.
struct CubicRoots {
    std::array<Complex, 3> roots;  ///< descending real part, ties by descending imaginary part
    double discriminant = 0.0;
    bool real_and_pair = false;  ///< one real root and one complex-conjugate pair
};

/// Constant term of the Goodwin characteristic cubic at a stationary state:
/// the negative loop gain alpha_p alpha_e |d(repression)/dz|.
[[nodiscard]] double goodwin_loop_gain(const GoodwinParameters& p, const StationaryState& st);

[[nodiscard]] CubicRoots goodwin_cubic_roots(const GoodwinParameters& p, double c0);
[[nodiscard]] CubicRoots goodwin_eigenvalues(const GoodwinParameters& p, const StationaryState& st);

/// Largest real part of the Goodwin spectrum at the equilibrium for alpha_m.
[[nodiscard]] double goodwin_max_real_part(const GoodwinParameters& p, double alpha_m);

/// Rectangle Omega = (alpha_lo, alpha_hi) x (beta_lo, beta_hi) in the complex
/// plane, plus the parameter offset delta used for the crossing number.
struct ContourRectangle {
    double alpha_lo = 0.0;
    double alpha_hi = 0.5;
    double beta_lo = 0.0;
    double beta_hi = 1.0;
    double delta = 1e-3;

    void validate() const;
    [[nodiscard]] bool contains(Complex w) const {
        return w.real() > alpha_lo && w.real() < alpha_hi && w.imag() > beta_lo && w.imag() < beta_hi;
    }
};

struct WindingResult {
    int degree = 0;
    double boundary_min_modulus = 0.0;
    int depth_reached = 0;
    long segments = 0;
};

/// Argument principle on the positively oriented boundary of `rect`. Each edge
/// starts as 2^min_depth uniform segments; segments are bisected until the
/// argument increment is below pi/2 and consistent with its two halves.
/// Throws BoundaryZero when the function nearly vanishes on the boundary and
/// NoConvergence when refinement would exceed max_depth.
[[nodiscard]] WindingResult winding(const std::function<Complex(Complex)>& detfn, const ContourRectangle& rect,
                                    int max_depth = 48, int min_depth = 2);

[[nodiscard]] int winding_degree(const std::function<Complex(Complex)>& detfn, const ContourRectangle& rect,
                                 int max_depth = 48);

struct CrossingReport {
    int gamma_minus = 0;
    int gamma_plus = 0;
    int gamma = 0;
    double boundary_min_modulus = 0.0;
    int refinement_depth = 0;
};

/// gamma = deg(det Delta at sigma0 - delta) - deg(det Delta at sigma0 + delta).
/// Stationary states at sigma0 +- delta are located by Newton from `guess`.
[[nodiscard]] CrossingReport crossing_number(const ModelDefinition& model, double sigma0, double beta0,
                                             const ContourRectangle& rect, const Vec& guess, int min_depth = 2,
                                             int max_depth = 48);

/// Goodwin specialization: sigma is alpha_m, stationary states from the
/// closed-form polynomial.
[[nodiscard]] CrossingReport goodwin_crossing_number(const GoodwinParameters& p, double alpha_m0, double beta0,
                                                     const ContourRectangle& rect, int min_depth = 2,
                                                     int max_depth = 48);

/// Default parameter offset 1e-3 max(1, |sigma0|).
[[nodiscard]] inline double default_crossing_delta(double sigma0) {
    return 1e-3 * std::max(1.0, std::abs(sigma0));
}

}  // namespace sddhopf
