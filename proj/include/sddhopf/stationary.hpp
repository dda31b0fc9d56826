#pragma once

#include "sddhopf/model.hpp"

namespace sddhopf {

struct StationaryState {
    Vec x;
    double tau = 0.0;
    double sigma = 0.0;
    double residual_norm = 0.0;  ///< |f(x,x,sigma)| + |tau - g(x,x,sigma)|
    double det_sum = 0.0;        ///< det(d1f + d2f) at the state
    bool s3_ok = false;          ///< Jacobian sum is nonsingular
};

/// Scale-aware threshold used for the nonsingularity verdict.
[[nodiscard]] double singularity_threshold(const Mat& jacobian_sum);

/// Fills residual_norm, det_sum and s3_ok for a candidate state.
[[nodiscard]] StationaryState assess_stationary(const ModelDefinition& model, const Vec& x, double sigma);

/// Newton iteration on x -> f(x, x, sigma) with Jacobian d1f + d2f.
/// Throws NoConvergence or SingularJacobian.
[[nodiscard]] StationaryState solve_stationary(const ModelDefinition& model, double sigma, const Vec& guess,
                                               double tol = 1e-12, int max_iter = 100);

/// Residual of mu_m K^h x^(h+1) + mu_m x - alpha_m with K = alpha_e alpha_p / (mu_e mu_p z_tilde).
[[nodiscard]] double goodwin_stationary_poly(const GoodwinParameters& p, double x);

/// The unique positive equilibrium of the Goodwin loop (bisection on
/// [0, alpha_m/mu_m] refined by Newton). Requires strictly positive rates.
[[nodiscard]] StationaryState goodwin_stationary(const GoodwinParameters& p);

}  // namespace sddhopf
