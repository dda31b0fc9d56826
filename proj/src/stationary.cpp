#include "sddhopf/stationary.hpp"

#include "sddhopf/errors.hpp"
#include "sddhopf/roots.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sddhopf {

double singularity_threshold(const Mat& jacobian_sum) {
    // ||A||_inf is the maximum absolute row sum.
    return 1e-10 * (1.0 + jacobian_sum.cwiseAbs().rowwise().sum().maxCoeff());
}

StationaryState assess_stationary(const ModelDefinition& model, const Vec& x, double sigma) {
    StationaryState st;
    st.x = x;
    st.sigma = sigma;
    st.tau = model.delay(x, x, sigma);
    st.residual_norm = model.rhs(x, x, sigma).norm() + std::abs(st.tau - model.delay(x, x, sigma));
    const auto jac = model.jacobians(x, x, sigma);
    const Mat sum = jac.d1f + jac.d2f;
    st.det_sum = sum.determinant();
    st.s3_ok = std::abs(st.det_sum) > singularity_threshold(sum);
    return st;
}

StationaryState solve_stationary(const ModelDefinition& model, double sigma, const Vec& guess, double tol,
                                 int max_iter) {
    if (guess.size() != model.dimension() || !guess.allFinite())
        throw std::invalid_argument("stationary guess must be finite with the model dimension");
    if (!(tol > 0.0)) throw std::invalid_argument("stationary tolerance must be positive");

    Vec x = guess;
    Vec fx = model.rhs(x, x, sigma);
    for (int it = 0; it < max_iter && fx.norm() > tol; ++it) {
        const auto jac = model.jacobians(x, x, sigma);
        const Mat sum = jac.d1f + jac.d2f;
        Eigen::FullPivLU<Mat> lu(sum);
        if (!lu.isInvertible()) throw SingularJacobian("d1f + d2f is singular at Newton iterate");
        const Vec step = lu.solve(-fx);
        if (!step.allFinite()) throw SingularJacobian("Newton step is not finite");

        // Backtrack until the residual decreases.
        double lambda = 1.0;
        Vec trial = x + step;
        Vec ftrial = model.rhs(trial, trial, sigma);
        for (int half = 0; half < 40 && !(ftrial.norm() < fx.norm()); ++half) {
            lambda *= 0.5;
            trial = x + lambda * step;
            ftrial = model.rhs(trial, trial, sigma);
        }
        x = trial;
        fx = ftrial;
    }
    if (!(fx.norm() <= tol))
        throw NoConvergence("stationary Newton residual " + std::to_string(fx.norm()) + " above tolerance");
    return assess_stationary(model, x, sigma);
}

double goodwin_stationary_poly(const GoodwinParameters& p, double x) {
    const double k = p.z_over_x() / p.z_tilde;
    return p.mu_m * x * std::pow(k * x, p.h) + p.mu_m * x - p.alpha_m;
}

StationaryState goodwin_stationary(const GoodwinParameters& p) {
    p.validate();
    if (!(p.mu_m > 0.0 && p.mu_p > 0.0 && p.mu_e > 0.0))
        throw std::invalid_argument("stationary analysis requires strictly positive degradation rates");

    const double k = p.z_over_x() / p.z_tilde;
    auto poly = [&](double x) { return goodwin_stationary_poly(p, x); };
    auto poly_and_slope = [&](double x) {
        const double s = std::pow(k * x, p.h);
        return std::pair{p.mu_m * x * s + p.mu_m * x - p.alpha_m, p.mu_m * (1.0 + (p.h + 1) * s)};
    };

    const double upper = p.alpha_m / p.mu_m;
    // For tiny alpha_m the saturation term underflows the rounding of mu_m x - alpha_m.
    const double coarse = roots::bisect(poly, 0.0, upper, 1e-6 * upper).value_or(upper);
    const double width = 2e-6 * upper;
    const double lo = std::max(0.0, coarse - width);
    const double hi = std::min(upper, coarse + width);
    double x0 = coarse;
    if (poly(lo) <= 0.0 && poly(hi) >= 0.0)
        x0 = roots::newton_bracketed(poly_and_slope, lo, hi, 1e-13 * p.alpha_m).value_or(coarse);

    Vec state(3);
    state << x0, p.alpha_p / p.mu_p * x0, p.z_over_x() * x0;
    return assess_stationary(make_goodwin_model(p), state, p.alpha_m);
}

}  // namespace sddhopf
