#include "sddhopf/model.hpp"

#include "sddhopf/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace sddhopf {

ModelDefinition::ModelDefinition(int dimension, Rhs f, DelayMap g, std::optional<Jacobian> jacobian,
                                 double fd_relative_step)
    : dimension_(dimension), f_(std::move(f)), g_(std::move(g)), jacobian_(std::move(jacobian)),
      fd_step_(fd_relative_step) {
    if (dimension_ < 1) throw std::invalid_argument("model dimension must be positive");
    if (!f_ || !g_) throw std::invalid_argument("model requires both f and g");
    if (!(fd_step_ > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
}

Vec ModelDefinition::rhs(const Vec& theta1, const Vec& theta2, double sigma) const {
    return f_(theta1, theta2, sigma);
}

double ModelDefinition::delay(const Vec& theta1, const Vec& theta2, double sigma) const {
    return g_(theta1, theta2, sigma);
}

namespace {

bool all_finite(const JacobianBundle& j) {
    return j.d1f.allFinite() && j.d2f.allFinite() && j.d1g.allFinite() && j.d2g.allFinite();
}

}  // namespace

JacobianBundle ModelDefinition::jacobians(const Vec& theta1, const Vec& theta2, double sigma) const {
    JacobianBundle out = jacobian_ ? (*jacobian_)(theta1, theta2, sigma) : fd_jacobians(theta1, theta2, sigma);
    if (!all_finite(out)) throw NonFiniteJacobian("Jacobian has non-finite entries");
    return out;
}

JacobianBundle ModelDefinition::fd_jacobians(const Vec& theta1, const Vec& theta2, double sigma) const {
    const int n = dimension_;
    JacobianBundle out;
    out.d1f.resize(n, n);
    out.d2f.resize(n, n);
    out.d1g.resize(n);
    out.d2g.resize(n);
    out.theta1 = theta1;
    out.theta2 = theta2;
    out.sigma = sigma;

    auto column = [&](int arg, int k, Mat& df, RowVec& dg) {
        Vec a = theta1;
        Vec b = theta2;
        Vec& v = arg == 0 ? a : b;
        const double base = v[k];
        const double step = std::max(fd_step_, fd_step_ * std::abs(base));
        v[k] = base + step;
        const Vec fp = f_(a, b, sigma);
        const double gp = g_(a, b, sigma);
        v[k] = base - step;
        const Vec fm = f_(a, b, sigma);
        const double gm = g_(a, b, sigma);
        df.col(k) = (fp - fm) / (2.0 * step);
        dg[k] = (gp - gm) / (2.0 * step);
    };
    for (int k = 0; k < n; ++k) {
        column(0, k, out.d1f, out.d1g);
        column(1, k, out.d2f, out.d2g);
    }
    if (!all_finite(out)) throw NonFiniteJacobian("finite-difference Jacobian has non-finite entries");
    return out;
}

void GoodwinParameters::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw std::invalid_argument(std::string(field) + " " + what);
    };
    require(std::isfinite(mu_m) && mu_m >= 0.0, "mu_m", "must be nonnegative");
    require(std::isfinite(mu_p) && mu_p >= 0.0, "mu_p", "must be nonnegative");
    require(std::isfinite(mu_e) && mu_e >= 0.0, "mu_e", "must be nonnegative");
    require(std::isfinite(alpha_m) && alpha_m > 0.0, "alpha_m", "must be positive");
    require(std::isfinite(alpha_p) && alpha_p > 0.0, "alpha_p", "must be positive");
    require(std::isfinite(alpha_e) && alpha_e > 0.0, "alpha_e", "must be positive");
    require(std::isfinite(c) && c >= 0.0, "c", "must be nonnegative");
    require(std::isfinite(z_tilde) && z_tilde > 0.0, "z_tilde", "must be positive");
    require(h > 0 && h % 2 == 0, "h", "must be a positive even integer");
    require(std::isfinite(eps0) && eps0 >= 0.0, "eps0", "must be nonnegative");
}

double GoodwinParameters::saturation(double z) const { return std::pow(z / z_tilde, h); }

double goodwin_hill_slope(double z, const GoodwinParameters& p) {
    const double r = z / p.z_tilde;
    const double s = std::pow(r, p.h);
    const double denom = 1.0 + s;
    return -p.alpha_m * p.h * std::pow(r, p.h - 1) / (p.z_tilde * denom * denom);
}

Vec goodwin_rhs(const Vec& state, const Vec& delayed_state, const GoodwinParameters& p) {
    Vec out(3);
    out[0] = -p.mu_m * state[0] + p.alpha_m / (1.0 + p.saturation(delayed_state[2]));
    out[1] = -p.mu_p * state[1] + p.alpha_p * delayed_state[0];
    out[2] = -p.mu_e * state[2] + p.alpha_e * delayed_state[1];
    return out;
}

double goodwin_delay_map(const Vec& state, const Vec& delayed_state, const GoodwinParameters& p) {
    return p.eps0 + p.c * (state[0] - delayed_state[0]);
}

JacobianBundle goodwin_jacobians(const Vec& state, const Vec& delayed_state, const GoodwinParameters& p) {
    JacobianBundle j;
    j.d1f = Mat::Zero(3, 3);
    j.d1f(0, 0) = -p.mu_m;
    j.d1f(1, 1) = -p.mu_p;
    j.d1f(2, 2) = -p.mu_e;
    j.d2f = Mat::Zero(3, 3);
    j.d2f(0, 2) = goodwin_hill_slope(delayed_state[2], p);
    j.d2f(1, 0) = p.alpha_p;
    j.d2f(2, 1) = p.alpha_e;
    j.d1g = RowVec::Zero(3);
    j.d2g = RowVec::Zero(3);
    j.d1g[0] = p.c;
    j.d2g[0] = -p.c;
    j.theta1 = state;
    j.theta2 = delayed_state;
    j.sigma = p.alpha_m;
    return j;
}

ModelDefinition make_goodwin_model(const GoodwinParameters& base) {
    return ModelDefinition(
        3,
        [base](const Vec& a, const Vec& b, double sigma) { return goodwin_rhs(a, b, base.with_alpha_m(sigma)); },
        [base](const Vec& a, const Vec& b, double sigma) {
            return goodwin_delay_map(a, b, base.with_alpha_m(sigma));
        },
        ModelDefinition::Jacobian([base](const Vec& a, const Vec& b, double sigma) {
            return goodwin_jacobians(a, b, base.with_alpha_m(sigma));
        }));
}

}  // namespace sddhopf
