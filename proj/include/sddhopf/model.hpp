#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>

namespace sddhopf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowVec = Eigen::RowVectorXd;

/// Partial derivatives of (f, g) at one evaluation point.
struct JacobianBundle {
    Mat d1f;     ///< df/dtheta1 (current state)
    Mat d2f;     ///< df/dtheta2 (delayed state)
    RowVec d1g;  ///< dg/dtheta1
    RowVec d2g;  ///< dg/dtheta2
    Vec theta1;
    Vec theta2;
    double sigma = 0.0;
};

/// Differential-algebraic system with one state-dependent delay:
///
///     x'(t)  = f(x(t), x(t - tau(t)), sigma)
///     tau(t) = g(x(t), x(t - tau(t)), sigma)
///
/// Jacobians come from an analytic callback when one is supplied, otherwise
/// from central differences.
class ModelDefinition {
public:
    using Rhs = std::function<Vec(const Vec&, const Vec&, double)>;
    using DelayMap = std::function<double(const Vec&, const Vec&, double)>;
    using Jacobian = std::function<JacobianBundle(const Vec&, const Vec&, double)>;

    ModelDefinition(int dimension, Rhs f, DelayMap g, std::optional<Jacobian> jacobian = std::nullopt,
                    double fd_relative_step = 1e-6);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] bool has_analytic_jacobian() const noexcept { return jacobian_.has_value(); }
    [[nodiscard]] double fd_relative_step() const noexcept { return fd_step_; }

    [[nodiscard]] Vec rhs(const Vec& theta1, const Vec& theta2, double sigma) const;
    [[nodiscard]] double delay(const Vec& theta1, const Vec& theta2, double sigma) const;

    /// Analytic bundle when available, central differences otherwise.
    /// Throws NonFiniteJacobian if any entry is NaN or infinite.
    [[nodiscard]] JacobianBundle jacobians(const Vec& theta1, const Vec& theta2, double sigma) const;

    /// Central differences with step max(h, h*|component|), ignoring any
    /// analytic callback.
    [[nodiscard]] JacobianBundle fd_jacobians(const Vec& theta1, const Vec& theta2, double sigma) const;

private:
    int dimension_;
    Rhs f_;
    DelayMap g_;
    std::optional<Jacobian> jacobian_;
    double fd_step_;
};

/// Parameters of the Goodwin negative-feedback loop with threshold delay
/// tau = eps0 + c (x(t) - x(t - tau)).
struct GoodwinParameters {
    double mu_m = 1.0;
    double mu_p = 1.0;
    double mu_e = 1.0;
    double alpha_m = 1.0;
    double alpha_p = 1.0;
    double alpha_e = 1.0;
    double c = 0.1;
    double z_tilde = 1.0;
    int h = 2;
    double eps0 = 0.0;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    /// z/x ratio at any stationary state: alpha_e alpha_p / (mu_e mu_p).
    [[nodiscard]] double z_over_x() const { return alpha_e * alpha_p / (mu_e * mu_p); }

    /// Hill saturation (z/z_tilde)^h.
    [[nodiscard]] double saturation(double z) const;

    [[nodiscard]] GoodwinParameters with_alpha_m(double a) const {
        auto copy = *this;
        copy.alpha_m = a;
        return copy;
    }
};

[[nodiscard]] Vec goodwin_rhs(const Vec& state, const Vec& delayed_state, const GoodwinParameters& p);
[[nodiscard]] double goodwin_delay_map(const Vec& state, const Vec& delayed_state, const GoodwinParameters& p);
[[nodiscard]] JacobianBundle goodwin_jacobians(const Vec& state, const Vec& delayed_state,
                                               const GoodwinParameters& p);

/// Derivative of the repression term alpha_m / (1 + (z/z_tilde)^h) with respect to z.
[[nodiscard]] double goodwin_hill_slope(double z, const GoodwinParameters& p);

/// Goodwin family with the bifurcation parameter sigma playing the role of
/// alpha_m. The alpha_m field of `base` is ignored.
[[nodiscard]] ModelDefinition make_goodwin_model(const GoodwinParameters& base);

}  // namespace sddhopf
