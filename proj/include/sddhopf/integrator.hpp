#pragma once

#include "sddhopf/delay.hpp"
#include "sddhopf/model.hpp"

#include <string>
#include <vector>

namespace sddhopf {

struct IntegratorConfig {
    double step = 1e-2;
    double inner_tol = 1e-13;       ///< fixed point on the step endpoint (max norm)
    int max_inner = 50;
    double window_half_width = 0.0; ///< delay window is [0, tau_prev + width]; 0 selects 10 * step
    bool frozen_lag = false;        ///< tau(t) = g(x(t), x(t - frozen_tau), sigma)
    double frozen_tau = 0.0;
    bool track_breaking_points = true;
    int max_breaking_order = 4;     ///< derivative-jump orders above this are not tracked
    bool scan_delay_roots = false;  ///< window scan at every accepted node

    void validate() const;
    [[nodiscard]] double window_width() const { return window_half_width > 0.0 ? window_half_width : 10.0 * step; }
};

struct InitialHistory {
    Vec x0;
    PreHistory pre;  ///< empty selects constant extension of x0

    [[nodiscard]] static InitialHistory constant(const Vec& x0) { return {x0, PreHistory::constant(x0)}; }
};

/// Lag discontinuity: x has a jump in its `order`-th derivative at `time`.
struct BreakingPoint {
    double time = 0.0;
    int order = 1;
};

struct Trajectory {
    HistoryFunction history;
    std::vector<DelaySample> delays;  ///< one per history node
    std::vector<BreakingPoint> breaking_points;
    Vec max_abs_derivative;
    double sigma = 0.0;
    IntegratorConfig config;
    std::string pre_history_rule;

    [[nodiscard]] const std::vector<double>& times() const { return history.times(); }
    [[nodiscard]] const std::vector<Vec>& states() const { return history.values(); }
    [[nodiscard]] const std::vector<Vec>& derivatives() const { return history.derivatives(); }
    [[nodiscard]] double max_delay_residual() const;
};

/// Classical RK4 with the algebraic delay solved at every stage against
/// the history extended by the step's provisional Hermite cubic. The step is
/// iterated until the endpoint is a fixed point of that prediction.
/// Throws InnerIterationDivergence and propagates delay-solver errors.
[[nodiscard]] Trajectory integrate(const ModelDefinition& model, double sigma, const InitialHistory& init, double t0,
                                   double t1, const IntegratorConfig& config);

/// Frozen-lag variant: the delay equation is evaluated explicitly at
/// x(t - tau_sigma), no root solve.
[[nodiscard]] Trajectory integrate_frozen(const ModelDefinition& model, double sigma, double tau_sigma,
                                          const InitialHistory& init, double t0, double t1, IntegratorConfig config);

}  // namespace sddhopf
