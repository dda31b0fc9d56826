#include "sddhopf/integrator.hpp"

#include "sddhopf/errors.hpp"
#include "sddhopf/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sddhopf {

void IntegratorConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("integrator step must be positive");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner tolerance must be positive");
    if (max_inner < 1) throw std::invalid_argument("max inner iterations must be at least 1");
    if (window_half_width < 0.0) throw std::invalid_argument("delay window width must be nonnegative");
    if (frozen_lag && !(frozen_tau >= 0.0)) throw std::invalid_argument("frozen delay must be nonnegative");
    if (max_breaking_order < 1) throw std::invalid_argument("max breaking order must be at least 1");
}

double Trajectory::max_delay_residual() const {
    double r = 0.0;
    for (const auto& d : delays) r = std::max(r, d.residual);
    return r;
}

namespace {

class Stepper {
public:
    Stepper(const ModelDefinition& model, double sigma, const IntegratorConfig& cfg)
        : model_(model), sigma_(sigma), cfg_(cfg) {}

    /// Delay at time s along `path`, seeded with `guess`.
    double delay_at(const HistorySource& path, double s, double guess) const {
        if (cfg_.frozen_lag) {
            const double tau = model_.delay(path.value(s), path.value(s - cfg_.frozen_tau), sigma_);
            if (tau < 0.0) throw Error("frozen-lag delay became negative at t=" + std::to_string(s));
            return tau;
        }
        const double g = std::max(guess, 0.0);
        DelaySolveOptions opts;
        opts.compute_derivative = false;
        return solve_delay(model_, path, s, sigma_, {0.0, g + cfg_.window_width()}, g, opts).tau;
    }

    DelaySample node_sample(const HistoryFunction& hist, double t, double guess) const {
        if (!cfg_.frozen_lag) {
            const double g = std::max(guess, 0.0);
            DelaySolveOptions opts;
            opts.scan_window = cfg_.scan_delay_roots;
            return solve_delay(model_, hist, t, sigma_, {0.0, g + cfg_.window_width()}, g, opts);
        }
        const Vec xt = hist.value(t);
        const double lag = t - cfg_.frozen_tau;
        const Vec xl = hist.value(lag);
        DelaySample s;
        s.t = t;
        s.tau = model_.delay(xt, xl, sigma_);
        s.residual = std::abs(s.tau - model_.delay(xt, xl, sigma_));
        const auto jac = model_.jacobians(xt, xl, sigma_);
        s.tau_dot = jac.d1g.dot(hist.derivative(t)) + jac.d2g.dot(hist.derivative(lag));
        return s;
    }

    struct Step {
        Vec x1;
        Vec d1;
        double tau_end = 0.0;
        int iterations = 0;
    };

    /// One RK4 step of size H from the last node of `hist`; `view` is left
    /// holding the converged provisional segment.
    Step advance(const HistoryFunction& hist, double H, double tau_n, ExtendedHistory*& view_out) {
        const double tn = hist.t_end();
        const Vec& xn = hist.values().back();
        const Vec& k1 = hist.derivatives().back();

        Vec x_pred;
        Vec d_pred;
        const auto nodes = hist.node_count();
        if (nodes >= 2) {
            const auto& ts = hist.times();
            const auto& xs = hist.values();
            const auto& ds = hist.derivatives();
            x_pred = hermite_value(ts[nodes - 2], tn, xs[nodes - 2], xn, ds[nodes - 2], k1, tn + H);
            d_pred = hermite_derivative(ts[nodes - 2], tn, xs[nodes - 2], xn, ds[nodes - 2], k1, tn + H);
        } else {
            x_pred = xn + H * k1;
            d_pred = k1;
        }
        view_.emplace(hist, tn + H, x_pred, d_pred);
        view_out = &*view_;
        ExtendedHistory& view = *view_;

        Step out;
        Vec x_cur = x_pred;
        Vec d_cur = d_pred;
        double tau_mid = tau_n;
        double tau_end = tau_n;
        const double s2 = tn + 0.5 * H;
        const double s4 = tn + H;
        for (int it = 1; it <= cfg_.max_inner; ++it) {
            tau_mid = delay_at(view, s2, tau_mid);
            const Vec xd2 = view.value(s2 - tau_mid);
            const Vec k2 = model_.rhs(xn + 0.5 * H * k1, xd2, sigma_);
            const Vec k3 = model_.rhs(xn + 0.5 * H * k2, xd2, sigma_);
            const double tau4 = delay_at(view, s4, tau_end);
            const Vec k4 = model_.rhs(xn + H * k3, view.value(s4 - tau4), sigma_);
            Vec x1 = xn + (H / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            view.update(x1, d_cur);
            tau_end = delay_at(view, s4, tau4);
            Vec d1 = model_.rhs(x1, view.value(s4 - tau_end), sigma_);
            view.update(x1, d1);

            const double diff = (x1 - x_cur).lpNorm<Eigen::Infinity>();
            x_cur = std::move(x1);
            d_cur = std::move(d1);
            if (!std::isfinite(diff)) break;
            if (diff <= cfg_.inner_tol) {
                out.x1 = std::move(x_cur);
                out.d1 = std::move(d_cur);
                out.tau_end = tau_end;
                out.iterations = it;
                return out;
            }
        }
        throw InnerIterationDivergence("step at t=" + std::to_string(tn) +
                                       " did not reach a fixed point; reduce the step size");
    }

private:
    const ModelDefinition& model_;
    double sigma_;
    const IntegratorConfig& cfg_;
    std::optional<ExtendedHistory> view_;
};

struct TrackedPoint {
    BreakingPoint point;
    bool done = false;
};

}  // namespace

Trajectory integrate(const ModelDefinition& model, double sigma, const InitialHistory& init, double t0, double t1,
                     const IntegratorConfig& config) {
    config.validate();
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
        throw std::invalid_argument("integration span must satisfy t0 < t1");
    if (init.x0.size() != model.dimension() || !init.x0.allFinite())
        throw std::invalid_argument("initial state must be finite with the model dimension");

    const PreHistory pre = (init.pre.value && init.pre.derivative) ? init.pre : PreHistory::constant(init.x0);
    Stepper stepper(model, sigma, config);

    // Initial node: the right derivative at t0 uses the delay solved against the pre-history.
    HistoryFunction seed(t0, init.x0, Vec::Zero(model.dimension()), pre);
    const double tau_seed = std::max(0.0, model.delay(init.x0, init.x0, sigma));
    const double tau0 = stepper.delay_at(seed, t0, tau_seed);
    const Vec f0 = model.rhs(init.x0, seed.value(t0 - tau0), sigma);

    Trajectory traj;
    traj.sigma = sigma;
    traj.config = config;
    traj.pre_history_rule = pre.is_constant() ? "constant extension of the initial value" : "user-supplied callable";
    traj.history = HistoryFunction(t0, init.x0, f0, pre);
    traj.delays.push_back(stepper.node_sample(traj.history, t0, tau0));
    traj.max_abs_derivative = f0.cwiseAbs();

    std::vector<TrackedPoint> tracked;
    if (config.track_breaking_points) {
        tracked.push_back({{t0, 1}, false});
        traj.breaking_points.push_back({t0, 1});
    }

    const double H = config.step;
    const auto steps = static_cast<long>(std::ceil((t1 - t0) / H - 1e-9));
    double tau_n = tau0;
    for (long k = 1; k <= steps; ++k) {
        const double grid_target = k == steps ? t1 : t0 + static_cast<double>(k) * H;
        while (traj.history.t_end() < grid_target) {
            const double tn = traj.history.t_end();
            double target = grid_target;
            ExtendedHistory* view = nullptr;
            auto step = stepper.advance(traj.history, target - tn, tau_n, view);

            // Split the step where t - tau(t) crosses a tracked discontinuity.
            TrackedPoint* source = nullptr;
            double split = target;
            for (auto& tp : tracked) {
                if (tp.done || tp.point.order + 1 > config.max_breaking_order) continue;
                const double b = tp.point.time;
                const double tol = 1e-12 * (1.0 + std::abs(b));
                if (tn - tau_n - b >= tol) {
                    tp.done = true;
                    continue;
                }
                if (target - step.tau_end - b < -tol) continue;
                double guess = tau_n;
                auto phi = [&](double t) {
                    guess = stepper.delay_at(*view, t, guess);
                    return t - guess - b;
                };
                const double xi = roots::bisect(phi, tn, target, 0.0, 200).value_or(target);
                if (xi < split) {
                    split = xi;
                    source = &tp;
                }
            }
            if (source) {
                source->done = true;
                const int order = source->point.order + 1;
                const double span = target - tn;
                if (split - tn > 1e-9 * span && target - split > 1e-9 * span) {
                    target = split;
                    step = stepper.advance(traj.history, target - tn, tau_n, view);
                } else {
                    split = (split - tn < target - split) ? tn : target;
                }
                tracked.push_back({{split, order}, false});
                traj.breaking_points.push_back({split, order});
            }

            traj.history.append(target, step.x1, step.d1);
            traj.delays.push_back(stepper.node_sample(traj.history, target, step.tau_end));
            tau_n = traj.delays.back().tau;
            traj.max_abs_derivative = traj.max_abs_derivative.cwiseMax(step.d1.cwiseAbs());
        }
    }
    return traj;
}

Trajectory integrate_frozen(const ModelDefinition& model, double sigma, double tau_sigma, const InitialHistory& init,
                            double t0, double t1, IntegratorConfig config) {
    config.frozen_lag = true;
    config.frozen_tau = tau_sigma;
    return integrate(model, sigma, init, t0, t1, config);
}

}  // namespace sddhopf
