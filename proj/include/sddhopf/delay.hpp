#pragma once

#include "sddhopf/model.hpp"

#include <functional>
#include <vector>

namespace sddhopf {

/// Read access to a solution path x(t), x'(t).
class HistorySource {
public:
    virtual ~HistorySource() = default;
    [[nodiscard]] virtual Vec value(double t) const = 0;
    [[nodiscard]] virtual Vec derivative(double t) const = 0;
    /// Latest time at which the path is defined.
    [[nodiscard]] virtual double t_end() const = 0;
};

/// Rule for t below the first node. Defaults to constant extension of the
/// initial value (zero derivative).
struct PreHistory {
    std::function<Vec(double)> value;
    std::function<Vec(double)> derivative;

    [[nodiscard]] static PreHistory constant(const Vec& x0);
    [[nodiscard]] bool is_constant() const noexcept { return constant_; }

private:
    bool constant_ = false;
};

/// Piecewise cubic Hermite path through stored nodes (t_i, x_i, x'_i).
class HistoryFunction final : public HistorySource {
public:
    HistoryFunction() = default;
    HistoryFunction(double t0, const Vec& x0, const Vec& dx0, PreHistory pre = {});

    void append(double t, const Vec& x, const Vec& dx);

    [[nodiscard]] Vec value(double t) const override;
    [[nodiscard]] Vec derivative(double t) const override;
    [[nodiscard]] double t_end() const override { return times_.back(); }

    [[nodiscard]] double t_min() const { return times_.front(); }
    [[nodiscard]] std::size_t node_count() const { return times_.size(); }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] const std::vector<Vec>& values() const { return values_; }
    [[nodiscard]] const std::vector<Vec>& derivatives() const { return derivs_; }
    [[nodiscard]] const PreHistory& pre_history() const { return pre_; }

private:
    [[nodiscard]] std::size_t segment_index(double t) const;

    std::vector<double> times_;
    std::vector<Vec> values_;
    std::vector<Vec> derivs_;
    PreHistory pre_;
};

/// Cubic Hermite interpolation on [t0, t1] from endpoint values and slopes.
[[nodiscard]] Vec hermite_value(double t0, double t1, const Vec& x0, const Vec& x1, const Vec& d0, const Vec& d1,
                                double t);
[[nodiscard]] Vec hermite_derivative(double t0, double t1, const Vec& x0, const Vec& x1, const Vec& d0,
                                     const Vec& d1, double t);

/// A base history extended by one tentative segment past its last node.
class ExtendedHistory final : public HistorySource {
public:
    ExtendedHistory(const HistoryFunction& base, double t1, Vec x1, Vec d1);

    void update(Vec x1, Vec d1) {
        x1_ = std::move(x1);
        d1_ = std::move(d1);
    }

    [[nodiscard]] Vec value(double t) const override;
    [[nodiscard]] Vec derivative(double t) const override;
    [[nodiscard]] double t_end() const override { return t1_; }

    [[nodiscard]] double t_start() const { return t0_; }

private:
    const HistoryFunction& base_;
    double t0_;
    double t1_;
    Vec x0_;
    Vec d0_;
    Vec x1_;
    Vec d1_;
};

/// History given by analytic callables (tests, user-supplied paths).
class AnalyticHistory final : public HistorySource {
public:
    AnalyticHistory(std::function<Vec(double)> value, std::function<Vec(double)> derivative, double t_end);

    [[nodiscard]] Vec value(double t) const override { return value_(t); }
    [[nodiscard]] Vec derivative(double t) const override { return deriv_(t); }
    [[nodiscard]] double t_end() const override { return t_end_; }

private:
    std::function<Vec(double)> value_;
    std::function<Vec(double)> deriv_;
    double t_end_;
};

struct DelayWindow {
    double lo = 0.0;
    double hi = 1.0;
};

struct DelaySample {
    double t = 0.0;
    double tau = 0.0;
    double tau_dot = 0.0;
    double residual = 0.0;
    int root_count_in_window = -1;  ///< -1 when no window scan was requested
};

struct DelaySolveOptions {
    bool scan_window = false;
    int scan_resolution = 1000;
    int max_newton = 50;
    bool compute_derivative = true;
};

/// Root of F(tau) = tau - g(x(t), x(t - tau), sigma) inside `window` by damped
/// Newton from `guess`, with bisection on a bracketing sub-interval as the
/// fallback. Throws NoRootInWindow, AmbiguousRoot, SingularImplicitDerivative.
[[nodiscard]] DelaySample solve_delay(const ModelDefinition& model, const HistorySource& history, double t, double sigma,
                                      DelayWindow window, double guess, const DelaySolveOptions& options = {});

/// Number of roots of F on `window` at the given scan resolution.
[[nodiscard]] int count_delay_roots(const ModelDefinition& model, const HistorySource& history, double t, double sigma,
                                    DelayWindow window, int resolution = 1000);

/// tau' = (d1g x'(t) + d2g x'(t - tau)) / (1 + d2g x'(t - tau)).
[[nodiscard]] double delay_derivative(const ModelDefinition& model, const HistorySource& history, double t, double tau,
                                      double sigma);

/// sum_j sup|d2g_j| sup|x'_j| over samples of [t_a, t_b]; values below one
/// certify a unique, continuously differentiable delay.
[[nodiscard]] double contraction_margin(const ModelDefinition& model, const HistorySource& history, double sigma,
                                        double t_a, double t_b, int samples = 2001);

}  // namespace sddhopf
