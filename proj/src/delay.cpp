#include "sddhopf/delay.hpp"

#include "sddhopf/errors.hpp"
#include "sddhopf/roots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace sddhopf {

PreHistory PreHistory::constant(const Vec& x0) {
    PreHistory p;
    p.value = [x0](double) { return x0; };
    p.derivative = [n = x0.size()](double) { return Vec::Zero(n).eval(); };
    p.constant_ = true;
    return p;
}

HistoryFunction::HistoryFunction(double t0, const Vec& x0, const Vec& dx0, PreHistory pre)
    : times_{t0}, values_{x0}, derivs_{dx0}, pre_(std::move(pre)) {
    if (!pre_.value || !pre_.derivative) pre_ = PreHistory::constant(x0);
}

void HistoryFunction::append(double t, const Vec& x, const Vec& dx) {
    if (times_.empty()) throw std::logic_error("history has no initial node");
    if (!(t > times_.back())) throw std::invalid_argument("history nodes must be strictly increasing");
    times_.push_back(t);
    values_.push_back(x);
    derivs_.push_back(dx);
}

std::size_t HistoryFunction::segment_index(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    auto idx = static_cast<std::size_t>(it - times_.begin());
    // idx is the first node strictly after t; the segment starts one earlier.
    if (idx >= times_.size()) idx = times_.size() - 1;
    return idx - 1;
}

Vec HistoryFunction::value(double t) const {
    if (t < times_.front()) return pre_.value(t);
    if (t > times_.back()) throw std::out_of_range("history evaluated past its last node");
    if (times_.size() == 1) return values_.front();
    const auto i = segment_index(t);
    return hermite_value(times_[i], times_[i + 1], values_[i], values_[i + 1], derivs_[i], derivs_[i + 1], t);
}

Vec HistoryFunction::derivative(double t) const {
    if (t < times_.front()) return pre_.derivative(t);
    if (t > times_.back()) throw std::out_of_range("history evaluated past its last node");
    if (times_.size() == 1) return derivs_.front();
    const auto i = segment_index(t);
    return hermite_derivative(times_[i], times_[i + 1], values_[i], values_[i + 1], derivs_[i], derivs_[i + 1], t);
}

Vec hermite_value(double t0, double t1, const Vec& x0, const Vec& x1, const Vec& d0, const Vec& d1, double t) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    return h00 * x0 + (h10 * h) * d0 + h01 * x1 + (h11 * h) * d1;
}

Vec hermite_derivative(double t0, double t1, const Vec& x0, const Vec& x1, const Vec& d0, const Vec& d1, double t) {
    const double h = t1 - t0;
    const double u = (t - t0) / h;
    const double u2 = u * u;
    const double g00 = (6.0 * u2 - 6.0 * u) / h;
    const double g10 = 3.0 * u2 - 4.0 * u + 1.0;
    const double g11 = 3.0 * u2 - 2.0 * u;
    return g00 * (x0 - x1) + g10 * d0 + g11 * d1;
}

ExtendedHistory::ExtendedHistory(const HistoryFunction& base, double t1, Vec x1, Vec d1)
    : base_(base), t0_(base.t_end()), t1_(t1), x0_(base.values().back()), d0_(base.derivatives().back()),
      x1_(std::move(x1)), d1_(std::move(d1)) {
    if (!(t1_ > t0_)) throw std::invalid_argument("extension must end after the base history");
}

Vec ExtendedHistory::value(double t) const {
    if (t <= t0_) return base_.value(t);
    if (t > t1_) throw std::out_of_range("extended history evaluated past its end");
    return hermite_value(t0_, t1_, x0_, x1_, d0_, d1_, t);
}

Vec ExtendedHistory::derivative(double t) const {
    if (t <= t0_) return base_.derivative(t);
    if (t > t1_) throw std::out_of_range("extended history evaluated past its end");
    return hermite_derivative(t0_, t1_, x0_, x1_, d0_, d1_, t);
}

AnalyticHistory::AnalyticHistory(std::function<Vec(double)> value, std::function<Vec(double)> derivative, double t_end)
    : value_(std::move(value)), deriv_(std::move(derivative)), t_end_(t_end) {}

namespace {

double residual_tolerance(double tau) { return 1e-12 * (1.0 + std::abs(tau)); }

struct DelayEquation {
    const ModelDefinition& model;
    const HistorySource& history;
    double t;
    double sigma;
    Vec xt;

    [[nodiscard]] double value(double tau) const { return tau - model.delay(xt, history.value(t - tau), sigma); }

    [[nodiscard]] double slope(double tau) const {
        const Vec xd = history.value(t - tau);
        const auto jac = model.jacobians(xt, xd, sigma);
        return 1.0 + jac.d2g.dot(history.derivative(t - tau));
    }
};

struct Bracket {
    double lo;
    double hi;
};

std::vector<Bracket> find_brackets(const DelayEquation& eq, DelayWindow w, int resolution, int& root_count) {
    std::vector<Bracket> out;
    root_count = 0;
    double prev_tau = w.lo;
    double prev = eq.value(w.lo);
    if (prev == 0.0) {
        ++root_count;
        out.push_back({w.lo, w.lo});
    }
    for (int k = 1; k <= resolution; ++k) {
        const double tau = k == resolution ? w.hi : w.lo + (w.hi - w.lo) * k / resolution;
        const double f = eq.value(tau);
        if (f == 0.0) {
            ++root_count;
            out.push_back({tau, tau});
        } else if (prev != 0.0 && ((prev < 0.0) != (f < 0.0))) {
            ++root_count;
            out.push_back({prev_tau, tau});
        }
        prev_tau = tau;
        prev = f;
    }
    return out;
}

}  // namespace

int count_delay_roots(const ModelDefinition& model, const HistorySource& history, double t, double sigma,
                      DelayWindow window, int resolution) {
    DelayEquation eq{model, history, t, sigma, history.value(t)};
    int count = 0;
    (void)find_brackets(eq, window, resolution, count);
    return count;
}

DelaySample solve_delay(const ModelDefinition& model, const HistorySource& history, double t, double sigma,
                        DelayWindow window, double guess, const DelaySolveOptions& options) {
    if (!(std::isfinite(window.lo) && std::isfinite(window.hi) && window.lo <= window.hi))
        throw std::invalid_argument("delay window must be finite with lo <= hi");
    guess = std::clamp(guess, window.lo, window.hi);
    DelayEquation eq{model, history, t, sigma, history.value(t)};

    DelaySample out;
    out.t = t;
    if (options.scan_window) out.root_count_in_window = count_delay_roots(model, history, t, sigma, window, options.scan_resolution);

    // Damped Newton from the guess.
    bool converged = false;
    double tau = guess;
    double f = eq.value(tau);
    for (int it = 0; it < options.max_newton; ++it) {
        if (std::abs(f) <= residual_tolerance(tau)) {
            converged = true;
            // One more correction squares the error of a warm start.
            const double d = eq.slope(tau);
            if (f != 0.0 && std::abs(d) >= 1e-8) {
                const double trial = tau - f / d;
                if (trial >= window.lo && trial <= window.hi) {
                    const double ft = eq.value(trial);
                    if (std::abs(ft) <= std::abs(f)) {
                        tau = trial;
                        f = ft;
                    }
                }
            }
            break;
        }
        const double d = eq.slope(tau);
        if (!(std::abs(d) >= 1e-8)) break;
        double step = -f / d;
        bool improved = false;
        for (int half = 0; half < 10; ++half) {
            const double trial = tau + step;
            if (trial < window.lo || trial > window.hi) {
                step *= 0.5;
                continue;
            }
            const double ft = eq.value(trial);
            if (std::abs(ft) < std::abs(f)) {
                tau = trial;
                f = ft;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }

    if (!converged) {
        int count = 0;
        const auto brackets = find_brackets(eq, window, std::max(options.scan_resolution, 16), count);
        if (brackets.empty())
            throw NoRootInWindow("delay equation has constant sign on [" + std::to_string(window.lo) + ", " +
                                 std::to_string(window.hi) + "] at t=" + std::to_string(t));
        const Bracket* chosen = nullptr;
        for (const auto& b : brackets)
            if (guess >= b.lo && guess <= b.hi) chosen = &b;
        if (!chosen) {
            if (brackets.size() > 1)
                throw AmbiguousRoot(std::to_string(brackets.size()) + " delay roots in window at t=" + std::to_string(t));
            chosen = &brackets.front();
        }
        tau = roots::bisect([&](double s) { return eq.value(s); }, chosen->lo, chosen->hi).value();
        f = eq.value(tau);
    }

    out.tau = tau;
    out.residual = std::abs(f);
    if (options.compute_derivative) out.tau_dot = delay_derivative(model, history, t, tau, sigma);
    return out;
}

double delay_derivative(const ModelDefinition& model, const HistorySource& history, double t, double tau, double sigma) {
    const Vec xt = history.value(t);
    const Vec xd = history.value(t - tau);
    const auto jac = model.jacobians(xt, xd, sigma);
    const Vec dxd = history.derivative(t - tau);
    const double lagged = jac.d2g.dot(dxd);
    const double denom = 1.0 + lagged;
    if (!(std::abs(denom) >= 1e-10))
        throw SingularImplicitDerivative("1 + d2g x'(t - tau) vanishes at t=" + std::to_string(t));
    return (jac.d1g.dot(history.derivative(t)) + lagged) / denom;
}

double contraction_margin(const ModelDefinition& model, const HistorySource& history, double sigma, double t_a,
                          double t_b, int samples) {
    if (!(t_b >= t_a) || samples < 2) throw std::invalid_argument("contraction window must satisfy t_a <= t_b");
    const int n = model.dimension();
    Vec sup_g = Vec::Zero(n);
    Vec sup_dx = Vec::Zero(n);
    for (int k = 0; k < samples; ++k) {
        const double s = t_a + (t_b - t_a) * k / (samples - 1);
        const Vec x = history.value(s);
        const auto jac = model.jacobians(x, x, sigma);
        sup_g = sup_g.cwiseMax(jac.d2g.transpose().cwiseAbs());
        sup_dx = sup_dx.cwiseMax(history.derivative(s).cwiseAbs());
    }
    return sup_g.dot(sup_dx);
}

}  // namespace sddhopf
