#include "doctest.h"

#include "sddhopf/errors.hpp"
#include "sddhopf/integrator.hpp"
#include "sddhopf/stationary.hpp"

#include <cmath>
#include <random>

using namespace sddhopf;

namespace {

GoodwinParameters goodwin(double alpha_m, double c, double eps0) {
    GoodwinParameters p;
    p.alpha_m = alpha_m;
    p.h = 10;
    p.c = c;
    p.eps0 = eps0;
    return p;
}

/// Plain RK4 for the undelayed Goodwin system.
Vec reference_ode(const GoodwinParameters& p, Vec x, double t1, double h) {
    auto f = [&](const Vec& s) {
        Vec d(3);
        d[0] = -p.mu_m * s[0] + p.alpha_m / (1.0 + std::pow(s[2] / p.z_tilde, p.h));
        d[1] = -p.mu_p * s[1] + p.alpha_p * s[0];
        d[2] = -p.mu_e * s[2] + p.alpha_e * s[1];
        return d;
    };
    const long n = std::lround(t1 / h);
    for (long i = 0; i < n; ++i) {
        const Vec k1 = f(x);
        const Vec k2 = f(x + 0.5 * h * k1);
        const Vec k3 = f(x + 0.5 * h * k2);
        const Vec k4 = f(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

}  // namespace

TEST_CASE("zero delay coefficient reproduces the ordinary differential equation") {
    const auto p = goodwin(7.0, 0.0, 0.0);
    const Vec x0{{0.5, 1.5, 1.0}};
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    const auto traj = integrate(make_goodwin_model(p), p.alpha_m, InitialHistory::constant(x0), 0.0, 10.0, cfg);
    CHECK(std::abs(traj.times().back() - 10.0) < 1e-12);
    const Vec ref = reference_ode(p, x0, 10.0, 1e-3);
    CHECK((traj.states().back() - ref).lpNorm<Eigen::Infinity>() < 1e-10);
    // finer reference: both are accurate far beyond the tolerance
    CHECK((traj.states().back() - reference_ode(p, x0, 10.0, 2.5e-4)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("vanishing delay stays exactly zero in the contraction regime") {
    const auto p = goodwin(7.0, 0.1, 0.0);
    const auto model = make_goodwin_model(p);
    Vec x0 = goodwin_stationary(p).x;
    x0[0] += 1e-3;
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    cfg.scan_delay_roots = true;
    const auto traj = integrate(model, p.alpha_m, InitialHistory::constant(x0), 0.0, 20.0, cfg);
    REQUIRE(traj.delays.size() == traj.times().size());
    for (const auto& d : traj.delays) {
        CHECK(std::abs(d.tau) <= 1e-12);
        CHECK(d.root_count_in_window == 1);
    }
    CHECK(contraction_margin(model, traj.history, p.alpha_m, 0.0, 20.0) < 1.0);
}

TEST_CASE("method of steps for a constant delay") {
    ModelDefinition lin(
        1, [](const Vec&, const Vec& b, double) -> Vec { return -b; }, [](const Vec&, const Vec&, double) { return 1.0; });
    IntegratorConfig cfg;
    cfg.step = 0.05;
    const auto traj = integrate(lin, 0.0, InitialHistory::constant(Vec::Ones(1)), 0.0, 2.0, cfg);
    for (double t = 0.0; t <= 1.0; t += 0.01) CHECK(std::abs(traj.history.value(t)[0] - (1.0 - t)) < 1e-13);
    // second interval: x = 1 - t + (t - 1)^2 / 2
    for (double t = 1.0; t <= 2.0; t += 0.01)
        CHECK(std::abs(traj.history.value(t)[0] - (1.0 - t + 0.5 * (t - 1.0) * (t - 1.0))) < 1e-12);
    bool seen = false;
    for (const auto& b : traj.breaking_points) seen = seen || (std::abs(b.time - 1.0) < 1e-9 && b.order == 2);
    CHECK(seen);
}

TEST_CASE("frozen-lag integration") {
    auto p = goodwin(7.0, 0.1, 0.5);
    const auto model = make_goodwin_model(p);
    const auto st = goodwin_stationary(p);
    IntegratorConfig cfg;
    const auto rest = integrate_frozen(model, p.alpha_m, st.tau, InitialHistory::constant(st.x), 0.0, 5.0, cfg);
    for (const auto& d : rest.delays) CHECK(std::abs(d.tau - st.tau) < 1e-14);

    p.eps0 = 0.0;
    const auto model0 = make_goodwin_model(p);
    Vec x0 = goodwin_stationary(p).x;
    x0[0] += 0.2;
    const auto frozen = integrate_frozen(model0, p.alpha_m, 0.0, InitialHistory::constant(x0), 0.0, 10.0, cfg);
    const auto full = integrate(model0, p.alpha_m, InitialHistory::constant(x0), 0.0, 10.0, cfg);
    for (const auto& d : frozen.delays) CHECK(d.tau == 0.0);
    for (const auto& d : full.delays) REQUIRE(d.tau == 0.0);
    REQUIRE(frozen.times().size() == full.times().size());
    double diff = 0.0;
    for (std::size_t i = 0; i < full.times().size(); ++i)
        diff = std::max(diff, (frozen.states()[i] - full.states()[i]).lpNorm<Eigen::Infinity>());
    CHECK(diff < 1e-12);
}

TEST_CASE("the Goodwin box is forward invariant") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (double eps0 : {0.0, 0.5}) {
        const auto p = goodwin(8.0, 0.1, eps0);
        const Vec box{{p.alpha_m, p.alpha_m, p.alpha_m}};
        for (int k = 0; k < 4; ++k) {
            const Vec x0 = box.cwiseProduct(Vec{{u(rng), u(rng), u(rng)}});
            IntegratorConfig cfg;
            cfg.step = 0.02;
            const auto traj = integrate(make_goodwin_model(p), p.alpha_m, InitialHistory::constant(x0), 0.0, 40.0, cfg);
            for (const auto& x : traj.states()) {
                CHECK((x.array() > 0.0).all());
                CHECK((x.array() <= box.array() + 1e-9).all());
            }
            CHECK(traj.max_abs_derivative[0] < p.alpha_m);
        }
    }
}

TEST_CASE("integration is deterministic") {
    const auto p = goodwin(7.0, 0.1, 0.5);
    const auto model = make_goodwin_model(p);
    const Vec x0{{0.3, 2.0, 1.1}};
    IntegratorConfig cfg;
    const auto a = integrate(model, p.alpha_m, InitialHistory::constant(x0), 0.0, 15.0, cfg);
    const auto b = integrate(model, p.alpha_m, InitialHistory::constant(x0), 0.0, 15.0, cfg);
    REQUIRE(a.times().size() == b.times().size());
    bool same = true;
    for (std::size_t i = 0; i < a.times().size(); ++i)
        same = same && a.times()[i] == b.times()[i] && a.states()[i] == b.states()[i] && a.delays[i].tau == b.delays[i].tau;
    CHECK(same);
}

TEST_CASE("fourth-order convergence with a state-dependent delay") {
    const auto p = goodwin(7.0, 0.1, 0.5);
    const auto model = make_goodwin_model(p);
    const Vec x0 = 2.0 * goodwin_stationary(p).x;
    std::vector<Vec> ends;
    for (double h : {8e-3, 4e-3, 2e-3}) {
        IntegratorConfig cfg;
        cfg.step = h;
        cfg.inner_tol = 1e-15;
        ends.push_back(integrate(model, p.alpha_m, InitialHistory::constant(x0), 0.0, 20.0, cfg).states().back());
    }
    const double order = std::log2((ends[0] - ends[1]).lpNorm<Eigen::Infinity>() / (ends[1] - ends[2]).lpNorm<Eigen::Infinity>());
    CHECK(order > 3.7);
    CHECK(order < 4.5);
}

TEST_CASE("integrator argument and convergence errors") {
    const auto p = goodwin(7.0, 0.1, 0.5);
    const auto model = make_goodwin_model(p);
    const auto init = InitialHistory::constant(Vec::Ones(3));
    IntegratorConfig cfg;
    CHECK_THROWS_AS((void)integrate(model, p.alpha_m, init, 1.0, 0.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS((void)integrate(model, p.alpha_m, InitialHistory::constant(Vec::Ones(2)), 0.0, 1.0, cfg),
                    std::invalid_argument);
    cfg.step = -1.0;
    CHECK_THROWS_AS((void)integrate(model, p.alpha_m, init, 0.0, 1.0, cfg), std::invalid_argument);
    cfg.step = 0.01;
    cfg.max_inner = 1;
    CHECK_THROWS_AS((void)integrate(model, p.alpha_m, InitialHistory::constant(Vec{{0.2, 3.0, 1.0}}), 0.0, 1.0, cfg),
                    InnerIterationDivergence);
}
