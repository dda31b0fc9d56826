#include "doctest.h"

#include "sddhopf/errors.hpp"
#include "sddhopf/spectrum.hpp"
#include "sddhopf/stationary.hpp"

#include <cmath>
#include <random>

using namespace sddhopf;

namespace {

GoodwinParameters unit_params(double alpha_m, int h) {
    GoodwinParameters p;
    p.alpha_m = alpha_m;
    p.h = h;
    return p;
}

const double alpha_star = 5.0 * std::pow(4.0, 0.1);
const double sqrt3 = std::sqrt(3.0);

ContourRectangle omega(double delta = 1e-3) { return {0.0, 0.5, sqrt3 - 0.5, sqrt3 + 0.5, delta}; }

}  // namespace

TEST_CASE("characteristic determinant values") {
    const auto p = unit_params(2.0, 2);
    const auto model = make_goodwin_model(p);
    const auto ctx = characteristic_context(model, goodwin_stationary(p));
    // (0+1)^3 + c0 with c0 = 2 * 2 / 4
    CHECK(std::abs(char_det(ctx, 0.0) - Complex(2.0, 0.0)) < 1e-14);

    CharacteristicContext scalar{Mat::Constant(1, 1, -1.0), Mat::Zero(1, 1), 0.0, 0.0};
    CHECK(std::abs(char_det(scalar, 3.0) - Complex(4.0, 0.0)) < 1e-15);
}

TEST_CASE("characteristic determinant is conjugate symmetric") {
    auto p = unit_params(7.0, 10);
    p.eps0 = 0.4;
    const auto model = make_goodwin_model(p);
    const auto ctx = characteristic_context(model, goodwin_stationary(p));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const Complex w(u(rng), u(rng));
        CHECK(std::abs(char_det(ctx, std::conj(w)) - std::conj(char_det(ctx, w))) < 1e-12);
    }
}

TEST_CASE("goodwin cubic roots") {
    const auto p = unit_params(1.0, 10);
    const auto crit = goodwin_cubic_roots(p, 8.0);
    CHECK(std::abs(crit.roots[0] - Complex(0.0, sqrt3)) < 1e-12);
    CHECK(std::abs(crit.roots[1] - Complex(0.0, -sqrt3)) < 1e-12);
    CHECK(std::abs(crit.roots[2] - Complex(-3.0, 0.0)) < 1e-12);
    CHECK(crit.real_and_pair);
    CHECK(crit.discriminant < 0.0);

    GoodwinParameters q = p;
    q.mu_m = 1.0;
    q.mu_p = 2.0;
    q.mu_e = 3.0;
    const auto decoupled = goodwin_cubic_roots(q, 0.0);
    CHECK(std::abs(decoupled.roots[0] + 1.0) < 1e-12);
    CHECK(std::abs(decoupled.roots[1] + 2.0) < 1e-12);
    CHECK(std::abs(decoupled.roots[2] + 3.0) < 1e-12);

    // l^3 + 3 l^2 + 3 l + 2 = (l + 2)(l^2 + l + 1)
    const auto st = goodwin_stationary(unit_params(2.0, 2));
    const auto stable = goodwin_eigenvalues(unit_params(2.0, 2), st);
    CHECK(std::abs(stable.roots[0] - Complex(-0.5, std::sqrt(0.75))) < 1e-12);
    CHECK(std::abs(stable.roots[1] - Complex(-0.5, -std::sqrt(0.75))) < 1e-12);
    CHECK(std::abs(stable.roots[2] - Complex(-2.0, 0.0)) < 1e-12);
    for (const auto& r : stable.roots) CHECK(r.real() < 0.0);
}

TEST_CASE("winding number of simple test functions") {
    const ContourRectangle rect{-1.0, 1.0, -1.0, 1.0, 1e-3};
    const Complex w0(0.2, -0.3);
    CHECK(winding_degree([&](Complex w) { return w - w0; }, rect) == 1);
    CHECK(winding_degree([&](Complex w) { return (w - w0) * (w - w0); }, rect) == 2);
    CHECK(winding_degree([&](Complex w) { return w - Complex(3.0, 0.0); }, rect) == 0);
    CHECK(winding_degree([&](Complex w) { return 1.0 / (w - w0); }, rect) == -1);
    CHECK_THROWS_AS((void)winding_degree([](Complex w) { return w - Complex(1.0, 0.0); }, rect), BoundaryZero);
    CHECK_THROWS_AS((void)winding([](Complex w) { return w - Complex(0.9999, 0.1); }, rect, 3, 1), NoConvergence);
    CHECK_THROWS_AS((void)winding_degree([](Complex w) { return w; }, {1.0, -1.0, 0.0, 1.0, 1e-3}),
                    std::invalid_argument);
}

TEST_CASE("winding agrees with direct root counts of the goodwin cubic") {
    const auto p = unit_params(7.0, 10);
    const auto st = goodwin_stationary(p);
    const auto model = make_goodwin_model(p);
    const auto ctx = characteristic_context(model, st);
    const auto roots = goodwin_eigenvalues(p, st).roots;
    const double re_edges[] = {-4.1, -2.3, -0.7, 0.33, 0.9, 2.2};
    const double im_edges[] = {-2.9, -1.05, -0.1, 0.85, 1.95, 3.1};
    int nonempty = 0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const ContourRectangle r{re_edges[i], re_edges[i + 1], im_edges[j], im_edges[j + 1], 1e-3};
            int direct = 0;
            for (const auto& z : roots) direct += r.contains(z) ? 1 : 0;
            nonempty += direct > 0;
            CHECK(winding_degree([&](Complex w) { return char_det(ctx, w); }, r) == direct);
        }
    }
    CHECK(nonempty == 3);
}

TEST_CASE("crossing number at the critical point") {
    const auto p = unit_params(alpha_star, 10);
    const auto rep = goodwin_crossing_number(p, alpha_star, sqrt3, omega());
    CHECK(rep.gamma_minus == 0);
    CHECK(rep.gamma_plus == 1);
    CHECK(rep.gamma == -1);
    CHECK(rep.boundary_min_modulus > 0.0);

    // eigenvalues at alpha* +- delta lie on the expected sides of the axis
    const double below = goodwin_max_real_part(p, alpha_star - 1e-3);
    const double above = goodwin_max_real_part(p, alpha_star + 1e-3);
    CHECK(below < 0.0);
    CHECK(above > 0.0);

    const auto deep = goodwin_crossing_number(p, alpha_star, sqrt3, omega(), 12);
    const auto coarse = goodwin_crossing_number(p, alpha_star, sqrt3, omega(), 6);
    CHECK(deep.gamma == coarse.gamma);
    CHECK(deep.gamma_plus == coarse.gamma_plus);

    const auto model = make_goodwin_model(p);
    const auto generic =
        crossing_number(model, alpha_star, sqrt3, omega(), goodwin_stationary(p).x, 6);
    CHECK(generic.gamma == -1);
}

TEST_CASE("crossing number away from criticality") {
    const auto far = goodwin_crossing_number(unit_params(2.0, 10), 2.0, sqrt3, omega());
    CHECK(far.gamma_minus == 0);
    CHECK(far.gamma_plus == 0);
    CHECK(far.gamma == 0);

    const ContourRectangle empty{0.0, 0.5, 5.0, 6.0, 1e-3};
    CHECK(goodwin_crossing_number(unit_params(alpha_star, 10), alpha_star, 5.5, empty).gamma == 0);
    CHECK_THROWS_AS((void)goodwin_crossing_number(unit_params(alpha_star, 10), alpha_star, 9.0, empty),
                    std::invalid_argument);
}
