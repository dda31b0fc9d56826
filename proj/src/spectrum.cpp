#include "sddhopf/spectrum.hpp"

#include "sddhopf/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sddhopf {

CharacteristicContext characteristic_context(const ModelDefinition& model, const StationaryState& st) {
    const auto jac = model.jacobians(st.x, st.x, st.sigma);
    return {jac.d1f, jac.d2f, st.tau, st.sigma};
}

Complex char_det(const CharacteristicContext& ctx, Complex omega) {
    const auto n = ctx.d1f.rows();
    const Eigen::MatrixXcd m = omega * Eigen::MatrixXcd::Identity(n, n) - ctx.d1f.cast<Complex>() -
                               ctx.d2f.cast<Complex>() * std::exp(-omega * ctx.tau);
    return m.partialPivLu().determinant();
}

double goodwin_loop_gain(const GoodwinParameters& p, const StationaryState& st) {
    return -goodwin_hill_slope(st.x[2], p) * p.alpha_p * p.alpha_e;
}

CubicRoots goodwin_cubic_roots(const GoodwinParameters& p, double c0) {
    const double b = p.mu_m + p.mu_p + p.mu_e;
    const double c = p.mu_m * p.mu_p + p.mu_m * p.mu_e + p.mu_p * p.mu_e;
    const double d = p.mu_m * p.mu_p * p.mu_e + c0;

    Mat companion = Mat::Zero(3, 3);
    companion(0, 0) = -b;
    companion(0, 1) = -c;
    companion(0, 2) = -d;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::EigenSolver<Mat> solver(companion, false);

    CubicRoots out;
    auto poly = [&](Complex l) { return ((l + b) * l + c) * l + d; };
    auto slope = [&](Complex l) { return (3.0 * l + 2.0 * b) * l + c; };
    for (int i = 0; i < 3; ++i) {
        Complex l = solver.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {
            const Complex s = slope(l);
            if (std::abs(s) == 0.0) break;
            const Complex next = l - poly(l) / s;
            if (!(std::abs(poly(next)) < std::abs(poly(l)))) break;
            l = next;
        }
        out.roots[static_cast<std::size_t>(i)] = l;
    }

    out.discriminant = 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;
    if (out.discriminant < 0.0) {
        // Exactly one real root; symmetrize the remaining pair.
        auto& r = out.roots;
        std::sort(r.begin(), r.end(), [](Complex x, Complex y) { return std::abs(x.imag()) < std::abs(y.imag()); });
        r[0] = Complex(r[0].real(), 0.0);
        const double re = 0.5 * (r[1].real() + r[2].real());
        const double im = 0.5 * (std::abs(r[1].imag()) + std::abs(r[2].imag()));
        r[1] = Complex(re, im);
        r[2] = Complex(re, -im);
        out.real_and_pair = im > 0.0;
    } else if (out.discriminant > 0.0) {
        for (auto& r : out.roots) r = Complex(r.real(), 0.0);
    }
    std::sort(out.roots.begin(), out.roots.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return out;
}

CubicRoots goodwin_eigenvalues(const GoodwinParameters& p, const StationaryState& st) {
    return goodwin_cubic_roots(p, goodwin_loop_gain(p, st));
}

double goodwin_max_real_part(const GoodwinParameters& p, double alpha_m) {
    const auto q = p.with_alpha_m(alpha_m);
    return goodwin_eigenvalues(q, goodwin_stationary(q)).roots[0].real();
}

void ContourRectangle::validate() const {
    if (!(alpha_lo < alpha_hi)) throw std::invalid_argument("contour requires alpha_lo < alpha_hi");
    if (!(beta_lo < beta_hi)) throw std::invalid_argument("contour requires beta_lo < beta_hi");
    if (!(delta > 0.0)) throw std::invalid_argument("contour requires delta > 0");
}

namespace {

class ArgumentAccumulator {
public:
    ArgumentAccumulator(const std::function<Complex(Complex)>& fn, int max_depth) : fn_(fn), max_depth_(max_depth) {}

    Complex eval(Complex w) {
        const Complex v = fn_(w);
        const double mod = std::abs(v);
        if (!std::isfinite(mod)) throw Error("characteristic function is not finite on the contour");
        if (mod == 0.0) throw BoundaryZero("characteristic function vanishes on the contour boundary");
        min_mod_ = std::min(min_mod_, mod);
        max_mod_ = std::max(max_mod_, mod);
        return v;
    }

    double segment(Complex a, Complex b, Complex fa, Complex fb, int depth) {
        depth_reached_ = std::max(depth_reached_, depth);
        const Complex m = 0.5 * (a + b);
        const Complex fm = eval(m);
        const double whole = std::arg(fb / fa);
        const double left = std::arg(fm / fa);
        const double right = std::arg(fb / fm);
        constexpr double cap = 0.5 * std::numbers::pi;
        if (std::abs(whole) < cap && std::abs(left) < cap && std::abs(right) < cap &&
            std::abs(left + right - whole) < 1e-9) {
            ++segments_;
            return left + right;
        }
        if (depth + 1 > max_depth_) {
            if (min_mod_ < 1e-12 * max_mod_)
                throw BoundaryZero("characteristic function nearly vanishes on the contour boundary");
            throw NoConvergence("winding refinement exceeded maximum depth " + std::to_string(max_depth_));
        }
        return segment(a, m, fa, fm, depth + 1) + segment(m, b, fm, fb, depth + 1);
    }

    [[nodiscard]] double min_modulus() const { return min_mod_; }
    [[nodiscard]] double max_modulus() const { return max_mod_; }
    [[nodiscard]] int depth_reached() const { return depth_reached_; }
    [[nodiscard]] long segments() const { return segments_; }

private:
    const std::function<Complex(Complex)>& fn_;
    int max_depth_;
    double min_mod_ = std::numeric_limits<double>::infinity();
    double max_mod_ = 0.0;
    int depth_reached_ = 0;
    long segments_ = 0;
};

}  // namespace

WindingResult winding(const std::function<Complex(Complex)>& detfn, const ContourRectangle& rect, int max_depth,
                      int min_depth) {
    rect.validate();
    if (min_depth < 0 || max_depth < min_depth) throw std::invalid_argument("winding requires 0 <= min_depth <= max_depth");

    ArgumentAccumulator acc(detfn, max_depth);
    const std::array<Complex, 5> corners = {Complex(rect.alpha_lo, rect.beta_lo), Complex(rect.alpha_hi, rect.beta_lo),
                                            Complex(rect.alpha_hi, rect.beta_hi), Complex(rect.alpha_lo, rect.beta_hi),
                                            Complex(rect.alpha_lo, rect.beta_lo)};
    const long pieces = 1L << min_depth;
    double total = 0.0;
    for (std::size_t e = 0; e < 4; ++e) {
        const Complex a = corners[e];
        const Complex b = corners[e + 1];
        Complex prev = a;
        Complex fprev = acc.eval(prev);
        for (long k = 1; k <= pieces; ++k) {
            const Complex next = k == pieces ? b : a + (b - a) * (static_cast<double>(k) / static_cast<double>(pieces));
            const Complex fnext = acc.eval(next);
            total += acc.segment(prev, next, fprev, fnext, min_depth);
            prev = next;
            fprev = fnext;
        }
    }
    if (acc.min_modulus() < 1e-12 * acc.max_modulus())
        throw BoundaryZero("characteristic function nearly vanishes on the contour boundary");

    WindingResult out;
    out.degree = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
    out.boundary_min_modulus = acc.min_modulus();
    out.depth_reached = acc.depth_reached();
    out.segments = acc.segments();
    return out;
}

int winding_degree(const std::function<Complex(Complex)>& detfn, const ContourRectangle& rect, int max_depth) {
    return winding(detfn, rect, max_depth).degree;
}

namespace {

CrossingReport combine(const WindingResult& minus, const WindingResult& plus) {
    CrossingReport r;
    r.gamma_minus = minus.degree;
    r.gamma_plus = plus.degree;
    r.gamma = minus.degree - plus.degree;
    r.boundary_min_modulus = std::min(minus.boundary_min_modulus, plus.boundary_min_modulus);
    r.refinement_depth = std::max(minus.depth_reached, plus.depth_reached);
    return r;
}

void check_beta(double beta0, const ContourRectangle& rect) {
    rect.validate();
    if (!(beta0 > rect.beta_lo && beta0 < rect.beta_hi))
        throw std::invalid_argument("beta0 must lie inside the contour's imaginary range");
}

WindingResult winding_at(const ModelDefinition& model, const StationaryState& st, const ContourRectangle& rect,
                         int min_depth, int max_depth) {
    const auto ctx = characteristic_context(model, st);
    return winding([&ctx](Complex w) { return char_det(ctx, w); }, rect, max_depth, min_depth);
}

}  // namespace

CrossingReport crossing_number(const ModelDefinition& model, double sigma0, double beta0, const ContourRectangle& rect,
                               const Vec& guess, int min_depth, int max_depth) {
    check_beta(beta0, rect);
    const auto minus = solve_stationary(model, sigma0 - rect.delta, guess);
    const auto plus = solve_stationary(model, sigma0 + rect.delta, minus.x);
    return combine(winding_at(model, minus, rect, min_depth, max_depth),
                   winding_at(model, plus, rect, min_depth, max_depth));
}

CrossingReport goodwin_crossing_number(const GoodwinParameters& p, double alpha_m0, double beta0,
                                       const ContourRectangle& rect, int min_depth, int max_depth) {
    check_beta(beta0, rect);
    const auto model = make_goodwin_model(p);
    const auto minus = goodwin_stationary(p.with_alpha_m(alpha_m0 - rect.delta));
    const auto plus = goodwin_stationary(p.with_alpha_m(alpha_m0 + rect.delta));
    return combine(winding_at(model, minus, rect, min_depth, max_depth),
                   winding_at(model, plus, rect, min_depth, max_depth));
}

}  // namespace sddhopf
