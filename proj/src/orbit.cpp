#include "sddhopf/orbit.hpp"

#include "sddhopf/errors.hpp"
#include "sddhopf/roots.hpp"
#include "sddhopf/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace sddhopf {

namespace {

void fill_norms(PeriodicOrbit& o) {
    const auto n = o.profile.front().size();
    Vec lo = o.profile.front();
    Vec hi = o.profile.front();
    for (const auto& x : o.profile) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    o.amplitude = 0.5 * (hi - lo);
    o.xdot_sup = 0.0;
    for (const auto& d : o.derivative_profile) o.xdot_sup = std::max(o.xdot_sup, d.lpNorm<Eigen::Infinity>());
    o.tau_sup = 0.0;
    for (double t : o.tau_profile) o.tau_sup = std::max(o.tau_sup, std::abs(t));
    o.tau_dot_sup = 0.0;
    for (double t : o.tau_dot_profile) o.tau_dot_sup = std::max(o.tau_dot_sup, std::abs(t));
    (void)n;
}

}  // namespace

PeriodicOrbit make_orbit(double period, std::vector<Vec> profile, std::vector<double> tau_profile,
                         std::vector<Vec> derivative_profile, std::vector<double> tau_dot_profile) {
    if (!(period > 0.0)) throw std::invalid_argument("orbit period must be positive");
    if (profile.empty()) throw std::invalid_argument("orbit profile is empty");
    PeriodicOrbit o;
    o.period = period;
    o.beta = 2.0 * std::numbers::pi / period;
    if (tau_profile.empty()) tau_profile.assign(profile.size(), 0.0);
    if (tau_profile.size() != profile.size()) throw std::invalid_argument("delay profile length mismatch");
    o.profile = std::move(profile);
    o.tau_profile = std::move(tau_profile);
    o.derivative_profile = std::move(derivative_profile);
    o.tau_dot_profile = std::move(tau_dot_profile);
    fill_norms(o);
    return o;
}

Section equilibrium_section(const Vec& equilibrium) {
    Vec normal = Vec::Zero(equilibrium.size());
    normal[0] = 1.0;
    return {equilibrium, normal};
}

DetectionResult detect_orbit(const Trajectory& traj, const Section& section, const OrbitDetectionConfig& cfg,
                             const ModelDefinition* model) {
    DetectionResult res;
    const auto& hist = traj.history;
    const auto& ts = hist.times();
    const auto& xs = hist.values();
    if (ts.size() < 2) {
        res.reason = "trajectory too short";
        return res;
    }
    const double t_cut = ts.front() + cfg.transient_fraction * (ts.back() - ts.front());
    auto side = [&](const Vec& x) { return section.normal.dot(x - section.point); };

    std::vector<double> crossings;
    auto first = std::lower_bound(ts.begin(), ts.end(), t_cut);
    for (auto i = static_cast<std::size_t>(first - ts.begin()); i + 1 < ts.size(); ++i) {
        const double a = side(xs[i]);
        const double b = side(xs[i + 1]);
        if (!(a < 0.0 && b >= 0.0)) continue;
        auto g = [&](double t) { return side(hist.value(t)); };
        const double tc = roots::bisect(g, ts[i], ts[i + 1], 0.0, 200).value();
        if (section.normal.dot(hist.derivative(tc)) > 0.0) crossings.push_back(tc);
    }
    res.crossings = static_cast<int>(crossings.size());
    if (res.crossings < cfg.returns + 1) {
        res.reason = "too few section crossings after the transient";
        return res;
    }

    const auto last = crossings.size() - 1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (int k = 0; k < cfg.returns; ++k) {
        const double r = crossings[last - k] - crossings[last - k - 1];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        sum += r;
    }
    const double period = sum / cfg.returns;
    res.return_spread = (hi - lo) / period;

    const double t_end = crossings[last];
    const double t_start = t_end - period;
    const int m = cfg.samples;
    std::vector<Vec> profile;
    std::vector<Vec> dprofile;
    std::vector<double> tau;
    std::vector<double> tau_dot;
    profile.reserve(m);
    dprofile.reserve(m);
    for (int j = 0; j < m; ++j) {
        const double t = t_start + period * j / m;
        profile.push_back(hist.value(t));
        dprofile.push_back(hist.derivative(t));
    }

    if (model) {
        double guess = traj.delays.back().tau;
        for (int j = 0; j < m; ++j) {
            const double t = t_start + period * j / m;
            double width = traj.config.window_width();
            DelaySample s;
            if (traj.config.frozen_lag) {
                const Vec xt = hist.value(t);
                const Vec xl = hist.value(t - traj.config.frozen_tau);
                s.tau = model->delay(xt, xl, traj.sigma);
                const auto jac = model->jacobians(xt, xl, traj.sigma);
                s.tau_dot = jac.d1g.dot(hist.derivative(t)) + jac.d2g.dot(hist.derivative(t - traj.config.frozen_tau));
            } else {
                s = solve_delay(*model, hist, t, traj.sigma, {0.0, std::max(guess, 0.0) + width}, std::max(guess, 0.0));
            }
            guess = s.tau;
            tau.push_back(s.tau);
            tau_dot.push_back(s.tau_dot);
        }
    } else {
        // Linear interpolation of the per-node delay samples.
        for (int j = 0; j < m; ++j) {
            const double t = t_start + period * j / m;
            auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - ts.begin())) - 1;
            const auto i1 = std::min(i + 1, ts.size() - 1);
            const double w = i1 == i ? 0.0 : (t - ts[i]) / (ts[i1] - ts[i]);
            tau.push_back((1.0 - w) * traj.delays[i].tau + w * traj.delays[i1].tau);
            tau_dot.push_back((1.0 - w) * traj.delays[i].tau_dot + w * traj.delays[i1].tau_dot);
        }
    }

    PeriodicOrbit orbit = make_orbit(period, std::move(profile), std::move(tau), std::move(dprofile), std::move(tau_dot));
    orbit.t_start = t_start;
    orbit.return_spread = res.return_spread;
    orbit.return_residual = (hist.value(t_end) - hist.value(t_start)).lpNorm<Eigen::Infinity>();
    res.closure = orbit.return_residual;

    const double amp = orbit.amplitude.maxCoeff();
    if (!(amp > 1e-8 * (1.0 + section.point.lpNorm<Eigen::Infinity>()))) {
        res.reason = "oscillation amplitude is negligible";
        return res;
    }
    if (!(res.return_spread < cfg.max_return_spread)) {
        res.reason = "return times not settled";
        return res;
    }
    if (!(res.closure < cfg.max_closure * amp)) {
        res.reason = "profile does not close over one period";
        return res;
    }
    res.orbit = std::move(orbit);
    return res;
}

bool PeriodBounds::satisfied_by(double period) const {
    for (const auto& b : {i_rederived, ii, iii})
        if (b && period < *b) return false;
    return true;
}

PeriodBounds period_bounds(double L_f, double L_g, const SupNorms& norms) {
    if (!(L_f > 0.0) || L_g < 0.0 || norms.tau < 0.0 || norms.tau_dot < 0.0 || norms.xdot < 0.0)
        throw std::invalid_argument("period bounds need L_f > 0 and nonnegative norms");
    PeriodBounds b;
    if (norms.tau < 1.0 / (2.0 * L_f)) {
        b.i_printed = 2.0 / (1.0 - 2.0 * L_f * norms.tau);
        b.i_rederived = 2.0 * (1.0 - 2.0 * L_f * norms.tau) / L_f;
    }
    if (norms.tau_differentiable) b.ii = 4.0 / (L_f * (2.0 + norms.tau_dot));
    if (L_g == 0.0 || norms.xdot < 1.0 / L_g) b.iii = 2.0 * (1.0 - L_g * norms.xdot) / L_f;
    return b;
}

Vec goodwin_box(const GoodwinParameters& p) {
    Vec box(3);
    box[0] = p.alpha_m / p.mu_m;
    box[1] = p.alpha_p * p.alpha_m / (p.mu_p * p.mu_m);
    box[2] = p.alpha_e * p.alpha_p * p.alpha_m / (p.mu_e * p.mu_p * p.mu_m);
    return box;
}

BoxReport box_bounds_check(const PeriodicOrbit& orbit, const GoodwinParameters& p, double slack) {
    static constexpr const char* names[] = {"x", "y", "z"};
    const Vec box = goodwin_box(p);
    BoxReport r;
    r.lower_margin = Vec::Constant(3, std::numeric_limits<double>::infinity());
    r.upper_margin = Vec::Constant(3, std::numeric_limits<double>::infinity());
    for (const auto& x : orbit.profile) {
        for (int k = 0; k < 3; ++k) {
            r.lower_margin[k] = std::min(r.lower_margin[k], x[k]);
            r.upper_margin[k] = std::min(r.upper_margin[k], box[k] - x[k]);
        }
    }
    for (int k = 0; k < 3; ++k) {
        if (!(r.lower_margin[k] > 0.0)) r.violations.push_back(std::string(names[k]) + " is not strictly positive");
        if (!(r.upper_margin[k] >= -slack)) r.violations.push_back(std::string(names[k]) + " exceeds its box bound");
    }
    r.pass = r.violations.empty();
    return r;
}

namespace {

using Complex = std::complex<double>;

/// Coefficients c_k = (1/M) sum_j v_j exp(-i k s_j), k = 0..modes.
std::vector<Complex> dft(const std::vector<double>& v, int modes) {
    const auto m = static_cast<int>(v.size());
    std::vector<Complex> c(static_cast<std::size_t>(modes) + 1);
    for (int k = 0; k <= modes; ++k) {
        Complex acc = 0.0;
        for (int j = 0; j < m; ++j) {
            const long idx = (static_cast<long>(k) * j) % m;
            acc += v[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * idx / m);
        }
        c[static_cast<std::size_t>(k)] = acc / static_cast<double>(m);
    }
    return c;
}

/// Real trigonometric series sum_{|k|<=modes} c_k exp(i k s); the Nyquist
/// term (2 * modes == M) is counted once.
double synthesize(const std::vector<Complex>& c, int modes, int m, double s) {
    double acc = c[0].real();
    for (int k = 1; k <= modes; ++k) {
        const double weight = (2 * k == m) ? 1.0 : 2.0;
        acc += weight * (c[static_cast<std::size_t>(k)] * std::polar(1.0, k * s)).real();
    }
    return acc;
}

}  // namespace

double fourier_residual(const PeriodicOrbit& orbit, const ModelDefinition& model, double sigma, int modes) {
    const auto m = static_cast<int>(orbit.profile.size());
    const int n = model.dimension();
    if (modes < 0 || 2 * modes > m)
        throw ModeOverflow("requested " + std::to_string(modes) + " modes with " + std::to_string(m) + " samples");
    const double beta = orbit.beta;

    std::vector<std::vector<Complex>> coeff(static_cast<std::size_t>(n));
    Vec mean(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> comp(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) comp[static_cast<std::size_t>(j)] = orbit.profile[static_cast<std::size_t>(j)][i];
        coeff[static_cast<std::size_t>(i)] = dft(comp, modes);
        mean[i] = coeff[static_cast<std::size_t>(i)][0].real();
    }

    std::vector<std::vector<double>> w(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
    for (int j = 0; j < m; ++j) {
        const double s = 2.0 * std::numbers::pi * j / m;
        const double lagged = s - beta * orbit.tau_profile[static_cast<std::size_t>(j)];
        Vec delayed(n);
        for (int i = 0; i < n; ++i) delayed[i] = synthesize(coeff[static_cast<std::size_t>(i)], modes, m, lagged);
        const Vec rhs = model.rhs(orbit.profile[static_cast<std::size_t>(j)], delayed, sigma) / beta + mean;
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rhs[i];
    }

    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
        auto d = dft(w[static_cast<std::size_t>(i)], modes);
        // (L0 + K)^-1: the mean passes through, mode k != 0 is divided by i k.
        for (int k = 1; k <= modes; ++k) d[static_cast<std::size_t>(k)] /= Complex(0.0, k);
        for (int j = 0; j < m; ++j) {
            const double s = 2.0 * std::numbers::pi * j / m;
            const double image = synthesize(d, modes, m, s);
            residual = std::max(residual, std::abs(orbit.profile[static_cast<std::size_t>(j)][i] - image));
        }
    }
    return residual;
}

int sign_det_sum(const ModelDefinition& model, double sigma, const Vec& guess) {
    const auto st = solve_stationary(model, sigma, guess);
    if (!st.s3_ok) throw SingularAtStationary("d1f + d2f is singular at the stationary state");
    return st.det_sum > 0.0 ? 1 : -1;
}

int goodwin_sign_det_sum(const GoodwinParameters& p) {
    const auto st = goodwin_stationary(p);
    if (!st.s3_ok) throw SingularAtStationary("d1f + d2f is singular at the Goodwin equilibrium");
    return st.det_sum > 0.0 ? 1 : -1;
}

std::string to_string(BranchClass c) {
    switch (c) {
        case BranchClass::PeriodGrowth: return "PERIOD_GROWTH";
        case BranchClass::ParameterExit: return "PARAMETER_EXIT";
        case BranchClass::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

unsigned configured_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SDD_HOPF_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return std::min<unsigned>(static_cast<unsigned>(v), hw);
    }
    return hw;
}

namespace {

Vec initial_offset(const GoodwinParameters& q, const StationaryState& st, double max_re, double size) {
    Vec offset = Vec::Zero(3);
    offset[0] = size;
    if (!(max_re > 0.0)) return offset;
    const auto jac = goodwin_jacobians(st.x, st.x, q);
    Eigen::EigenSolver<Mat> es(jac.d1f + jac.d2f);
    Eigen::Index lead = 0;
    es.eigenvalues().real().maxCoeff(&lead);
    Eigen::VectorXcd v = es.eigenvectors().col(lead);
    Vec dir = v.real();
    if (dir.lpNorm<Eigen::Infinity>() < 1e-8) dir = v.imag();
    return size * dir / dir.lpNorm<Eigen::Infinity>();
}


}  // namespace

BranchPoint branch_point(const GoodwinParameters& p, double alpha, const IntegratorConfig& integ,
                         const OrbitDetectionConfig& orbit_cfg, const BranchScanConfig& scan_cfg) {
    BranchPoint bp;
    bp.alpha_m = alpha;
    try {
        const auto q = p.with_alpha_m(alpha);
        const auto st = goodwin_stationary(q);
        bp.max_real_part = goodwin_eigenvalues(q, st).roots[0].real();
        bp.epsilon = goodwin_sign_det_sum(q);

        const auto model = make_goodwin_model(p);
        const Vec x0 = st.x + initial_offset(q, st, bp.max_real_part, scan_cfg.perturbation);
        const auto traj = integrate(model, alpha, InitialHistory::constant(x0), 0.0, scan_cfg.t_end, integ);
        const auto det = detect_orbit(traj, equilibrium_section(st.x), orbit_cfg, &model);
        if (!det.orbit) {
            bp.diagnostic = det.reason;
            return bp;
        }
        const auto& orbit = *det.orbit;
        bp.detected = true;
        bp.period = orbit.period;
        bp.amplitude = orbit.amplitude;
        bp.tau_sup = orbit.tau_sup;
        bp.tau_dot_sup = orbit.tau_dot_sup;
        bp.xdot_sup = orbit.xdot_sup;
        bp.box_ok = box_bounds_check(orbit, q).pass;
        const auto lip = lipschitz_constants(q);
        bp.bounds = period_bounds(lip.L_f, lip.L_g, {orbit.tau_sup, orbit.tau_dot_sup, orbit.xdot_sup, true});
        bp.bounds_ok = bp.bounds.satisfied_by(orbit.period);
        bp.fourier_residual = fourier_residual(orbit, model, alpha, scan_cfg.fourier_modes);
        bp.contraction_margin =
            contraction_margin(model, traj.history, alpha, orbit.t_start, orbit.t_start + orbit.period, 512);
    } catch (const Error& e) {
        bp.failed = true;
        bp.detected = false;
        bp.diagnostic = e.what();
    }
    return bp;
}

BranchScan branch_scan(const GoodwinParameters& p, const std::vector<double>& alpha_grid, const IntegratorConfig& integ,
                       const OrbitDetectionConfig& orbit_cfg, const BranchScanConfig& scan_cfg) {
    if (alpha_grid.empty()) throw std::invalid_argument("branch scan grid is empty");
    for (double a : alpha_grid)
        if (!(a > 0.0 && a < 1.0 / p.c)) throw std::invalid_argument("branch scan grid must lie inside (0, 1/c)");
    if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()))
        throw std::invalid_argument("branch scan grid must be increasing");

    BranchScan scan;
    const auto cert = find_critical(p);
    scan.alpha_m_star = cert.exists ? cert.alpha_m_star : 0.0;
    const double v = cert.exists ? cert.v_star : std::sqrt(critical_frequency_squared(p));
    scan.period_proxy = scan_cfg.period_growth_factor * 2.0 * std::numbers::pi / v;

    scan.points.resize(alpha_grid.size());
    const unsigned threads =
        std::min<unsigned>(scan_cfg.threads ? scan_cfg.threads : configured_threads(), static_cast<unsigned>(alpha_grid.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < alpha_grid.size(); i = next++)
            scan.points[i] = branch_point(p, alpha_grid[i], integ, orbit_cfg, scan_cfg);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    double max_period = 0.0;
    std::ptrdiff_t first_detected = -1;
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        if (!scan.points[i].detected) continue;
        max_period = std::max(max_period, scan.points[i].period);
        if (first_detected < 0) first_detected = static_cast<std::ptrdiff_t>(i);
    }
    if (first_detected >= 0 && max_period > scan.period_proxy) {
        scan.classification = BranchClass::PeriodGrowth;
    } else if (first_detected >= 0) {
        bool contiguous = true;
        for (auto i = static_cast<std::size_t>(first_detected); i < scan.points.size(); ++i)
            contiguous = contiguous && scan.points[i].detected;
        const double last = alpha_grid.back();
        const double spacing = alpha_grid.size() > 1 ? last - alpha_grid[alpha_grid.size() - 2] : 0.0;
        const bool near_exit = 1.0 / p.c - last <= spacing * (1.0 + 1e-9);
        if (contiguous && near_exit) scan.classification = BranchClass::ParameterExit;
    }
    return scan;
}

}  // namespace sddhopf
