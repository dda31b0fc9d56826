#pragma once

#include "sddhopf/hopf.hpp"
#include "sddhopf/integrator.hpp"
#include "sddhopf/model.hpp"
#include "sddhopf/stationary.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sddhopf {

/// Hyperplane {x : normal . (x - point) = 0}, crossed in the direction
/// normal . x' > 0.
struct Section {
    Vec point;
    Vec normal;
};

struct OrbitDetectionConfig {
    double transient_fraction = 0.6;
    int returns = 5;               ///< K: period is the mean of the last K return times
    int samples = 256;             ///< M: profile resolution over one period
    double max_return_spread = 1e-5;
    double max_closure = 1e-6;     ///< relative to the largest component amplitude
};

/// One period of a detected orbit resampled on a uniform grid.
struct PeriodicOrbit {
    double period = 0.0;
    double beta = 0.0;  ///< 2 pi / period
    double t_start = 0.0;
    std::vector<Vec> profile;            ///< x at t_start + j period / M
    std::vector<Vec> derivative_profile;
    std::vector<double> tau_profile;
    std::vector<double> tau_dot_profile;
    Vec amplitude;                       ///< (max - min) / 2 per component
    double tau_sup = 0.0;
    double tau_dot_sup = 0.0;
    double xdot_sup = 0.0;               ///< sup over time of the max-norm of x'
    double return_residual = 0.0;        ///< |x(t_start + period) - x(t_start)|_inf
    double return_spread = 0.0;          ///< (max - min) / mean of the last K return times
};

struct DetectionResult {
    std::optional<PeriodicOrbit> orbit;
    int crossings = 0;
    double return_spread = 0.0;
    double closure = 0.0;
    std::string reason;  ///< why detection was rejected (empty when accepted)
};

/// Builds an orbit record from uniform samples of one period (tests,
/// externally computed profiles); derivative and delay profiles may be empty.
[[nodiscard]] PeriodicOrbit make_orbit(double period, std::vector<Vec> profile, std::vector<double> tau_profile = {},
                                       std::vector<Vec> derivative_profile = {},
                                       std::vector<double> tau_dot_profile = {});

/// Poincare-section return-time analysis after discarding the transient.
[[nodiscard]] DetectionResult detect_orbit(const Trajectory& traj, const Section& section,
                                           const OrbitDetectionConfig& cfg = {}, const ModelDefinition* model = nullptr);

/// Section through `equilibrium` with normal along the first coordinate.
[[nodiscard]] Section equilibrium_section(const Vec& equilibrium);

struct SupNorms {
    double tau = 0.0;
    double tau_dot = 0.0;
    double xdot = 0.0;
    bool tau_differentiable = true;
};

/// Lower bounds on the minimal period; nullopt marks an unmet hypothesis.
struct PeriodBounds {
    std::optional<double> i_printed;    ///< 2 / (1 - 2 L_f |tau|)
    std::optional<double> i_rederived;  ///< 2 (1 - 2 L_f |tau|) / L_f
    std::optional<double> ii;           ///< 4 / (L_f (2 + |tau'|))
    std::optional<double> iii;          ///< 2 (1 - L_g |x'|) / L_f

    /// True when the period satisfies every applicable bound, using the
    /// re-derived form of bound (i).
    [[nodiscard]] bool satisfied_by(double period) const;
};

[[nodiscard]] PeriodBounds period_bounds(double L_f, double L_g, const SupNorms& norms);

struct BoxReport {
    bool pass = false;
    Vec lower_margin;  ///< min sample per component (must be > 0)
    Vec upper_margin;  ///< bound - max sample per component (must be >= -slack)
    std::vector<std::string> violations;
};

[[nodiscard]] Vec goodwin_box(const GoodwinParameters& p);
[[nodiscard]] BoxReport box_bounds_check(const PeriodicOrbit& orbit, const GoodwinParameters& p, double slack = 1e-9);

/// Sup-norm distance between the orbit (rescaled to period 2 pi) and its image
/// under y -> (L0 + K)^-1 [ f(y(t), y(t - beta z(t)), sigma) / beta + K y ],
/// with delayed values from trigonometric interpolation truncated at `modes`.
/// Throws ModeOverflow when modes exceeds M/2.
[[nodiscard]] double fourier_residual(const PeriodicOrbit& orbit, const ModelDefinition& model, double sigma, int modes);

/// sgn det(d1f + d2f) at a stationary state; throws SingularAtStationary.
[[nodiscard]] int sign_det_sum(const ModelDefinition& model, double sigma, const Vec& guess);
[[nodiscard]] int goodwin_sign_det_sum(const GoodwinParameters& p);

enum class BranchClass { PeriodGrowth, ParameterExit, Inconclusive };
[[nodiscard]] std::string to_string(BranchClass c);

struct BranchPoint {
    double alpha_m = 0.0;
    bool detected = false;
    bool failed = false;
    std::string diagnostic;
    double period = 0.0;
    Vec amplitude = Vec::Zero(3);
    double max_real_part = 0.0;
    PeriodBounds bounds;
    bool bounds_ok = false;
    bool box_ok = false;
    double fourier_residual = 0.0;
    int epsilon = 0;
    double tau_sup = 0.0;
    double tau_dot_sup = 0.0;
    double xdot_sup = 0.0;
    double contraction_margin = 0.0;
};

struct BranchScan {
    std::vector<BranchPoint> points;
    BranchClass classification = BranchClass::Inconclusive;
    double period_proxy = 0.0;  ///< detected periods above this indicate period growth
    double alpha_m_star = 0.0;  ///< 0 when no critical point exists
};

struct BranchScanConfig {
    double t_end = 400.0;
    double perturbation = 1e-3;
    int fourier_modes = 64;
    double period_growth_factor = 50.0;
    unsigned threads = 0;  ///< 0 reads SDD_HOPF_THREADS, then hardware concurrency
};

/// Integrates from the stationary state offset along the unstable direction
/// and runs the orbit validity checks at one parameter value.
[[nodiscard]] BranchPoint branch_point(const GoodwinParameters& p, double alpha_m, const IntegratorConfig& integ,
                                       const OrbitDetectionConfig& orbit_cfg, const BranchScanConfig& scan_cfg = {});

[[nodiscard]] BranchScan branch_scan(const GoodwinParameters& p, const std::vector<double>& alpha_grid,
                                     const IntegratorConfig& integ, const OrbitDetectionConfig& orbit_cfg,
                                     const BranchScanConfig& scan_cfg = {});

/// Thread count from SDD_HOPF_THREADS, capped by hardware concurrency.
[[nodiscard]] unsigned configured_threads();

}  // namespace sddhopf
