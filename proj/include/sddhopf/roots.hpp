#pragma once

#include <cmath>
#include <optional>

namespace sddhopf::roots {

/// Bisection on [lo, hi] for a function with fn(lo) * fn(hi) <= 0. Stops when
/// the bracket is narrower than xtol or fn hits zero exactly. Returns nullopt
/// when the endpoints do not bracket a sign change.
template <class Fn>
std::optional<double> bisect(Fn&& fn, double lo, double hi, double xtol = 0.0, int max_iter = 200) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) return std::nullopt;
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= xtol) break;
        const double fmid = fn(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Safeguarded Newton inside a bracket: takes the Newton step when it stays
/// inside [lo, hi], bisects otherwise. `fn` returns {value, derivative}.
template <class Fn>
std::optional<double> newton_bracketed(Fn&& fn, double lo, double hi, double ftol, int max_iter = 200) {
    auto [flo, dlo] = fn(lo);
    auto [fhi, dhi] = fn(hi);
    (void)dlo;
    (void)dhi;
    if (std::abs(flo) <= ftol) return lo;
    if (std::abs(fhi) <= ftol) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) return std::nullopt;
    const bool increasing = flo < 0.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [fx, dx] = fn(x);
        if (std::abs(fx) <= ftol) return x;
        if ((fx < 0.0) == increasing) lo = x; else hi = x;
        double next = (dx != 0.0) ? x - fx / dx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) return x;
        x = next;
    }
    return x;
}

}  // namespace sddhopf::roots
