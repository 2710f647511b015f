#include "ikam/reference_orbit.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "ikam/detail/rk.hpp"
#include "ikam/numeric.hpp"

namespace ikam {

namespace {

// Quintic Hermite basis on s in [0,1]: value, first and second derivative
// matched at both interval ends, so the piecewise interpolant is C^2 and the
// local error is O(h^6).
struct QuinticWeights {
    double h0, h1, h2, h3, h4, h5;
};

QuinticWeights quintic(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    return {1 - 10 * s3 + 15 * s4 - 6 * s5,
            s - 6 * s3 + 8 * s4 - 3 * s5,
            0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
            10 * s3 - 15 * s4 + 6 * s5,
            -4 * s3 + 7 * s4 - 3 * s5,
            0.5 * s3 - s4 + 0.5 * s5};
}

QuinticWeights quintic_deriv(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    return {-30 * s2 + 60 * s3 - 30 * s4,
            1 - 18 * s2 + 32 * s3 - 15 * s4,
            s - 4.5 * s2 + 6 * s3 - 2.5 * s4,
            30 * s2 - 60 * s3 + 30 * s4,
            -12 * s2 + 28 * s3 - 15 * s4,
            1.5 * s2 - 4 * s3 + 2.5 * s4};
}

} // namespace

double ReferenceOrbit::compute_period(int n) {
    if (n < 1) throw DomainError("degree must be >= 1");
    using boost::math::quadrature::gauss_kronrod;
    const int m = 2 * n + 2;

    // T0 = 4 sqrt(n+1) * I with I = int_0^1 (1 - x^m)^(-1/2) dx. The
    // integrand has an inverse-square-root endpoint singularity at x = 1;
    // substituting x = 1 - u^2 there turns both pieces smooth:
    //   I = int_0^{1/2} (1 - x^m)^(-1/2) dx
    //     + int_0^{sqrt(1/2)} 2 (sum_{k<m} (1-u^2)^k)^(-1/2) du.
    auto direct = [m](double x) { return 1.0 / std::sqrt(1.0 - ipow(x, m)); };
    auto desingularized = [m](double u) {
        const double w = 1.0 - u * u;
        double geom = 0.0, wk = 1.0;
        for (int k = 0; k < m; ++k) {
            geom += wk;
            wk *= w;
        }
        return 2.0 / std::sqrt(geom);
    };

    const double part1 =
        gauss_kronrod<double, 61>::integrate(direct, 0.0, 0.5, 12, 1e-14);
    const double part2 =
        gauss_kronrod<double, 61>::integrate(desingularized, 0.0, std::sqrt(0.5), 12, 1e-14);
    return 4.0 * std::sqrt(static_cast<double>(n + 1)) * (part1 + part2);
}

ReferenceOrbit::ReferenceOrbit(int n, int min_nodes_per_period) : n_(n) {
    if (n < 1) throw DomainError("degree must be >= 1");
    T0_ = compute_period(n);
    int intervals_half = std::max(min_nodes_per_period, 2) / 2;
    for (int attempt = 0; attempt < 4; ++attempt) {
        build(intervals_half);
        if (max_defect(3) < 1e-11) return;
        intervals_half *= 2;
    }
    throw Error("reference orbit interpolant failed to reach the defect target");
}

void ReferenceOrbit::build(int intervals_half) {
    const double half = T0_ / 2.0;
    dt_ = half / intervals_half;
    xs_.assign(intervals_half + 1, 0.0);
    ys_.assign(intervals_half + 1, 0.0);

    auto rhs = [this](const std::array<double, 2>& s, std::array<double, 2>& d, double) {
        d[0] = s[1];
        d[1] = -ipow(s[0], 2 * n_ + 1);
    };

    std::array<double, 2> state{1.0, 0.0};
    xs_[0] = 1.0;
    ys_[0] = 0.0;
    double dt = dt_;
    for (int i = 1; i <= intervals_half; ++i) {
        detail::rk_advance(rhs, state, (i - 1) * dt_, i * dt_, 1e-13, 1e-13, 0.0, dt);
        xs_[i] = state[0];
        ys_[i] = state[1];
    }
    // Pin the half-period turning point; its exact value is known.
    xs_[intervals_half] = -1.0;
    ys_[intervals_half] = 0.0;
}

std::pair<double, double> ReferenceOrbit::eval_half(double t) const {
    const int last = static_cast<int>(xs_.size()) - 2;
    int i = std::clamp(static_cast<int>(t / dt_), 0, last);
    const double s = (t - i * dt_) / dt_;
    const auto w = quintic(s);
    const double xl = xs_[i], yl = ys_[i];
    const double xr = xs_[i + 1], yr = ys_[i + 1];
    // Derivatives at the nodes follow from the equation of motion.
    const double dxl = yl, dxr = yr;
    const double dyl = -ipow(xl, 2 * n_ + 1), dyr = -ipow(xr, 2 * n_ + 1);
    const double d2xl = dyl, d2xr = dyr;
    const double d2yl = -(2 * n_ + 1) * ipow(xl, 2 * n_) * yl;
    const double d2yr = -(2 * n_ + 1) * ipow(xr, 2 * n_) * yr;
    const double h = dt_, h2 = dt_ * dt_;
    const double x = w.h0 * xl + w.h1 * h * dxl + w.h2 * h2 * d2xl +
                     w.h3 * xr + w.h4 * h * dxr + w.h5 * h2 * d2xr;
    const double y = w.h0 * yl + w.h1 * h * dyl + w.h2 * h2 * d2yl +
                     w.h3 * yr + w.h4 * h * dyr + w.h5 * h2 * d2yr;
    return {x, y};
}

std::pair<double, double> ReferenceOrbit::eval_half_deriv(double t) const {
    const int last = static_cast<int>(xs_.size()) - 2;
    int i = std::clamp(static_cast<int>(t / dt_), 0, last);
    const double s = (t - i * dt_) / dt_;
    const auto w = quintic_deriv(s);
    const double xl = xs_[i], yl = ys_[i];
    const double xr = xs_[i + 1], yr = ys_[i + 1];
    const double dxl = yl, dxr = yr;
    const double dyl = -ipow(xl, 2 * n_ + 1), dyr = -ipow(xr, 2 * n_ + 1);
    const double d2xl = dyl, d2xr = dyr;
    const double d2yl = -(2 * n_ + 1) * ipow(xl, 2 * n_) * yl;
    const double d2yr = -(2 * n_ + 1) * ipow(xr, 2 * n_) * yr;
    const double h = dt_, h2 = dt_ * dt_;
    const double dx = (w.h0 * xl + w.h1 * h * dxl + w.h2 * h2 * d2xl +
                       w.h3 * xr + w.h4 * h * dxr + w.h5 * h2 * d2xr) / h;
    const double dy = (w.h0 * yl + w.h1 * h * dyl + w.h2 * h2 * d2yl +
                       w.h3 * yr + w.h4 * h * dyr + w.h5 * h2 * d2yr) / h;
    return {dx, dy};
}

std::pair<double, double> ReferenceOrbit::eval(double t) const {
    double r = std::fmod(t, T0_);
    if (r < 0.0) r += T0_;
    if (r <= T0_ / 2.0) return eval_half(r);
    auto [x, y] = eval_half(T0_ - r);
    return {x, -y};
}

std::pair<double, double> ReferenceOrbit::eval_derivative(double t) const {
    double r = std::fmod(t, T0_);
    if (r < 0.0) r += T0_;
    if (r <= T0_ / 2.0) return eval_half_deriv(r);
    auto [dx, dy] = eval_half_deriv(T0_ - r);
    return {-dx, dy};
}

double ReferenceOrbit::max_defect(int probes_per_interval) const {
    double worst = 0.0;
    const int np1 = n_ + 1;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        for (int p = 1; p <= probes_per_interval; ++p) {
            const double t = (static_cast<double>(i) + p / (probes_per_interval + 1.0)) * dt_;
            auto [x, y] = eval_half(t);
            worst = std::max(worst, std::abs(np1 * y * y + ipow(x, 2 * n_ + 2) - 1.0));
        }
    }
    return worst;
}

double ReferenceOrbit::invert_x(double u, Half half) const {
    if (std::abs(u) > 1.0 + 1e-12) throw DomainError("reference-orbit inverse requires |u| <= 1");
    u = std::clamp(u, -1.0, 1.0);
    const double half_period = T0_ / 2.0;

    double t;
    if (u == 1.0) {
        t = 0.0;
    } else if (u == -1.0) {
        t = half_period;
    } else {
        // x0 falls monotonically from 1 to -1 on [0, T0/2]. Bisect to a small
        // bracket, then polish with Newton (dx0/dt = y0); near the turning
        // points y0 vanishes and bisection alone finishes the job.
        double lo = 0.0, hi = half_period;
        for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eval_half(mid).first > u ? lo : hi) = mid;
        }
        t = 0.5 * (lo + hi);
        for (int it = 0; it < 12; ++it) {
            auto [x, y] = eval_half(t);
            const double f = x - u;
            if (std::abs(f) < 5e-16 || y == 0.0) break;
            double step = f / y; // Newton: solve x0(t) = u, dx0/dt = y0
            const double tn = t - step;
            if (tn <= lo || tn >= hi) {
                // Newton left the bracket; fall back to a bisection move.
                (f > 0.0 ? lo : hi) = t;
                t = 0.5 * (lo + hi);
            } else {
                (f > 0.0 ? lo : hi) = t;
                t = tn;
            }
            if (std::abs(step) < 1e-16 * half_period) break;
        }
        // Final safeguarded bisection in case Newton stalled near a turning point.
        if (std::abs(eval_half(t).first - u) > 1e-13) {
            while (hi - lo > 4e-17 * half_period) {
                const double mid = 0.5 * (lo + hi);
                (eval_half(mid).first > u ? lo : hi) = mid;
            }
            t = 0.5 * (lo + hi);
        }
    }
    return half == Half::lower ? t : T0_ - t;
}

} // namespace ikam
