#ifndef IKAM_DETAIL_RK_HPP
#define IKAM_DETAIL_RK_HPP

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "ikam/errors.hpp"

namespace ikam::detail {

inline constexpr double blow_up_threshold = 1e12;

// Adaptive 8th(7th)-order Runge-Kutta propagation of `state` from t0 to t1.
// Steps are clamped so the final accepted step lands exactly on t1; the
// impulse schedule relies on that exactness. `dt` is carried between calls so
// consecutive segments keep their step-size history.
template <std::size_t N, class Rhs>
void rk_advance(Rhs&& rhs, std::array<double, N>& state, double t0, double t1,
                double rtol, double atol, double max_step, double& dt) {
    namespace odeint = boost::numeric::odeint;
    using state_type = std::array<double, N>;

    if (t1 < t0) throw FlowError(FlowError::Kind::non_finite, t0, "backward integration span");
    if (t1 == t0) return;

    auto stepper = odeint::make_controlled(atol, rtol, odeint::runge_kutta_fehlberg78<state_type>());

    double t = t0;
    if (!(dt > 0.0)) dt = 1e-3;
    int consecutive_failures = 0;
    while (t < t1) {
        const double remaining = t1 - t;
        bool final_step = false;
        if (max_step > 0.0 && dt > max_step) dt = max_step;
        if (dt >= remaining) {
            dt = remaining;
            final_step = true;
        }
        const auto result = stepper.try_step(rhs, state, t, dt);
        if (result == odeint::success) {
            consecutive_failures = 0;
            if (final_step) t = t1; // absorb the last ulp of t accumulation
            double norm1 = 0.0;
            bool finite = true;
            for (double v : state) {
                norm1 += std::abs(v);
                finite = finite && std::isfinite(v);
            }
            if (!finite) throw FlowError(FlowError::Kind::non_finite, t, "non-finite state during integration");
            if (norm1 > blow_up_threshold)
                throw FlowError(FlowError::Kind::blow_up, t, "solution exceeded the blow-up threshold");
        } else {
            if (++consecutive_failures > 60 || dt < 1e-15 * std::max(1.0, std::abs(t)))
                throw FlowError(FlowError::Kind::step_underflow, t,
                                "step size underflow at t = " + std::to_string(t));
        }
    }
}

} // namespace ikam::detail

#endif
