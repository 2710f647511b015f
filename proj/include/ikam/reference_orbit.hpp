#ifndef IKAM_REFERENCE_ORBIT_HPP
#define IKAM_REFERENCE_ORBIT_HPP

#include <utility>
#include <vector>

#include "ikam/errors.hpp"

namespace ikam {

// The closed orbit of the unperturbed oscillator with restoring force
// x^(2n+1), pinned at (x, y) = (1, 0). All nonzero solutions of that system
// are rescalings of this one, so the pair (x0, y0) together with the minimal
// period carries the whole unperturbed phase portrait:
//
//   x0' = y0,  y0' = -x0^(2n+1),  (n+1) y0^2 + x0^(2n+2) = 1.
//
// Construction integrates the half period [0, T0/2] (x0 falls monotonically
// from 1 to -1 there) to near machine accuracy on a uniform grid and stores a
// piecewise quintic Hermite interpolant; the second half is recovered from the
// even/odd symmetry of (x0, y0), which also makes the periodic extension
// exact. Immutable after construction, safe for concurrent reads.
class ReferenceOrbit {
public:
    enum class Half { lower, upper };

    explicit ReferenceOrbit(int n, int min_nodes_per_period = 2048);

    int degree() const { return n_; }
    double period() const { return T0_; }

    // Minimal period by quadrature of the energy relation. The independent
    // route used to cross-check the orbit construction.
    static double compute_period(int n);

    // Periodic evaluation for any t.
    std::pair<double, double> eval(double t) const;

    // d/dt of the interpolant (diagnostic; the flow itself never uses this).
    std::pair<double, double> eval_derivative(double t) const;

    // Solves x0(t) = u on the monotone branch t in [0, T0/2] where y0 <= 0
    // (Half::lower); Half::upper mirrors to [T0/2, T0] where y0 >= 0.
    // Converges to ~1e-14 absolute in t. Throws DomainError if |u| > 1.
    double invert_x(double u, Half half = Half::lower) const;

private:
    int n_;
    double T0_;
    double dt_;                    // node spacing on [0, T0/2]
    std::vector<double> xs_, ys_;  // node values on [0, T0/2]

    void build(int intervals_half);
    double max_defect(int probes_per_interval) const;
    std::pair<double, double> eval_half(double t) const;      // t in [0, T0/2]
    std::pair<double, double> eval_half_deriv(double t) const;
};

} // namespace ikam

#endif
