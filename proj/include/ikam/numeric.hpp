#ifndef IKAM_NUMERIC_HPP
#define IKAM_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace ikam {

struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    double det() const { return a11 * a22 - a12 * a21; }

    static Mat2 identity() { return {}; }

    // this * other (composition: apply `other` first)
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
};

inline double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// Central difference with one Richardson extrapolation level.
// step == 0 selects the default 1e-5 * max(1, |at|).
template <class F>
double central_derivative(F&& f, double at, double step = 0.0) {
    const double h = step > 0.0 ? step : 1e-5 * std::max(1.0, std::abs(at));
    const double d1 = (f(at + h) - f(at - h)) / (2.0 * h);
    const double d2 = (f(at + h / 2.0) - f(at - h / 2.0)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / d;
}

// Slope of log10(y) vs log10(x); caller guarantees positive values.
inline double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log10(x[i]);
        ly[i] = std::log10(y[i]);
    }
    return fit_slope(lx, ly);
}

// Static-partition parallel for. Results must be written to disjoint,
// pre-sized slots so the reduction order never depends on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace ikam

#endif
