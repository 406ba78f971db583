#ifndef TWORV_QUADRATURE_HPP
#define TWORV_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "tworv/error.hpp"

namespace tworv::quad {

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel kronrod_panel(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodNodes[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        k += kKronrodWeights[i] * fsum;
        if (i % 2 == 1) g += kGaussWeights[i / 2] * fsum;
    }
    const double fc = f(mid);
    k += kKronrodWeights[7] * fc;
    g += kGaussWeights[3] * fc;
    k *= h;
    g *= h;
    return {a, b, k, std::fabs(k - g)};
}

} // namespace detail

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_panels = 4000;
};

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
template <typename F>
double integrate(const F& f, double a, double b, Options opt = {}) {
    if (a == b) return 0.0;
    std::priority_queue<detail::Panel> heap;
    detail::Panel whole = detail::kronrod_panel(f, a, b);
    double total = whole.value, total_err = whole.error;
    heap.push(whole);
    int used = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
        if (used >= opt.max_panels)
            throw NumericalError("integrate: panel budget exhausted, error " +
                                 std::to_string(total_err) + " over [" + std::to_string(a) +
                                 ", " + std::to_string(b) + "] after " +
                                 std::to_string(used) + " panels");
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) continue;  // interval at machine resolution
        detail::Panel left = detail::kronrod_panel(f, worst.a, mid);
        detail::Panel right = detail::kronrod_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++used;
    }
    return total;
}

/// Integral of f over [a, +inf), mapped through t -> a + t/(1-t) onto [0, 1).
template <typename F>
double integrate_right_tail(const F& f, double a, Options opt = {}) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        const double x = a + t / om;
        return f(x) / (om * om);
    };
    return integrate(g, 0.0, 1.0 - 1e-14, opt);
}

/// Integral over the whole real line, split at zero.
template <typename F>
double integrate_real_line(const F& f, Options opt = {}) {
    auto mirrored = [&](double x) { return f(-x); };
    return integrate_right_tail(f, 0.0, opt) + integrate_right_tail(mirrored, 0.0, opt);
}

} // namespace tworv::quad

#endif
