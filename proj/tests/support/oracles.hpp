#ifndef TWORV_TEST_ORACLES_HPP
#define TWORV_TEST_ORACLES_HPP

// Independent oracles used by the test suites: direct quadrature of defining
// integrals, contour quadrature for the complex incomplete gamma, exhaustive
// grid search for the moment fit, and sample statistics. These deliberately
// avoid the library's closed-form code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "tworv/fit.hpp"
#include "tworv/quadrature.hpp"
#include "tworv/rmm.hpp"

namespace oracles {

using Complex = std::complex<double>;

/// Gamma(s, x) by quadrature along the ray t = x + u, u in [0, inf), with
/// principal powers (the ray stays on one side of the branch cut; for x on
/// the negative real axis the limit from above is taken, matching the
/// principal convention arg(x) = +pi).
inline Complex upper_gamma_contour(Complex s, Complex x) {
    // the e^{-x} scale is factored out so the quadrature tolerances act on
    // the O(1) shape integral rather than a possibly underflowing magnitude
    auto integrand = [&](double u) -> Complex {
        const Complex t = x + u;
        return std::exp((s - 1.0) * std::log(t) - u);
    };
    tworv::quad::Options opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-13;
    opt.max_panels = 20000;
    const double re = tworv::quad::integrate_right_tail(
        [&](double u) { return integrand(u).real(); }, 1e-14, opt);
    const double im = tworv::quad::integrate_right_tail(
        [&](double u) { return integrand(u).imag(); }, 1e-14, opt);
    return std::exp(-x) * Complex{re, im};
}

/// Lower incomplete gamma for real s, x > 0 by quadrature of the defining
/// integral.
inline double lower_gamma_quadrature(double s, double x) {
    auto f = [&](double t) { return std::pow(t, s - 1.0) * std::exp(-t); };
    tworv::quad::Options opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-12;
    opt.max_panels = 20000;
    // integrable endpoint singularity for s < 1; split near zero
    const double cut = std::min(1e-6, 0.5 * x);
    double head = 0.0;
    if (s < 1.0) {
        // series for the head: int_0^c t^{s-1} e^{-t} ~ sum (-1)^n c^{s+n}/(n!(s+n))
        double term = std::pow(cut, s) / s, sum = term, pw = 1.0;
        for (int n = 1; n < 60; ++n) {
            pw *= -cut / n;
            sum += std::pow(cut, s) * pw / (s + n);
        }
        head = sum;
    } else {
        head = tworv::quad::integrate(f, 0.0, cut, opt);
    }
    return head + tworv::quad::integrate(f, cut, x, opt);
}

/// Moment of the normalized power-exponential density by direct quadrature
/// (independent of the closed-form moment path).
inline double density_moment_quadrature(int k, double alpha, double lambda, double L) {
    auto weighted = [&](int order) {
        auto f = [&](double z) {
            if (z < -L) return 0.0;
            const double p = tworv::rmm::signed_power(z, lambda);
            return std::pow(z, order) * std::exp(-(alpha / lambda) * (p - 1.0));
        };
        tworv::quad::Options opt;
        opt.abs_tol = 1e-13;
        opt.rel_tol = 1e-11;
        opt.max_panels = 20000;
        double total = tworv::quad::integrate_right_tail(f, 0.0, opt);
        if (L > 0.0) {
            // clip the left endpoint where the density has provably left the
            // scale of interest (decaying branch only)
            double lo = -L;
            const double c = tworv::rmm::branch_cos(lambda);
            if (c > 1e-8) {
                const double reach = std::pow(60.0 * lambda / (alpha * c), 1.0 / lambda);
                lo = -std::min(L, reach);
            }
            total += tworv::quad::integrate(f, lo, 0.0, opt);
        }
        return total;
    };
    return weighted(k) / weighted(0);
}

/// Exhaustive uniform grid search of the moment-fit objective; returns the
/// best objective value over an n^3 grid of the admissible box.
inline double fit_grid_search(const tworv::fit::MomentTarget& t, int n,
                              tworv::fit::Candidate* best_point = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double lam = 1.0 + (2.0 - 1.0) * i / double(n - 1);
        for (int j = 0; j < n; ++j) {
            const double m1 = t.mean * j / double(n - 1);
            for (int k = 0; k < n; ++k) {
                const double s2 = 1e-6 + (1.0 / 6.0 - 1e-6) * k / double(n - 1);
                const double v = tworv::fit::objective({lam, m1, s2}, t);
                if (v < best) {
                    best = v;
                    if (best_point) *best_point = {lam, m1, s2};
                }
            }
        }
    }
    return best;
}

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t n = 0;
};

inline SampleStats stats(const std::vector<double>& xs) {
    SampleStats s;
    s.n = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / double(xs.size() - 1);
    return s;
}

} // namespace oracles

#endif
