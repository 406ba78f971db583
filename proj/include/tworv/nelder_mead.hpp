#ifndef TWORV_NELDER_MEAD_HPP
#define TWORV_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace tworv::optim {

struct SimplexOptions {
    int max_iterations = 2000;
    double diameter_tol = 1e-9;
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead simplex minimization constrained to a box; candidate points are
/// clamped onto the box face before evaluation.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start,
                                 const std::vector<double>& lower,
                                 const std::vector<double>& upper,
                                 SimplexOptions opt = {}) {
    const size_t n = start.size();
    auto clamp = [&](std::vector<double>& x) {
        for (size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    };
    clamp(start);

    std::vector<std::vector<double>> pts(n + 1, start);
    for (size_t i = 0; i < n; ++i) {
        double h = 0.05 * (upper[i] - lower[i]);
        if (h == 0.0) h = 1e-4;
        pts[i + 1][i] += (pts[i + 1][i] + h <= upper[i]) ? h : -h;
        clamp(pts[i + 1]);
    }
    std::vector<double> vals(n + 1);
    for (size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    auto order = [&] {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> v2;
        for (size_t i : idx) { p2.push_back(pts[i]); v2.push_back(vals[i]); }
        pts.swap(p2);
        vals.swap(v2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (size_t i = 1; i <= n; ++i)
            for (size_t j = 0; j < n; ++j) d = std::max(d, std::fabs(pts[i][j] - pts[0][j]));
        return d;
    };

    SimplexResult res;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        order();
        if (diameter() < opt.diameter_tol) { res.converged = true; break; }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / double(n);

        auto blend = [&](double coeff) {
            std::vector<double> x(n);
            for (size_t j = 0; j < n; ++j) x[j] = centroid[j] + coeff * (centroid[j] - pts[n][j]);
            clamp(x);
            return x;
        };

        std::vector<double> xr = blend(opt.reflection);
        const double fr = f(xr);
        if (fr < vals[0]) {
            std::vector<double> xe = blend(opt.expansion);
            const double fe = f(xe);
            if (fe < fr) { pts[n] = xe; vals[n] = fe; }
            else { pts[n] = xr; vals[n] = fr; }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr; vals[n] = fr;
        } else {
            const bool outside = fr < vals[n];
            std::vector<double> xc;
            if (outside) {
                xc.resize(n);
                for (size_t j = 0; j < n; ++j) xc[j] = centroid[j] + opt.contraction * (xr[j] - centroid[j]);
            } else {
                xc.resize(n);
                for (size_t j = 0; j < n; ++j) xc[j] = centroid[j] + opt.contraction * (pts[n][j] - centroid[j]);
            }
            clamp(xc);
            const double fc = f(xc);
            if (fc < (outside ? fr : vals[n])) {
                pts[n] = xc; vals[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + opt.shrink * (pts[i][j] - pts[0][j]);
                    clamp(pts[i]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.value = vals[0];
    res.iterations = it;
    return res;
}

/// Low-discrepancy start points in the unit cube (additive Kronecker lattice).
inline std::vector<std::vector<double>> spread_starts(size_t dim, int count) {
    // golden-ratio style irrationals per axis
    static const double roots[] = {std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0,
                                   std::sqrt(5.0) - 2.0, std::sqrt(7.0) - 2.0,
                                   std::sqrt(11.0) - 3.0, std::sqrt(13.0) - 3.0};
    std::vector<std::vector<double>> out;
    for (int k = 0; k < count; ++k) {
        std::vector<double> x(dim);
        for (size_t j = 0; j < dim; ++j)
            x[j] = std::fmod(0.5 + (k + 1) * roots[j % 6], 1.0);
        out.push_back(std::move(x));
    }
    return out;
}

} // namespace tworv::optim

#endif
