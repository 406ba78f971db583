#ifndef TWORV_FIT_HPP
#define TWORV_FIT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tworv/error.hpp"
#include "tworv/nelder_mead.hpp"
#include "tworv/rmm.hpp"

namespace tworv::fit {

/// Observed first two moments of W.
struct MomentTarget {
    double mean = 1.0;
    double variance = 1.0;
};

inline void validate(const MomentTarget& t) {
    if (!(t.mean > 0.0)) throw ParameterError("MomentTarget: mean must be positive");
    if (!(t.variance > 0.0)) throw ParameterError("MomentTarget: variance must be positive");
}

struct FitConfig {
    int starts = 8;
    int max_iterations = 2000;
    double diameter_tol = 1e-9;
    double sigma2_min = 1e-6;
};

enum class FitStatus { Converged, MaxIterations, BoundaryHit };

inline std::string to_string(FitStatus s) {
    switch (s) {
        case FitStatus::Converged: return "Converged";
        case FitStatus::MaxIterations: return "MaxIterations";
        case FitStatus::BoundaryHit: return "BoundaryHit";
    }
    return "?";
}

struct FitResult {
    double lambda = 1.0;
    double M1 = 0.0;
    double sigma2 = 1e-6;
    double sigma1 = 1.0;
    double residual = 0.0;
    FitStatus status = FitStatus::Converged;
};

/// sigma1^2 = (Var(W) - E(W)^2 sigma2^2) / (1 + sigma2^2); empty if the
/// candidate sigma2 leaves no variance for the U component.
inline std::optional<double> sigma1_from(const MomentTarget& t, double sigma2) {
    const double s1sq =
        (t.variance - t.mean * t.mean * sigma2 * sigma2) / (1.0 + sigma2 * sigma2);
    if (!(s1sq > 0.0)) return std::nullopt;
    return std::sqrt(s1sq);
}

/// Candidate point of the moment-matching search.
struct Candidate {
    double lambda;
    double M1;
    double sigma2;
};

inline constexpr double kInfeasibleResidual = 5e5;

/// Residuals of the four moment equations at a candidate:
///   [E(Z1) - (mu1-M1)/sigma1,  E(Z1^2) - (1 + ((mu1-M1)/sigma1)^2),
///    E(Z2) - 0,                E(Z2^2) - 1]
/// with mu1 = observed mean, sigma1 from the variance identity, and the Z2
/// moments those of a standard normal truncated at -1/sigma2. Infeasible or
/// numerically unreachable candidates yield a uniform penalty vector growing
/// with the distance to feasibility.
inline std::array<double, 4> residual_vector(const Candidate& c, const MomentTarget& t) {
    validate(t);
    auto penalty = [&](double distance) {
        const double r = kInfeasibleResidual * (1.0 + distance);
        return std::array<double, 4>{r, r, r, r};
    };
    if (!(c.sigma2 > 0.0 && c.sigma2 <= 1.0 / 6.0) || !(c.M1 >= 0.0) ||
        !(c.lambda >= 1.0 && c.lambda <= 2.0))
        return penalty(1.0);
    const auto sigma1 = sigma1_from(t, c.sigma2);
    if (!sigma1) {
        const double deficit = (t.mean * t.mean * c.sigma2 * c.sigma2 - t.variance) / t.variance;
        return penalty(std::max(deficit, 0.0));
    }
    const double L2 = 1.0 / c.sigma2;
    const double z1 = rmm::raw_moment(1, 1.0, 2.0, L2);
    const double z2 = rmm::raw_moment(2, 1.0, 2.0, L2);

    const double alpha1 = 2.0 - c.lambda;
    double r1 = kInfeasibleResidual, r2 = kInfeasibleResidual;
    if (alpha1 > 0.0) {  // U component degenerates at lambda = 2
        try {
            const double L1 = c.M1 / *sigma1;
            const double m = (t.mean - c.M1) / *sigma1;
            const double e1 = rmm::raw_moment(1, alpha1, c.lambda, L1);
            const double e2 = rmm::raw_moment(2, alpha1, c.lambda, L1);
            r1 = e1 - m;
            r2 = e2 - (1.0 + m * m);
        } catch (const NumericalError&) {
        } catch (const DomainError&) {
        }
    }
    return {r1, r2, z1, z2 - 1.0};
}

/// Sum of squared moment-equation residuals.
inline double objective(const Candidate& c, const MomentTarget& t) {
    const auto r = residual_vector(c, t);
    return r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3];
}

/// Least-squares moment matching over (lambda, M1, sigma2) with multi-start
/// simplex search.
inline FitResult fit_two_component(const MomentTarget& t, const FitConfig& cfg = {}) {
    validate(t);
    const std::vector<double> lower{1.0, 0.0, cfg.sigma2_min};
    const std::vector<double> upper{2.0, t.mean, 1.0 / 6.0};

    auto f = [&](const std::vector<double>& x) {
        return objective({x[0], x[1], x[2]}, t);
    };

    optim::SimplexOptions sopt;
    sopt.max_iterations = cfg.max_iterations;
    sopt.diameter_tol = cfg.diameter_tol;

    optim::SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& unit : optim::spread_starts(3, cfg.starts)) {
        std::vector<double> start(3);
        for (int j = 0; j < 3; ++j) start[j] = lower[j] + unit[j] * (upper[j] - lower[j]);
        optim::SimplexResult r = optim::nelder_mead(f, start, lower, upper, sopt);
        if (r.value < best.value) best = r;
    }
    if (!std::isfinite(best.value))
        throw NumericalError("fit_two_component: non-finite residual");
    if (best.value >= kInfeasibleResidual * kInfeasibleResidual)
        throw FitError("fit_two_component: every start ended infeasible");

    FitResult out;
    out.lambda = best.x[0];
    out.M1 = best.x[1];
    out.sigma2 = best.x[2];
    out.sigma1 = *sigma1_from(t, out.sigma2);
    out.residual = best.value;
    bool on_edge = false;
    for (int j = 0; j < 3; ++j) {
        const double span = upper[j] - lower[j];
        if (best.x[j] - lower[j] < 1e-7 * span || upper[j] - best.x[j] < 1e-7 * span)
            on_edge = true;
    }
    out.status = !best.converged ? FitStatus::MaxIterations
                 : on_edge      ? FitStatus::BoundaryHit
                                : FitStatus::Converged;
    return out;
}

/// Target for the reduced approximation: match the density value at the mode
/// and the standardized mean.
struct ModeMeanTarget {
    double mode_density = 1.0;
    double standardized_mean = 1.0;
};

inline void validate(const ModeMeanTarget& t) {
    if (!(t.mode_density > 0.0))
        throw ParameterError("ModeMeanTarget: mode density must be positive");
}

struct ModeMeanResult {
    double alpha = 1.0;
    double lambda = 1.0;
    double kappa = 1.0;
    double residual = 0.0;
};

namespace detail {

// mode density without the quadrature cross-check: kappa e^{alpha/lambda}
// collapses to the reciprocal zeroth moment integral
inline double mode_density_closed(double alpha, double lambda, double L) {
    if (rmm::detail::complex_route_ok(alpha, lambda, L))
        return 1.0 / rmm::detail::assert_real(
                         rmm::detail::moment_core_complex(0, alpha, lambda, L), "mode_density");
    return 1.0 / rmm::detail::moment_core_series(0, alpha, lambda, L);
}

inline std::array<double, 2> mode_mean_residual(double alpha, double lambda,
                                                const ModeMeanTarget& t) {
    try {
        const double L = rmm::consistency_support_ratio(alpha, lambda);
        const double md = mode_density_closed(alpha, lambda, L);
        const double mean = rmm::raw_moment(1, alpha, lambda, L);
        return {md - t.mode_density, mean - t.standardized_mean};
    } catch (const FitError&) {
        return {kInfeasibleResidual, kInfeasibleResidual};
    } catch (const NumericalError&) {
        return {kInfeasibleResidual, kInfeasibleResidual};
    } catch (const ParameterError&) {
        return {kInfeasibleResidual, kInfeasibleResidual};
    }
}

} // namespace detail

namespace detail {

// Newton refinement of the 2x2 system from a simplex result, clamped to the
// search box.
inline std::pair<std::array<double, 2>, double> polish_mode_mean(
    std::array<double, 2> x, const ModeMeanTarget& t, const std::vector<double>& lower,
    const std::vector<double>& upper) {
    auto clamp = [&](double v, int j) { return std::clamp(v, lower[j], upper[j]); };
    for (int it = 0; it < 16; ++it) {
        const auto r0 = mode_mean_residual(x[0], x[1], t);
        if (std::hypot(r0[0], r0[1]) < 1e-12) break;
        const double ha = 1e-7 * (1.0 + std::fabs(x[0]));
        const double hl = 1e-7 * (1.0 + std::fabs(x[1]));
        const auto ra = mode_mean_residual(clamp(x[0] + ha, 0), x[1], t);
        const auto rl = mode_mean_residual(x[0], clamp(x[1] + hl, 1), t);
        const double j00 = (ra[0] - r0[0]) / ha, j01 = (rl[0] - r0[0]) / hl;
        const double j10 = (ra[1] - r0[1]) / ha, j11 = (rl[1] - r0[1]) / hl;
        const double det = j00 * j11 - j01 * j10;
        if (!std::isfinite(det) || std::fabs(det) < 1e-300) break;
        const double da = (-r0[0] * j11 + r0[1] * j01) / det;
        const double dl = (-j00 * r0[1] + j10 * r0[0]) / det;
        x[0] = clamp(x[0] + da, 0);
        x[1] = clamp(x[1] + dl, 1);
    }
    const auto rfin = mode_mean_residual(x[0], x[1], t);
    return {x, std::hypot(rfin[0], rfin[1])};
}

} // namespace detail

/// Recover (alpha, lambda) of the univariate family from a mode-density and
/// mean pair; the support ratio is tied to the unit-variance standardization.
/// The extended power range admits mirror solutions near the cap, so among
/// all roots the one with the smallest power is reported.
inline ModeMeanResult fit_mode_mean(const ModeMeanTarget& t) {
    validate(t);
    const std::vector<double> lower{1e-3, 0.05};
    const std::vector<double> upper{4.0, rmm::kLambdaCap};

    auto f = [&](const std::vector<double>& x) {
        const auto r = detail::mode_mean_residual(x[0], x[1], t);
        return r[0] * r[0] + r[1] * r[1];
    };

    optim::SimplexOptions sopt;
    sopt.max_iterations = 1500;
    sopt.diameter_tol = 1e-11;

    bool found = false;
    std::array<double, 2> best_root{0.0, 0.0};
    double best_residual = std::numeric_limits<double>::infinity();
    for (const auto& unit : optim::spread_starts(2, 8)) {
        std::vector<double> start{lower[0] + unit[0] * (upper[0] - lower[0]),
                                  lower[1] + unit[1] * (upper[1] - lower[1])};
        const optim::SimplexResult r = optim::nelder_mead(f, start, lower, upper, sopt);
        const auto [root, residual] = detail::polish_mode_mean({r.x[0], r.x[1]}, t, lower, upper);
        const bool is_root = residual < 1e-8;
        const bool better = is_root ? (!found || root[1] < best_root[1] - 1e-6 ||
                                       (std::fabs(root[1] - best_root[1]) <= 1e-6 &&
                                        residual < best_residual))
                                    : (!found && residual < best_residual);
        if (better) {
            best_root = root;
            best_residual = residual;
            found = found || is_root;
        }
    }
    if (!(best_residual < 1e-8))
        throw FitError("fit_mode_mean: no root in the box; best residual " +
                       std::to_string(best_residual));
    ModeMeanResult out;
    out.alpha = best_root[0];
    out.lambda = best_root[1];
    out.kappa = rmm::normalizer(out.alpha, out.lambda,
                                rmm::consistency_support_ratio(out.alpha, out.lambda));
    out.residual = best_residual;
    return out;
}

} // namespace tworv::fit

#endif
