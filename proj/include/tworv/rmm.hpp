#ifndef TWORV_RMM_HPP
#define TWORV_RMM_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "tworv/error.hpp"
#include "tworv/quadrature.hpp"
#include "tworv/specfun.hpp"

namespace tworv::rmm {

using specfun::Complex;

/// Upper limit for the power parameter.
inline constexpr double kLambdaCap = 4.0;
/// Below this the power term switches to its log limit.
inline constexpr double kLogLimit = 1e-6;
/// Finite stand-in for an unbounded left support (tail mass < 1e-300).
inline constexpr double kInfiniteSupportRatio = 40.0;

/// Parameter vector of the power-exponential density
///   f(z) = kappa * exp{-(alpha/lambda) (z^lambda - 1)},  z in [-L, inf).
/// For z < 0 and non-integer lambda the power is taken as the symmetrized
/// real branch z^lambda = cos(pi lambda) |z|^lambda, the average of the two
/// conjugate principal branches; it coincides with the exact real value at
/// lambda = 1 and lambda = 2.
struct RmmParams {
    double alpha = 1.0;
    double lambda = 1.0;
    double L = 0.0;
    double kappa = 1.0;
};

/// Affine map between the observed scale and the mode-centred scale,
/// z = (x - M) / sigma.
struct Standardization {
    double M = 0.0;
    double sigma = 1.0;
};

inline void validate(const Standardization& s) {
    if (!(s.sigma > 0.0)) throw ParameterError("Standardization: sigma must be positive");
}

inline double standardize(double x, const Standardization& s) {
    validate(s);
    return (x - s.M) / s.sigma;
}

inline double destandardize(double z, const Standardization& s) {
    validate(s);
    return s.M + s.sigma * z;
}

inline void validate(const RmmParams& p) {
    if (!(p.alpha >= 0.0)) throw ParameterError("RmmParams: alpha must be >= 0");
    if (!(p.lambda >= 0.0 && p.lambda <= kLambdaCap))
        throw ParameterError("RmmParams: lambda must lie in [0, " + std::to_string(kLambdaCap) + "]");
    if (!(p.L >= 0.0)) throw ParameterError("RmmParams: L must be >= 0");
    if (!(p.kappa > 0.0)) throw ParameterError("RmmParams: kappa must be positive");
}

/// Symmetrized real branch value of (-1)^lambda.
inline double branch_cos(double lambda) { return std::cos(M_PI * lambda); }

/// z^lambda on the symmetrized real branch.
inline double signed_power(double z, double lambda) {
    if (z >= 0.0) return std::pow(z, lambda);
    return branch_cos(lambda) * std::pow(-z, lambda);
}

namespace detail {

inline constexpr int kSeriesCap = 10000;

// gamma_lower(s, x) / x^s as a stable real series, valid for either sign of x.
// For x >= 0 the Kummer form keeps all terms positive; for x < 0 the direct
// series has positive terms as well.
inline double lower_gamma_ratio(double s, double x) {
    if (x >= 0.0) {
        if (x > 5000.0)
            throw NumericalError("moment series: argument too large, x=" + std::to_string(x));
        double term = 1.0 / s, sum = term;
        for (int n = 1; n < kSeriesCap; ++n) {
            term *= x / (s + n);
            sum += term;
            if (term < 1e-17 * sum) return std::exp(-x) * sum;
        }
    } else {
        double pw = 1.0, sum = 1.0 / s;
        for (int n = 1; n < kSeriesCap; ++n) {
            pw *= (-x) / n;
            const double term = pw / (s + n);
            sum += term;
            if (!std::isfinite(sum))
                throw NumericalError("moment series overflow at x=" + std::to_string(x));
            if (term < 1e-17 * sum) return sum;
        }
    }
    throw NumericalError("moment series: no convergence after 10000 terms");
}

// Unnormalized moment integral T(k) = int_{-L}^{inf} z^k exp{-(alpha/lambda) p(z)} dz,
// excluding the common exp(alpha/lambda) factor. Series route, stable for all
// admissible (alpha, lambda, L).
inline double moment_core_series(int k, double alpha, double lambda, double L) {
    const double s = (k + 1) / lambda;
    const double positive_side = std::pow(alpha / lambda, -s) * specfun::gamma_fn(s);
    double negative_side = 0.0;
    if (L > 0.0) {
        const double x = (alpha * branch_cos(lambda) / lambda) * std::pow(L, lambda);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        negative_side = sign * std::pow(L, k + 1) * lower_gamma_ratio(s, x);
    }
    return (positive_side + negative_side) / lambda;
}

// Same quantity assembled from the closed complex-arithmetic composition:
// prefactor (alpha c / lambda)^{-s} against an incomplete-gamma bracket. The
// imaginary parts cancel analytically; the caller asserts the residue.
inline Complex moment_core_complex(int k, double alpha, double lambda, double L) {
    const double s = (k + 1) / lambda;
    const double c = branch_cos(lambda);
    const Complex base(alpha * c / lambda, 0.0);
    const Complex prefactor = specfun::principal_power(base, -s);
    const Complex x(base.real() * std::pow(L, lambda), 0.0);
    const double sign_k1 = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^(k+1)
    const double sign_k = (k % 2 == 0) ? 1.0 : -1.0;   // (-1)^k
    Complex bracket;
    if (x == Complex(0.0, 0.0)) {
        // Gamma(s, 0) = Gamma(s); the sign-paired terms cancel identically
        bracket = specfun::principal_power(Complex(c, 0.0), s) * specfun::gamma_fn(s);
    } else {
        bracket = sign_k1 * specfun::upper_incomplete_gamma(Complex(s, 0.0), x) +
                  (specfun::principal_power(Complex(c, 0.0), s) + sign_k) *
                      Complex(specfun::gamma_fn(s), 0.0);
    }
    return (1.0 / lambda) * prefactor * bracket;
}

inline double assert_real(Complex value, const char* what) {
    if (std::fabs(value.imag()) > 1e-9 * (1.0 + std::fabs(value.real())))
        throw NumericalError(std::string(what) + ": branch-inconsistent imaginary residue " +
                             std::to_string(value.imag()));
    return value.real();
}

// Route selector: the complex composition cancels catastrophically when the
// incomplete-gamma argument is small but non-zero; the series form covers that
// zone and extreme negative arguments.
inline bool complex_route_ok(double alpha, double lambda, double L) {
    if (L == 0.0) return true;
    const double x = (alpha * branch_cos(lambda) / lambda) * std::pow(L, lambda);
    return std::fabs(x) >= 0.5 && x > -600.0;
}

inline void validate_moment_args(double alpha, double lambda, double L) {
    if (!(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
    if (!(lambda >= 0.0 && lambda <= kLambdaCap)) throw ParameterError("lambda outside [0, cap]");
    if (!(L >= 0.0)) throw ParameterError("L must be >= 0");
    if (lambda < kLogLimit)
        throw DomainError("moments are not provided on the log-limit branch (lambda ~ 0)");
}

} // namespace detail

/// k-th non-central moment E(Z^k) of the normalized density. Evaluated through
/// the complex-arithmetic composition where it is well conditioned (asserting
/// the imaginary residue stays below 1e-9), and through the equivalent stable
/// series otherwise.
inline double raw_moment(int k, double alpha, double lambda, double L) {
    if (k < 0) throw ParameterError("raw_moment: order must be non-negative");
    detail::validate_moment_args(alpha, lambda, L);
    if (alpha == 0.0) return 1.0 / (k + 1);  // uniform convention on [0, 1]
    if (detail::complex_route_ok(alpha, lambda, L)) {
        const Complex num = detail::moment_core_complex(k, alpha, lambda, L);
        const Complex den = detail::moment_core_complex(0, alpha, lambda, L);
        return detail::assert_real(num / den, "raw_moment");
    }
    return detail::moment_core_series(k, alpha, lambda, L) /
           detail::moment_core_series(0, alpha, lambda, L);
}

/// First two non-central moments, (E(Z), E(Z^2)).
inline std::pair<double, double> standardized_mean_and_square(double alpha, double lambda,
                                                              double L) {
    return {raw_moment(1, alpha, lambda, L), raw_moment(2, alpha, lambda, L)};
}

namespace detail {

inline double unnormalized_density(double z, double alpha, double lambda, double L) {
    if (z < -L) return 0.0;
    return std::exp(-(alpha / lambda) * (signed_power(z, lambda) - 1.0));
}

inline double density_integral_quadrature(double alpha, double lambda, double L) {
    auto f = [&](double z) { return unnormalized_density(z, alpha, lambda, L); };
    quad::Options opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-11;
    opt.max_panels = 20000;
    double total = quad::integrate_right_tail(f, 0.0, opt);
    if (L > 0.0) {
        // on the decaying branch clip the integration window to where the
        // density still carries mass, or the opening panel never sees it
        double lo = -L;
        const double c = branch_cos(lambda);
        if (c > 1e-8)
            lo = -std::min(L, std::pow(60.0 * lambda / (alpha * c), 1.0 / lambda));
        total += quad::integrate(f, lo, 0.0, opt);
    }
    return total;
}

} // namespace detail

/// Normalizing constant kappa making the density integrate to one, from the
/// closed-form zeroth moment; cross-checked against adaptive quadrature.
inline double normalizer(double alpha, double lambda, double L) {
    if (alpha == 0.0) return 1.0;  // uniform on [0, 1/kappa]; canonical kappa = 1
    detail::validate_moment_args(alpha, lambda, L);
    double t0;
    if (detail::complex_route_ok(alpha, lambda, L))
        t0 = detail::assert_real(detail::moment_core_complex(0, alpha, lambda, L), "normalizer");
    else
        t0 = detail::moment_core_series(0, alpha, lambda, L);
    const double kappa = 1.0 / (std::exp(alpha / lambda) * t0);
    const double kappa_quad = 1.0 / detail::density_integral_quadrature(alpha, lambda, L);
    if (std::fabs(kappa - kappa_quad) > 1e-6 * std::fabs(kappa_quad))
        throw NumericalError("normalizer: quadrature disagrees with closed form (" +
                             std::to_string(kappa) + " vs " + std::to_string(kappa_quad) + ")");
    return kappa;
}

/// Density value at z.
inline double rmm_pdf(double z, const RmmParams& p) {
    validate(p);
    if (p.alpha == 0.0)  // uniform on [0, 1/kappa]
        return (z >= 0.0 && z <= 1.0 / p.kappa) ? p.kappa : 0.0;
    if (p.lambda < kLogLimit)  // log-limit branch: kappa * z^(-alpha) on z > 0
        return z > 0.0 ? p.kappa * std::pow(z, -p.alpha) : 0.0;
    if (z < -p.L) return 0.0;
    return p.kappa * std::exp(-(p.alpha / p.lambda) * (signed_power(z, p.lambda) - 1.0));
}

/// Density at the mode z = 0: kappa * exp(alpha / lambda).
inline double mode_density(const RmmParams& p) {
    validate(p);
    if (p.alpha == 0.0) return p.kappa;
    if (p.lambda < kLogLimit)
        throw DomainError("mode_density: undefined on the log-limit branch");
    return p.kappa * std::exp(p.alpha / p.lambda);
}

/// Convenience constructor: derive kappa from (alpha, lambda, L).
inline RmmParams make_params(double alpha, double lambda, double L) {
    RmmParams p{alpha, lambda, L, 1.0};
    p.kappa = normalizer(alpha, lambda, L);
    validate(p);
    return p;
}

enum class Preset { Exponential, Normal, Pareto, PowerFunction, Uniform };

/// Named family members. Pareto requires alpha > 1 and PowerFunction
/// alpha < 1; both live on the log-limit branch with the classical
/// normalizers on supports [1, inf) and (0, 1].
inline RmmParams preset(Preset which, std::optional<double> alpha = std::nullopt) {
    switch (which) {
        case Preset::Exponential:
            return {1.0, 1.0, 0.0, std::exp(-1.0)};
        case Preset::Normal:
            return {1.0, 2.0, kInfiniteSupportRatio,
                    std::exp(-0.5) / std::sqrt(2.0 * M_PI)};
        case Preset::Pareto: {
            if (!alpha || !(*alpha > 1.0))
                throw ParameterError("Pareto preset requires alpha > 1");
            return {*alpha, 0.0, 0.0, *alpha - 1.0};
        }
        case Preset::PowerFunction: {
            if (!alpha || !(*alpha < 1.0) || !(*alpha > 0.0))
                throw ParameterError("PowerFunction preset requires 0 < alpha < 1");
            return {*alpha, 0.0, 0.0, 1.0 - *alpha};
        }
        case Preset::Uniform:
            return {0.0, 1.0, 0.0, 1.0};
    }
    throw ParameterError("unknown preset");
}

/// Smallest support ratio L at which the normalized density has unit variance;
/// returns the finite infinity stand-in when the variance stays below one for
/// all L (the normal-like limit), throws FitError when no such L exists.
inline double consistency_support_ratio(double alpha, double lambda,
                                        double L_max = kInfiniteSupportRatio) {
    detail::validate_moment_args(alpha, lambda, L_max);
    auto excess = [&](double L) {
        auto [m1, m2] = standardized_mean_and_square(alpha, lambda, L);
        return (m2 - m1 * m1) - 1.0;
    };
    double lo = 0.0, f_lo = excess(0.0);
    if (std::fabs(f_lo) <= 1e-10) return 0.0;
    double hi = 0.0;
    double f_hi = f_lo;
    for (double step = 0.125; hi < L_max; step *= 2.0) {
        hi = std::min(hi + step, L_max);
        f_hi = excess(hi);
        if (f_lo * f_hi <= 0.0) break;
        lo = hi;
        f_lo = f_hi;
    }
    if (f_lo * f_hi > 0.0) {
        if (f_hi < 0.0) return L_max;  // variance below one everywhere: unbounded support
        throw FitError("consistency_support_ratio: variance exceeds one for every L");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f_lo * excess(mid) <= 0.0) hi = mid;
        else { lo = mid; f_lo = excess(mid); }
    }
    return 0.5 * (lo + hi);
}

} // namespace tworv::rmm

#endif
