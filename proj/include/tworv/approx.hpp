#ifndef TWORV_APPROX_HPP
#define TWORV_APPROX_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tworv/error.hpp"

namespace tworv::approx {

/// Below this a power parameter is treated as its log limit.
inline constexpr double kLogLimit = 1e-6;

/// Parameters of the two-term generalized density
///   f(z) = kappa exp{-(alpha1/lambda1)[z^lambda1 - 1]
///                   -(alpha2/lambda2)[(beta0 + beta1 z)^lambda2 - 1]},
/// each power term replaced by alpha log(arg) in its lambda -> 0 limit.
struct ApproxParams {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double alpha1 = 1.0;
    double alpha2 = 0.0;
    double beta0 = 0.0;
    double beta1 = 1.0;
    double kappa = 1.0;
};

inline void validate(const ApproxParams& p) {
    if (!(p.kappa > 0.0)) throw ParameterError("ApproxParams: kappa must be positive");
    if (!(p.lambda1 >= 0.0) || !(p.lambda2 >= 0.0))
        throw ParameterError("ApproxParams: lambda parameters must be >= 0");
}

inline double weight_sum(const ApproxParams& p) { return p.alpha1 + p.alpha2; }

namespace detail {

inline bool near_integer(double x) { return std::fabs(x - std::round(x)) < 1e-12; }

// -(alpha/lambda)(arg^lambda - 1), log limit -(alpha) log(arg)
inline double exponent_term(double arg, double alpha, double lambda, const char* label) {
    if (alpha == 0.0) return 0.0;
    if (lambda < kLogLimit) {
        if (!(arg > 0.0))
            throw DomainError(std::string("approx_pdf: log term '") + label +
                              "' requires a positive argument");
        return -alpha * std::log(arg);
    }
    double powered;
    if (arg >= 0.0) {
        powered = std::pow(arg, lambda);
    } else if (near_integer(lambda)) {
        const long n = std::lround(lambda);
        powered = std::pow(arg, double(n));
    } else {
        throw DomainError(std::string("approx_pdf: power term '") + label +
                          "' undefined for negative argument with non-integer exponent");
    }
    return -(alpha / lambda) * (powered - 1.0);
}

} // namespace detail

/// Density value (kappa left as supplied; mappings use kappa = 1 and compare
/// shapes up to a constant).
inline double approx_pdf(double z, const ApproxParams& p) {
    validate(p);
    const double t1 = detail::exponent_term(z, p.alpha1, p.lambda1, "z");
    const double t2 = detail::exponent_term(p.beta0 + p.beta1 * z, p.alpha2, p.lambda2,
                                            "beta0 + beta1 z");
    return p.kappa * std::exp(t1 + t2);
}

/// Variable substitution carrying an observed x onto the family argument z.
struct ArgTransform {
    enum class Kind { Identity, Affine, LogShift, SquaredAffine, ScaledPowerArg };
    Kind kind = Kind::Identity;
    double a = 0.0;  // centre / location / mu
    double b = 1.0;  // scale

    double operator()(double x) const {
        switch (kind) {
            case Kind::Identity: return x;
            case Kind::Affine: return (x - a) / b;
            case Kind::LogShift: {
                if (!(x > 0.0)) throw DomainError("ArgTransform: log of non-positive value");
                return std::log(x) - a;
            }
            case Kind::SquaredAffine: {
                const double u = (x - a) / b;
                return u * u;
            }
            case Kind::ScaledPowerArg: return x / b;
        }
        throw ParameterError("ArgTransform: unknown kind");
    }
};

inline ArgTransform identity_transform() { return {ArgTransform::Kind::Identity, 0.0, 1.0}; }
inline ArgTransform affine_transform(double centre, double scale) {
    if (!(scale > 0.0)) throw ParameterError("affine transform: scale must be positive");
    return {ArgTransform::Kind::Affine, centre, scale};
}
inline ArgTransform log_shift_transform(double mu) {
    return {ArgTransform::Kind::LogShift, mu, 1.0};
}
inline ArgTransform squared_affine_transform(double centre, double scale) {
    if (!(scale > 0.0)) throw ParameterError("squared transform: scale must be positive");
    return {ArgTransform::Kind::SquaredAffine, centre, scale};
}
inline ArgTransform scaled_arg_transform(double scale) {
    if (!(scale > 0.0)) throw ParameterError("scaled transform: scale must be positive");
    return {ArgTransform::Kind::ScaledPowerArg, 0.0, scale};
}

/// A classical distribution written as a member of the family: the transform,
/// the parameter vector, and the x-support on which the identity holds.
struct MappedDistribution {
    std::string name;
    ArgTransform transform;
    ApproxParams params;
    double support_lo = 0.0;
    double support_hi = std::numeric_limits<double>::infinity();

    double log_density_shape(double x) const {
        return std::log(approx_pdf(transform(x), params));
    }
};

inline MappedDistribution map_weibull(double b, double c) {
    if (!(b > 0.0 && c > 0.0)) throw ParameterError("map_weibull: b and c must be positive");
    return {"weibull", scaled_arg_transform(b),
            {0.0, c, 1.0 - c, c, 0.0, 1.0, 1.0}, 0.0,
            std::numeric_limits<double>::infinity()};
}

inline MappedDistribution map_generalized_gamma(double a, double b, double c, double k) {
    if (!(b > 0.0 && c > 0.0 && k > 0.0))
        throw ParameterError("map_generalized_gamma: b, c, k must be positive");
    return {"generalized_gamma", affine_transform(a, b * std::pow(c, 1.0 / k)),
            {0.0, k, 1.0 - k * c, k * c, 0.0, 1.0, 1.0}, a,
            std::numeric_limits<double>::infinity()};
}

// named sub-cases of the generalized gamma
inline MappedDistribution map_gamma(double b, double c) { return map_generalized_gamma(0.0, b, c, 1.0); }
inline MappedDistribution map_exponential(double b) { return map_generalized_gamma(0.0, b, 1.0, 1.0); }
inline MappedDistribution map_weibull_via_gg(double b, double k) {
    return map_generalized_gamma(0.0, b, 1.0, k);
}
inline MappedDistribution map_chi_squared(double n) {
    if (!(n > 0.0)) throw ParameterError("map_chi_squared: n must be positive");
    return map_generalized_gamma(0.0, 2.0, n / 2.0, 1.0);
}

inline MappedDistribution map_f(double m, double n) {
    if (!(m > 0.0 && n > 0.0)) throw ParameterError("map_f: degrees of freedom must be positive");
    return {"f", identity_transform(),
            {0.0, 0.0, 1.0 - m / 2.0, (m + n) / 2.0, 1.0, m / n, 1.0}, 0.0,
            std::numeric_limits<double>::infinity()};
}

inline MappedDistribution map_lognormal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("map_lognormal: sigma must be positive");
    return {"lognormal", log_shift_transform(mu),
            {1.0, 2.0, 1.0, 1.0, 0.0, 1.0 / sigma, 1.0}, 0.0,
            std::numeric_limits<double>::infinity()};
}

inline MappedDistribution map_student_t(double m) {
    if (!(m > 0.0)) throw ParameterError("map_student_t: m must be positive");
    return {"student_t", squared_affine_transform(0.0, 1.0),
            {0.0, 0.0, 0.0, (m + 1.0) / 2.0, 1.0, 1.0 / m, 1.0},
            -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
}

inline MappedDistribution map_cauchy(double a, double b) {
    if (!(b > 0.0)) throw ParameterError("map_cauchy: b must be positive");
    return {"cauchy", squared_affine_transform(a, b),
            {0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0},
            -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
}

/// Maximum deviation of d(x) = log f_mapped(x) - reference_logpdf(x) from its
/// grid mean. Zero (up to rounding) exactly when the two densities agree up to
/// a normalizing constant.
inline double verify_mapping(const MappedDistribution& mapped,
                             const std::function<double(double)>& reference_logpdf,
                             const std::vector<double>& grid) {
    if (grid.empty()) throw ParameterError("verify_mapping: empty grid");
    std::vector<double> d;
    d.reserve(grid.size());
    for (double x : grid) {
        if (x < mapped.support_lo || x > mapped.support_hi)
            throw DomainError("verify_mapping: grid point outside mapped support");
        d.push_back(mapped.log_density_shape(x) - reference_logpdf(x));
    }
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= double(d.size());
    double dev = 0.0;
    for (double v : d) dev = std::max(dev, std::fabs(v - mean));
    return dev;
}

/// Closed-form reference log-densities for the mapping checks.
namespace references {

inline std::function<double(double)> weibull_logpdf(double b, double c) {
    return [=](double x) {
        return std::log(c / b) + (c - 1.0) * std::log(x / b) - std::pow(x / b, c);
    };
}

inline std::function<double(double)> generalized_gamma_logpdf(double a, double b, double c,
                                                              double k) {
    return [=](double x) {
        const double y = x - a;
        return std::log(k) - k * c * std::log(b) - std::lgamma(c) +
               (k * c - 1.0) * std::log(y) - std::pow(y / b, k);
    };
}

inline std::function<double(double)> f_logpdf(double m, double n) {
    const double norm = std::lgamma(0.5 * (m + n)) - std::lgamma(0.5 * m) -
                        std::lgamma(0.5 * n) + 0.5 * m * std::log(m / n);
    return [=](double w) {
        return norm + (0.5 * m - 1.0) * std::log(w) -
               0.5 * (m + n) * std::log1p(m / n * w);
    };
}

inline std::function<double(double)> lognormal_logpdf(double mu, double sigma) {
    return [=](double w) {
        const double z = (std::log(w) - mu) / sigma;
        return -std::log(w * sigma * std::sqrt(2.0 * M_PI)) - 0.5 * z * z;
    };
}

inline std::function<double(double)> student_t_logpdf(double m) {
    const double norm = std::lgamma(0.5 * (m + 1.0)) - std::lgamma(0.5 * m) -
                        0.5 * std::log(m * M_PI);
    return [=](double w) { return norm - 0.5 * (m + 1.0) * std::log1p(w * w / m); };
}

inline std::function<double(double)> cauchy_logpdf(double a, double b) {
    return [=](double w) {
        const double u = (w - a) / b;
        return -std::log(M_PI * b) - std::log1p(u * u);
    };
}

} // namespace references

/// One row of the standard verification gallery.
struct GalleryEntry {
    MappedDistribution mapped;
    std::function<double(double)> reference;
    double grid_lo;
    double grid_hi;
};

/// The six mappings with their references and default verification grids.
inline std::vector<GalleryEntry> mapping_gallery() {
    std::vector<GalleryEntry> g;
    g.push_back({map_weibull(1.0, 2.0), references::weibull_logpdf(1.0, 2.0), 0.01, 5.0});
    g.push_back({map_generalized_gamma(0.5, 1.2, 1.8, 1.4),
                 references::generalized_gamma_logpdf(0.5, 1.2, 1.8, 1.4), 0.51, 8.0});
    g.push_back({map_f(2.0, 2.0), references::f_logpdf(2.0, 2.0), 0.01, 10.0});
    g.push_back({map_lognormal(0.0, 1.0), references::lognormal_logpdf(0.0, 1.0), 0.05, 10.0});
    g.push_back({map_student_t(5.0), references::student_t_logpdf(5.0), 0.01, 8.0});
    g.push_back({map_cauchy(0.0, 1.0), references::cauchy_logpdf(0.0, 1.0), 0.01, 10.0});
    return g;
}

/// Uniform grid helper for the verification runs.
inline std::vector<double> uniform_grid(double lo, double hi, int n = 200) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / double(n - 1);
    return g;
}

} // namespace tworv::approx

#endif
