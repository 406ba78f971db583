#ifndef TWORV_SPECFUN_HPP
#define TWORV_SPECFUN_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "tworv/error.hpp"

namespace tworv::specfun {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Principal-branch power: exp(e * Log(b)) with Im(Log) in (-pi, pi].
inline Complex principal_power(Complex base, double exponent) {
    if (base == Complex(0.0, 0.0)) {
        if (exponent > 0.0) return {0.0, 0.0};
        throw DomainError("principal_power: zero base with non-positive exponent");
    }
    return std::exp(exponent * std::log(base));
}

/// Euler gamma function for s > 0.
inline double gamma_fn(double s) {
    if (!(s > 0.0)) throw DomainError("gamma_fn: requires s > 0, got " + std::to_string(s));
    return std::tgamma(s);
}

namespace detail {

// Lanczos g=7, n=9 coefficients.
inline constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,  12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline Complex gamma_positive_re(Complex z) {
    z -= 1.0;
    Complex x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
    Complex t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

} // namespace detail

/// Gamma function continued to the complex plane (Lanczos; reflection for
/// Re z < 0.5). On the positive real axis it reduces to gamma_fn so that real
/// and complex paths cancel exactly in composite expressions.
inline Complex gamma_complex(Complex z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw DomainError("gamma_complex: pole at non-positive integer");
    if (z.imag() == 0.0 && z.real() > 0.0) return {std::tgamma(z.real()), 0.0};
    if (z.real() < 0.5)
        return M_PI / (std::sin(M_PI * z) * detail::gamma_positive_re(1.0 - z));
    return detail::gamma_positive_re(z);
}

namespace detail {

inline constexpr int kMaxIter = 10000;

// gamma_lower(s,x) / x^s = sum_n (-x)^n / (n! (s+n)); for Re(x) >= 0 the
// Kummer-transformed series e^{-x} sum_n x^n / (s(s+1)...(s+n)) avoids
// alternating-term cancellation.
inline Complex lower_regularized_by_power(Complex s, Complex x) {
    if (x.real() >= 0.0) {
        Complex term = 1.0 / s;
        Complex sum = term;
        for (int n = 1; n < kMaxIter; ++n) {
            term *= x / (s + double(n));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) return std::exp(-x) * sum;
        }
    } else {
        Complex mx = -x;
        Complex pw = 1.0;
        Complex sum = 1.0 / s;
        for (int n = 1; n < kMaxIter; ++n) {
            pw *= mx / double(n);
            Complex term = pw / (s + double(n));
            sum += term;
            if (!is_finite(sum))
                throw NumericalError("incomplete gamma series overflow, |x|=" +
                                     std::to_string(std::abs(x)));
            if (std::abs(term) < 1e-18 * std::abs(sum)) return sum;
        }
    }
    throw NumericalError("incomplete gamma series: no convergence after 10000 terms");
}

// Legendre continued fraction for Gamma(s,x), modified Lentz. Reliable for
// Re(x) > 0 with |x| moderately above |s|.
inline Complex upper_continued_fraction(Complex s, Complex x) {
    constexpr double tiny = 1e-300;
    Complex b = x + 1.0 - s;
    Complex c = 1.0 / tiny;
    Complex d = 1.0 / b;
    Complex h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        Complex an = -double(i) * (double(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        Complex del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return std::exp(-x + s * std::log(x)) * h;
    }
    throw NumericalError("incomplete gamma continued fraction: no convergence");
}

} // namespace detail

/// Upper incomplete gamma Gamma(s, x) on the principal branch of x^s.
/// Series route for |x| < |s|+1 or Re(x) < 0.5, continued fraction otherwise.
inline Complex upper_incomplete_gamma(Complex s, Complex x) {
    if (s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real()))
        throw DomainError("upper_incomplete_gamma: s at a non-positive integer");
    if (x == Complex(0.0, 0.0)) return gamma_complex(s);
    Complex result;
    if (std::abs(x) < std::abs(s) + 1.0 || x.real() < 0.5) {
        Complex lower = std::exp(s * std::log(x)) * detail::lower_regularized_by_power(s, x);
        result = gamma_complex(s) - lower;
    } else {
        result = detail::upper_continued_fraction(s, x);
    }
    if (!is_finite(result))
        throw NumericalError("upper_incomplete_gamma: non-finite result");
    return result;
}

/// gamma_lower(s, x) = Gamma(s) - Gamma(s, x), same branch conventions.
inline Complex lower_incomplete_gamma(Complex s, Complex x) {
    if (x == Complex(0.0, 0.0)) return {0.0, 0.0};
    return std::exp(s * std::log(x)) * detail::lower_regularized_by_power(s, x);
}

} // namespace tworv::specfun

#endif
