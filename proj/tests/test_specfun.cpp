#include <doctest.h>

#include <cmath>
#include <complex>

#include "support/oracles.hpp"
#include "tworv/specfun.hpp"

using namespace tworv;
using specfun::Complex;

namespace {
double rel_err(Complex got, Complex want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}
} // namespace

TEST_CASE("gamma_fn pinned values") {
    CHECK(specfun::gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(specfun::gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    // reflection at 1/2 gives the exact closed form sqrt(pi)
    CHECK(specfun::gamma_fn(0.5) ==
          doctest::Approx(1.7724538509).epsilon(1e-10));
    CHECK(specfun::gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    CHECK_THROWS_AS(specfun::gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(specfun::gamma_fn(-1.2), DomainError);
}

TEST_CASE("gamma recurrence property") {
    for (double s = 0.3; s < 10.0; s += 0.4) {
        const double lhs = specfun::gamma_fn(s + 1.0);
        const double rhs = s * specfun::gamma_fn(s);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::fabs(rhs));
    }
}

TEST_CASE("gamma_complex agrees with the real function and known values") {
    CHECK(rel_err(specfun::gamma_complex({4.2, 0.0}), {specfun::gamma_fn(4.2), 0.0}) < 1e-13);
    // |Gamma(i)|^2 = pi / sinh(pi)
    const Complex gi = specfun::gamma_complex({0.0, 1.0});
    CHECK(std::norm(gi) == doctest::Approx(M_PI / std::sinh(M_PI)).epsilon(1e-11));
    CHECK_THROWS_AS(specfun::gamma_complex({-2.0, 0.0}), DomainError);
}

TEST_CASE("upper incomplete gamma pinned values") {
    // Gamma(s, 0) = Gamma(s)
    CHECK(rel_err(specfun::upper_incomplete_gamma({1.5, 0.0}, {0.0, 0.0}),
                  {0.8862269255, 0.0}) < 1e-10);
    // Gamma(1, x) = exp(-x)
    CHECK(rel_err(specfun::upper_incomplete_gamma({1.0, 0.0}, {2.0, 0.0}),
                  {0.1353352832, 0.0}) < 1e-9);
    CHECK(rel_err(specfun::upper_incomplete_gamma({1.0, 0.0}, {2.0, 0.0}),
                  {std::exp(-2.0), 0.0}) < 1e-12);
}

TEST_CASE("upper incomplete gamma vs contour quadrature, complex argument") {
    // the argument produced by alpha (-L)^lambda / lambda on the principal branch
    const double alpha = 0.7, lambda = 1.3, L = 0.5;
    const Complex mL = specfun::principal_power({-L, 0.0}, lambda);
    const Complex x = alpha / lambda * mL;
    const Complex s{2.0 / 1.3, 0.0};
    const Complex got = specfun::upper_incomplete_gamma(s, x);
    const Complex want = oracles::upper_gamma_contour(s, x);
    CHECK(rel_err(got, want) < 1e-10);
}

TEST_CASE("upper incomplete gamma accuracy across the test domain") {
    const Complex ss[] = {{0.7, 0.0}, {3.3, 0.0}, {10.5, 0.0}, {2.5, 1.0}, {0.9, -2.0}};
    const Complex xs[] = {{0.5, 0.0},  {5.0, 0.0},  {30.0, 0.0}, {49.0, 0.0},
                          {3.0, 4.0},  {-2.0, 1.0}, {10.0, -7.0}, {0.2, -0.3},
                          {-6.0, -3.0}};
    for (const Complex& s : ss)
        for (const Complex& x : xs) {
            const Complex got = specfun::upper_incomplete_gamma(s, x);
            const Complex want = oracles::upper_gamma_contour(s, x);
            CAPTURE(s.real()); CAPTURE(s.imag());
            CAPTURE(x.real()); CAPTURE(x.imag());
            CHECK(rel_err(got, want) < 1e-10);
        }
}

TEST_CASE("splitting identity against quadrature of the lower integral") {
    for (double s : {0.6, 1.0, 2.7, 5.5})
        for (double x : {0.3, 1.0, 4.0, 12.0}) {
            const double upper =
                specfun::upper_incomplete_gamma({s, 0.0}, {x, 0.0}).real();
            const double lower = oracles::lower_gamma_quadrature(s, x);
            const double total = specfun::gamma_fn(s);
            CHECK(std::fabs(upper + lower - total) <= 1e-8 * total);
        }
}

TEST_CASE("upper and lower parts recompose the whole function") {
    const Complex ss[] = {{1.5, 0.0}, {2.5, 1.0}, {0.8, -0.5}};
    const Complex xs[] = {{2.0, 0.0}, {1.0, 3.0}, {-1.5, 0.5}};
    for (const Complex& s : ss)
        for (const Complex& x : xs) {
            const Complex total = specfun::upper_incomplete_gamma(s, x) +
                                  specfun::lower_incomplete_gamma(s, x);
            CHECK(rel_err(total, specfun::gamma_complex(s)) < 1e-12);
        }
}

TEST_CASE("principal_power pinned values") {
    const Complex m1{-1.0, 0.0};
    const Complex a = specfun::principal_power(m1, 1.5);
    CHECK(a.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::fabs(a.real()) < 1e-12);
    CHECK(a.imag() == doctest::Approx(-1.0).epsilon(1e-12));
    const Complex b = specfun::principal_power(m1, 2.0);
    CHECK(b.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(b.imag()) < 1e-12);
    const Complex c = specfun::principal_power(m1, 1.0);
    CHECK(c.real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::fabs(c.imag()) < 1e-12);
}

TEST_CASE("principal_power identities and domain errors") {
    const Complex bases[] = {{2.0, 0.0}, {-3.0, 0.5}, {0.1, -0.7}, {-1.0, -1.0}};
    for (const Complex& b : bases) {
        CHECK(rel_err(specfun::principal_power(b, 1.0), b) < 1e-14);
        CHECK(rel_err(specfun::principal_power(b, 0.0), {1.0, 0.0}) < 1e-14);
    }
    CHECK_THROWS_AS(specfun::principal_power({0.0, 0.0}, -1.0), DomainError);
    CHECK_THROWS_AS(specfun::principal_power({0.0, 0.0}, 0.0), DomainError);
    CHECK(specfun::principal_power({0.0, 0.0}, 2.0) == Complex{0.0, 0.0});
}

TEST_CASE("results carry no NaN or infinity") {
    const Complex vals[] = {
        specfun::upper_incomplete_gamma({3.0, 0.0}, {45.0, 0.0}),
        specfun::upper_incomplete_gamma({0.7, 0.0}, {-20.0, 0.0}),
        specfun::gamma_complex({6.3, 2.2}),
    };
    for (const Complex& v : vals) CHECK(specfun::is_finite(v));
}
