#ifndef TWORV_BIVARIATE_HPP
#define TWORV_BIVARIATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tworv/error.hpp"
#include "tworv/quadrature.hpp"
#include "tworv/rmm.hpp"
#include "tworv/rng.hpp"

namespace tworv::bivariate {

/// Parameters of the product model W = U * V, V = 1 + eps. U follows the
/// power-exponential density with weight alpha1 = 2 - lambda on the
/// mode-centred scale z1 = (u - M1)/sigma1; eps is a zero-mean normal with
/// standard deviation sigma2, truncated to eps >= -1 so that W >= 0.
struct BivariateParams {
    double lambda = 1.5;
    double M1 = 1.0;
    double sigma1 = 1.0;
    double sigma2 = 0.1;
    double kappa1 = 1.0;
    double kappa2 = 1.0;

    double alpha1() const { return 2.0 - lambda; }
    double alpha2() const { return lambda - 1.0; }
    double L1() const { return M1 / sigma1; }
    double L2() const { return 1.0 / sigma2; }
};

inline void validate(const BivariateParams& p) {
    if (!(p.lambda >= 1.0 && p.lambda <= 2.0))
        throw ParameterError("BivariateParams: lambda must lie in [1, 2]");
    if (!(p.M1 >= 0.0)) throw ParameterError("BivariateParams: M1 must be >= 0");
    if (!(p.sigma1 > 0.0)) throw ParameterError("BivariateParams: sigma1 must be positive");
    if (!(p.sigma2 > 0.0 && p.sigma2 <= 1.0 / 6.0))
        throw ParameterError("BivariateParams: sigma2 must lie in (0, 1/6]");
}

/// Build the parameter record, deriving the two component normalizers.
inline BivariateParams make_params(double lambda, double M1, double sigma1, double sigma2) {
    BivariateParams p{lambda, M1, sigma1, sigma2, 1.0, 1.0};
    validate(p);
    p.kappa1 = rmm::normalizer(p.alpha1(), lambda, p.L1());
    p.kappa2 = rmm::normalizer(p.alpha2(), 2.0, p.L2());
    return p;
}

/// Joint density on the standardized scales,
///   kappa1 kappa2 exp{-(2-lambda)(1/lambda)[z1^lambda - 1]
///                     - (lambda-1)(1/2)[z2^2 - 1]}.
/// At lambda = 1 the z2 factor is constant; at lambda = 2 the z1 factor is.
inline double joint_pdf(double z1, double z2, const BivariateParams& p) {
    validate(p);
    if (z1 < -p.L1() || z2 < -p.L2()) return 0.0;
    const double t1 = p.alpha1() == 0.0
                          ? 0.0
                          : (p.alpha1() / p.lambda) * (rmm::signed_power(z1, p.lambda) - 1.0);
    const double t2 = p.alpha2() == 0.0 ? 0.0 : 0.5 * p.alpha2() * (z2 * z2 - 1.0);
    return p.kappa1 * p.kappa2 * std::exp(-t1 - t2);
}

namespace detail {

// density of Z1 (standardized U component)
inline double z1_density(double z, const BivariateParams& p) {
    if (z < -p.L1()) return 0.0;
    return p.kappa1 *
           std::exp(-(p.alpha1() / p.lambda) * (rmm::signed_power(z, p.lambda) - 1.0));
}

// density of eps/sigma2 ~ standard normal left-truncated at -L2 (the
// renormalization by Phi(L2) is below 1e-8 for sigma2 <= 1/6 and is ignored)
inline double z2_density(double z, const BivariateParams& p) {
    if (z < -p.L2()) return 0.0;
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

inline double u_density(double u, const BivariateParams& p) {
    return z1_density((u - p.M1) / p.sigma1, p) / p.sigma1;
}

inline double v_density(double v, const BivariateParams& p) {
    return z2_density((v - 1.0) / p.sigma2, p) / p.sigma2;
}

inline double z1_upper_cut(const BivariateParams& p) {
    // exponent >= 46 leaves density mass < 1e-16 of the mode level
    return std::pow(1.0 + 46.0 * p.lambda / p.alpha1(), 1.0 / p.lambda) + 2.0;
}

inline void require_proper_u(const BivariateParams& p) {
    if (p.alpha1() <= 0.0)
        throw ParameterError("U component degenerates at lambda = 2; use lambda < 2");
}

} // namespace detail

/// Grid inverse-CDF sampler for the U component: cumulative table on a
/// fixed grid with monotone piecewise-linear interpolation.
class UComponentTable {
public:
    static constexpr int kCells = 4096;

    explicit UComponentTable(const BivariateParams& p) : params_(p) {
        validate(p);
        detail::require_proper_u(p);
        const double z_lo = -p.L1();
        const double z_hi = detail::z1_upper_cut(p);
        grid_.resize(kCells + 1);
        cdf_.resize(kCells + 1);
        const double h = (z_hi - z_lo) / kCells;
        // 5-point Gauss-Legendre per cell
        static const double gx[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                     0.538469310105683, 0.906179845938664};
        static const double gw[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                     0.478628670499366, 0.236926885056189};
        grid_[0] = z_lo;
        cdf_[0] = 0.0;
        for (int i = 0; i < kCells; ++i) {
            const double a = z_lo + i * h, b = a + h;
            double cell = 0.0;
            for (int q = 0; q < 5; ++q)
                cell += gw[q] * detail::z1_density(0.5 * (a + b) + 0.5 * h * gx[q], params_);
            cell *= 0.5 * h;
            grid_[i + 1] = b;
            cdf_[i + 1] = cdf_[i] + cell;
        }
        const double total = cdf_.back();
        if (!(total > 0.0) || !std::isfinite(total))
            throw NumericalError("UComponentTable: degenerate cumulative mass");
        for (double& c : cdf_) c /= total;
        cdf_.back() = 1.0;
    }

    /// Quantile of Z1 at probability u in [0, 1).
    double quantile(double u) const {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        size_t j = std::min<size_t>(std::max<ptrdiff_t>(it - cdf_.begin(), 1), kCells);
        const double c0 = cdf_[j - 1], c1 = cdf_[j];
        const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
        return grid_[j - 1] + t * (grid_[j] - grid_[j - 1]);
    }

    /// CDF of Z1 at z, linear between grid nodes.
    double cdf(double z) const {
        if (z <= grid_.front()) return 0.0;
        if (z >= grid_.back()) return 1.0;
        const double h = (grid_.back() - grid_.front()) / kCells;
        const size_t j = std::min<size_t>(size_t((z - grid_.front()) / h), kCells - 1);
        const double t = (z - grid_[j]) / (grid_[j + 1] - grid_[j]);
        return cdf_[j] + t * (cdf_[j + 1] - cdf_[j]);
    }

    /// CDF of U = M1 + sigma1 Z1.
    double cdf_u(double u) const {
        return cdf((u - params_.M1) / params_.sigma1);
    }

    double z_max() const { return grid_.back(); }

private:
    BivariateParams params_;
    std::vector<double> grid_;
    std::vector<double> cdf_;
};

/// Draw n realizations of W = U(1 + eps); deterministic for a fixed seed.
inline std::vector<double> sample_w(const BivariateParams& p, std::size_t n,
                                    std::uint64_t seed) {
    validate(p);
    if (n == 0) return {};
    UComponentTable table(p);
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u_draw = p.M1 + p.sigma1 * table.quantile(rng.uniform());
        double eps = p.sigma2 * rng.normal();
        while (eps < -1.0) eps = p.sigma2 * rng.normal();
        out.push_back(u_draw * (1.0 + eps));
    }
    return out;
}

/// E(W) = E(U), since E(V) = 1.
inline double model_mean(const BivariateParams& p) {
    validate(p);
    detail::require_proper_u(p);
    const double ez1 = rmm::raw_moment(1, p.alpha1(), p.lambda, p.L1());
    return p.M1 + p.sigma1 * ez1;
}

/// Var(W) = E(U^2) E(V^2) - E(U)^2 with E(V^2) = 1 + sigma2^2 and E(U^2)
/// taken from the exact component moments.
inline double model_var(const BivariateParams& p) {
    validate(p);
    detail::require_proper_u(p);
    const double ez1 = rmm::raw_moment(1, p.alpha1(), p.lambda, p.L1());
    const double ez2 = rmm::raw_moment(2, p.alpha1(), p.lambda, p.L1());
    const double mu1 = p.M1 + p.sigma1 * ez1;
    const double eu2 = p.M1 * p.M1 + 2.0 * p.M1 * p.sigma1 * ez1 + p.sigma1 * p.sigma1 * ez2;
    return eu2 * (1.0 + p.sigma2 * p.sigma2) - mu1 * mu1;
}

namespace detail {

inline std::pair<double, double> v_range(const BivariateParams& p) {
    const double lo = std::max(1e-12, 1.0 - 8.5 * p.sigma2);
    const double hi = 1.0 + 6.0 * p.sigma2;
    return {lo, hi};
}

} // namespace detail

/// Marginal density of W by numerical marginalization,
///   f_W(w) = int f_U(w/v) f_V(v) / v dv,
/// over the truncated V support (mass outside is below 1e-8).
inline double marginal_pdf_w(double w, const BivariateParams& p, double tol = 1e-9) {
    validate(p);
    detail::require_proper_u(p);
    if (!(tol > 0.0)) throw ParameterError("marginal_pdf_w: tol must be positive");
    if (w < 0.0) return 0.0;
    auto [lo, hi] = detail::v_range(p);
    auto integrand = [&](double v) {
        return detail::u_density(w / v, p) * detail::v_density(v, p) / v;
    };
    quad::Options opt;
    opt.abs_tol = 0.5 * tol;
    opt.rel_tol = 1e-10;
    return quad::integrate(integrand, lo, hi, opt);
}

/// Marginal CDF of W sharing the sampler's U table.
inline double marginal_cdf_w(double w, const BivariateParams& p, const UComponentTable& table,
                             double tol = 1e-9) {
    if (w <= 0.0) return 0.0;
    auto [lo, hi] = detail::v_range(p);
    auto integrand = [&](double v) { return table.cdf_u(w / v) * detail::v_density(v, p); };
    quad::Options opt;
    opt.abs_tol = 0.5 * tol;
    opt.rel_tol = 1e-10;
    return quad::integrate(integrand, lo, hi, opt);
}

} // namespace tworv::bivariate

#endif
