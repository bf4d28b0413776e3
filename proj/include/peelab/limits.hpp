#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "peelab/errors.hpp"
#include "peelab/exact.hpp"
#include "peelab/models.hpp"
#include "peelab/rng.hpp"

namespace peelab {

/// Model scaling constants, kept both as exact radical expressions (for the
/// symbolic identity checks) and as doubles (for the estimators).
struct ConstantsTable {
    ModelId model;
    RadicalExpr p, v, h, h_star, a, a_star, t, b, c1, c2;
    double p_d, v_d, h_d, h_star_d, a_d, a_star_d, t_d, b_d, c1_d, c2_d;
};

inline ConstantsTable constants(ModelId model) {
    using RE = RadicalExpr;
    auto mono = [](const Rat& c, const Rat& e2, const Rat& e3, const Rat& epi = Rat(0)) {
        return RE::monomial(c, e2, e3, epi);
    };

    ConstantsTable ct;
    ct.model = model;
    switch (model) {
        case ModelId::TypeII:
            ct.t = mono(Rat(1, 4), 0, 0, Rat(-1, 2));
            ct.a = RE(Rat(1, 3));
            ct.a_star = RE(0);
            ct.b = RE(Rat(2, 3));
            ct.p = mono(1, Rat(2, 3), Rat(-2, 3));
            break;
        case ModelId::TypeI:
            ct.t = mono(Rat(1, 8), 0, Rat(1, 2), Rat(-1, 2));
            ct.a = mono(Rat(1, 2), 0, Rat(-1, 2));
            ct.a_star = RE(0);
            ct.b = RE(Rat(4, 3));
            ct.p = mono(1, 0, Rat(-1, 3));
            break;
        case ModelId::Quad:
            ct.t = mono(Rat(1, 4), 0, Rat(-1, 2), Rat(-1, 2));
            ct.a = RE(Rat(1, 3));
            ct.a_star = RE(Rat(1, 2));
            ct.b = RE(Rat(9, 2));
            ct.p = mono(1, Rat(2, 3), Rat(-1));
            break;
    }
    ct.v = ct.p * ct.p * ct.b;
    ct.h = ct.a / ct.p;
    if (model == ModelId::Quad)
        ct.h_star = (RE(1) + ct.a_star) / (RE(2) * ct.p);
    else
        ct.h_star = (RE(1) + ct.a) / ct.p;
    ct.c1 = ct.h_star / ct.h;
    ct.c2 = RE(1) / (ct.p * ct.h);

    // construction-time consistency: p must solve p = (8 t sqrt(pi) / 3)^{2/3}
    const RE inner = RE(Rat(8, 3)) * ct.t * RadicalExpr::monomial(1, 0, 0, Rat(1, 2));
    if (inner.pow(Rat(2, 3)) != ct.p)
        throw IntegrityError("constants: p does not match (8 t sqrt(pi)/3)^{2/3}");

    ct.p_d = ct.p.value();
    ct.v_d = ct.v.value();
    ct.h_d = ct.h.value();
    ct.h_star_d = ct.h_star.value();
    ct.a_d = ct.a.value();
    ct.a_star_d = ct.a_star.value();
    ct.t_d = ct.t.value();
    ct.b_d = ct.b.value();
    ct.c1_d = ct.c1.value();
    ct.c2_d = ct.c2.value();
    return ct;
}

/// E[exp(-lambda L_s)] = (1 + lambda s^2/4)^{-3/2}; L_1 is Gamma(3/2)
/// distributed with scale 1/4.
inline double laplace_L(double lambda, double s) {
    if (lambda < 0 || s < 0) throw DomainError("laplace_L: negative argument");
    return std::pow(1.0 + lambda * s * s / 4.0, -1.5);
}

/// E[exp(-lambda M_s)]: the cosh formula of the hull volume limit law.
inline double laplace_M(double lambda, double s) {
    if (lambda < 0 || s < 0) throw DomainError("laplace_M: negative argument");
    const double u = std::pow(2.0 * lambda, 0.25) * s / std::sqrt(8.0 / 3.0);
    const double ch = std::cosh(u);
    return std::pow(3.0, 1.5) * ch * std::pow(ch * ch + 2.0, -1.5);
}

/// Independent evaluation path for laplace_M (exp-based, long double),
/// used as the dual-route oracle.
inline double laplace_M_alt(double lambda, double s) {
    if (lambda < 0 || s < 0) throw DomainError("laplace_M_alt: negative argument");
    const long double u =
        std::pow(static_cast<long double>(2.0) * lambda, 0.25L) * s /
        std::sqrt(static_cast<long double>(8.0) / 3.0L);
    const long double eu = std::exp(u), emu = 1.0L / eu;
    const long double ch = (eu + emu) / 2.0L;
    const long double val =
        std::exp(1.5L * std::log(3.0L) + std::log(ch) - 1.5L * std::log(ch * ch + 2.0L));
    return static_cast<double>(val);
}

/// Laplace transform of the Boltzmann-volume limit xi: (1+sqrt(2 l))e^{-sqrt(2 l)}.
inline double xi_laplace(double lambda) {
    if (lambda < 0) throw DomainError("xi_laplace: negative argument");
    const double r = std::sqrt(2.0 * lambda);
    return (1.0 + r) * std::exp(-r);
}

/// Density of xi on (0, inf): x^{-5/2} e^{-1/(2x)} / sqrt(2 pi).
inline double xi_density(double x) {
    if (x < 0) throw DomainError("xi_density: negative argument");
    if (x == 0) return 0;
    return std::exp(-1.0 / (2.0 * x)) / (std::pow(x, 2.5) * std::sqrt(2.0 * 3.14159265358979323846));
}

inline double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double stddev_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / (static_cast<double>(xs.size()) - 1.0));
}

inline double quantile_of(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * (static_cast<double>(xs.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - w) + xs[hi] * w;
}

struct LaplaceEstimate {
    double lambda = 0;
    double value = 0;
    double ci_lo = 0;
    double ci_hi = 0;
};

struct EmpiricalSummary {
    std::size_t count = 0;
    double mean = 0;
    double sd = 0;
    std::vector<double> quantiles; // 5%, 25%, 50%, 75%, 95%
    std::vector<LaplaceEstimate> laplace;
};

/// Empirical Laplace transform with percentile-bootstrap 95% CIs
/// (1000 resamples, seeded internally for reproducibility).
inline EmpiricalSummary empirical_laplace(const std::vector<double>& samples,
                                          const std::vector<double>& lambdas,
                                          std::uint64_t seed = 0xb00f5742u) {
    if (samples.empty()) throw DomainError("empirical_laplace: empty sample");
    if (samples.size() < 100) throw DomainError("empirical_laplace: need at least 100 samples");

    EmpiricalSummary out;
    out.count = samples.size();
    out.mean = mean_of(samples);
    out.sd = stddev_of(samples);
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) out.quantiles.push_back(quantile_of(samples, q));

    const std::size_t n = samples.size();
    constexpr int kResamples = 1000;
    Rng rng(seed, 0);
    for (double lam : lambdas) {
        std::vector<double> ex(n);
        for (std::size_t i = 0; i < n; ++i) ex[i] = std::exp(-lam * samples[i]);
        LaplaceEstimate est;
        est.lambda = lam;
        est.value = mean_of(ex);
        std::vector<double> boot(kResamples);
        for (int b = 0; b < kResamples; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += ex[rng.below(n)];
            boot[b] = s / static_cast<double>(n);
        }
        est.ci_lo = quantile_of(boot, 0.025);
        est.ci_hi = quantile_of(boot, 0.975);
        out.laplace.push_back(est);
    }
    return out;
}

struct KsResult {
    double statistic = 0;
    double threshold = 0;
    bool pass = false;
};

/// Standard two-sample Kolmogorov-Smirnov test at the given level.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double level) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
    r.threshold = c * std::sqrt((na + nb) / (na * nb));
    r.pass = d < r.threshold;
    return r;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: bad input");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

} // namespace peelab
