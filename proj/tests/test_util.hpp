#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Test-side oracles, independent of the library implementation paths they
// check.

namespace testutil {

/// 95% chi-square quantile by Wilson-Hilferty; plenty for goodness-of-fit
/// gating at the sizes used here.
inline double chi2_quantile_95(int dof) {
    const double z = 1.6448536269514722; // N(0,1) 95%
    const double d = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
    return d * t * t * t;
}

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, eps / 2, depth - 1);
}

/// Pre-splits geometrically (the integrands here span many decades) so the
/// adaptive refinement cannot terminate on a hump it never sampled.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-10) {
    const int panels = 64;
    double total = 0;
    double lo = a;
    for (int i = 1; i <= panels; ++i) {
        const double hi = a > 0 ? a * std::pow(b / a, static_cast<double>(i) / panels)
                                : a + (b - a) * static_cast<double>(i) / panels;
        const double m = 0.5 * (lo + hi);
        total += simpson(f, lo, hi, f(lo), f(m), f(hi), eps / panels, 40);
        lo = hi;
    }
    return total;
}

/// One-sample KS distance against a CDF.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c = cdf(xs[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
    }
    return d;
}

} // namespace testutil
