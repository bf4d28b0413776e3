#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "peelab/boltzmann.hpp"
#include "peelab/chains.hpp"
#include "peelab/enumeration.hpp"
#include "peelab/kernel.hpp"
#include "peelab/limits.hpp"
#include "peelab/mapbuild.hpp"
#include "peelab/models.hpp"

namespace peelab {

struct Criterion {
    int id = 0;
    std::string name;
    bool pass = false;
    bool ran = false;
    std::string details;
    double seconds = 0;
};

struct VerifyOptions {
    std::uint64_t seed = 20240801;
    double budget_seconds = 1e18;
    bool exact = true;
    bool statistical = true;
    std::ostream* log = nullptr;
};

namespace detail {

inline std::uint64_t crit_stream(int cid, long replica) {
    return (static_cast<std::uint64_t>(cid) << 40) + static_cast<std::uint64_t>(replica);
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// --- exact criteria -------------------------------------------------------

inline Criterion crit_row_sums() {
    Criterion c{1, "kernel row sums exact to 200 (all models)"};
    long checked = 0;
    for (ModelId m : {ModelId::TypeII, ModelId::TypeI, ModelId::Quad}) {
        RowSumChecker rc(m);
        for (long p = min_boundary(m); p <= 200; ++p) {
            if (rc.row_sum(p) != ExactScalar(1)) {
                c.details = std::string("row sum != 1 at p=") + std::to_string(p) + " model " +
                            model_name(m);
                return c;
            }
            ++checked;
        }
    }
    c.pass = true;
    c.details = std::to_string(checked) + " rows";
    return c;
}

inline Criterion crit_h_transform() {
    Criterion c{2, "h-transform identity and harmonicity"};
    long events = 0;
    for (long p = 2; p <= 200; ++p) events += h_transform_check(ModelId::TypeII, p).checked;
    // floating harmonicity at large p: row sums in doubles within 1e-10
    FastKernel fk(ModelId::TypeII);
    const WeightTable& wt = weight_table(ModelId::TypeII);
    for (long p : {300L, 1000L, 5000L}) {
        double sum = fk.q_c(p);
        double term = wt.z(2).to_double() * std::exp(wt.log_c_ratio(p - 1, p));
        sum += 2 * term;
        for (long k = 2; k <= p - 2; ++k) {
            term *= wt.z_step(k).to_double() / to_double(wt.c_step(p - k));
            sum += 2 * term;
        }
        if (std::abs(sum - 1.0) > 1e-10) {
            c.details = "double-path harmonicity residual " + fmt(sum - 1.0) + " at p=" +
                        std::to_string(p);
            return c;
        }
    }
    c.pass = true;
    c.details = std::to_string(events) + " exact events, double path to p=5000";
    return c;
}

inline Criterion crit_z_recurrence() {
    Criterion c{3, "Z recurrence exact to 200"};
    const WeightTable& wt = weight_table(ModelId::TypeII);
    if (wt.z(2) - ExactScalar(1) != ExactScalar(Rat(2, 27)) * wt.z(3)) {
        c.details = "Z(2)-1 != (2/27) Z(3)";
        return c;
    }
    for (long p = 2; p <= 200; ++p) finite_kernel_row(p); // row sum is the recurrence
    c.pass = true;
    c.details = "finite kernel rows 2..200";
    return c;
}

inline Criterion crit_identities() {
    Criterion c{4, "series identities (2.5)/(2.6) and quad analogues"};
    for (ModelId m : {ModelId::TypeII, ModelId::Quad, ModelId::TypeI}) {
        const auto rep = identity_suite(m, 400, 1e-6);
        for (const auto& it : rep.items)
            if (!it.pass) {
                c.details = std::string(model_name(m)) + " " + it.name + " residual " +
                            fmt(it.residual);
                return c;
            }
    }
    c.pass = true;
    c.details = "sums within 1e-6, asymptotic ratios within 1%";
    return c;
}

inline Criterion crit_f_identity() {
    Criterion c{5, "martingale weight f(p) = (Z(2)/C(2)) C(p)/Z'(p)"};
    if (martingale_f(2) != Rat(9) || martingale_f(3) != Rat(9) || martingale_f(4) != Rat(30)) {
        c.details = "f(2), f(3), f(4) values wrong";
        return c;
    }
    for (long p = 2; p <= 100; ++p)
        if (!martingale_f_identity(p)) {
            c.details = "identity fails at p=" + std::to_string(p);
            return c;
        }
    c.pass = true;
    c.details = "exact for p = 2..100";
    return c;
}

inline Criterion crit_constants() {
    Criterion c{6, "scaling-constant identities"};
    using RE = RadicalExpr;
    const auto t2 = constants(ModelId::TypeII);
    bool ok = t2.v == t2.p * t2.p * t2.b;
    ok = ok && t2.h == t2.a / t2.p;
    ok = ok && t2.h_star == t2.h + RE(1) / t2.p;
    ok = ok && t2.h_star == RE::monomial(1, Rat(4, 3), Rat(-1, 3)); // (16/3)^{1/3}
    ok = ok && t2.c1 == RE(4) && t2.c2 == RE(3);
    ok = ok && t2.p / (t2.h * t2.h) == RE(4);
    for (ModelId m : {ModelId::TypeI, ModelId::Quad}) {
        const auto ct = constants(m);
        ok = ok && ct.v == ct.p * ct.p * ct.b && ct.h == ct.a / ct.p;
        if (m == ModelId::Quad)
            ok = ok && ct.h_star == (RE(1) + ct.a_star) / (RE(2) * ct.p);
        else
            ok = ok && ct.h_star == ct.h + RE(1) / ct.p;
    }
    c.pass = ok;
    c.details = ok ? "symbolic identities hold" : "symbolic identity failed";
    return c;
}

// --- statistical criteria --------------------------------------------------

inline Criterion crit_mean_size(std::uint64_t seed) {
    Criterion c{7, "Boltzmann mean size at p=20"};
    const long draws = 100000;
    BoltzmannSizeLaw law(ModelId::TypeII, 20);
    Rng rng(seed, crit_stream(7, 0));
    double s = 0, s2 = 0;
    for (long i = 0; i < draws; ++i) {
        const double x = static_cast<double>(law.sample(rng));
        s += x;
        s2 += x * x;
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / (draws - 1.0));
    const double target = to_double(mean_size(20));
    c.pass = std::abs(mean - target) <= 3 * se;
    c.details = "mean " + fmt(mean) + " target " + fmt(target) + " (3se " + fmt(3 * se) + ")";
    return c;
}

inline Criterion crit_rescaled_size(std::uint64_t seed) {
    Criterion c{8, "rescaled Boltzmann volume law at p=200"};
    const long draws = 10000, p = 200;
    BoltzmannSizeLaw law(ModelId::TypeII, p);
    Rng rng(seed, crit_stream(8, 0));
    const double scale = (2.0 / 3.0) * p * p;
    std::vector<double> xs(draws);
    for (auto& x : xs) x = static_cast<double>(law.sample(rng)) / scale;
    bool ok = true;
    std::string d;
    for (double lam : {0.5, 1.0}) {
        double e = 0;
        for (double x : xs) e += std::exp(-lam * x);
        e /= draws;
        const double ref = xi_laplace(lam);
        ok = ok && std::abs(e - ref) <= 0.03 * ref;
        d += "L(" + fmt(lam) + ")=" + fmt(e) + " ref " + fmt(ref) + "; ";
    }
    c.pass = ok;
    c.details = d;
    return c;
}

inline Criterion crit_layer_rate(std::uint64_t seed) {
    Criterion c{9, "A_n/n -> 1/3 for the layer chain"};
    const long steps = 1000000, reps = 50;
    double s = 0;
    for (long r = 0; r < reps; ++r) {
        LayerChain chain(seed, crit_stream(9, r), false);
        for (long i = 0; i < steps; ++i) chain.step_layer();
        s += static_cast<double>(chain.layer_edges()) / steps;
    }
    const double mean = s / reps;
    c.pass = mean >= 0.313 && mean <= 0.353;
    c.details = "mean A_n/n = " + fmt(mean);
    return c;
}

struct HullSamples {
    std::vector<double> boundary; // (h^2/p) P_sigma_r / r^2
    std::vector<double> volume;   // (h^4/v) V_sigma_r / r^4
};

inline const HullSamples& hull_samples(std::uint64_t seed) {
    static HullSamples cache;
    static std::uint64_t cached_seed = ~0ULL;
    if (cached_seed == seed) return cache;
    cache = HullSamples{};
    const long reps = 10000, r = 60;
    const auto ct = constants(ModelId::TypeII);
    const double bscale = (ct.h_d * ct.h_d / ct.p_d) / (static_cast<double>(r) * r);
    const double vscale = std::pow(ct.h_d, 4) / ct.v_d /
                          (static_cast<double>(r) * r * static_cast<double>(r) * r);
    cache.boundary.reserve(reps);
    cache.volume.reserve(reps);
    for (long i = 0; i < reps; ++i) {
        LayerChain chain(seed, crit_stream(10, i), true);
        while (chain.height() < r) chain.step_layer();
        cache.boundary.push_back(bscale * static_cast<double>(chain.perimeter()));
        cache.volume.push_back(vscale * static_cast<double>(chain.inner_vertices()));
    }
    cached_seed = seed;
    return cache;
}

inline Criterion crit_hull_boundary(std::uint64_t seed) {
    Criterion c{10, "hull boundary law at r=60"};
    const auto& hs = hull_samples(seed);
    const double mean = mean_of(hs.boundary);
    bool ok = std::abs(mean - 0.375) <= 0.05 * 0.375;
    std::string d = "mean " + fmt(mean) + " target 0.375; ";
    for (double lam : {0.5, 1.0, 2.0}) {
        double e = 0;
        for (double x : hs.boundary) e += std::exp(-lam * x);
        e /= static_cast<double>(hs.boundary.size());
        const double ref = laplace_L(lam, 1.0);
        ok = ok && std::abs(e - ref) <= 0.03 * ref;
        d += "L(" + fmt(lam) + ")=" + fmt(e) + "/" + fmt(ref) + " ";
    }
    c.pass = ok;
    c.details = d;
    return c;
}

inline Criterion crit_hull_volume(std::uint64_t seed) {
    Criterion c{11, "hull volume law at r=60"};
    const auto& hs = hull_samples(seed);
    bool ok = true;
    std::string d;
    for (double lam : {0.5, 1.0}) {
        double e = 0;
        for (double x : hs.volume) e += std::exp(-lam * x);
        e /= static_cast<double>(hs.volume.size());
        const double ref = laplace_M(lam, 1.0);
        ok = ok && std::abs(e - ref) <= 0.05 * ref;
        d += "M(" + fmt(lam) + ")=" + fmt(e) + "/" + fmt(ref) + " ";
    }
    c.pass = ok;
    c.details = d;
    return c;
}

inline Criterion crit_dual_rate(std::uint64_t seed) {
    Criterion c{12, "A*_n/n -> 4/3 for the dual layer chain"};
    const long steps = 1000000, reps = 50;
    double s = 0;
    for (long r = 0; r < reps; ++r) {
        DualLayerChain chain(seed, crit_stream(12, r), false);
        for (long i = 0; i < steps; ++i) chain.step_dual();
        s += static_cast<double>(chain.a_star()) / steps;
    }
    const double mean = s / reps;
    c.pass = std::abs(mean - 4.0 / 3.0) <= 0.03;
    c.details = "mean A*_n/n = " + fmt(mean);
    return c;
}

inline Criterion crit_fpp_layers(std::uint64_t seed) {
    Criterion c{13, "first-passage vs layer height equivalence"};
    const long n = 100000, reps = 10000;
    const auto ct = constants(ModelId::TypeII);
    const double n13 = std::pow(static_cast<double>(n), 1.0 / 3.0);
    std::vector<double> a(reps), b(reps);
    for (long i = 0; i < reps; ++i) {
        FppChain f(ModelId::TypeII, seed, crit_stream(13, i), false);
        for (long s = 0; s < n; ++s) f.step_fpp();
        a[i] = ct.p_d * f.tau() / n13;
        LayerChain l(seed, crit_stream(13, reps + i), false);
        for (long s = 0; s < n; ++s) l.step_layer();
        b[i] = static_cast<double>(l.height()) / (ct.h_d * n13);
    }
    const auto ks = ks_two_sample(a, b, 0.01);

    // slope of E[tau_n] across three decades
    const std::vector<long> ns{1000, 10000, 100000, 1000000};
    std::vector<double> mean_tau(ns.size(), 0.0);
    const long sreps = 200;
    for (long i = 0; i < sreps; ++i) {
        FppChain f(ModelId::TypeII, seed, crit_stream(13, 2 * reps + i), false);
        std::size_t j = 0;
        for (long s = 1; s <= ns.back(); ++s) {
            f.step_fpp();
            if (j < ns.size() && s == ns[j]) mean_tau[j++] += f.tau();
        }
    }
    for (auto& m : mean_tau) m /= sreps;
    const double slope =
        loglog_slope({1e3, 1e4, 1e5, 1e6}, mean_tau);
    const bool slope_ok = std::abs(slope - 1.0 / 3.0) <= 0.03;
    c.pass = ks.pass && slope_ok;
    c.details = "KS " + fmt(ks.statistic) + " (thr " + fmt(ks.threshold) + "), slope " +
                fmt(slope);
    return c;
}

inline Criterion crit_martingale(std::uint64_t seed) {
    Criterion c{14, "ball-boundary martingale over Boltzmann spheres"};
    const auto rep = martingale_check(3, 100000, seed + 14);
    c.pass = rep.pass;
    std::string d;
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
        d += "E[M_" + std::to_string(rep.radii[i]) + "]=" + fmt(rep.mean[i]) + "+-" +
             fmt(rep.se[i]) + " ";
    c.details = d;
    return c;
}

inline Criterion crit_map_vs_chain(std::uint64_t seed) {
    Criterion c{15, "map-mode vs chain-mode hull boundaries"};
    const long reps = 5000, rmax = 10;
    std::vector<std::vector<double>> mapP(rmax + 1), chainP(rmax + 1);
    for (long i = 0; i < reps; ++i) {
        MapLayerRun run(seed, crit_stream(15, i));
        while (run.height() < rmax) run.step();
        for (const auto& rec : run.sigma_records())
            mapP[rec.r].push_back(static_cast<double>(rec.boundary));
        LayerChain chain(seed, crit_stream(15, reps + i), false);
        long h = 0;
        while (h < rmax) {
            if (chain.step_layer()) {
                h = chain.height();
                chainP[h].push_back(static_cast<double>(chain.perimeter()));
            }
        }
    }
    bool ok = true;
    double worst = 0;
    for (long r = 1; r <= rmax; ++r) {
        const auto ks = ks_two_sample(mapP[r], chainP[r], 0.01);
        worst = std::max(worst, ks.statistic / ks.threshold);
        ok = ok && ks.pass;
    }
    c.pass = ok;
    c.details = "worst KS/threshold ratio " + fmt(worst) + " over r=1..10";
    return c;
}

inline Criterion crit_inverse_perimeter(std::uint64_t seed) {
    Criterion c{16, "E[1/P_n] n^{2/3} envelope"};
    const long reps = 2000;
    const std::vector<long> ns{1000, 10000, 100000};
    std::vector<double> acc(ns.size(), 0.0);
    for (long i = 0; i < reps; ++i) {
        PvChain chain(ModelId::TypeII, seed, crit_stream(16, i), false);
        std::size_t j = 0;
        for (long s = 1; s <= ns.back(); ++s) {
            chain.step();
            if (j < ns.size() && s == ns[j])
                acc[j++] += 1.0 / static_cast<double>(chain.perimeter());
        }
    }
    bool ok = true;
    std::string d;
    for (std::size_t j = 0; j < ns.size(); ++j) {
        const double v = (acc[j] / reps) * std::pow(static_cast<double>(ns[j]), 2.0 / 3.0);
        ok = ok && v >= 0.2 && v <= 5.0;
        d += "n=" + std::to_string(ns[j]) + ": " + fmt(v) + " ";
    }
    c.pass = ok;
    c.details = d;
    return c;
}

} // namespace detail

/// Runs the requested criteria, logging one line each, stopping early when
/// the budget runs out (remaining criteria keep ran = false).
inline std::vector<Criterion> run_verify(const VerifyOptions& opt) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    std::vector<std::function<Criterion()>> jobs;
    if (opt.exact) {
        jobs.push_back([] { return detail::crit_row_sums(); });
        jobs.push_back([] { return detail::crit_h_transform(); });
        jobs.push_back([] { return detail::crit_z_recurrence(); });
        jobs.push_back([] { return detail::crit_identities(); });
        jobs.push_back([] { return detail::crit_f_identity(); });
        jobs.push_back([] { return detail::crit_constants(); });
    }
    if (opt.statistical) {
        const auto s = opt.seed;
        jobs.push_back([s] { return detail::crit_mean_size(s); });
        jobs.push_back([s] { return detail::crit_rescaled_size(s); });
        jobs.push_back([s] { return detail::crit_layer_rate(s); });
        jobs.push_back([s] { return detail::crit_hull_boundary(s); });
        jobs.push_back([s] { return detail::crit_hull_volume(s); });
        jobs.push_back([s] { return detail::crit_dual_rate(s); });
        jobs.push_back([s] { return detail::crit_fpp_layers(s); });
        jobs.push_back([s] { return detail::crit_martingale(s); });
        jobs.push_back([s] { return detail::crit_map_vs_chain(s); });
        jobs.push_back([s] { return detail::crit_inverse_perimeter(s); });
    }

    std::vector<Criterion> out;
    for (auto& job : jobs) {
        const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        if (elapsed > opt.budget_seconds) {
            Criterion c;
            c.name = "(budget exceeded)";
            out.push_back(c);
            break;
        }
        const auto c0 = Clock::now();
        Criterion c = job();
        c.ran = true;
        c.seconds = std::chrono::duration<double>(Clock::now() - c0).count();
        if (opt.log)
            (*opt.log) << "criterion " << c.id << " [" << (c.pass ? "PASS" : "FAIL") << "] "
                       << c.name << ": " << c.details << " (" << detail::fmt(c.seconds)
                       << " s)\n"
                       << std::flush;
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace peelab
