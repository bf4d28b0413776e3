#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "peelab/enumeration.hpp"
#include "peelab/errors.hpp"
#include "peelab/exact.hpp"
#include "peelab/models.hpp"
#include "peelab/rng.hpp"

namespace peelab {

enum class PeelTag : std::uint8_t { C, L, R, LPair, RPair, CPair };

/// One peeling outcome. For triangulations k is the number of swallowed
/// boundary edges (C ignores it). For Quad single events k is the swallowed
/// edge count in 0..2m-1; pair events carry odd (k, k2) with k + k2 < 2m.
struct PeelEvent {
    PeelTag tag = PeelTag::C;
    long k = 0;
    long k2 = 0;

    bool operator==(const PeelEvent&) const = default;

    std::string str() const {
        switch (tag) {
            case PeelTag::C: return "C";
            case PeelTag::L: return "L" + std::to_string(k);
            case PeelTag::R: return "R" + std::to_string(k);
            case PeelTag::LPair:
                return "Lp(" + std::to_string(k) + "," + std::to_string(k2) + ")";
            case PeelTag::RPair:
                return "Rp(" + std::to_string(k) + "," + std::to_string(k2) + ")";
            case PeelTag::CPair:
                return "Cp(" + std::to_string(k) + "," + std::to_string(k2) + ")";
        }
        return "?";
    }
};

struct KernelEntry {
    PeelEvent event;
    ExactScalar prob;
    double prob_d = 0;
};

/// Normalized one-step law at boundary size p, materialized event by event
/// in the fixed order C, L_k ascending, R_k ascending, then pair blocks
/// (L, R, C) in lexicographic (k1, k2). The exact entries must sum to one;
/// anything else is a transcription bug.
struct KernelRow {
    ModelId model;
    long p = 0;
    std::vector<KernelEntry> entries;
    std::vector<double> cumulative;

    const KernelEntry& find(const PeelEvent& ev) const {
        for (const auto& e : entries)
            if (e.event == ev) return e;
        throw DomainError("event " + ev.str() + " not in row p=" + std::to_string(p));
    }
};

namespace detail {

inline ExactScalar q_c_exact(const WeightTable& wt, long p) {
    if (wt.model() == ModelId::Quad)
        return ExactScalar(wt.c_step(p) / 144);
    return critical_weight(wt.model()) * ExactScalar(wt.c_step(p));
}

/// q_k^{(p)} = Z(k+1) C(p-k)/C(p) for one of L_k / R_k (triangulations).
inline ExactScalar q_k_exact(const WeightTable& wt, long p, long k) {
    return wt.z(k + 1) * ExactScalar(wt.c_ratio(p - k, p));
}

/// Quad single event with j swallowed edges; the enclosed hole has
/// half-perimeter floor(j/2) + 1 and the half-perimeter drops by floor(j/2).
inline ExactScalar q_quad_single_exact(const WeightTable& wt, long m, long j) {
    const long kh = j / 2;
    return wt.z(kh + 1) * ExactScalar(wt.c_ratio(m - kh, m) / 12);
}

inline ExactScalar q_quad_pair_exact(const WeightTable& wt, long m, long k1, long k2) {
    const long j1 = (k1 - 1) / 2, j2 = (k2 - 1) / 2;
    return wt.z(j1 + 1) * wt.z(j2 + 1) * ExactScalar(wt.c_ratio(m - j1 - j2 - 1, m));
}

} // namespace detail

inline KernelRow kernel_row(ModelId model, long p) {
    const WeightTable& wt = weight_table(model);
    if (p < wt.p_min())
        throw DomainError("kernel_row: boundary size below model minimum");
    if (model == ModelId::Quad && p > 512)
        throw ResourceError("kernel_row: quad row materialization capped at m = 512; "
                            "use FastKernel for larger boundaries");

    KernelRow row{model, p, {}, {}};
    auto push = [&](PeelEvent ev, ExactScalar q) {
        row.entries.push_back({ev, q, q.to_double()});
    };

    push({PeelTag::C}, detail::q_c_exact(wt, p));
    if (model == ModelId::Quad) {
        for (long j = 0; j <= 2 * p - 1; ++j)
            push({PeelTag::L, j}, detail::q_quad_single_exact(wt, p, j));
        for (long j = 0; j <= 2 * p - 1; ++j)
            push({PeelTag::R, j}, detail::q_quad_single_exact(wt, p, j));
        for (auto tag : {PeelTag::LPair, PeelTag::RPair, PeelTag::CPair})
            for (long k1 = 1; k1 < 2 * p; k1 += 2)
                for (long k2 = 1; k1 + k2 < 2 * p; k2 += 2)
                    push({tag, k1, k2}, detail::q_quad_pair_exact(wt, p, k1, k2));
    } else {
        const long kmin = model == ModelId::TypeI ? 0 : 1;
        const long kmax = model == ModelId::TypeI ? p - 1 : p - 2;
        for (long k = kmin; k <= kmax; ++k)
            push({PeelTag::L, k}, detail::q_k_exact(wt, p, k));
        for (long k = kmin; k <= kmax; ++k)
            push({PeelTag::R, k}, detail::q_k_exact(wt, p, k));
    }

    ExactScalar sum(Rat(0));
    for (const auto& e : row.entries) sum += e.prob;
    if (sum != ExactScalar(1))
        throw IntegrityError("kernel row sum != 1 at p=" + std::to_string(p) + " for model " +
                             model_name(model) + " (got " + sum.str() + ")");

    row.cumulative.reserve(row.entries.size());
    double c = 0;
    for (const auto& e : row.entries) {
        c += e.prob_d;
        row.cumulative.push_back(c);
    }
    row.cumulative.back() = 1.0;
    return row;
}

/// Exact row sum without materializing events; shares the Z-convolution
/// across quad boundary sizes so the p <= 200 integrity sweep stays cheap.
class RowSumChecker {
public:
    explicit RowSumChecker(ModelId model) : wt_(weight_table(model)) {}

    ExactScalar row_sum(long p) {
        const ModelId model = wt_.model();
        ExactScalar sum = detail::q_c_exact(wt_, p);
        if (model == ModelId::Quad) {
            Rat run(1); // C(p - kh)/C(p)
            ExactScalar singles(Rat(0)), pairs(Rat(0));
            for (long kh = 0; kh <= p - 1; ++kh) {
                if (kh > 0) run /= wt_.c_step(p - kh);
                singles += wt_.z(kh + 1) * ExactScalar(run);
                const long d = kh - 1; // run = C(p-d-1)/C(p) for the pair block
                if (d >= 0) pairs += conv(d) * ExactScalar(run);
            }
            sum += singles * ExactScalar(Rat(1, 3)) + pairs * ExactScalar(Rat(3));
        } else {
            const long kmin = model == ModelId::TypeI ? 0 : 1;
            const long kmax = model == ModelId::TypeI ? p - 1 : p - 2;
            Rat run(1);
            ExactScalar side(Rat(0));
            for (long k = kmin; k <= kmax; ++k) {
                if (k > 0) run /= wt_.c_step(p - k);
                side += wt_.z(k + 1) * ExactScalar(run);
            }
            sum += side * ExactScalar(2);
        }
        return sum;
    }

private:
    const ExactScalar& conv(long d) {
        while (static_cast<long>(conv_.size()) <= d) {
            const long t = static_cast<long>(conv_.size());
            ExactScalar c(Rat(0));
            for (long j = 0; j <= t; ++j) c += wt_.z(j + 1) * wt_.z(t - j + 1);
            conv_.push_back(c);
        }
        return conv_[d];
    }
    const WeightTable& wt_;
    std::vector<ExactScalar> conv_;
};

/// Half-plane one-step law nu: nu(+1) = q_{-1}, nu(-k) = 2 q_k for the
/// triangular models; the quad law adds the pair-event contributions and
/// carries an atom at 0 from the j in {0,1} events.
inline ExactScalar nu_plus_exact(ModelId model) {
    switch (model) {
        case ModelId::TypeII: return ExactScalar(Rat(2, 3));
        case ModelId::TypeI: return ExactScalar(Rat(0), Rat(1, 3)); // 1/sqrt3
        case ModelId::Quad: return ExactScalar(Rat(3, 8));
    }
    throw DomainError("bad model");
}

inline ExactScalar nu_minus_exact(ModelId model, long k) {
    const WeightTable& wt = weight_table(model);
    const Rat bk = pow_rat(Rat(kernel_base(model)), -k);
    if (model != ModelId::Quad) {
        if (k < (model == ModelId::TypeI ? 0 : 1)) return ExactScalar(Rat(0));
        return ExactScalar(2) * wt.z(k + 1) * ExactScalar(bk);
    }
    if (k < 0) return ExactScalar(Rat(0));
    ExactScalar v = wt.z(k + 1) * ExactScalar(bk / 3);
    ExactScalar pairs(Rat(0));
    for (long j = 0; j <= k - 1; ++j) pairs += wt.z(j + 1) * wt.z(k - j);
    v += ExactScalar(3) * pairs * ExactScalar(bk);
    return v;
}

/// Asymptotic tail constant t of nu(-k) ~ 2 t k^{-5/2}.
inline double nu_tail_t(ModelId model) {
    const double zt = weight_table(model).z_tail_const();
    return model == ModelId::Quad ? zt / 4.0 : zt;
}

struct HTransformReport {
    ModelId model;
    long p;
    long checked = 0;
    bool pass = false;
};

/// Verifies q_k^{(p)} = (h(p-k)/h(p)) q_k exactly for every event of the
/// row, including the growth event at k = -1.
inline HTransformReport h_transform_check(ModelId model, long p) {
    if (model == ModelId::Quad)
        throw DomainError("h_transform_check: stated for the triangular models");
    const WeightTable& wt = weight_table(model);
    if (p < wt.p_min()) throw DomainError("h_transform_check: p below model minimum");

    HTransformReport rep{model, p, 0, true};
    const ExactScalar qc = detail::q_c_exact(wt, p);
    if (qc != wt.h_ratio(p, -1) * nu_plus_exact(model))
        throw IntegrityError("h-transform failed at k=-1, p=" + std::to_string(p));
    ++rep.checked;

    const long kmin = model == ModelId::TypeI ? 0 : 1;
    const long kmax = model == ModelId::TypeI ? p - 1 : p - 2;
    const Rat base(kernel_base(model));
    for (long k = kmin; k <= kmax; ++k) {
        const ExactScalar lhs = detail::q_k_exact(wt, p, k);
        const ExactScalar q_inf = wt.z(k + 1) * ExactScalar(pow_rat(base, -k));
        if (lhs != wt.h_ratio(p, k) * q_inf)
            throw IntegrityError("h-transform failed at k=" + std::to_string(k) +
                                 ", p=" + std::to_string(p));
        ++rep.checked;
    }
    return rep;
}

/// Inversion sampling of a materialized row; the order is the row order.
inline PeelEvent sample_event(const KernelRow& row, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("sample_event: u must lie in (0,1)");
    auto it = std::lower_bound(row.cumulative.begin(), row.cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - row.cumulative.begin());
    if (idx >= row.entries.size()) idx = row.entries.size() - 1;
    return row.entries[idx].event;
}

struct NuMoments {
    double mean = 0; // partial sum plus asymptotic tail estimate
    double mean_uncertainty = 0;
    double tail_constant_ratio = 0; // nu(-K) K^{5/2} / (2t) at the cutoff
    bool mean_ok = false;
    bool tail_ok = false;
};

/// Numerical centering check of nu: mean within tol, tail constant within
/// 1% of 2t at the cutoff. The mass beyond the truncation point is summed
/// through the k^{-5/2} asymptotics with a fitted 1/k correction.
inline NuMoments nu_moments(ModelId model, double tol, long cutoff = 10000) {
    if (tol <= 0) throw DomainError("nu_moments: tol must be positive");
    const WeightTable& wt = weight_table(model);
    const double base = static_cast<double>(kernel_base(model));
    const long K = std::max<long>(cutoff, 16384);

    // zh[k] = Z(k+1) base^-k
    std::vector<double> zh(static_cast<std::size_t>(K) + 2, 0.0);
    zh[0] = wt.p_min() <= 1 ? wt.z(1).to_double() : 0.0;
    zh[1] = wt.z(2).to_double() / base;
    for (long k = 1; k <= K; ++k)
        zh[k + 1] = zh[k] * wt.z_step(k + 1).to_double() / base;

    std::vector<double> nu_neg(static_cast<std::size_t>(K) + 1, 0.0);
    if (model == ModelId::Quad) {
        for (long k = 0; k <= K; ++k) {
            double conv = 0;
            for (long j = 0; j <= k - 1; ++j) conv += zh[j] * zh[k - 1 - j];
            nu_neg[k] = zh[k] / 3.0 + 3.0 * conv / base;
        }
    } else {
        const long kmin = model == ModelId::TypeI ? 0 : 1;
        for (long k = kmin; k <= K; ++k) nu_neg[k] = 2.0 * zh[k];
    }

    const double two_t = 2.0 * nu_tail_t(model);

    double mean = nu_plus_exact(model).to_double();
    for (long k = 1; k <= K; ++k) mean -= static_cast<double>(k) * nu_neg[k];

    const double ratioK = nu_neg[K] * std::pow(static_cast<double>(K), 2.5) / two_t;
    const double c1 = (ratioK - 1.0) * static_cast<double>(K);
    const double tail = two_t * (tail_power_sum(1.5, K) + c1 * tail_power_sum(2.5, K));
    const double unc = two_t * 10.0 * (1.0 + std::abs(c1)) * tail_power_sum(3.5, K);

    NuMoments r;
    r.mean = mean - tail;
    r.mean_uncertainty = unc;
    r.mean_ok = std::abs(r.mean) <= tol && unc <= tol;
    r.tail_constant_ratio =
        nu_neg[cutoff] * std::pow(static_cast<double>(cutoff), 2.5) / two_t;
    r.tail_ok = std::abs(r.tail_constant_ratio - 1.0) <= 0.01;
    return r;
}

/// Lazy inversion sampler over the one-step law. The walk starts at the
/// growth event and climbs the swallow sizes, so expected work per step is
/// O(1) thanks to the k^{-5/2} decay. Owns flat double tables extended
/// geometrically; one instance per running chain, no locking.
class FastKernel {
public:
    explicit FastKernel(ModelId model) : model_(model), wt_(weight_table(model)) {
        pmin_ = wt_.p_min();
        base_ = static_cast<double>(kernel_base(model));
        ensure(256);
        z2_ = wt_.z(2).to_double();
        z1_ = pmin_ <= 1 ? wt_.z(1).to_double() : 0.0;
    }

    ModelId model() const { return model_; }

    double q_c(long p) {
        ensure(p);
        return qc_[static_cast<std::size_t>(p)];
    }

    /// Triangulation step (TypeII / TypeI): C, L_k, or R_k.
    PeelEvent sample_tri(long p, Rng& rng) {
        ensure(p);
        const double u = rng.uniform01();
        const double qc = qc_[static_cast<std::size_t>(p)];
        if (u < qc) return {PeelTag::C};
        const double half = (1.0 - qc) / 2.0;
        double v = u - qc;
        PeelTag tag = PeelTag::L;
        if (v >= half) {
            tag = PeelTag::R;
            v -= half;
        }
        const long kmin = model_ == ModelId::TypeI ? 0 : 1;
        const long kmax = model_ == ModelId::TypeI ? p - 1 : p - 2;
        long k = kmin;
        double term = kmin == 0 ? z1_ : z2_ / cstep_[static_cast<std::size_t>(p - 1)];
        double cum = term;
        while (cum <= v && k < kmax) {
            term *= zstep_[static_cast<std::size_t>(k + 1)] /
                    cstep_[static_cast<std::size_t>(p - k - 1)];
            ++k;
            cum += term;
        }
        return {tag, k};
    }

    /// Quad step at half-perimeter m. Walk order: C, then for g = 0,1,...
    /// the four single events of hole half-perimeter g+1, then the pair
    /// events of total enclosed size g (three orientations, lexicographic).
    PeelEvent sample_quad(long m, Rng& rng) {
        ensure(m);
        const double u = rng.uniform01();
        double cum = qc_[static_cast<std::size_t>(m)];
        if (u < cum) return {PeelTag::C};

        double crun = 1.0; // 54^g C(m-g)/C(m), bounded by the h monotonicity
        for (long g = 0; g <= m - 1; ++g) {
            if (g > 0) crun *= base_ / cstep_[static_cast<std::size_t>(m - g)];
            const double single = zh_[static_cast<std::size_t>(g)] * crun / 12.0;
            if (u < cum + 4.0 * single) {
                double off = (u - cum) / single;
                if (off >= 4.0) off = 3.999;
                const int idx = static_cast<int>(off);
                return {idx < 2 ? PeelTag::L : PeelTag::R, 2 * g + (idx & 1)};
            }
            cum += 4.0 * single;

            const long d = g;
            if (d <= m - 2) {
                const double cfac = crun / cstep_[static_cast<std::size_t>(m - d - 1)];
                const double group = 3.0 * conv(d) * cfac;
                if (u < cum + group) {
                    double v = (u - cum) / cfac;
                    const double third = conv(d);
                    PeelTag tag = PeelTag::LPair;
                    if (v >= third) {
                        tag = PeelTag::RPair;
                        v -= third;
                    }
                    if (v >= third) {
                        tag = PeelTag::CPair;
                        v -= third;
                    }
                    long j1 = 0;
                    double c2 = zh_[0] * zh_[static_cast<std::size_t>(d)];
                    while (c2 <= v && j1 < d) {
                        ++j1;
                        c2 += zh_[static_cast<std::size_t>(j1)] *
                              zh_[static_cast<std::size_t>(d - j1)];
                    }
                    return {tag, 2 * j1 + 1, 2 * (d - j1) + 1};
                }
                cum += group;
            }
        }
        // reachable only through rounding at the very top of [0,1)
        return {PeelTag::R, 2 * m - 1};
    }

private:
    void ensure(long p) {
        const std::size_t need = static_cast<std::size_t>(p) + 2;
        if (need <= filled_) return;
        std::size_t n = std::max<std::size_t>(256, filled_);
        while (n < need) n *= 2;
        cstep_.resize(n, 1.0);
        zstep_.resize(n, 1.0);
        qc_.resize(n, 1.0);
        zh_.resize(n, 0.0);
        const std::size_t lo = std::max<std::size_t>(filled_, static_cast<std::size_t>(pmin_));
        for (std::size_t q = lo; q < n; ++q) {
            const long ql = static_cast<long>(q);
            cstep_[q] = to_double(wt_.c_step(ql));
            zstep_[q] = wt_.z_step(ql).to_double();
            qc_[q] = detail::q_c_exact(wt_, ql).to_double();
        }
        if (zh_filled_ == 0) {
            zh_[0] = pmin_ <= 1 ? wt_.z(1).to_double() : 0.0;
            zh_[1] = wt_.z(2).to_double() / base_;
            zh_filled_ = 2;
        }
        for (std::size_t k = zh_filled_; k < n; ++k)
            zh_[k] = zh_[k - 1] * zstep_[k] / base_;
        zh_filled_ = n;
        filled_ = n;
    }

    double conv(long d) {
        while (static_cast<long>(convh_.size()) <= d) {
            const long t = static_cast<long>(convh_.size());
            double c = 0;
            for (long j = 0; j <= t; ++j)
                c += zh_[static_cast<std::size_t>(j)] * zh_[static_cast<std::size_t>(t - j)];
            convh_.push_back(c);
        }
        return convh_[static_cast<std::size_t>(d)];
    }

    ModelId model_;
    const WeightTable& wt_;
    long pmin_ = 2;
    double base_ = 9.0;
    std::vector<double> cstep_, zstep_, qc_, zh_;
    std::vector<double> convh_;
    std::size_t filled_ = 0;
    std::size_t zh_filled_ = 0;
    double z2_ = 0, z1_ = 0;
};

} // namespace peelab
