#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "peelab/enumeration.hpp"
#include "peelab/errors.hpp"
#include "peelab/exact.hpp"
#include "peelab/halfedge.hpp"
#include "peelab/models.hpp"
#include "peelab/rng.hpp"

namespace peelab {

/// E|T^{(p)}| = (p-1)(2p-3)/3 for the free triangulation of the p-gon.
inline Rat mean_size(long p) {
    if (p < 2) throw DomainError("mean_size: p must be >= 2 (TypeII)");
    return make_rat(Bigint(p - 1) * (2 * p - 3), Bigint(3));
}

namespace detail {

/// log n!! with (-1)!! = 0!! = 1.
inline double log_double_factorial(double m) {
    if (m <= 0) return 0.0;
    const double k = m / 2.0;
    if (std::fmod(m, 2.0) < 0.5) return k * std::log(2.0) + std::lgamma(k + 1.0);
    return (k + 0.5) * std::log(2.0) + std::lgamma(k + 1.0) -
           0.5 * std::log(3.14159265358979323846);
}

/// log of w^n #M_{n,p}, the unnormalized Boltzmann mass of size n.
inline double log_weighted_count(ModelId model, long pl, long nl) {
    const double p = static_cast<double>(pl), n = static_cast<double>(nl);
    switch (model) {
        case ModelId::TypeII:
            return (n + 1) * std::log(2.0) + std::lgamma(2 * p - 2) +
                   std::lgamma(2 * p + 3 * n - 3) - 2 * std::lgamma(p - 1) -
                   std::lgamma(n + 1) - std::lgamma(2 * p + 2 * n - 1) +
                   n * std::log(2.0 / 27.0);
        case ModelId::TypeI:
            return (n - 1) * std::log(4.0) + std::log(p) + std::lgamma(2 * p + 1) +
                   log_double_factorial(2 * p + 3 * n - 5) - 2 * std::lgamma(p + 1) -
                   std::lgamma(n + 1) - log_double_factorial(2 * p + n - 1) -
                   n * std::log(12.0 * std::sqrt(3.0));
        case ModelId::Quad:
            return (n - 1) * std::log(3.0) + std::lgamma(3 * p + 1) +
                   std::lgamma(3 * p - 2 + 2 * n) - std::lgamma(n + 1) - std::lgamma(p + 1) -
                   std::lgamma(2 * p) - std::lgamma(n + 3 * p) - n * std::log(12.0);
    }
    return 0;
}

} // namespace detail

/// Size law of the free (critical Boltzmann) map of the p-gon:
/// pmf(n) = w^n #M_{n,p} / Z(p). Terms are generated lazily from the
/// closed-form term ratios; TypeI runs two interleaved parity chains
/// because its double factorials only close over steps of two.
class BoltzmannSizeLaw {
public:
    BoltzmannSizeLaw(ModelId model, long p) : model_(model), p_(p), wt_(weight_table(model)) {
        if (p < wt_.p_min()) throw DomainError("BoltzmannSizeLaw: p below model minimum");
        const double logz = wt_.log_z(p);
        n_start_ = (model == ModelId::TypeI && p == 1) ? 1 : 0;
        terms_.push_back(std::exp(detail::log_weighted_count(model_, p_, n_start_) - logz));
        if (model_ == ModelId::TypeI)
            terms_.push_back(
                std::exp(detail::log_weighted_count(model_, p_, n_start_ + 1) - logz));
    }

    ModelId model() const { return model_; }
    long boundary() const { return p_; }
    long first_index() const { return n_start_; }

    double pmf(long n) {
        if (n < n_start_) return 0.0;
        extend(n);
        return terms_[static_cast<std::size_t>(n - n_start_)];
    }

    /// Exact pmf value, for the oracle tests.
    ExactScalar pmf_exact(long n) const {
        if (n < n_start_) return ExactScalar(Rat(0));
        ExactScalar w = critical_weight(model_);
        ExactScalar v(Rat(1));
        for (long i = 0; i < n; ++i) v *= w;
        return v * ExactScalar(Rat(wt_.count(n, p_))) / wt_.z(p_);
    }

    /// Asymptotic residual mass above N: pmf(n) ~ (C(p)/Z(p)) n^{-5/2}.
    double tail_residual(long N) const {
        const double c_over_z = std::exp(wt_.log_c(p_) - wt_.log_z(p_));
        return c_over_z * tail_power_sum(2.5, N);
    }

    /// Inversion sampling: accumulate lazily generated terms until the
    /// cumulative weight passes u. max_terms guards the heavy tail.
    long sample(Rng& rng, long max_terms = 1'000'000'000L) {
        const double u = rng.uniform01();
        double cum = 0;
        for (long n = n_start_; n - n_start_ < max_terms; ++n) {
            cum += pmf(n);
            if (cum > u) return n;
        }
        throw ResourceError("BoltzmannSizeLaw::sample: truncation guard hit at " +
                            std::to_string(max_terms) + " terms");
    }

private:
    void extend(long n) {
        const long need = n - n_start_;
        const double p = static_cast<double>(p_);
        while (static_cast<long>(terms_.size()) <= need) {
            const long m = n_start_ + static_cast<long>(terms_.size());
            const double dm = static_cast<double>(m);
            double t = 0;
            switch (model_) {
                case ModelId::TypeII: {
                    const double a = 2 * p + 3 * (dm - 1);
                    t = terms_.back() * (4.0 / 27.0) * (a - 3) * (a - 2) * (a - 1) /
                        (dm * (2 * p + 2 * dm - 3) * (2 * p + 2 * dm - 2));
                    break;
                }
                case ModelId::TypeI: {
                    const double prev = terms_[terms_.size() - 2];
                    t = prev * (1.0 / 27.0) * (2 * p + 3 * dm - 5) * (2 * p + 3 * dm - 7) *
                        (2 * p + 3 * dm - 9) / ((dm - 1) * dm * (2 * p + dm - 1));
                    break;
                }
                case ModelId::Quad: {
                    const double c = 3 * p + 2 * dm;
                    t = terms_.back() * 0.25 * (c - 4) * (c - 3) / (dm * (dm + 3 * p - 1));
                    break;
                }
            }
            terms_.push_back(t);
        }
    }

    ModelId model_;
    long p_;
    const WeightTable& wt_;
    long n_start_ = 0;
    std::vector<double> terms_;
};

/// Public inversion sampler over the size law.
inline long sample_size(ModelId model, long p, Rng& rng, long max_terms = 1'000'000'000L) {
    BoltzmannSizeLaw law(model, p);
    return law.sample(rng, max_terms);
}

/// Peeling kernel of a finite Boltzmann disk (TypeII): either the revealed
/// triangle grows the boundary (C) or it splits the disk into independent
/// sub-disks of perimeters a+1 and p-a. Obtained by replacing C with Z in
/// the half-plane formulas; its row sum is exactly the Z recurrence.
struct FiniteKernelRow {
    long p = 0;
    ExactScalar c_prob;
    std::vector<ExactScalar> split; // index a-1 for a in 1..p-2
};

inline FiniteKernelRow finite_kernel_row(long p) {
    if (p < 2) throw DomainError("finite_kernel_row: p must be >= 2");
    const WeightTable& wt = weight_table(ModelId::TypeII);
    FiniteKernelRow row;
    row.p = p;
    const ExactScalar zt = wt.z_prime(p);
    row.c_prob = ExactScalar(Rat(2, 27)) * wt.z(p + 1) / zt;
    for (long a = 1; a <= p - 2; ++a) row.split.push_back(wt.z(a + 1) * wt.z(p - a) / zt);
    ExactScalar sum = row.c_prob;
    for (const auto& s : row.split) sum += s;
    if (sum != ExactScalar(1))
        throw IntegrityError("finite kernel row sum != 1 at p=" + std::to_string(p));
    return row;
}

/// Weight of the trivial map inside the 2-gon law: 1/Z(2) = 8/9.
inline double trivial_mass() { return 8.0 / 9.0; }

/// Hole volume sampler for the chain simulators: plain inversion for small
/// boundaries, envelope rejection against the exact pmf above the cap.
/// Per-run instance; caches are not shared.
class HoleSizeSampler {
public:
    explicit HoleSizeSampler(ModelId model, long max_hole_volume = 10'000'000L)
        : model_(model), wt_(weight_table(model)), max_volume_(max_hole_volume) {}

    long max_volume() const { return max_volume_; }

    long sample(long p, Rng& rng) {
        if (p <= kInversionCap) return small_sample(p, rng);
        return reject_sample(p, rng);
    }

private:
    static constexpr long kInversionCap = 32;
    static constexpr long kWalkCap = 16384;
    static constexpr double kEnvelope = 3.0;

    /// Inversion over the first kWalkCap terms; the remaining mass, deep in
    /// the n^{-5/2} regime, is sampled by a conditional Pareto rejection so
    /// a single draw never walks an unbounded number of terms.
    long small_sample(long p, Rng& rng) {
        const std::size_t idx = static_cast<std::size_t>(p);
        if (laws_.size() <= idx) laws_.resize(idx + 1);
        if (!laws_[idx]) laws_[idx] = std::make_unique<BoltzmannSizeLaw>(model_, p);
        BoltzmannSizeLaw& law = *laws_[idx];
        const double u = rng.uniform01();
        double cum = 0;
        for (long n = law.first_index(); n < kWalkCap; ++n) {
            cum += law.pmf(n);
            if (cum > u) return n;
        }
        const double rem = 1.0 - cum;
        if (!(rem > 0)) return kWalkCap; // rounding corner
        const double n0 = static_cast<double>(kWalkCap);
        const double logz = wt_.log_z(p);
        for (int attempt = 0; attempt < 4096; ++attempt) {
            const double y = n0 * std::pow(rng.uniform01(), -2.0 / 3.0);
            if (!(y < 4.0e18)) continue;
            const long n = static_cast<long>(y);
            const double dn = static_cast<double>(n);
            const double qn =
                std::pow(n0 / dn, 1.5) - std::pow(n0 / (dn + 1.0), 1.5); // Pareto mass
            const double pn = std::exp(detail::log_weighted_count(model_, p, n) - logz) / rem;
            const double ratio = pn / qn;
            if (ratio > 2.0)
                throw IntegrityError("HoleSizeSampler: tail envelope exceeded at p=" +
                                     std::to_string(p));
            if (rng.uniform01() * 2.0 < ratio) return n;
        }
        throw ResourceError("HoleSizeSampler: tail rejection cap hit");
    }

    /// Proposal floor(y) with y ~ Pareto-type tail (n0/(n0+y))^{3/2},
    /// n0 = 0.3 b p^2; accepted against the exact pmf. The envelope
    /// constant is checked on every draw.
    long reject_sample(long p, Rng& rng) {
        const double n0 = 0.3 * limit_b() * static_cast<double>(p) * static_cast<double>(p);
        const double logz = wt_.log_z(p);
        for (int attempt = 0; attempt < 4096; ++attempt) {
            const double uu = rng.uniform01();
            const double y = n0 * (std::pow(uu, -2.0 / 3.0) - 1.0);
            if (!(y < 4.0e18)) continue;
            const long n = static_cast<long>(y);
            if (n < ((model_ == ModelId::TypeI && p == 1) ? 1 : 0)) continue;
            const double dn = static_cast<double>(n);
            const double qn = std::pow(n0 / (n0 + dn), 1.5) - std::pow(n0 / (n0 + dn + 1.0), 1.5);
            const double pn = std::exp(detail::log_weighted_count(model_, p, n) - logz);
            const double ratio = pn / qn;
            if (ratio > kEnvelope)
                throw IntegrityError("HoleSizeSampler: envelope exceeded at p=" +
                                     std::to_string(p) + " n=" + std::to_string(n));
            if (rng.uniform01() * kEnvelope < ratio) return n;
        }
        throw ResourceError("HoleSizeSampler: rejection cap hit");
    }

    double limit_b() const {
        switch (model_) {
            case ModelId::TypeII: return 2.0 / 3.0;
            case ModelId::TypeI: return 4.0 / 3.0;
            case ModelId::Quad: return 4.5;
        }
        return 1;
    }

    ModelId model_;
    const WeightTable& wt_;
    long max_volume_;
    std::vector<std::unique_ptr<BoltzmannSizeLaw>> laws_;
};

/// Fast boundary-size walk over the finite kernel: C or Split(a). Splits
/// are walked from both ends of the a-range at once since the split law is
/// symmetric and heavy at both ends.
class FiniteDiskStepper {
public:
    FiniteDiskStepper() : wt_(weight_table(ModelId::TypeII)) { ensure(128); }

    /// returns -1 for C, else the split index a in 1..p-2
    long step(long p, Rng& rng) {
        ensure(p + 2);
        const double zt =
            p == 2 ? zn_[2] - 1.0 / 81.0 : zn_[static_cast<std::size_t>(p)]; // Z~(p) 9^-p
        const double u = rng.uniform01() * zt;
        double cum = (2.0 / 3.0) * zn_[static_cast<std::size_t>(p + 1)];
        if (u < cum) return -1;
        long lo = 1, hi = p - 2;
        while (lo <= hi) {
            cum += 9.0 * zn_[static_cast<std::size_t>(lo + 1)] *
                   zn_[static_cast<std::size_t>(p - lo)];
            if (u < cum) return lo;
            if (hi != lo) {
                cum += 9.0 * zn_[static_cast<std::size_t>(hi + 1)] *
                       zn_[static_cast<std::size_t>(p - hi)];
                if (u < cum) return hi;
            }
            ++lo;
            --hi;
        }
        return 1; // rounding fallback at the very top of (0,1)
    }

private:
    void ensure(long p) {
        if (!zn_.empty() && static_cast<std::size_t>(p) + 2 <= zn_.size()) return;
        std::size_t n = std::max<std::size_t>(128, zn_.size());
        while (n <= static_cast<std::size_t>(p) + 2) n *= 2;
        const std::size_t old = zn_.size() < 3 ? 3 : zn_.size();
        zn_.resize(n, 0.0);
        zn_[2] = wt_.z(2).to_double() / 81.0;
        for (std::size_t x = old; x < n; ++x)
            zn_[x] = zn_[x - 1] * wt_.z_step(static_cast<long>(x - 1)).to_double() / 9.0;
    }

    const WeightTable& wt_;
    std::vector<double> zn_; // zn[x] = Z(x) 9^-x
};

/// Fill a hole face with a free Boltzmann triangulation by recursive
/// peeling with the finite kernel. Returns the number of inner vertices
/// created; throws ResourceError past max_volume.
inline long fill_hole_boltzmann(HalfEdgeMap& map, FaceId hole, FiniteDiskStepper& stepper,
                                Rng& rng, long max_volume = 10'000'000L) {
    std::vector<std::pair<FaceId, long>> stack{{hole, map.face_degree(hole)}};
    long volume = 0;
    while (!stack.empty()) {
        const auto [f, p] = stack.back();
        stack.pop_back();
        if (p == 2) {
            if (rng.uniform01() < trivial_mass()) {
                map.fill_trivial(f);
                continue;
            }
            map.peel_c(map.face_edge(f));
            ++volume;
            stack.push_back({f, 3});
        } else {
            const long a = stepper.step(p, rng);
            if (a < 0) {
                map.peel_c(map.face_edge(f));
                ++volume;
                stack.push_back({f, p + 1});
            } else {
                const FaceId sub = map.peel_swallow(map.face_edge(f), a, true);
                stack.push_back({sub, a + 1});
                stack.push_back({f, p - a});
            }
        }
        if (volume > max_volume)
            throw ResourceError("fill_hole_boltzmann: volume guard (" +
                                std::to_string(max_volume) + ") exceeded");
    }
    return volume;
}

/// Free Boltzmann triangulation of the p-gon as an explicit map, built by
/// peeling the interior hole of a p-gon shell.
inline HalfEdgeMap sample_disk(long p, Rng& rng, long max_volume = 10'000'000L) {
    if (p < 2) throw DomainError("sample_disk: p must be >= 2 (TypeII)");
    HalfEdgeMap map = HalfEdgeMap::polygon(p);
    const FaceId inner = map.face(map.root());
    FiniteDiskStepper stepper;
    fill_hole_boltzmann(map, inner, stepper, rng, max_volume);
    return map;
}

/// Boltzmann triangulation of the sphere: a 2-gon disk with its two
/// boundary edges glued together. The trivial disk yields the trivial
/// sphere, which keeps its degree-2 face.
inline HalfEdgeMap sample_boltzmann_sphere(Rng& rng, long max_volume = 10'000'000L) {
    HalfEdgeMap map = sample_disk(2, rng, max_volume);
    map.glue_sphere();
    return map;
}

} // namespace peelab
