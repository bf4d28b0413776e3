#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "peelab/boltzmann.hpp"
#include "peelab/errors.hpp"
#include "peelab/kernel.hpp"
#include "peelab/models.hpp"
#include "peelab/rng.hpp"
#include "peelab/trace.hpp"

namespace peelab {

/// Boundary-and-volume chain (P_n, V_n) of a peeling exploration, in
/// chain-only mode: no map is built, hole volumes are drawn from the
/// Boltzmann size law of the hole perimeter. P is the half-perimeter for
/// Quad; V counts inner vertices, total - boundary.
class PvChain {
public:
    PvChain(ModelId model, std::uint64_t seed, std::uint64_t stream, bool track_volume = true,
            long max_hole_volume = 10'000'000L)
        : model_(model), rng_(seed, stream), kernel_(model),
          holes_(model, max_hole_volume), track_volume_(track_volume) {
        p_ = model == ModelId::Quad ? 1 : 2;
        total_ = 2;
    }

    ModelId model() const { return model_; }
    long n() const { return n_; }
    long perimeter() const { return p_; }
    long boundary_edges() const { return model_ == ModelId::Quad ? 2 * p_ : p_; }
    long boundary_vertices() const { return boundary_edges(); }
    long total_vertices() const { return total_; }
    long inner_vertices() const { return total_ - boundary_vertices(); }
    long c_events() const { return c_events_; }
    long hole_vertex_sum() const { return hole_vertex_sum_; }
    Rng& rng() { return rng_; }

    PeelEvent step() {
        const PeelEvent ev =
            model_ == ModelId::Quad ? kernel_.sample_quad(p_, rng_) : kernel_.sample_tri(p_, rng_);
        apply(ev);
        ++n_;
        return ev;
    }

protected:
    void apply(const PeelEvent& ev) {
        if (model_ != ModelId::Quad) {
            if (ev.tag == PeelTag::C) {
                ++p_;
                ++total_;
                ++c_events_;
            } else {
                p_ -= ev.k;
                add_hole(ev.k + 1);
            }
            return;
        }
        switch (ev.tag) {
            case PeelTag::C:
                ++p_;
                total_ += 2;
                ++c_events_;
                break;
            case PeelTag::L:
            case PeelTag::R: {
                const long kh = ev.k / 2;
                p_ -= kh;
                ++total_; // third boundary vertex of the revealed quad
                add_hole(kh + 1);
                break;
            }
            default: { // pair events
                const long j1 = (ev.k - 1) / 2, j2 = (ev.k2 - 1) / 2;
                p_ -= j1 + j2 + 1;
                add_hole(j1 + 1);
                add_hole(j2 + 1);
                break;
            }
        }
    }

    void add_hole(long perim) {
        if (!track_volume_) return;
        const long s = holes_.sample(perim, rng_);
        total_ += s;
        hole_vertex_sum_ += s;
    }

    ModelId model_;
    Rng rng_;
    FastKernel kernel_;
    HoleSizeSampler holes_;
    bool track_volume_;
    long n_ = 0;
    long p_ = 2;
    long total_ = 2;
    long c_events_ = 0;
    long hole_vertex_sum_ = 0;
};

/// Peeling-by-layers chain (P_n, G_n, H_n) with the layer-edge tally A_n
/// carried through the path identity A_n = sum_{i<H} P_{sigma_i} +
/// (P_{sigma_H} - U_n). TypeII only.
class LayerChain : public PvChain {
public:
    LayerChain(std::uint64_t seed, std::uint64_t stream, bool track_volume = true,
               long max_hole_volume = 10'000'000L)
        : PvChain(ModelId::TypeII, seed, stream, track_volume, max_hole_volume) {
        g_ = 1; // trivial start (2,1,0): the non-root endpoint sits at distance 1
    }

    long g() const { return g_; }
    long u() const { return p_ - g_; }
    long height() const { return h_; }
    long layer_edges() const { return h_ >= 1 ? sum_p_sigma_ + p_sigma_cur_ - u() : 0; }
    long sigma_count() const { return h_; }
    long p_sigma_current() const { return p_sigma_cur_; }

    /// true when this step completed a layer (n == sigma_{H_n})
    bool step_layer() {
        const PeelEvent ev = kernel_.sample_tri(p_, rng_);
        const long ell = g_;
        bool completed = false;
        if (ev.tag == PeelTag::C) {
            ++g_;
        } else if (ev.tag == PeelTag::L) {
            g_ = ell >= ev.k + 1 ? ell - ev.k : 0;
        } else { // R
            if (ev.k >= p_ - ell) { // swallowed through the whole distance-H arc
                g_ = 0;
                ++h_;
                completed = true;
            }
        }
        apply(ev);
        ++n_;
        if (completed) {
            if (h_ > 1) sum_p_sigma_ += p_sigma_cur_;
            p_sigma_cur_ = p_;
        }
        return completed;
    }

private:
    long g_ = 1;
    long h_ = 0;
    long sum_p_sigma_ = 0;
    long p_sigma_cur_ = 0;
};

/// Dual peeling-by-layers chain (P_n, G*_n, H*_n) with the exact layer
/// tally A*_n: the peeled edge leaves the boundary every step, and
/// right-swallows retire swallowed distance-H* edges with it. Starts from
/// the revealed root face, state (3, 0, 0). TypeII only.
class DualLayerChain : public PvChain {
public:
    DualLayerChain(std::uint64_t seed, std::uint64_t stream, bool track_volume = true,
                   long max_hole_volume = 10'000'000L)
        : PvChain(ModelId::TypeII, seed, stream, track_volume, max_hole_volume) {
        p_ = 3;
        total_ = 3;
        g_ = 0;
    }

    long g_star() const { return g_; }
    long h_star() const { return h_; }
    long a_star() const { return a_; }

    bool step_dual() {
        const PeelEvent ev = kernel_.sample_tri(p_, rng_);
        const long ell = g_;
        bool completed = false;
        if (ev.tag == PeelTag::C) {
            if (ell <= p_ - 2) {
                g_ = ell + 2;
            } else {
                g_ = 0;
                ++h_;
                completed = true;
            }
            a_ += 1;
        } else if (ev.tag == PeelTag::L) {
            if (ev.k <= ell) {
                a_ += 1;
                if (ell == p_ - 1) {
                    // the peeled edge was the last one incident to distance
                    // H*; swallowing left of it closes the layer as well
                    g_ = 0;
                    ++h_;
                    completed = true;
                } else {
                    g_ = ell - ev.k + 1;
                }
            } else {
                g_ = 1;
                a_ += 1 + (ev.k - ell);
            }
        } else { // R
            if (ev.k <= p_ - ell - 2) {
                g_ = ell + 1;
                a_ += 1 + ev.k;
            } else {
                a_ += 1 + (p_ - ell - 1);
                g_ = 0;
                ++h_;
                completed = true;
            }
        }
        apply(ev);
        ++n_;
        return completed;
    }

private:
    long g_ = 0;
    long h_ = 0;
    long a_ = 0;
};

/// Uniform peeling with exponential clocks: the (P,V) law equals PvChain
/// by the Markov property; the k-th clock is exponential with rate the
/// boundary edge count before the jump.
class FppChain : public PvChain {
public:
    FppChain(ModelId model, std::uint64_t seed, std::uint64_t stream, bool track_volume = true,
             long max_hole_volume = 10'000'000L)
        : PvChain(model, seed, stream, track_volume, max_hole_volume) {}

    double tau() const { return tau_; }

    PeelEvent step_fpp() {
        tau_ += rng_.exponential(static_cast<double>(boundary_edges()));
        return step();
    }

private:
    double tau_ = 0;
};

/// Convenience run wrappers producing traces. record_every = 0 keeps only
/// the final row.
inline Trace run_pv(ModelId model, long steps, std::uint64_t seed, std::uint64_t stream = 0,
                    long record_every = 1, bool track_volume = true,
                    long max_hole_volume = 10'000'000L) {
    if (steps < 1) throw DomainError("run_pv: steps must be >= 1");
    PvChain chain(model, seed, stream, track_volume, max_hole_volume);
    Trace tr{model, "pv", seed, stream, steps, false, {}};
    for (long i = 1; i <= steps; ++i) {
        chain.step();
        if ((record_every > 0 && i % record_every == 0) || i == steps)
            tr.rows.push_back({i, chain.perimeter(), chain.inner_vertices(), 0, 0, 0, 0, 0.0});
    }
    return tr;
}

inline Trace run_layers(long steps, std::uint64_t seed, std::uint64_t stream = 0,
                        long record_every = 1, bool track_volume = true,
                        long max_hole_volume = 10'000'000L) {
    if (steps < 1) throw DomainError("run_layers: steps must be >= 1");
    LayerChain chain(seed, stream, track_volume, max_hole_volume);
    Trace tr{ModelId::TypeII, "layers", seed, stream, steps, false, {}};
    for (long i = 1; i <= steps; ++i) {
        chain.step_layer();
        if ((record_every > 0 && i % record_every == 0) || i == steps)
            tr.rows.push_back({i, chain.perimeter(), chain.inner_vertices(), chain.height(),
                               chain.layer_edges(), chain.u(), chain.g(), 0.0});
    }
    return tr;
}

inline Trace run_dual_layers(long steps, std::uint64_t seed, std::uint64_t stream = 0,
                             long record_every = 1, bool track_volume = true,
                             long max_hole_volume = 10'000'000L) {
    if (steps < 1) throw DomainError("run_dual_layers: steps must be >= 1");
    DualLayerChain chain(seed, stream, track_volume, max_hole_volume);
    Trace tr{ModelId::TypeII, "dual", seed, stream, steps, false, {}};
    for (long i = 1; i <= steps; ++i) {
        chain.step_dual();
        if ((record_every > 0 && i % record_every == 0) || i == steps)
            tr.rows.push_back({i, chain.perimeter(), chain.inner_vertices(), chain.h_star(),
                               chain.a_star(), 0, chain.g_star(), 0.0});
    }
    return tr;
}

inline Trace run_fpp(ModelId model, long steps, std::uint64_t seed, std::uint64_t stream = 0,
                     long record_every = 1, bool track_volume = true,
                     long max_hole_volume = 10'000'000L) {
    if (steps < 1) throw DomainError("run_fpp: steps must be >= 1");
    FppChain chain(model, seed, stream, track_volume, max_hole_volume);
    Trace tr{model, "fpp", seed, stream, steps, false, {}};
    for (long i = 1; i <= steps; ++i) {
        chain.step_fpp();
        if ((record_every > 0 && i % record_every == 0) || i == steps)
            tr.rows.push_back(
                {i, chain.perimeter(), chain.inner_vertices(), 0, 0, 0, 0, chain.tau()});
    }
    return tr;
}

struct HullRecord {
    long r = 0;
    long boundary = 0; // |dB*_r| = P_{sigma_r}
    long volume = 0;   // |B*_r|  = V_{sigma_r}
};

/// Runs the layer chain until H = r_max and records (P, V) at each sigma_r.
inline std::vector<HullRecord> hull_series(long r_max, std::uint64_t seed,
                                           std::uint64_t stream = 0, bool track_volume = true,
                                           long max_hole_volume = 10'000'000L,
                                           long max_steps = 2'000'000'000L) {
    if (r_max < 1) throw DomainError("hull_series: r_max must be >= 1");
    LayerChain chain(seed, stream, track_volume, max_hole_volume);
    std::vector<HullRecord> out;
    while (chain.height() < r_max) {
        if (chain.n() >= max_steps) throw ResourceError("hull_series: step guard exceeded");
        if (chain.step_layer())
            out.push_back({chain.height(), chain.perimeter(), chain.inner_vertices()});
    }
    return out;
}

} // namespace peelab
