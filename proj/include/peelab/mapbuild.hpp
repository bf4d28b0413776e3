#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "peelab/boltzmann.hpp"
#include "peelab/chains.hpp"
#include "peelab/errors.hpp"
#include "peelab/halfedge.hpp"
#include "peelab/kernel.hpp"
#include "peelab/rng.hpp"

namespace peelab {

/// Hole filler callback: fills the given hole face, returns inner vertices
/// created.
using HoleFiller = std::function<long(HalfEdgeMap&, FaceId)>;

inline HoleFiller boltzmann_filler(FiniteDiskStepper& stepper, Rng& rng,
                                   long max_volume = 10'000'000L) {
    return [&stepper, &rng, max_volume](HalfEdgeMap& m, FaceId f) {
        return fill_hole_boltzmann(m, f, stepper, rng, max_volume);
    };
}

/// Filler that only accepts 2-gon holes and fills them trivially; used by
/// the unit tests that pin down single peel steps.
inline HoleFiller trivial_filler() {
    return [](HalfEdgeMap& m, FaceId f) {
        if (m.face_degree(f) != 2) throw DomainError("trivial_filler: hole is not a 2-gon");
        m.fill_trivial(f);
        return 0L;
    };
}

/// One materialized peeling step on boundary edge h. L_k swallows backward
/// (against the hole cycle), R_k forward; the enclosed hole is filled by
/// the caller's filler. Returns the inner vertices added.
inline long apply_peel(HalfEdgeMap& map, HalfEdgeId h, const PeelEvent& ev,
                       const HoleFiller& filler) {
    if (map.kind(map.face(h)) != FaceKind::Hole)
        throw DomainError("apply_peel: edge is not on the boundary");
    const long p = map.face_degree(map.face(h));
    switch (ev.tag) {
        case PeelTag::C:
            map.peel_c(h);
            return 0;
        case PeelTag::L:
        case PeelTag::R: {
            if (ev.k < 1 || ev.k > p - 2)
                throw DomainError("apply_peel: swallow size " + std::to_string(ev.k) +
                                  " inadmissible at perimeter " + std::to_string(p));
            const FaceId sub = map.peel_swallow(h, ev.k, ev.tag == PeelTag::R);
            return filler(map, sub);
        }
        default:
            throw DomainError("apply_peel: quad pair events have no map materialization");
    }
}

/// Ball/hull decomposition of a map around the root vertex.
struct HullDecomposition {
    long r = 0;
    std::vector<long> hole_lengths; // nonincreasing
    long ball_faces = 0;
    long hull_faces = 0;
    long hull_boundary = 0;       // 0 once the map is exhausted
    long hull_inner_vertices = 0; // |B*_r|
};

/// Distances of every vertex from the root vertex (plain BFS).
inline std::vector<int> map_vertex_distances(const HalfEdgeMap& map) {
    return map.vertex_distances(map.root_vertex());
}

inline HullDecomposition hull_decompose(const HalfEdgeMap& map, long r) {
    if (r < 0) throw DomainError("hull_decompose: negative radius");
    HullDecomposition out;
    out.r = r;
    if (r == 0) return out; // trivial ball: the root edge only

    const auto dist = map_vertex_distances(map);
    const auto nf = static_cast<FaceId>(map.face_slots());

    // determination: no hole may touch a vertex of distance < r
    for (FaceId f = 0; f < nf; ++f) {
        if (!map.face_alive(f) || map.kind(f) != FaceKind::Hole) continue;
        HalfEdgeId h = map.face_edge(f);
        const HalfEdgeId h0 = h;
        do {
            if (dist[map.orig(h)] < r)
                throw DomainError("hull_decompose: undetermined ball at radius " +
                                  std::to_string(r));
            h = map.next(h);
        } while (h != h0);
    }

    std::vector<char> in_ball(nf, 0);
    for (FaceId f = 0; f < nf; ++f) {
        if (!map.face_alive(f) || map.kind(f) != FaceKind::Internal) continue;
        HalfEdgeId h = map.face_edge(f);
        const HalfEdgeId h0 = h;
        do {
            if (dist[map.orig(h)] <= r - 1) {
                in_ball[f] = 1;
                break;
            }
            h = map.next(h);
        } while (h != h0);
        if (in_ball[f]) ++out.ball_faces;
    }

    // complement components and their frontier lengths
    std::vector<int> comp(nf, -1);
    int ncomp = 0;
    std::vector<long> comp_len;
    std::vector<char> comp_has_hole;
    for (FaceId f0 = 0; f0 < nf; ++f0) {
        if (!map.face_alive(f0) || in_ball[f0] || comp[f0] >= 0) continue;
        const int c = ncomp++;
        comp_len.push_back(0);
        comp_has_hole.push_back(0);
        std::queue<FaceId> q;
        comp[f0] = c;
        q.push(f0);
        while (!q.empty()) {
            const FaceId f = q.front();
            q.pop();
            if (map.kind(f) == FaceKind::Hole) comp_has_hole[c] = 1;
            HalfEdgeId h = map.face_edge(f);
            const HalfEdgeId h0 = h;
            do {
                const FaceId g = map.face(map.twin(h));
                if (in_ball[g]) {
                    ++comp_len[c];
                } else if (comp[g] < 0) {
                    comp[g] = c;
                    q.push(g);
                }
                h = map.next(h);
            } while (h != h0);
        }
    }

    out.hole_lengths.assign(comp_len.begin(), comp_len.end());
    std::sort(out.hole_lengths.rbegin(), out.hole_lengths.rend());

    // hull: ball plus bounded components (those without an unfilled hole)
    std::vector<char> in_hull = in_ball;
    for (FaceId f = 0; f < nf; ++f)
        if (map.face_alive(f) && comp[f] >= 0 && !comp_has_hole[comp[f]]) in_hull[f] = 1;
    for (FaceId f = 0; f < nf; ++f)
        if (map.face_alive(f) && in_hull[f] && map.kind(f) == FaceKind::Internal)
            ++out.hull_faces;

    // frontier of the hull and its vertex content
    std::vector<char> on_boundary(dist.size(), 0), in_hull_v(dist.size(), 0);
    for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(map.half_edge_slots()); ++h) {
        if (!map.half_edge_alive(h)) continue;
        const FaceId f = map.face(h);
        if (!in_hull[f]) continue;
        in_hull_v[map.orig(h)] = 1;
        if (!in_hull[map.face(map.twin(h))]) {
            ++out.hull_boundary;
            on_boundary[map.orig(h)] = 1;
            on_boundary[map.dest(h)] = 1;
        }
    }
    long hull_vertices = 0, boundary_vertices = 0;
    for (std::size_t v = 0; v < dist.size(); ++v) {
        if (in_hull_v[v]) ++hull_vertices;
        if (on_boundary[v]) ++boundary_vertices;
    }
    out.hull_inner_vertices = hull_vertices - boundary_vertices;
    return out;
}

/// f(2) = 9, f(n) = n (n-1)(2n-3)/2: the ball-boundary martingale weight.
inline Rat martingale_f(long n) {
    if (n < 2) throw DomainError("martingale_f: n must be >= 2");
    if (n == 2) return Rat(9);
    return make_rat(Bigint(n) * (n - 1) * (2 * n - 3), Bigint(2));
}

/// Exact identity f(p) = (Z(2)/C(2)) (C(p)/Z'(p)), checked in ratio form.
inline bool martingale_f_identity(long p) {
    const WeightTable& wt = weight_table(ModelId::TypeII);
    const ExactScalar lhs = ExactScalar(martingale_f(p)) * wt.z_prime(p) / wt.z(2);
    return lhs == ExactScalar(wt.c_ratio(p, 2));
}

struct MartingaleReport {
    std::vector<long> radii;
    std::vector<double> mean;
    std::vector<double> se;
    bool pass = true;
};

/// Monte Carlo check of E[M_r] = 1 over Boltzmann spheres, 3 sigma bands.
inline MartingaleReport martingale_check(long r_max, long replicas, std::uint64_t seed,
                                         long max_volume = 10'000'000L) {
    if (replicas < 1000) throw DomainError("martingale_check: need at least 1000 replicas");
    MartingaleReport rep;
    std::vector<double> sum(static_cast<std::size_t>(r_max) + 1, 0.0);
    std::vector<double> sumsq(static_cast<std::size_t>(r_max) + 1, 0.0);
    for (long i = 0; i < replicas; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        HalfEdgeMap sphere = sample_boltzmann_sphere(rng, max_volume);
        for (long r = 1; r <= r_max; ++r) {
            const auto dec = hull_decompose(sphere, r);
            double m = 0;
            for (long len : dec.hole_lengths)
                if (len > 0) m += to_double(martingale_f(len));
            sum[r] += m;
            sumsq[r] += m * m;
        }
    }
    for (long r = 1; r <= r_max; ++r) {
        const double n = static_cast<double>(replicas);
        const double mean = sum[r] / n;
        const double var = (sumsq[r] - n * mean * mean) / (n - 1.0);
        const double se = std::sqrt(std::max(0.0, var) / n);
        rep.radii.push_back(r);
        rep.mean.push_back(mean);
        rep.se.push_back(se);
        if (std::abs(mean - 1.0) > 3.0 * se) rep.pass = false;
    }
    return rep;
}

/// Materialized peeling by layers: the exploration whose per-step
/// (P, G, H) follows the layer kernel, kept in lockstep with the incremental
/// chain bookkeeping. The peel pointer is the junction edge maintained by
/// the mutations themselves (the hole representative); the first two steps
/// peel the two sides of the root edge.
class MapLayerRun {
public:
    MapLayerRun(std::uint64_t seed, std::uint64_t stream, long max_volume = 10'000'000L)
        : rng_(seed, stream), kernel_(ModelId::TypeII), max_volume_(max_volume),
          map_(HalfEdgeMap::trivial_edge()) {
        ext_ = map_.face(map_.root());
        root0_ = map_.root();
        dist_.assign(2, 0);
        dist_[map_.dest(root0_)] = 1;
    }

    const HalfEdgeMap& map() const { return map_; }
    long n() const { return n_; }
    long perimeter() const { return p_; }
    long g() const { return g_; }
    long height() const { return h_; }
    long inner_vertices() const { return map_.vertex_count() - p_; }
    int vertex_distance(VertexId v) const { return dist_[v]; }

    /// One layer-peeling step; true when a layer was completed.
    bool step() {
        HalfEdgeId h;
        if (n_ == 0)
            h = root0_;
        else if (n_ == 1)
            h = map_.twin(root0_);
        else
            h = map_.face_edge(ext_);
        check_junction(h);

        const PeelEvent ev = kernel_.sample_tri(p_, rng_);
        const long ell = g_;
        const long old_p = p_;
        bool completed = false;
        if (ev.tag == PeelTag::C) {
            const VertexId u = map_.orig(h), v = map_.dest(h);
            map_.peel_c(h);
            dist_.push_back(std::min(dist_[u], dist_[v]) + 1);
            ++p_;
            ++g_;
        } else {
            const FaceId sub = map_.peel_swallow(h, ev.k, ev.tag == PeelTag::R);
            fill_hole_boltzmann(map_, sub, disk_, rng_, max_volume_);
            while (static_cast<std::size_t>(map_.vertex_count()) > dist_.size())
                dist_.push_back(-1); // filler vertices, distances resolved on demand
            p_ -= ev.k;
            if (ev.tag == PeelTag::L) {
                g_ = ell >= ev.k + 1 ? ell - ev.k : 0;
            } else if (ev.k >= old_p - ell) { // swallowed the whole distance-H arc
                g_ = 0;
                ++h_;
                completed = true;
            }
        }
        ++n_;
        if (completed) sigma_.push_back({h_, p_, inner_vertices()});
        return completed;
    }

    const std::vector<HullRecord>& sigma_records() const { return sigma_; }

private:
    /// The peel edge must run from a distance-(H+1) vertex to a distance-H
    /// vertex whenever the boundary carries two layers.
    void check_junction(HalfEdgeId h) const {
#ifndef NDEBUG
        if (g_ > 0 && n_ >= 2) {
            const int du = dist_[map_.orig(h)], dv = dist_[map_.dest(h)];
            if (du != h_ + 1 || dv != h_)
                throw IntegrityError("layer peel pointer off the junction");
        }
#else
        (void)h;
#endif
    }

    Rng rng_;
    FastKernel kernel_;
    FiniteDiskStepper disk_;
    long max_volume_;
    HalfEdgeMap map_;
    FaceId ext_;
    HalfEdgeId root0_;
    long n_ = 0;
    long p_ = 2;
    long g_ = 1;
    long h_ = 0;
    std::vector<int> dist_;
    std::vector<HullRecord> sigma_;
};

/// Dual-graph distances from the root face; -1 for unreachable/holes.
inline std::vector<int> dual_distances(const HalfEdgeMap& map) {
    return map.dual_distances(map.root_face());
}

/// Boundary length (in edges) of the dual hull of radius r, i.e. the cycle
/// separating faces at dual distance <= r (with enclosed regions) from the
/// rest. Throws if the dual ball is not determined at this radius.
inline long dual_hull_boundary(const HalfEdgeMap& map, long r) {
    const auto dd = dual_distances(map);
    const auto nf = static_cast<FaceId>(map.face_slots());
    // determination: internal faces next to a hole must be farther than r
    long frontier_min = -1;
    for (FaceId f = 0; f < nf; ++f) {
        if (!map.face_alive(f) || map.kind(f) != FaceKind::Hole) continue;
        HalfEdgeId h = map.face_edge(f);
        const HalfEdgeId h0 = h;
        do {
            const FaceId g = map.face(map.twin(h));
            if (map.kind(g) == FaceKind::Internal && dd[g] >= 0)
                frontier_min = frontier_min < 0 ? dd[g] : std::min<long>(frontier_min, dd[g]);
            h = map.next(h);
        } while (h != h0);
    }
    if (frontier_min >= 0 && frontier_min <= r)
        throw DomainError("dual_hull_boundary: dual ball undetermined at radius " +
                          std::to_string(r));

    // components of {d* > r or hole}; the ones containing holes are outside
    std::vector<char> inside(nf, 0);
    for (FaceId f = 0; f < nf; ++f)
        if (map.face_alive(f) && map.kind(f) == FaceKind::Internal && dd[f] >= 0 && dd[f] <= r)
            inside[f] = 1;
    std::vector<int> comp(nf, -1);
    std::vector<char> comp_hole;
    int ncomp = 0;
    for (FaceId f0 = 0; f0 < nf; ++f0) {
        if (!map.face_alive(f0) || inside[f0] || comp[f0] >= 0) continue;
        const int c = ncomp++;
        comp_hole.push_back(0);
        std::queue<FaceId> q;
        comp[f0] = c;
        q.push(f0);
        while (!q.empty()) {
            const FaceId f = q.front();
            q.pop();
            if (map.kind(f) == FaceKind::Hole) comp_hole[c] = 1;
            HalfEdgeId h = map.face_edge(f);
            const HalfEdgeId h0 = h;
            do {
                const FaceId g = map.face(map.twin(h));
                if (!inside[g] && comp[g] < 0) {
                    comp[g] = c;
                    q.push(g);
                }
                h = map.next(h);
            } while (h != h0);
        }
    }
    // absorb bounded components into the hull, then count the frontier
    long boundary = 0;
    for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(map.half_edge_slots()); ++h) {
        if (!map.half_edge_alive(h)) continue;
        const FaceId f = map.face(h);
        const FaceId g = map.face(map.twin(h));
        const bool f_in = inside[f] || (comp[f] >= 0 && !comp_hole[comp[f]]);
        const bool g_in = inside[g] || (comp[g] >= 0 && !comp_hole[comp[g]]);
        if (f_in && !g_in) ++boundary;
    }
    return boundary;
}

} // namespace peelab
