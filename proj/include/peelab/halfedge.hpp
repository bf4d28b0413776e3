#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "peelab/errors.hpp"

namespace peelab {

using HalfEdgeId = std::int32_t;
using VertexId = std::int32_t;
using FaceId = std::int32_t;
inline constexpr std::int32_t kNoId = -1;

enum class FaceKind : std::uint8_t { Internal, Hole };

/// Rooted combinatorial map stored as half-edge permutations. Every face
/// (internal or hole) is the next_-cycle of its half-edges with the face on
/// the left; twin links the two sides of an edge. Holes stand for regions
/// not yet filled: the unknown part of an exploration, or disk interiors
/// during Boltzmann sampling. Gluing a trivial 2-gon is the one mutation
/// that identifies two edges, which re-points twins and retires half-edges.
class HalfEdgeMap {
public:
    /// The trivial triangulation: one edge, two vertices, one hole of
    /// degree 2 made of both sides of the edge.
    static HalfEdgeMap trivial_edge() {
        HalfEdgeMap m;
        const VertexId a = m.new_vertex(), b = m.new_vertex();
        const FaceId f = m.new_face(FaceKind::Hole);
        const HalfEdgeId h0 = m.new_half_edge(a, f), h1 = m.new_half_edge(b, f);
        m.twin_[h0] = h1;
        m.twin_[h1] = h0;
        m.link(h0, h1);
        m.link(h1, h0);
        m.face_edge_[f] = h0;
        m.root_ = h0;
        return m;
    }

    /// A p-gon with two hole faces: the interior (left of the root
    /// half-edge, to be filled) and the outer side.
    static HalfEdgeMap polygon(long p) {
        if (p < 2) throw DomainError("polygon: need p >= 2");
        HalfEdgeMap m;
        std::vector<VertexId> vs(p);
        for (auto& v : vs) v = m.new_vertex();
        const FaceId inner = m.new_face(FaceKind::Hole);
        const FaceId outer = m.new_face(FaceKind::Hole);
        std::vector<HalfEdgeId> in(p), out(p);
        for (long i = 0; i < p; ++i) {
            in[i] = m.new_half_edge(vs[i], inner);
            out[i] = m.new_half_edge(vs[(i + 1) % p], outer);
            m.twin_[in[i]] = out[i];
            m.twin_[out[i]] = in[i];
        }
        for (long i = 0; i < p; ++i) {
            m.link(in[i], in[(i + 1) % p]);
            m.link(out[(i + 1) % p], out[i]);
        }
        m.face_edge_[inner] = in[0];
        m.face_edge_[outer] = out[0];
        m.root_ = in[0];
        return m;
    }

    HalfEdgeId root() const { return root_; }
    VertexId root_vertex() const { return vert_[root_]; }

    HalfEdgeId twin(HalfEdgeId h) const { return twin_[h]; }
    HalfEdgeId next(HalfEdgeId h) const { return next_[h]; }
    HalfEdgeId prev(HalfEdgeId h) const { return prev_[h]; }
    VertexId orig(HalfEdgeId h) const { return vert_[h]; }
    VertexId dest(HalfEdgeId h) const { return vert_[twin_[h]]; }
    FaceId face(HalfEdgeId h) const { return face_[h]; }
    FaceKind kind(FaceId f) const { return face_kind_[f]; }
    bool half_edge_alive(HalfEdgeId h) const { return he_alive_[h]; }
    bool face_alive(FaceId f) const { return face_alive_[f]; }
    HalfEdgeId face_edge(FaceId f) const { return face_edge_[f]; }

    std::size_t half_edge_slots() const { return twin_.size(); }
    std::size_t face_slots() const { return face_kind_.size(); }
    long vertex_count() const { return n_vertices_; }
    long edge_count() const { return n_half_edges_alive_ / 2; }
    long face_count() const { return n_faces_alive_; }

    long face_degree(FaceId f) const {
        long d = 0;
        const HalfEdgeId h0 = face_edge_[f];
        HalfEdgeId h = h0;
        do {
            ++d;
            h = next_[h];
        } while (h != h0);
        return d;
    }

    std::vector<FaceId> holes() const {
        std::vector<FaceId> hs;
        for (FaceId f = 0; f < static_cast<FaceId>(face_kind_.size()); ++f)
            if (face_alive_[f] && face_kind_[f] == FaceKind::Hole) hs.push_back(f);
        return hs;
    }

    /// Reveal a triangle with a fresh third vertex on hole edge h.
    /// The hole loses h and gains two edges; its degree grows by one.
    VertexId peel_c(HalfEdgeId h) {
        const FaceId hole = face_[h];
        require(face_kind_[hole] == FaceKind::Hole, "peel_c: not a hole edge");
        const VertexId u = vert_[h];
        const VertexId v = dest(h);
        const HalfEdgeId hp = prev_[h], hn = next_[h];
        const VertexId w = new_vertex();
        const FaceId tri = new_face(FaceKind::Internal);

        const HalfEdgeId b1 = new_half_edge(v, tri);   // v -> w
        const HalfEdgeId b1t = new_half_edge(w, hole); // w -> v
        const HalfEdgeId b2 = new_half_edge(w, tri);   // w -> u
        const HalfEdgeId b2t = new_half_edge(u, hole); // u -> w
        twin_[b1] = b1t;
        twin_[b1t] = b1;
        twin_[b2] = b2t;
        twin_[b2t] = b2;

        face_[h] = tri;
        link(h, b1);
        link(b1, b2);
        link(b2, h);
        face_edge_[tri] = h;

        if (hp == h) {
            // degree-2 hole whose other side is h itself cannot happen
            throw IntegrityError("peel_c: degenerate hole");
        }
        link(hp, b2t);
        link(b2t, b1t);
        link(b1t, hn);
        face_edge_[hole] = b1t;
        debug_validate();
        return w;
    }

    /// Reveal a triangle whose third vertex w lies k boundary steps from
    /// the peeled edge: forward along next_ when forward = true, else
    /// backward. The swallowed arc plus one triangle side becomes a new
    /// hole of degree k+1, returned to the caller for filling. The old
    /// hole keeps the rest and loses k edges of degree.
    FaceId peel_swallow(HalfEdgeId h, long k, bool forward) {
        const FaceId hole = face_[h];
        require(face_kind_[hole] == FaceKind::Hole, "peel_swallow: not a hole edge");
        require(k >= 1, "peel_swallow: k must be >= 1");
        const VertexId u = vert_[h];
        const VertexId v = dest(h);
        const FaceId tri = new_face(FaceKind::Internal);
        const FaceId sub = new_face(FaceKind::Hole);

        if (forward) {
            HalfEdgeId sk = h;
            for (long i = 0; i < k; ++i) sk = next_[sk];
            require(sk != h && next_[sk] != h, "peel_swallow: k exceeds hole degree - 2");
            const HalfEdgeId s1 = next_[h];
            const HalfEdgeId after = next_[sk];
            const VertexId w = dest(sk);

            const HalfEdgeId d = new_half_edge(v, tri);   // v -> w, hole side
            const HalfEdgeId dt = new_half_edge(w, sub);  // w -> v
            const HalfEdgeId c = new_half_edge(w, tri);   // w -> u
            const HalfEdgeId ct = new_half_edge(u, hole); // u -> w
            twin_[d] = dt;
            twin_[dt] = d;
            twin_[c] = ct;
            twin_[ct] = c;

            const HalfEdgeId hp = prev_[h];
            face_[h] = tri;
            link(h, d);
            link(d, c);
            link(c, h);
            face_edge_[tri] = h;

            for (HalfEdgeId x = s1;; x = next_[x]) {
                face_[x] = sub;
                if (x == sk) break;
            }
            link(sk, dt);
            link(dt, s1);
            face_edge_[sub] = dt;

            link(hp, ct);
            link(ct, after);
            face_edge_[hole] = ct;
        } else {
            HalfEdgeId tk = h;
            for (long i = 0; i < k; ++i) tk = prev_[tk];
            require(tk != h && prev_[tk] != h, "peel_swallow: k exceeds hole degree - 2");
            const HalfEdgeId t1 = prev_[h];
            const HalfEdgeId before = prev_[tk];
            const VertexId w = vert_[tk];

            const HalfEdgeId c = new_half_edge(v, tri);   // v -> w, outer side
            const HalfEdgeId ct = new_half_edge(w, hole); // w -> v
            const HalfEdgeId d = new_half_edge(w, tri);   // w -> u, hole side
            const HalfEdgeId dt = new_half_edge(u, sub);  // u -> w
            twin_[c] = ct;
            twin_[ct] = c;
            twin_[d] = dt;
            twin_[dt] = d;

            const HalfEdgeId hn = next_[h];
            face_[h] = tri;
            link(h, c);
            link(c, d);
            link(d, h);
            face_edge_[tri] = h;

            for (HalfEdgeId x = tk;; x = next_[x]) {
                face_[x] = sub;
                if (x == t1) break;
            }
            link(t1, dt);
            link(dt, tk);
            face_edge_[sub] = dt;

            link(before, ct);
            link(ct, hn);
            face_edge_[hole] = ct;
        }
        debug_validate();
        return sub;
    }

    /// Fill a 2-gon hole with the trivial triangulation by identifying its
    /// two edges. Both half-edges of the hole retire.
    void fill_trivial(FaceId hole) {
        require(face_kind_[hole] == FaceKind::Hole, "fill_trivial: not a hole");
        const HalfEdgeId g1 = face_edge_[hole];
        const HalfEdgeId g2 = next_[g1];
        require(next_[g2] == g1, "fill_trivial: hole degree must be 2");
        require(twin_[g1] != g2, "fill_trivial: cannot glue an edge to itself");
        const HalfEdgeId o1 = twin_[g1], o2 = twin_[g2];
        twin_[o1] = o2;
        twin_[o2] = o1;
        if (root_ == g1) root_ = o2;
        if (root_ == g2) root_ = o1;
        fix_vertex_edge(vert_[g1], g1, o2);
        fix_vertex_edge(vert_[g2], g2, o1);
        kill_half_edge(g1);
        kill_half_edge(g2);
        kill_face(hole);
        debug_validate();
    }

    /// Close a finished 2-gon disk into a sphere. On the trivial disk the
    /// hole becomes the degree-2 face of the trivial sphere.
    void glue_sphere() {
        auto hs = holes();
        require(hs.size() == 1, "glue_sphere: expected exactly one hole");
        const FaceId hole = hs[0];
        require(face_degree(hole) == 2, "glue_sphere: boundary must be a 2-gon");
        const HalfEdgeId g1 = face_edge_[hole];
        if (twin_[g1] == next_[g1]) {
            face_kind_[hole] = FaceKind::Internal; // trivial sphere
            debug_validate();
            return;
        }
        fill_trivial(hole);
    }

    /// BFS vertex distances from src; -1 marks unreached slots.
    std::vector<int> vertex_distances(VertexId src) const {
        std::vector<int> dist(static_cast<std::size_t>(n_vertices_), -1);
        std::queue<VertexId> q;
        dist[src] = 0;
        q.push(src);
        while (!q.empty()) {
            const VertexId x = q.front();
            q.pop();
            const HalfEdgeId h0 = vert_edge_[x];
            HalfEdgeId h = h0;
            do {
                const VertexId y = dest(h);
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    q.push(y);
                }
                h = twin_[prev_[h]]; // rotate around x
            } while (h != h0);
        }
        return dist;
    }

    /// BFS distances on the dual graph restricted to internal faces.
    std::vector<int> dual_distances(FaceId src) const {
        std::vector<int> dist(face_kind_.size(), -1);
        require(face_alive_[src] && face_kind_[src] == FaceKind::Internal,
                "dual_distances: source must be an internal face");
        std::queue<FaceId> q;
        dist[src] = 0;
        q.push(src);
        while (!q.empty()) {
            const FaceId f = q.front();
            q.pop();
            const HalfEdgeId h0 = face_edge_[f];
            HalfEdgeId h = h0;
            do {
                const FaceId g = face_[twin_[h]];
                if (face_kind_[g] == FaceKind::Internal && dist[g] < 0) {
                    dist[g] = dist[f] + 1;
                    q.push(g);
                }
                h = next_[h];
            } while (h != h0);
        }
        return dist;
    }

    /// Face on the right-hand side of the root edge (dual root).
    FaceId root_face() const {
        const FaceId f = face_[twin_[root_]];
        if (face_kind_[f] != FaceKind::Internal)
            throw DomainError("root face not revealed yet");
        return f;
    }

    /// Full structural invariant scan. Throws IntegrityError on violation.
    void validate(bool allow_degree_two_faces = false) const {
        std::vector<char> seen(twin_.size(), 0);
        long alive = 0;
        for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(twin_.size()); ++h) {
            if (!he_alive_[h]) continue;
            ++alive;
            if (!he_alive_[twin_[h]] || twin_[h] == h || twin_[twin_[h]] != h)
                throw IntegrityError("twin is not a fixed-point-free involution");
            if (prev_[next_[h]] != h || next_[prev_[h]] != h)
                throw IntegrityError("next/prev are not inverse");
            if (face_[next_[h]] != face_[h])
                throw IntegrityError("face changes along a cycle");
            if (vert_[twin_[h]] != vert_[next_[h]])
                throw IntegrityError("twin origin disagrees with cycle destination");
            if (vert_[h] == vert_[twin_[h]])
                throw IntegrityError("loop edge present");
        }
        if (alive != n_half_edges_alive_) throw IntegrityError("alive half-edge count drift");
        long facecnt = 0;
        for (FaceId f = 0; f < static_cast<FaceId>(face_kind_.size()); ++f) {
            if (!face_alive_[f]) continue;
            ++facecnt;
            const HalfEdgeId h0 = face_edge_[f];
            if (!he_alive_[h0] || face_[h0] != f)
                throw IntegrityError("face representative invalid");
            HalfEdgeId h = h0;
            long deg = 0;
            do {
                if (seen[h]) throw IntegrityError("half-edge in two face cycles");
                seen[h] = 1;
                ++deg;
                h = next_[h];
            } while (h != h0);
            if (face_kind_[f] == FaceKind::Internal && deg != 3 &&
                !(allow_degree_two_faces && deg == 2))
                throw IntegrityError("internal face of degree " + std::to_string(deg));
            if (face_kind_[f] == FaceKind::Hole) {
                // hole boundaries stay simple cycles
                HalfEdgeId x = h0;
                std::vector<VertexId> vs;
                do {
                    vs.push_back(vert_[x]);
                    x = next_[x];
                } while (x != h0);
                std::sort(vs.begin(), vs.end());
                if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
                    throw IntegrityError("hole boundary is not a simple cycle");
            }
        }
        if (facecnt != n_faces_alive_) throw IntegrityError("alive face count drift");
        for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(twin_.size()); ++h)
            if (he_alive_[h] && !seen[h]) throw IntegrityError("orphan half-edge");
        if (holes().empty()) {
            const long euler = vertex_count() - edge_count() + face_count();
            if (euler != 2) throw IntegrityError("Euler relation violated on closed map");
        }
    }

    /// Edge list plus face records, the plain-text export format.
    void export_text(std::ostream& os) const {
        os << "# vertices " << vertex_count() << " edges " << edge_count() << " faces "
           << face_count() << "\n";
        os << "# root " << orig(root_) << " " << dest(root_) << "\n";
        for (HalfEdgeId h = 0; h < static_cast<HalfEdgeId>(twin_.size()); ++h)
            if (he_alive_[h] && h < twin_[h]) os << orig(h) << " " << dest(h) << "\n";
        for (FaceId f = 0; f < static_cast<FaceId>(face_kind_.size()); ++f) {
            if (!face_alive_[f]) continue;
            os << (face_kind_[f] == FaceKind::Hole ? "hole" : "face");
            HalfEdgeId h = face_edge_[f];
            const HalfEdgeId h0 = h;
            do {
                os << " " << vert_[h];
                h = next_[h];
            } while (h != h0);
            os << "\n";
        }
    }

    HalfEdgeId vertex_edge(VertexId v) const { return vert_edge_[v]; }

#ifndef NDEBUG
    void debug_validate() const { validate(true); }
#else
    void debug_validate() const {}
#endif

private:
    void require(bool cond, const char* msg) const {
        if (!cond) throw DomainError(msg);
    }

    VertexId new_vertex() {
        vert_edge_.push_back(kNoId);
        return static_cast<VertexId>(n_vertices_++);
    }
    FaceId new_face(FaceKind k) {
        face_kind_.push_back(k);
        face_edge_.push_back(kNoId);
        face_alive_.push_back(1);
        ++n_faces_alive_;
        return static_cast<FaceId>(face_kind_.size() - 1);
    }
    HalfEdgeId new_half_edge(VertexId v, FaceId f) {
        twin_.push_back(kNoId);
        next_.push_back(kNoId);
        prev_.push_back(kNoId);
        vert_.push_back(v);
        face_.push_back(f);
        he_alive_.push_back(1);
        ++n_half_edges_alive_;
        const HalfEdgeId h = static_cast<HalfEdgeId>(twin_.size() - 1);
        if (vert_edge_[v] == kNoId) vert_edge_[v] = h;
        return h;
    }
    void link(HalfEdgeId a, HalfEdgeId b) {
        next_[a] = b;
        prev_[b] = a;
    }
    void kill_half_edge(HalfEdgeId h) {
        he_alive_[h] = 0;
        --n_half_edges_alive_;
    }
    void kill_face(FaceId f) {
        face_alive_[f] = 0;
        --n_faces_alive_;
    }
    void fix_vertex_edge(VertexId v, HalfEdgeId dying, HalfEdgeId replacement) {
        if (vert_edge_[v] == dying) vert_edge_[v] = replacement;
    }

    std::vector<HalfEdgeId> twin_, next_, prev_;
    std::vector<VertexId> vert_;
    std::vector<FaceId> face_;
    std::vector<char> he_alive_;
    std::vector<FaceKind> face_kind_;
    std::vector<HalfEdgeId> face_edge_;
    std::vector<char> face_alive_;
    std::vector<HalfEdgeId> vert_edge_;
    HalfEdgeId root_ = 0;
    long n_vertices_ = 0;
    long n_half_edges_alive_ = 0;
    long n_faces_alive_ = 0;
};

} // namespace peelab
