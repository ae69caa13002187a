#include "spheroid/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace spheroid {

namespace {

// One triangular facet with outward plane normal, neighbour links per edge
// slot e = (v[e], v[(e+1)%3]), and the unassigned points that lie outside it.
struct Face {
    int v[3];
    int neighbor[3] = {-1, -1, -1};
    Vec3 normal;
    double offset;  // plane is normal . x = offset
    std::vector<int> outside;
    int farthest = -1;
    double farthest_dist = 0.0;
    bool alive = true;
};

double dist_above(const Face& f, const Vec3& p) {
    return dot(f.normal, p) - f.offset;
}

class QuickHull {
public:
    explicit QuickHull(const std::vector<Vec3>& pts) : pts_(pts) {}

    std::optional<HullResult> build() {
        if (!initial_simplex()) return std::nullopt;
        assign_initial_outside();
        process();
        return collect();
    }

private:
    const std::vector<Vec3>& pts_;
    std::vector<Face> faces_;
    std::vector<int> pending_;  // faces that still have outside points
    std::vector<int> visit_stamp_;
    int stamp_ = 0;
    Vec3 interior_{};
    double eps_ = 1e-9;

    void set_plane(Face& f) {
        const Vec3& a = pts_[f.v[0]];
        const Vec3& b = pts_[f.v[1]];
        const Vec3& c = pts_[f.v[2]];
        Vec3 n = cross(b - a, c - a);
        const double len = n.norm();
        if (len > 0.0) n = n * (1.0 / len);
        f.normal = n;
        f.offset = dot(n, a);
        // Flip so the interior point lies below the plane.
        if (dist_above(f, interior_) > 0.0) {
            std::swap(f.v[1], f.v[2]);
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
    }

    bool initial_simplex() {
        const int n = static_cast<int>(pts_.size());
        if (n < 4) return false;

        double max_abs = 0.0;
        for (const Vec3& p : pts_) {
            max_abs = std::max({max_abs, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
        }
        eps_ = 1e-9 * (1.0 + max_abs);

        // Most separated pair along the coordinate extremes.
        int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int i = 1; i < n; ++i) {
            const double c[3] = {pts_[i].x, pts_[i].y, pts_[i].z};
            for (int a = 0; a < 3; ++a) {
                const double clo[3] = {pts_[lo[a]].x, pts_[lo[a]].y, pts_[lo[a]].z};
                const double chi[3] = {pts_[hi[a]].x, pts_[hi[a]].y, pts_[hi[a]].z};
                if (c[a] < clo[a]) lo[a] = i;
                if (c[a] > chi[a]) hi[a] = i;
            }
        }
        int p0 = -1, p1 = -1;
        double best = -1.0;
        for (int a = 0; a < 3; ++a) {
            const double d = (pts_[hi[a]] - pts_[lo[a]]).norm2();
            if (d > best) {
                best = d;
                p0 = lo[a];
                p1 = hi[a];
            }
        }
        if (best <= eps_ * eps_) return false;

        // Farthest point from the line p0-p1.
        const Vec3 axis = pts_[p1] - pts_[p0];
        int p2 = -1;
        best = eps_ * eps_;
        for (int i = 0; i < n; ++i) {
            const double d = cross(axis, pts_[i] - pts_[p0]).norm2();
            if (d > best) {
                best = d;
                p2 = i;
            }
        }
        if (p2 < 0) return false;

        // Farthest point from the plane p0-p1-p2.
        Vec3 nrm = cross(axis, pts_[p2] - pts_[p0]);
        nrm = nrm * (1.0 / nrm.norm());
        int p3 = -1;
        best = eps_;
        for (int i = 0; i < n; ++i) {
            const double d = std::abs(dot(nrm, pts_[i] - pts_[p0]));
            if (d > best) {
                best = d;
                p3 = i;
            }
        }
        if (p3 < 0) return false;

        interior_ = (pts_[p0] + pts_[p1] + pts_[p2] + pts_[p3]) * 0.25;
        const int tet[4][3] = {{p0, p1, p2}, {p0, p1, p3}, {p0, p2, p3}, {p1, p2, p3}};
        for (const auto& t : tet) {
            Face f;
            f.v[0] = t[0];
            f.v[1] = t[1];
            f.v[2] = t[2];
            set_plane(f);
            faces_.push_back(std::move(f));
        }
        link_all_neighbors();
        return true;
    }

    // Rebuilds the neighbour links of the four simplex faces by edge matching.
    void link_all_neighbors() {
        for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
            for (int e = 0; e < 3; ++e) {
                const int a = faces_[fi].v[e];
                const int b = faces_[fi].v[(e + 1) % 3];
                for (std::size_t gj = 0; gj < faces_.size(); ++gj) {
                    if (gj == fi) continue;
                    for (int e2 = 0; e2 < 3; ++e2) {
                        const int c = faces_[gj].v[e2];
                        const int d = faces_[gj].v[(e2 + 1) % 3];
                        if (a == d && b == c) faces_[fi].neighbor[e] = static_cast<int>(gj);
                    }
                }
            }
        }
    }

    void add_outside(int fi, int pi) {
        Face& f = faces_[fi];
        const double d = dist_above(f, pts_[pi]);
        if (d <= eps_) return;
        if (f.outside.empty()) pending_.push_back(fi);
        f.outside.push_back(pi);
        if (d > f.farthest_dist) {
            f.farthest_dist = d;
            f.farthest = pi;
        }
    }

    void assign_initial_outside() {
        for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
            for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
                if (dist_above(faces_[fi], pts_[i]) > eps_) {
                    add_outside(static_cast<int>(fi), i);
                    break;
                }
            }
        }
    }

    void process() {
        while (!pending_.empty()) {
            const int fi = pending_.back();
            pending_.pop_back();
            Face& f = faces_[fi];
            if (!f.alive || f.outside.empty()) continue;
            const int apex = f.farthest;

            // Flood fill the faces visible from the apex. The stamp array is
            // reused across iterations to avoid reallocating per apex.
            visit_stamp_.resize(faces_.size(), 0);
            ++stamp_;
            std::vector<int> visible;
            std::vector<int> stack{fi};
            visit_stamp_[fi] = stamp_;
            while (!stack.empty()) {
                const int gi = stack.back();
                stack.pop_back();
                visible.push_back(gi);
                for (int e = 0; e < 3; ++e) {
                    const int ni = faces_[gi].neighbor[e];
                    if (visit_stamp_[ni] == stamp_) continue;
                    if (dist_above(faces_[ni], pts_[apex]) > eps_) {
                        visit_stamp_[ni] = stamp_;
                        stack.push_back(ni);
                    }
                }
            }

            // Horizon: edges of visible faces whose neighbour stays visible
            // from the outside. Kept in the visible face's orientation.
            struct HorizonEdge {
                int a, b, opposite;
            };
            std::vector<HorizonEdge> horizon;
            for (const int gi : visible) {
                for (int e = 0; e < 3; ++e) {
                    const int ni = faces_[gi].neighbor[e];
                    if (visit_stamp_[ni] == stamp_) continue;
                    horizon.push_back({faces_[gi].v[e], faces_[gi].v[(e + 1) % 3], ni});
                }
            }

            // Orphaned candidate points from every visible face.
            std::vector<int> orphans;
            for (const int gi : visible) {
                Face& g = faces_[gi];
                for (const int pi : g.outside) {
                    if (pi != apex) orphans.push_back(pi);
                }
                g.outside.clear();
                g.alive = false;
            }

            // One new face per horizon edge, fanned around the apex.
            std::vector<int> created;
            std::unordered_map<std::int64_t, int> edge_owner;  // (apex-side edge) -> face
            created.reserve(horizon.size());
            for (const HorizonEdge& h : horizon) {
                Face nf;
                nf.v[0] = h.a;
                nf.v[1] = h.b;
                nf.v[2] = apex;
                set_plane(nf);
                nf.neighbor[0] = h.opposite;
                nf.neighbor[1] = -1;  // edge (b, apex), linked below
                nf.neighbor[2] = -1;  // edge (apex, a), linked below
                const int idx = static_cast<int>(faces_.size());
                faces_.push_back(std::move(nf));
                created.push_back(idx);
                // Point the outer neighbour back at the new face.
                Face& opp = faces_[h.opposite];
                for (int e = 0; e < 3; ++e) {
                    if (opp.v[e] == h.b && opp.v[(e + 1) % 3] == h.a) opp.neighbor[e] = idx;
                }
                edge_owner[key(h.a)] = idx;  // new face whose horizon edge starts at a
            }
            for (const int idx : created) {
                Face& nf = faces_[idx];
                // Edge (b, apex) borders the new face whose edge starts at b.
                nf.neighbor[1] = edge_owner.at(key(nf.v[1]));
                // Edge (apex, a) borders the new face whose edge ends at a.
                // That is the face whose start vertex satisfies end == a, i.e.
                // the one owning the horizon edge that precedes this one.
            }
            // Second pass for the (apex, a) slots using the (b, apex) links.
            for (const int idx : created) {
                Face& nf = faces_[idx];
                Face& nxt = faces_[nf.neighbor[1]];
                nxt.neighbor[2] = idx;
            }

            for (const int pi : orphans) {
                for (const int idx : created) {
                    if (dist_above(faces_[idx], pts_[pi]) > eps_) {
                        add_outside(idx, pi);
                        break;
                    }
                }
            }
        }
    }

    static std::int64_t key(int a) { return static_cast<std::int64_t>(a); }

    std::optional<HullResult> collect() const {
        HullResult out;
        std::vector<char> used(pts_.size(), 0);
        for (const Face& f : faces_) {
            if (!f.alive) continue;
            const Vec3 a = pts_[f.v[0]] - interior_;
            const Vec3 b = pts_[f.v[1]] - interior_;
            const Vec3 c = pts_[f.v[2]] - interior_;
            out.volume += dot(a, cross(b, c)) / 6.0;
            for (const int v : f.v) {
                if (!used[v]) {
                    used[v] = 1;
                    out.vertices.push_back(pts_[v]);
                }
            }
        }
        if (out.volume <= 0.0 || out.vertices.size() < 4) return std::nullopt;
        return out;
    }
};

}  // namespace

std::optional<HullResult> convex_hull(const std::vector<Vec3>& points) {
    QuickHull qh(points);
    return qh.build();
}

}  // namespace spheroid
