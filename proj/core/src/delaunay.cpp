// Conforming Delaunay meshing of simple polygons: boundary edges are
// subdivided to at most target_h, a structured seed grid fills the interior,
// and Bowyer-Watson insertion produces the triangulation. Boundary segments
// missing from the triangulation are split until every one is a Gabriel edge.

#include "robinlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace robinlab {
namespace {

struct Triangle {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
    bool alive = true;
};

double orient2d(const Point& a, const Point& b, const Point& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when p lies strictly inside the circumcircle of the CCW triangle abc.
bool in_circumcircle(const Point& a, const Point& b, const Point& c, const Point& p) {
    const double adx = a.x() - p.x(), ady = a.y() - p.y();
    const double bdx = b.x() - p.x(), bdy = b.y() - p.y();
    const double cdx = c.x() - p.x(), cdy = c.y() - p.y();
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    const double t1 = adx * (bdy * cd - bd * cdy);
    const double t2 = ady * (bdx * cd - bd * cdx);
    const double t3 = ad * (bdx * cdy - bdy * cdx);
    const double det = t1 - t2 + t3;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
    return det > 1e-12 * scale;
}

class BowyerWatson {
public:
    explicit BowyerWatson(std::vector<Point> points) : points_(std::move(points)) {
        n_real_ = static_cast<int>(points_.size());
        Point lo = points_.front(), hi = points_.front();
        for (const auto& p : points_) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const Point c = 0.5 * (lo + hi);
        const double m = std::max((hi - lo).maxCoeff(), 1e-300) * 10.0;
        points_.emplace_back(c.x() - 3 * m, c.y() - 3 * m);
        points_.emplace_back(c.x() + 3 * m, c.y() - 3 * m);
        points_.emplace_back(c.x(), c.y() + 3 * m);
        tris_.push_back({{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});
        for (int i = 0; i < n_real_; ++i) insert(i);
    }

    std::vector<std::array<int, 3>> triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_) continue;
            out.push_back(t.v);
        }
        return out;
    }

private:
    const Point& pt(int i) const { return points_[static_cast<std::size_t>(i)]; }

    int locate(int pi) const {
        const Point& p = pt(pi);
        int t = last_;
        if (t < 0 || !tris_[static_cast<std::size_t>(t)].alive) t = first_alive();
        const std::size_t max_steps = 4 * tris_.size() + 16;
        for (std::size_t step = 0; step < max_steps; ++step) {
            const auto& tri = tris_[static_cast<std::size_t>(t)];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + static_cast<int>(step)) % 3;
                const Point& a = pt(tri.v[(i + 1) % 3]);
                const Point& b = pt(tri.v[(i + 2) % 3]);
                if (orient2d(a, b, p) < 0.0 && tri.nb[i] >= 0) {
                    next = tri.nb[i];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        // Walk failed to converge: fall back to a linear scan.
        for (std::size_t k = 0; k < tris_.size(); ++k) {
            const auto& tri = tris_[k];
            if (!tri.alive) continue;
            if (orient2d(pt(tri.v[0]), pt(tri.v[1]), p) >= 0.0 && orient2d(pt(tri.v[1]), pt(tri.v[2]), p) >= 0.0 &&
                orient2d(pt(tri.v[2]), pt(tri.v[0]), p) >= 0.0) {
                return static_cast<int>(k);
            }
        }
        throw MeshError("delaunay: point location failed");
    }

    int first_alive() const {
        for (std::size_t k = tris_.size(); k-- > 0;) {
            if (tris_[k].alive) return static_cast<int>(k);
        }
        return -1;
    }

    void insert(int pi) {
        const Point& p = pt(pi);
        const int seed = locate(pi);

        std::vector<int> bad{seed};
        std::unordered_set<int> is_bad{seed};
        for (std::size_t k = 0; k < bad.size(); ++k) {
            const auto& tri = tris_[static_cast<std::size_t>(bad[k])];
            for (int i = 0; i < 3; ++i) {
                const int n = tri.nb[i];
                if (n < 0 || is_bad.count(n)) continue;
                const auto& nt = tris_[static_cast<std::size_t>(n)];
                if (in_circumcircle(pt(nt.v[0]), pt(nt.v[1]), pt(nt.v[2]), p)) {
                    bad.push_back(n);
                    is_bad.insert(n);
                }
            }
        }

        struct BoundaryEdge {
            int a, b, outside;
        };
        std::vector<BoundaryEdge> rim;
        for (const int t : bad) {
            const auto& tri = tris_[static_cast<std::size_t>(t)];
            for (int i = 0; i < 3; ++i) {
                if (tri.nb[i] < 0 || !is_bad.count(tri.nb[i])) {
                    rim.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], tri.nb[i]});
                }
            }
        }
        for (const int t : bad) tris_[static_cast<std::size_t>(t)].alive = false;

        std::unordered_map<int, int> starts_at, ends_at;
        std::vector<int> created;
        created.reserve(rim.size());
        for (const auto& e : rim) {
            const int id = static_cast<int>(tris_.size());
            tris_.push_back({{pi, e.a, e.b}, {e.outside, -1, -1}, true});
            if (e.outside >= 0) {
                auto& o = tris_[static_cast<std::size_t>(e.outside)];
                for (int i = 0; i < 3; ++i) {
                    if (is_bad.count(o.nb[i]) && o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.nb[i] = id;
                }
            }
            starts_at[e.a] = id;
            ends_at[e.b] = id;
            created.push_back(id);
        }
        for (const int id : created) {
            auto& t = tris_[static_cast<std::size_t>(id)];
            // Edge (b, p) opposite a is shared with the triangle starting at b;
            // edge (p, a) opposite b with the triangle ending at a.
            t.nb[1] = starts_at.at(t.v[2]);
            t.nb[2] = ends_at.at(t.v[1]);
        }
        last_ = created.empty() ? -1 : created.back();
    }

    std::vector<Point> points_;
    std::vector<Triangle> tris_;
    int n_real_ = 0;
    int last_ = -1;
};

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
    const Point ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

std::uint64_t undirected_key(int a, int b) {
    return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint64_t>(std::max(a, b));
}

// Inserts the midpoint of every listed segment (indices sorted ascending).
std::vector<Point> split_segments(const std::vector<Point>& loop, const std::vector<std::size_t>& which) {
    std::vector<Point> refined;
    refined.reserve(loop.size() + which.size());
    std::size_t m = 0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        refined.push_back(loop[i]);
        if (m < which.size() && which[m] == i) {
            refined.push_back(0.5 * (loop[i] + loop[(i + 1) % loop.size()]));
            ++m;
        }
    }
    return refined;
}

}  // namespace

Mesh build_polygon_mesh(const Polygon& input, double target_h) {
    if (!(target_h > 0.0)) throw MeshError("target_h must be positive");
    if (!polygon_is_simple(input)) throw MeshError("polygon is not simple (self-intersecting or degenerate)");
    Polygon polygon = input;
    if (signed_area(polygon) < 0.0) std::reverse(polygon.begin(), polygon.end());

    // Boundary loop with spacing <= target_h; segments are consecutive pairs.
    std::vector<Point> boundary;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Point& a = polygon[i];
        const Point& b = polygon[(i + 1) % polygon.size()];
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / target_h - 1e-12)));
        for (int k = 0; k < pieces; ++k) {
            boundary.push_back(k == 0 ? a : a + (b - a) * (static_cast<double>(k) / pieces));
        }
    }

    const auto min_boundary_distance = [&](const Point& p) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < polygon.size(); ++i) {
            d = std::min(d, distance_to_segment(p, polygon[i], polygon[(i + 1) % polygon.size()]));
        }
        return d;
    };

    Point lo = polygon.front(), hi = polygon.front();
    for (const auto& p : polygon) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    std::vector<Point> seeds;
    const int nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / target_h - 1e-12));
    const int ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / target_h - 1e-12));
    for (int j = 1; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const Point p(lo.x() + i * target_h, lo.y() + j * target_h);
            if (polygon_contains(polygon, p) && min_boundary_distance(p) >= 0.5 * target_h) seeds.push_back(p);
        }
    }

    std::vector<std::array<int, 3>> kept;
    std::vector<Point> all_points;
    bool converged = false;
    for (int round = 0; round < 64 && !converged; ++round) {
        const std::size_t nb = boundary.size();
        // Seeds inside a segment's diametral circle would break the Gabriel
        // property: drop them and split the encroached segment instead.
        std::vector<bool> encroached(nb, false);
        std::erase_if(seeds, [&](const Point& p) {
            bool hit = false;
            for (std::size_t i = 0; i < nb; ++i) {
                const Point& a = boundary[i];
                const Point& b = boundary[(i + 1) % nb];
                if ((p - 0.5 * (a + b)).norm() < 0.5 * (b - a).norm() * (1.0 + 1e-9)) {
                    encroached[i] = true;
                    hit = true;
                }
            }
            return hit;
        });
        std::vector<std::size_t> to_split;
        for (std::size_t i = 0; i < nb; ++i) {
            if (encroached[i]) to_split.push_back(i);
        }
        if (!to_split.empty()) {
            boundary = split_segments(boundary, to_split);
            continue;
        }

        all_points = boundary;
        all_points.insert(all_points.end(), seeds.begin(), seeds.end());
        const BowyerWatson dt(all_points);
        const auto tris = dt.triangles();

        std::unordered_set<std::uint64_t> edges;
        for (const auto& t : tris) {
            for (int k = 0; k < 3; ++k) edges.insert(undirected_key(t[k], t[(k + 1) % 3]));
        }
        std::vector<std::size_t> missing;
        for (std::size_t i = 0; i < nb; ++i) {
            if (!edges.count(undirected_key(static_cast<int>(i), static_cast<int>((i + 1) % nb)))) missing.push_back(i);
        }
        if (!missing.empty()) {
            boundary = split_segments(boundary, missing);
            continue;
        }

        kept.clear();
        std::vector<Point> oversize_centroids;
        for (const auto& t : tris) {
            const Point& a = all_points[static_cast<std::size_t>(t[0])];
            const Point& b = all_points[static_cast<std::size_t>(t[1])];
            const Point& c = all_points[static_cast<std::size_t>(t[2])];
            const Point centroid = (a + b + c) / 3.0;
            if (!polygon_contains(polygon, centroid)) continue;
            kept.push_back(t);
            const double diam = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
            if (diam > 2.0 * target_h) oversize_centroids.push_back(centroid);
        }
        converged = oversize_centroids.empty();
        seeds.insert(seeds.end(), oversize_centroids.begin(), oversize_centroids.end());
    }
    if (!converged) throw MeshError("polygon meshing did not converge");

    // Compact to the vertices actually used.
    std::vector<Index> remap(all_points.size(), -1);
    std::vector<Point> vertices;
    std::vector<Cell> cells;
    cells.reserve(kept.size());
    for (const auto& t : kept) {
        Cell c{};
        for (int k = 0; k < 3; ++k) {
            auto& r = remap[static_cast<std::size_t>(t[k])];
            if (r < 0) {
                r = static_cast<Index>(vertices.size());
                vertices.push_back(all_points[static_cast<std::size_t>(t[k])]);
            }
            c[k] = r;
        }
        cells.push_back(c);
    }
    return Mesh(2, std::move(vertices), std::move(cells));
}

}  // namespace robinlab
