#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "swarmctl/error.hpp"
#include "swarmctl/mesh.hpp"

namespace swarmctl {

int circle_segments(double radius, double h) {
    return std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h)));
}

namespace {

using Polygon = std::vector<Point>;

bool inside_polygon(const Point& p, const Polygon& poly) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy);
}

double polygon_distance(const Point& p, const Polygon& poly) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i)
        d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
}

// Hole boundary, counterclockwise.
Polygon hole_polygon(const Hole& hole, double h) {
    Polygon poly;
    if (const auto* c = std::get_if<Circle>(&hole)) {
        const int n = circle_segments(c->radius, h);
        for (int k = 0; k < n; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / n;
            poly.push_back({c->center.x + c->radius * std::cos(phi), c->center.y + c->radius * std::sin(phi)});
        }
    } else {
        const auto& r = std::get<Rect>(hole);
        const int nx = std::max(1, static_cast<int>(std::lround(r.width() / h)));
        const int ny = std::max(1, static_cast<int>(std::lround(r.height() / h)));
        for (int i = 0; i < nx; ++i) poly.push_back({r.x0 + r.width() * i / nx, r.y0});
        for (int j = 0; j < ny; ++j) poly.push_back({r.x1, r.y0 + r.height() * j / ny});
        for (int i = nx; i > 0; --i) poly.push_back({r.x0 + r.width() * i / nx, r.y1});
        for (int j = ny; j > 0; --j) poly.push_back({r.x0, r.y0 + r.height() * j / ny});
    }
    return poly;
}

struct HoleBox {
    double x0, y0, x1, y1;
};

HoleBox hole_box(const Hole& hole) {
    if (const auto* c = std::get_if<Circle>(&hole))
        return {c->center.x - c->radius, c->center.y - c->radius, c->center.x + c->radius, c->center.y + c->radius};
    const auto& r = std::get<Rect>(hole);
    return {r.x0, r.y0, r.x1, r.y1};
}

bool holes_overlap(const Hole& a, const Hole& b) {
    const auto* ca = std::get_if<Circle>(&a);
    const auto* cb = std::get_if<Circle>(&b);
    if (ca && cb) return std::hypot(ca->center.x - cb->center.x, ca->center.y - cb->center.y) <= ca->radius + cb->radius;
    if (ca || cb) {
        const Circle& c = ca ? *ca : *cb;
        const Rect& r = ca ? std::get<Rect>(b) : std::get<Rect>(a);
        const double nx = std::clamp(c.center.x, r.x0, r.x1);
        const double ny = std::clamp(c.center.y, r.y0, r.y1);
        return std::hypot(c.center.x - nx, c.center.y - ny) <= c.radius;
    }
    const auto& ra = std::get<Rect>(a);
    const auto& rb = std::get<Rect>(b);
    return ra.x0 <= rb.x1 && rb.x0 <= ra.x1 && ra.y0 <= rb.y1 && rb.y0 <= ra.y1;
}

// Bowyer-Watson Delaunay triangulation. Returns counterclockwise triangles
// over `pts`; the three super-triangle vertices are appended to pts and any
// triangle touching them is dropped by the caller.
class Delaunay {
public:
    explicit Delaunay(std::vector<Point>& pts) : pts_(pts) {}

    std::vector<Triangle> run() {
        double xmin = pts_[0].x, xmax = xmin, ymin = pts_[0].y, ymax = ymin;
        for (const auto& p : pts_) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
        const double span = std::max(xmax - xmin, ymax - ymin);
        const int n = static_cast<int>(pts_.size());
        pts_.push_back({cx - 200.0 * span, cy - 100.0 * span});
        pts_.push_back({cx + 200.0 * span, cy - 100.0 * span});
        pts_.push_back({cx, cy + 200.0 * span});
        add({n, n + 1, n + 2});

        std::vector<std::size_t> bad;
        std::vector<std::array<int, 2>> rim;
        for (int p = 0; p < n; ++p) {
            bad.clear();
            for (std::size_t t = 0; t < tris_.size(); ++t)
                if (in_circumcircle(t, pts_[p])) bad.push_back(t);

            // Cavity boundary: edges of bad triangles not shared with another bad triangle.
            std::map<std::pair<int, int>, int> count;
            for (auto t : bad)
                for (int e = 0; e < 3; ++e) {
                    int a = tris_[t][e], b = tris_[t][(e + 1) % 3];
                    ++count[{std::min(a, b), std::max(a, b)}];
                }
            rim.clear();
            for (auto t : bad)
                for (int e = 0; e < 3; ++e) {
                    int a = tris_[t][e], b = tris_[t][(e + 1) % 3];
                    if (count[{std::min(a, b), std::max(a, b)}] == 1) rim.push_back({a, b});
                }
            std::sort(bad.rbegin(), bad.rend());
            for (auto t : bad) {
                tris_[t] = tris_.back();
                cache_[t] = cache_.back();
                tris_.pop_back();
                cache_.pop_back();
            }
            for (auto [a, b] : rim) add({a, b, p});
        }
        return tris_;
    }

private:
    struct Circum {
        double x, y, r2;
    };

    void add(Triangle t) {
        tris_.push_back(t);
        const auto& a = pts_[t[0]];
        const auto& b = pts_[t[1]];
        const auto& c = pts_[t[2]];
        const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
        const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
        const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
        cache_.push_back({ux, uy, (a.x - ux) * (a.x - ux) + (a.y - uy) * (a.y - uy)});
    }

    bool in_circumcircle(std::size_t t, const Point& p) const {
        const auto& c = cache_[t];
        const double d2 = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
        if (d2 > c.r2 * (1.0 + 1e-9)) return false;
        if (d2 < c.r2 * (1.0 - 1e-9)) return true;
        // Near the circle: decide with the incircle determinant in extended precision.
        const auto& A = pts_[tris_[t][0]];
        const auto& B = pts_[tris_[t][1]];
        const auto& C = pts_[tris_[t][2]];
        using L = long double;
        const L adx = L(A.x) - p.x, ady = L(A.y) - p.y;
        const L bdx = L(B.x) - p.x, bdy = L(B.y) - p.y;
        const L cdx = L(C.x) - p.x, cdy = L(C.y) - p.y;
        const L det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                      (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                      (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
        return det > 0;
    }

    std::vector<Point>& pts_;
    std::vector<Triangle> tris_;
    std::vector<Circum> cache_;
};

}  // namespace

Mesh generate_rect_mesh(const Rect& bounds, double target_h, std::span<const Hole> holes) {
    if (!(target_h > 0.0) || !std::isfinite(target_h))
        throw GeometryError("target_h must be positive and finite");
    if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
        throw GeometryError("bounds must have positive width and height");
    if (target_h > std::min(bounds.width(), bounds.height()))
        throw GeometryError("target_h larger than the domain");
    if (std::max(bounds.width(), bounds.height()) / target_h > 2000.0)
        throw GeometryError("target_h too small for the domain (more than 2000 cells per side)");

    for (std::size_t k = 0; k < holes.size(); ++k) {
        const auto b = hole_box(holes[k]);
        if (const auto* c = std::get_if<Circle>(&holes[k]); c && !(c->radius > 0.0))
            throw GeometryError("hole " + std::to_string(k + 1) + " has nonpositive radius");
        if (const auto* r = std::get_if<Rect>(&holes[k]); r && !(r->width() > 0.0 && r->height() > 0.0))
            throw GeometryError("hole " + std::to_string(k + 1) + " has empty extent");
        if (!(b.x0 > bounds.x0 && b.y0 > bounds.y0 && b.x1 < bounds.x1 && b.y1 < bounds.y1))
            throw GeometryError("hole " + std::to_string(k + 1) + " is not strictly inside the bounds");
        for (std::size_t l = 0; l < k; ++l)
            if (holes_overlap(holes[k], holes[l]))
                throw GeometryError("holes " + std::to_string(l + 1) + " and " + std::to_string(k + 1) + " intersect");
    }

    std::vector<Polygon> polys;
    for (const auto& hole : holes) polys.push_back(hole_polygon(hole, target_h));

    // Staggered lattice: even rows at x0 + i*dx, odd rows shifted by dx/2 and
    // closed off with nodes on the vertical sides.
    const int nx = std::max(1, static_cast<int>(std::lround(bounds.width() / target_h)));
    const int ny = std::max(1, static_cast<int>(std::lround(bounds.height() / (target_h * std::sqrt(3.0) / 2.0))));
    const double dx = bounds.width() / nx;
    const double dy = bounds.height() / ny;
    const double clearance = 0.6 * target_h;

    std::vector<Point> pts;
    auto keep = [&](const Point& p) {
        for (const auto& poly : polys)
            if (inside_polygon(p, poly) || polygon_distance(p, poly) < clearance) return false;
        return true;
    };
    for (int j = 0; j <= ny; ++j) {
        const double y = j == ny ? bounds.y1 : bounds.y0 + j * dy;
        const bool odd = j % 2 == 1;
        if (odd) pts.push_back({bounds.x0, y});
        for (int i = 0; i <= nx; ++i) {
            if (odd && i == nx) break;
            double x = odd ? bounds.x0 + (i + 0.5) * dx : (i == nx ? bounds.x1 : bounds.x0 + i * dx);
            Point p{x, y};
            const bool on_outer = j == 0 || j == ny || (!odd && (i == 0 || i == nx));
            if (on_outer || keep(p)) pts.push_back(p);
        }
        if (odd) pts.push_back({bounds.x1, y});
    }
    std::vector<int> ring_of(pts.size(), 0);
    for (std::size_t k = 0; k < polys.size(); ++k)
        for (const auto& p : polys[k]) {
            pts.push_back(p);
            ring_of.push_back(static_cast<int>(k) + 1);
        }

    const int n = static_cast<int>(pts.size());
    auto all = Delaunay(pts).run();
    pts.resize(n);

    std::vector<Triangle> tris;
    for (const auto& t : all) {
        if (t[0] >= n || t[1] >= n || t[2] >= n) continue;
        const Point c{(pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0, (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0};
        bool in_hole = false;
        for (const auto& poly : polys) in_hole = in_hole || inside_polygon(c, poly);
        if (!in_hole) tris.push_back(t);
    }
    // Row-major node order from the lattice is kept; sort triangles for a stable layout.
    std::sort(tris.begin(), tris.end(), [](const Triangle& a, const Triangle& b) {
        auto ka = a, kb = b;
        std::sort(ka.begin(), ka.end());
        std::sort(kb.begin(), kb.end());
        return ka < kb;
    });

    Mesh raw(pts, tris);
    if (raw.boundary_loops() != 1 + static_cast<int>(holes.size()))
        throw GeometryError("target_h too coarse to resolve the holes (got " + std::to_string(raw.boundary_loops()) +
                            " boundary loops, expected " + std::to_string(1 + holes.size()) + ")");
    std::vector<BoundaryEdge> boundary;
    for (const auto& be : raw.boundary_edges()) {
        const int ma = ring_of[be.v[0]], mb = ring_of[be.v[1]];
        boundary.push_back({be.v, ma == mb ? ma : 0});
    }
    return Mesh(std::move(pts), raw.triangles(), std::move(boundary));
}

}  // namespace swarmctl
