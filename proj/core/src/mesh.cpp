#include "swarmctl/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <tuple>
#include <cctype>
#include <numbers>
#include <ostream>
#include <sstream>

#include "swarmctl/error.hpp"
#include "swarmctl/io.hpp"

namespace swarmctl {

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

namespace {

std::string edge_name(int a, int b) {
    return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = static_cast<int>(vertices_.size());
    if (nv < 3) throw TopologyError("mesh needs at least 3 vertices, got " + std::to_string(nv));
    if (triangles_.empty()) throw TopologyError("mesh has no triangles");

    double extent = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const auto& p = vertices_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw TopologyError("vertex " + std::to_string(i) + " has non-finite coordinates");
        extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    }
    const double area_floor = 1e-14 * std::max(extent * extent, 1e-300);

    std::vector<bool> used(vertices_.size(), false);
    tri_area_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        auto& tri = triangles_[t];
        for (int k : tri) {
            if (k < 0 || k >= nv)
                throw TopologyError("triangle " + std::to_string(t) + " references vertex " +
                                    std::to_string(k) + " outside [0, " + std::to_string(nv) + ")");
            used[k] = true;
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw TopologyError("triangle " + std::to_string(t) + " repeats a vertex");
        double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        if (std::abs(a) <= area_floor)
            throw TopologyError("triangle " + std::to_string(t) + " is degenerate (zero area)");
        if (a < 0.0) {
            std::swap(tri[1], tri[2]);
            a = -a;
            warnings_.push_back("triangle " + std::to_string(t) +
                                " was clockwise; orientation fixed");
        }
        tri_area_[t] = a;
        area_ += a;
    }
    for (std::size_t i = 0; i < used.size(); ++i)
        if (!used[i]) throw TopologyError("vertex " + std::to_string(i) + " is not used by any triangle");

    // Edge table: (lo, hi, triangle, local index of the opposite vertex, forward?)
    struct HalfEdge {
        int lo, hi, tri, local;
        bool forward;
    };
    std::vector<HalfEdge> half;
    half.reserve(3 * triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int e = 0; e < 3; ++e) {
            int a = tri[(e + 1) % 3];
            int b = tri[(e + 2) % 3];
            half.push_back({std::min(a, b), std::max(a, b), static_cast<int>(t), e, a < b});
        }
    }
    std::sort(half.begin(), half.end(), [](const HalfEdge& l, const HalfEdge& r) {
        return std::tie(l.lo, l.hi, l.tri) < std::tie(r.lo, r.hi, r.tri);
    });

    neighbors_.assign(triangles_.size(), {-1, -1, -1});
    std::vector<std::pair<int, int>> topo_boundary;
    for (std::size_t i = 0; i < half.size();) {
        std::size_t j = i;
        while (j < half.size() && half[j].lo == half[i].lo && half[j].hi == half[i].hi) ++j;
        const std::size_t count = j - i;
        if (count > 2)
            throw TopologyError("edge " + edge_name(half[i].lo, half[i].hi) + " is shared by " +
                                std::to_string(count) + " triangles");
        MeshEdge edge{half[i].lo, half[i].hi, half[i].tri, -1};
        if (count == 2) {
            if (half[i].forward == half[i + 1].forward)
                throw TopologyError("triangles " + std::to_string(half[i].tri) + " and " +
                                    std::to_string(half[i + 1].tri) + " overlap across edge " +
                                    edge_name(half[i].lo, half[i].hi));
            edge.right = half[i + 1].tri;
            neighbors_[half[i].tri][half[i].local] = half[i + 1].tri;
            neighbors_[half[i + 1].tri][half[i + 1].local] = half[i].tri;
        } else {
            // Orient boundary edges so the domain lies to the left.
            const auto& tri = triangles_[half[i].tri];
            topo_boundary.emplace_back(tri[(half[i].local + 1) % 3], tri[(half[i].local + 2) % 3]);
        }
        edges_.push_back(edge);
        i = j;
    }

    if (boundary_edges.empty()) {
        for (auto [a, b] : topo_boundary) boundary_.push_back({{a, b}, 0});
    } else {
        std::vector<std::pair<int, int>> expected;
        std::map<std::pair<int, int>, std::pair<int, int>> oriented;
        for (auto [a, b] : topo_boundary) {
            expected.emplace_back(std::min(a, b), std::max(a, b));
            oriented[expected.back()] = {a, b};
        }
        std::sort(expected.begin(), expected.end());
        std::vector<std::pair<int, int>> given;
        for (std::size_t e = 0; e < boundary_edges.size(); ++e) {
            auto [a, b] = boundary_edges[e].v;
            if (a < 0 || a >= nv || b < 0 || b >= nv)
                throw TopologyError("boundary edge " + std::to_string(e) + " references a vertex outside [0, " +
                                    std::to_string(nv) + ")");
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            if (!std::binary_search(expected.begin(), expected.end(), key))
                throw TopologyError("boundary edge " + std::to_string(e) + " " + edge_name(a, b) +
                                    " is not on the mesh boundary");
            given.push_back(key);
        }
        std::sort(given.begin(), given.end());
        if (std::adjacent_find(given.begin(), given.end()) != given.end())
            throw TopologyError("boundary edge list contains duplicates");
        if (given.size() != expected.size())
            throw TopologyError("boundary edge list has " + std::to_string(given.size()) +
                                " edges but the mesh boundary has " + std::to_string(expected.size()));
        boundary_ = std::move(boundary_edges);
        for (auto& be : boundary_) {
            auto [a, b] = oriented[{std::min(be.v[0], be.v[1]), std::max(be.v[0], be.v[1])}];
            if (be.v[0] != a) {
                be.v = {a, b};
                warnings_.push_back("boundary edge " + edge_name(a, b) + " reversed so the domain lies on its left");
            }
        }
    }

    // Every boundary vertex must have degree two; loops are the connected components.
    on_boundary_.assign(vertices_.size(), false);
    std::vector<std::vector<int>> adj(vertices_.size());
    for (const auto& be : boundary_) {
        adj[be.v[0]].push_back(be.v[1]);
        adj[be.v[1]].push_back(be.v[0]);
        on_boundary_[be.v[0]] = on_boundary_[be.v[1]] = true;
    }
    for (std::size_t i = 0; i < adj.size(); ++i)
        if (!adj[i].empty() && adj[i].size() != 2)
            throw TopologyError("boundary is not a set of closed loops at vertex " + std::to_string(i) +
                                " (degree " + std::to_string(adj[i].size()) + ")");
    std::vector<bool> seen(vertices_.size(), false);
    for (std::size_t i = 0; i < adj.size(); ++i) {
        if (adj[i].empty() || seen[i]) continue;
        ++loops_;
        std::vector<int> stack{static_cast<int>(i)};
        seen[i] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
    }
}

Point Mesh::centroid(std::size_t t) const {
    const auto& tri = triangles_[t];
    const auto& a = vertices_[tri[0]];
    const auto& b = vertices_[tri[1]];
    const auto& c = vertices_[tri[2]];
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

// ---------------------------------------------------------------------------
// ASCII I/O
// ---------------------------------------------------------------------------

namespace {

class TokenReader {
public:
    TokenReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Returns the tokens of the next non-empty, non-comment line.
    std::vector<std::string_view> next_line(const char* what) {
        while (std::getline(in_, line_)) {
            ++lineno_;
            auto hash = line_.find('#');
            if (hash != std::string::npos) line_.erase(hash);
            std::vector<std::string_view> tokens;
            std::string_view sv(line_);
            std::size_t pos = 0;
            while (pos < sv.size()) {
                while (pos < sv.size() && std::isspace(static_cast<unsigned char>(sv[pos]))) ++pos;
                std::size_t start = pos;
                while (pos < sv.size() && !std::isspace(static_cast<unsigned char>(sv[pos]))) ++pos;
                if (pos > start) tokens.push_back(sv.substr(start, pos - start));
            }
            if (!tokens.empty()) return tokens;
        }
        throw ParseError(source_, lineno_, std::string("unexpected end of file while reading ") + what);
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_, lineno_, msg); }

    template <typename T>
    T parse(std::string_view tok, const char* what) const {
        T value{};
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            fail(std::string("cannot parse ") + what + " from '" + std::string(tok) + "'");
        return value;
    }

    void expect(const std::vector<std::string_view>& tokens, std::size_t n, const char* what) const {
        if (tokens.size() != n)
            fail(std::string("expected ") + std::to_string(n) + " fields for " + what + ", got " +
                 std::to_string(tokens.size()));
    }

private:
    std::istream& in_;
    std::string source_;
    std::string line_;
    std::size_t lineno_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in, const std::string& source) {
    TokenReader reader(in, source);
    auto header = reader.next_line("header");
    reader.expect(header, 3, "header 'nv nt nb'");
    const auto nv = reader.parse<long long>(header[0], "vertex count");
    const auto nt = reader.parse<long long>(header[1], "triangle count");
    const auto nb = reader.parse<long long>(header[2], "boundary edge count");
    if (nv < 0 || nt < 0 || nb < 0) reader.fail("negative count in header");

    std::vector<Point> vertices(static_cast<std::size_t>(nv));
    for (auto& p : vertices) {
        auto tok = reader.next_line("vertices");
        reader.expect(tok, 2, "vertex");
        p = {reader.parse<double>(tok[0], "x"), reader.parse<double>(tok[1], "y")};
    }
    std::vector<Triangle> triangles(static_cast<std::size_t>(nt));
    for (auto& t : triangles) {
        auto tok = reader.next_line("triangles");
        reader.expect(tok, 3, "triangle");
        for (int k = 0; k < 3; ++k) t[k] = reader.parse<int>(tok[k], "vertex index");
    }
    std::vector<BoundaryEdge> boundary(static_cast<std::size_t>(nb));
    for (auto& b : boundary) {
        auto tok = reader.next_line("boundary edges");
        reader.expect(tok, 3, "boundary edge");
        b.v = {reader.parse<int>(tok[0], "vertex index"), reader.parse<int>(tok[1], "vertex index")};
        b.marker = reader.parse<int>(tok[2], "marker");
    }
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open mesh file");
    return read_mesh(in, path);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.boundary_edges().size() << '\n';
    for (const auto& p : mesh.vertices()) out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
    for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& b : mesh.boundary_edges()) out << b.v[0] << ' ' << b.v[1] << ' ' << b.marker << '\n';
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_mesh(mesh, out);
}

// ---------------------------------------------------------------------------
// Quality
// ---------------------------------------------------------------------------

namespace {

// Interior angle at vertex `at` of triangle (at, p, q).
double angle_at(const Point& at, const Point& p, const Point& q) {
    const double ux = p.x - at.x, uy = p.y - at.y;
    const double vx = q.x - at.x, vy = q.y - at.y;
    return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
}

}  // namespace

MeshQualityReport check_mesh_quality(const Mesh& mesh) {
    MeshQualityReport report;
    const auto& V = mesh.vertices();
    const auto& T = mesh.triangles();

    report.min_angle = std::numbers::pi;
    for (const auto& t : T)
        for (int e = 0; e < 3; ++e)
            report.min_angle =
                std::min(report.min_angle, angle_at(V[t[e]], V[t[(e + 1) % 3]], V[t[(e + 2) % 3]]));

    auto opposite_angle = [&](int tri, int a, int b) {
        const auto& t = T[tri];
        for (int e = 0; e < 3; ++e)
            if (t[e] != a && t[e] != b) return angle_at(V[t[e]], V[a], V[b]);
        return 0.0;
    };

    // Tolerance for "strictly less than pi": a few ulps of the angle computation.
    constexpr double slack = 1e-12;
    for (const auto& edge : mesh.edges()) {
        if (edge.right < 0) continue;
        const double sum = opposite_angle(edge.left, edge.a, edge.b) + opposite_angle(edge.right, edge.a, edge.b);
        if (!report.worst_edge || sum > report.max_opposite_angle_sum) {
            report.max_opposite_angle_sum = sum;
            report.worst_edge = std::array<int, 2>{edge.a, edge.b};
        }
        if (sum >= std::numbers::pi - slack) report.is_strict_delaunay = false;
    }
    return report;
}

bool point_in_hole(const Point& p, const Hole& hole) {
    return std::visit(
        [&](const auto& h) {
            using H = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<H, Circle>) {
                const double dx = p.x - h.center.x, dy = p.y - h.center.y;
                return dx * dx + dy * dy < h.radius * h.radius;
            } else {
                return p.x > h.x0 && p.x < h.x1 && p.y > h.y0 && p.y < h.y1;
            }
        },
        hole);
}

}  // namespace swarmctl
