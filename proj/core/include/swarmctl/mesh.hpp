#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace swarmctl {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

using Triangle = std::array<int, 3>;

/// Boundary edge with its loop marker: 0 for the outer boundary, k >= 1 for
/// the k-th hole when the mesh was generated.
struct BoundaryEdge {
    std::array<int, 2> v{};
    int marker = 0;
    friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

struct Circle {
    Point center;
    double radius = 0.0;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

using Hole = std::variant<Circle, Rect>;

/// Interior or boundary edge with its (one or two) adjacent triangles.
struct MeshEdge {
    int a = -1, b = -1;          // a < b
    int left = -1, right = -1;   // right == -1 on the boundary
};

/// Immutable 2D triangulation. Construction validates topology and
/// normalizes every triangle to counterclockwise orientation.
class Mesh {
public:
    Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> boundary_edges = {});

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
    const std::vector<MeshEdge>& edges() const { return edges_; }

    /// neighbors()[t][e] is the triangle across the edge opposite local vertex e, or -1.
    const std::vector<std::array<int, 3>>& neighbors() const { return neighbors_; }

    double domain_area() const { return area_; }
    double triangle_area(std::size_t t) const { return tri_area_[t]; }
    const std::vector<double>& triangle_areas() const { return tri_area_; }

    /// Number of closed boundary loops (outer boundary plus one per hole).
    int boundary_loops() const { return loops_; }
    int holes() const { return loops_ - 1; }

    /// Vertices lying on the boundary, flagged per vertex.
    const std::vector<bool>& boundary_vertex() const { return on_boundary_; }

    /// Non-fatal messages recorded while loading (e.g. reoriented triangles).
    const std::vector<std::string>& warnings() const { return warnings_; }

    Point centroid(std::size_t t) const;

private:
    std::vector<Point> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<BoundaryEdge> boundary_;
    std::vector<MeshEdge> edges_;
    std::vector<std::array<int, 3>> neighbors_;
    std::vector<double> tri_area_;
    std::vector<bool> on_boundary_;
    std::vector<std::string> warnings_;
    double area_ = 0.0;
    int loops_ = 0;
};

double signed_area(const Point& a, const Point& b, const Point& c);

/// ASCII format: `nv nt nb`, then nv lines `x y`, nt lines `i j k`, nb lines
/// `i j marker`. Indices are 0-based and `#` starts a comment.
Mesh read_mesh(std::istream& in, const std::string& source = "<stream>");
Mesh load_mesh(const std::string& path);

/// Serializes with shortest round-trip decimals, so read_mesh(write_mesh(m))
/// reproduces m exactly.
void write_mesh(const Mesh& mesh, std::ostream& out);
void save_mesh(const Mesh& mesh, const std::string& path);

/// Triangulates `bounds` minus the holes. Interior nodes sit on a staggered
/// (near-equilateral) lattice of spacing `target_h`; circular holes are
/// polygonized with max(16, ceil(2*pi*r/h)) segments.
Mesh generate_rect_mesh(const Rect& bounds, double target_h, std::span<const Hole> holes = {});

/// Number of segments used to polygonize a circle of radius r at spacing h.
int circle_segments(double radius, double h);

struct MeshQualityReport {
    bool is_strict_delaunay = true;
    double min_angle = 0.0;                      // radians
    double max_opposite_angle_sum = 0.0;         // radians, over interior edges
    std::optional<std::array<int, 2>> worst_edge;  // interior edge with the largest sum
};

MeshQualityReport check_mesh_quality(const Mesh& mesh);

bool point_in_hole(const Point& p, const Hole& hole);

}  // namespace swarmctl
