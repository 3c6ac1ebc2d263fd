#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "quenchxy/graph.hpp"

namespace quenchxy {

struct Point2 {
    double x;
    double y;
};

struct Window {
    double x0;
    double y0;
    double x1;
    double y1;

    double area() const { return (x1 - x0) * (y1 - y0); }
    double diagonal() const;
    bool contains(const Point2& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    // z + [-r, r]^2
    static Window square(const Point2& z, double r) { return {z.x - r, z.y - r, z.x + r, z.y + r}; }
};

// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise.
// Floating-point filter with an exact rational fallback.
int orient2d(const Point2& a, const Point2& b, const Point2& c);

// +1 if d lies strictly inside the circle through the counter-clockwise
// triangle (a, b, c), -1 outside, 0 on it. Exact.
int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

// Unit intensity scaled by `intensity`.
std::vector<Point2> sample_poisson_points(const Window& window, double intensity, std::uint64_t seed);

struct Triangle {
    std::array<int, 3> v;  // counter-clockwise point indices
};

// Bowyer-Watson with exact predicates; points are inserted in a fixed
// spatial order. Cocircular ties count as "outside", so the triangles already
// present are kept.
std::vector<Triangle> delaunay_triangulation(const std::vector<Point2>& points);

// Undirected Delaunay edges, i < j, sorted.
std::vector<std::pair<int, int>> delaunay_edges(const std::vector<Triangle>& triangles);

enum class VoronoiStrength : std::uint8_t { F1, F2, F3 };

const char* to_string(VoronoiStrength s);

struct VoronoiCell {
    std::vector<Point2> polygon;    // counter-clockwise
    std::vector<int> edge_owner;    // neighbour across polygon edge k (polygon[k] -> polygon[k+1]), -1 for the window
    double area = 0;
};

struct VoronoiAdjacency {
    int i;
    int j;
    double facet_length;
};

struct VoronoiGraph {
    std::vector<Point2> points;
    std::vector<VoronoiCell> cells;
    std::vector<VoronoiAdjacency> adjacency;  // i < j, sorted
    std::vector<double> multipliers;          // per adjacency entry
    Window window{};

    // XY graph on the sites with couplings beta * multiplier.
    WeightedGraph to_graph(double beta) const;
};

// Default F2 profile f(v) = 1 - exp(-v).
double default_f2(double volume);

// Cells are clipped to the window; adjacencies with facet length at most
// 1e-12 times the window diagonal are dropped.
VoronoiGraph build_voronoi_graph(const std::vector<Point2>& points, const Window& window, VoronoiStrength strength,
                                 const std::function<double(double)>& f = default_f2);

struct VoronoiEventRecord {
    bool e_r = false;
    bool f_rh = false;
    std::optional<double> k;
    double max_gap = 0;           // farthest location in z + [-5R,5R]^2 from its nearest point
    std::int64_t count_r = 0;     // points in z + [-R,R]^2
};

// Points are those of a sample over `window`, which must cover z + [-6R, 6R]^2.
VoronoiEventRecord check_voronoi_events(const std::vector<Point2>& points, const Window& window, const Point2& z,
                                        double R, double H, const std::function<double(double)>& f = default_f2);

void write_points_csv(std::ostream& out, const std::vector<Point2>& points);
std::vector<Point2> read_points_csv(std::istream& in);

}  // namespace quenchxy
