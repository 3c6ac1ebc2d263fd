#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace quenchxy {

enum class EdgeClass : std::uint8_t { Beta1, Beta2, Generic };

const char* to_string(EdgeClass c);

struct Edge {
    int u;
    int v;
    double coupling;
    EdgeClass cls;
};

enum class GraphKind : std::uint8_t { Box, Extended, Triangulation, Renormalized, Voronoi, Generic };

// Half-open adjacency entry: neighbour vertex and the index of the connecting edge.
struct Incidence {
    int vertex;
    int edge;
};

// Immutable weighted graph. Vertex coordinates are exact rationals sharing
// one graph-wide denominator; the numerators are stored flat, `dimension`
// per vertex.
class WeightedGraph {
public:
    WeightedGraph(int dimension, std::int64_t denominator, std::vector<std::int64_t> coord_numerators,
                  std::vector<Edge> edges, GraphKind kind = GraphKind::Generic, int subdivisions = 0);

    // Abstract graph on `n` vertices with coordinates 0..n-1 on a line.
    static WeightedGraph from_edges(int n, std::vector<Edge> edges);

    int dimension() const noexcept { return dimension_; }
    int vertex_count() const noexcept { return vertex_count_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    GraphKind kind() const noexcept { return kind_; }
    int subdivisions() const noexcept { return subdivisions_; }

    std::int64_t denominator() const noexcept { return denominator_; }
    std::span<const std::int64_t> numerators(int v) const {
        return {coords_.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(dimension_),
                static_cast<std::size_t>(dimension_)};
    }
    double coord(int v, int axis) const {
        return static_cast<double>(numerators(v)[static_cast<std::size_t>(axis)]) / static_cast<double>(denominator_);
    }

    // Exact membership tests on the stored rationals.
    bool in_integer_lattice(int v) const;
    bool in_half_shifted_lattice(int v) const;  // (1/2,...,1/2) + Z^d

    std::span<const Incidence> neighbours(int v) const {
        return {adjacency_.data() + offsets_[static_cast<std::size_t>(v)],
                adjacency_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
    }
    int degree(int v) const { return static_cast<int>(offsets_[static_cast<std::size_t>(v) + 1] - offsets_[static_cast<std::size_t>(v)]); }

    // Vertex at the given numerators, if present. Relies on the row-major
    // lexicographic id order that all builders produce; other graphs use a
    // linear scan.
    std::optional<int> find_vertex(std::span<const std::int64_t> numerators) const;
    std::optional<int> find_integer_point(std::span<const std::int64_t> point) const;

    // Same topology and coordinates, couplings replaced.
    WeightedGraph with_couplings(const std::vector<double>& couplings) const;

    void write_csv(std::ostream& out) const;

private:
    int dimension_;
    std::int64_t denominator_;
    int vertex_count_;
    std::vector<std::int64_t> coords_;
    std::vector<Edge> edges_;
    GraphKind kind_;
    int subdivisions_;
    bool sorted_coords_ = false;
    std::vector<std::size_t> offsets_;
    std::vector<Incidence> adjacency_;
};

// center + {-L..L}^d.
struct LatticeBox {
    std::vector<std::int64_t> center;
    std::int64_t L = 0;

    int dimension() const { return static_cast<int>(center.size()); }
    std::int64_t side_sites() const { return 2 * L + 1; }
    std::uint64_t cardinality() const;
    bool contains(std::span<const std::int64_t> x) const;
    LatticeBox scaled(std::int64_t k) const { return {center, k * L}; }
    std::int64_t lower(int axis) const { return center[static_cast<std::size_t>(axis)] - L; }
    std::int64_t upper(int axis) const { return center[static_cast<std::size_t>(axis)] + L; }
};

// Axis-aligned block of integer sites, bounds inclusive.
struct SiteRect {
    std::vector<std::int64_t> lo;
    std::vector<std::int64_t> hi;

    static SiteRect from_box(const LatticeBox& box);
    int dimension() const { return static_cast<int>(lo.size()); }
};

WeightedGraph build_box_lattice(int d, std::int64_t L, double beta);
WeightedGraph build_rect_lattice(const SiteRect& rect, double beta);
WeightedGraph build_extended_lattice(int d, std::int64_t L, int n, double beta1, double beta2);

// Squares [x0,x1]x[y0,y1] (integer corners) triangulated and subdivided.
WeightedGraph build_extended_triangulation(std::int64_t L, int n, double beta1, double beta2);
WeightedGraph build_extended_triangulation_rect(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1,
                                                int n, double beta1, double beta2, int dimension = 2);

enum class DualEdgeType : std::uint8_t { Type1, Type2 };

const char* to_string(DualEdgeType t);

struct Face {
    int id;
    std::vector<int> primal_edges;
    std::vector<int> vertices;  // boundary walk, counter-clockwise
    double centroid_x;
    double centroid_y;
    bool touches_outer;  // shares a primal edge with the unbounded face
};

struct DualEdge {
    int u;
    int v;
    DualEdgeType type;
};

struct DualGraph {
    std::vector<Face> faces;
    std::vector<DualEdge> dual_edges;
    int subdivisions = 0;
    int origin_face = -1;  // lower-left triangle of the unit square at the origin, if present

    int face_count() const { return static_cast<int>(faces.size()); }
    // Dual adjacency as (neighbour face, dual edge index).
    std::vector<std::vector<Incidence>> adjacency() const;
};

DualGraph build_dual_graph(const WeightedGraph& triangulation);

WeightedGraph build_renormalized_graph(const SiteRect& region, std::int64_t L0);
WeightedGraph build_renormalized_graph(const LatticeBox& region, std::int64_t L0);

}  // namespace quenchxy
