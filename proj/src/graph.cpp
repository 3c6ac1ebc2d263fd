#include "quenchxy/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "quenchxy/error.hpp"

namespace quenchxy {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Product of extents with an overflow guard against the int vertex-id range.
std::int64_t checked_count(const std::vector<std::int64_t>& extents) {
    long double total = 1;
    std::int64_t exact = 1;
    for (auto e : extents) {
        if (e <= 0) return 0;
        total *= static_cast<long double>(e);
        if (total > static_cast<long double>(std::numeric_limits<int>::max()))
            fail(ErrorKind::Size, "vertex count exceeds the addressable id range");
        exact *= e;
    }
    return exact;
}

void sort_edges(std::vector<Edge>& edges) {
    for (auto& e : edges)
        if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
}

bool lex_less(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

const char* to_string(EdgeClass c) {
    switch (c) {
        case EdgeClass::Beta1: return "Beta1";
        case EdgeClass::Beta2: return "Beta2";
        case EdgeClass::Generic: return "Generic";
    }
    return "?";
}

const char* to_string(DualEdgeType t) { return t == DualEdgeType::Type1 ? "Type1" : "Type2"; }

WeightedGraph::WeightedGraph(int dimension, std::int64_t denominator, std::vector<std::int64_t> coord_numerators,
                             std::vector<Edge> edges, GraphKind kind, int subdivisions)
    : dimension_(dimension),
      denominator_(denominator),
      vertex_count_(0),
      coords_(std::move(coord_numerators)),
      edges_(std::move(edges)),
      kind_(kind),
      subdivisions_(subdivisions) {
    require(dimension_ >= 1, ErrorKind::Shape, "graph dimension must be positive");
    require(denominator_ >= 1, ErrorKind::Shape, "coordinate denominator must be positive");
    require(coords_.size() % static_cast<std::size_t>(dimension_) == 0, ErrorKind::Shape,
            "coordinate array length is not a multiple of the dimension");
    std::size_t n = coords_.size() / static_cast<std::size_t>(dimension_);
    require(n <= static_cast<std::size_t>(std::numeric_limits<int>::max()), ErrorKind::Size, "too many vertices");
    vertex_count_ = static_cast<int>(n);

    std::vector<std::pair<int, int>> keys;
    keys.reserve(edges_.size());
    for (const auto& e : edges_) {
        require(e.u >= 0 && e.u < vertex_count_ && e.v >= 0 && e.v < vertex_count_, ErrorKind::Shape,
                "edge endpoint out of range");
        require(e.u != e.v, ErrorKind::Topology, "self-loop at vertex " + std::to_string(e.u));
        require(std::isfinite(e.coupling) && e.coupling >= 0, ErrorKind::Domain, "coupling must be finite and >= 0");
        keys.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(keys.begin(), keys.end());
    require(std::adjacent_find(keys.begin(), keys.end()) == keys.end(), ErrorKind::Topology, "duplicate edge");

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[static_cast<std::size_t>(e.u) + 1];
        ++offsets_[static_cast<std::size_t>(e.v) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (int idx = 0; idx < edge_count(); ++idx) {
        const auto& e = edges_[static_cast<std::size_t>(idx)];
        adjacency_[fill[static_cast<std::size_t>(e.u)]++] = {e.v, idx};
        adjacency_[fill[static_cast<std::size_t>(e.v)]++] = {e.u, idx};
    }

    sorted_coords_ = true;
    for (int v = 1; v < vertex_count_ && sorted_coords_; ++v)
        sorted_coords_ = lex_less(numerators(v - 1), numerators(v));
}

WeightedGraph WeightedGraph::from_edges(int n, std::vector<Edge> edges) {
    std::vector<std::int64_t> coords(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = i;
    return WeightedGraph(1, 1, std::move(coords), std::move(edges), GraphKind::Generic, 0);
}

bool WeightedGraph::in_integer_lattice(int v) const {
    for (auto x : numerators(v))
        if (floor_mod(x, denominator_) != 0) return false;
    return true;
}

bool WeightedGraph::in_half_shifted_lattice(int v) const {
    if (denominator_ % 2 != 0) return false;
    for (auto x : numerators(v))
        if (floor_mod(x, denominator_) != denominator_ / 2) return false;
    return true;
}

std::optional<int> WeightedGraph::find_vertex(std::span<const std::int64_t> key) const {
    if (static_cast<int>(key.size()) != dimension_) return std::nullopt;
    if (sorted_coords_) {
        int lo = 0, hi = vertex_count_;
        while (lo < hi) {
            int mid = lo + (hi - lo) / 2;
            if (lex_less(numerators(mid), key))
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo < vertex_count_ && std::equal(key.begin(), key.end(), numerators(lo).begin())) return lo;
        return std::nullopt;
    }
    for (int v = 0; v < vertex_count_; ++v)
        if (std::equal(key.begin(), key.end(), numerators(v).begin())) return v;
    return std::nullopt;
}

std::optional<int> WeightedGraph::find_integer_point(std::span<const std::int64_t> point) const {
    std::vector<std::int64_t> key(point.begin(), point.end());
    for (auto& x : key) x *= denominator_;
    return find_vertex(key);
}

WeightedGraph WeightedGraph::with_couplings(const std::vector<double>& couplings) const {
    require(couplings.size() == edges_.size(), ErrorKind::Shape, "coupling vector length mismatch");
    auto edges = edges_;
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].coupling = couplings[i];
    return WeightedGraph(dimension_, denominator_, coords_, std::move(edges), kind_, subdivisions_);
}

void WeightedGraph::write_csv(std::ostream& out) const {
    out << "u,v,coupling,class\n";
    char buf[64];
    for (const auto& e : edges_) {
        std::snprintf(buf, sizeof buf, "%.17g", e.coupling);
        out << e.u << ',' << e.v << ',' << buf << ',' << to_string(e.cls) << '\n';
    }
}

std::uint64_t LatticeBox::cardinality() const {
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < center.size(); ++i) c *= static_cast<std::uint64_t>(2 * L + 1);
    return c;
}

bool LatticeBox::contains(std::span<const std::int64_t> x) const {
    if (x.size() != center.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < center[i] - L || x[i] > center[i] + L) return false;
    return true;
}

SiteRect SiteRect::from_box(const LatticeBox& box) {
    SiteRect r;
    for (int i = 0; i < box.dimension(); ++i) {
        r.lo.push_back(box.lower(i));
        r.hi.push_back(box.upper(i));
    }
    return r;
}

WeightedGraph build_rect_lattice(const SiteRect& rect, double beta) {
    const int d = rect.dimension();
    require(d >= 1, ErrorKind::Shape, "dimension must be >= 1");
    require(rect.hi.size() == rect.lo.size(), ErrorKind::Shape, "rectangle bounds differ in dimension");
    std::vector<std::int64_t> ext(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        ext[static_cast<std::size_t>(i)] = rect.hi[static_cast<std::size_t>(i)] - rect.lo[static_cast<std::size_t>(i)] + 1;
        require(ext[static_cast<std::size_t>(i)] >= 1, ErrorKind::Shape, "empty rectangle");
    }
    const std::int64_t n = checked_count(ext);
    std::vector<std::int64_t> stride(static_cast<std::size_t>(d), 1);
    for (int i = d - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * ext[static_cast<std::size_t>(i) + 1];

    std::vector<std::int64_t> coords(static_cast<std::size_t>(n * d));
    std::vector<Edge> edges;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    for (std::int64_t v = 0; v < n; ++v) {
        for (int i = 0; i < d; ++i)
            coords[static_cast<std::size_t>(v * d + i)] = rect.lo[static_cast<std::size_t>(i)] + idx[static_cast<std::size_t>(i)];
        for (int i = 0; i < d; ++i)
            if (idx[static_cast<std::size_t>(i)] + 1 < ext[static_cast<std::size_t>(i)])
                edges.push_back({static_cast<int>(v), static_cast<int>(v + stride[static_cast<std::size_t>(i)]), beta,
                                 EdgeClass::Generic});
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < ext[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    sort_edges(edges);
    return WeightedGraph(d, 1, std::move(coords), std::move(edges), GraphKind::Box, 0);
}

WeightedGraph build_box_lattice(int d, std::int64_t L, double beta) {
    require(d >= 1, ErrorKind::Shape, "dimension must be >= 1");
    require(L >= 0, ErrorKind::Shape, "L must be >= 0");
    require(beta >= 0, ErrorKind::Domain, "beta must be >= 0");
    LatticeBox box{std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), L};
    return build_rect_lattice(SiteRect::from_box(box), beta);
}

WeightedGraph build_extended_lattice(int d, std::int64_t L, int n, double beta1, double beta2) {
    require(d >= 1, ErrorKind::Shape, "dimension must be >= 1");
    require(L >= 0 && n >= 0, ErrorKind::Shape, "L and n must be >= 0");
    require(beta1 >= 0 && beta2 >= 0, ErrorKind::Domain, "couplings must be >= 0");
    const std::int64_t q = n + 1;
    const std::int64_t side = 2 * L * q + 1;
    const std::int64_t total = checked_count(std::vector<std::int64_t>(static_cast<std::size_t>(d), side));

    auto non_multiples = [&](const std::vector<std::int64_t>& x) {
        int c = 0;
        for (auto xi : x) c += floor_mod(xi, q) != 0;
        return c;
    };

    std::vector<int> dense(static_cast<std::size_t>(total), -1);
    std::vector<std::int64_t> coords;
    std::vector<std::int64_t> x(static_cast<std::size_t>(d), -L * q);
    int next = 0;
    for (std::int64_t t = 0; t < total; ++t) {
        if (non_multiples(x) <= 1) {
            dense[static_cast<std::size_t>(t)] = next++;
            coords.insert(coords.end(), x.begin(), x.end());
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++x[static_cast<std::size_t>(i)] <= L * q) break;
            x[static_cast<std::size_t>(i)] = -L * q;
        }
    }

    std::vector<std::int64_t> stride(static_cast<std::size_t>(d), 1);
    for (int i = d - 2; i >= 0; --i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i) + 1] * side;

    std::vector<Edge> edges;
    for (std::int64_t t = 0; t < total; ++t) {
        int u = dense[static_cast<std::size_t>(t)];
        if (u < 0) continue;
        auto xu = std::span<const std::int64_t>(coords.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(d),
                                                static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            if (xu[static_cast<std::size_t>(i)] + 1 > L * q) continue;
            bool on_line = true;
            for (int j = 0; j < d; ++j)
                if (j != i && floor_mod(xu[static_cast<std::size_t>(j)], q) != 0) on_line = false;
            if (!on_line) continue;
            int v = dense[static_cast<std::size_t>(t + stride[static_cast<std::size_t>(i)])];
            if (v < 0) continue;
            bool lattice_end = floor_mod(xu[static_cast<std::size_t>(i)], q) == 0 ||
                               floor_mod(xu[static_cast<std::size_t>(i)] + 1, q) == 0;
            edges.push_back({u, v, lattice_end ? beta1 : beta2, lattice_end ? EdgeClass::Beta1 : EdgeClass::Beta2});
        }
    }
    sort_edges(edges);
    return WeightedGraph(d, q, std::move(coords), std::move(edges), GraphKind::Extended, n);
}

WeightedGraph build_extended_triangulation_rect(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1,
                                                int n, double beta1, double beta2, int dimension) {
    require(dimension == 2, ErrorKind::UnsupportedDimension, "the extended triangulation exists only for d = 2");
    require(x1 > x0 && y1 > y0, ErrorKind::Shape, "triangulation needs at least one unit square");
    require(n >= 0, ErrorKind::Shape, "n must be >= 0");
    require(beta1 >= 0 && beta2 >= 0, ErrorKind::Domain, "couplings must be >= 0");
    const std::int64_t D = 2 * (n + 1);
    const std::int64_t X0 = x0 * D, Y0 = y0 * D, W = (x1 - x0) * D + 1, H = (y1 - y0) * D + 1;
    checked_count({W, H});
    std::vector<int> dense(static_cast<std::size_t>(W * H), -1);
    auto at = [&](std::int64_t X, std::int64_t Y) -> int& {
        return dense[static_cast<std::size_t>((X - X0) * H + (Y - Y0))];
    };
    for (std::int64_t X = X0; X < X0 + W; ++X)
        for (std::int64_t Y = Y0; Y < Y0 + H; ++Y) {
            bool vline = floor_mod(X, D) == 0 && floor_mod(Y, 2) == 0;
            bool hline = floor_mod(Y, D) == 0 && floor_mod(X, 2) == 0;
            if (vline || hline) at(X, Y) = 0;
        }
    for (std::int64_t a = x0; a < x1; ++a)
        for (std::int64_t b = y0; b < y1; ++b)
            for (std::int64_t j = 1; j < D; ++j) at(a * D + j, (b + 1) * D - j) = 0;

    std::vector<std::int64_t> coords;
    int next = 0;
    for (std::int64_t X = X0; X < X0 + W; ++X)
        for (std::int64_t Y = Y0; Y < Y0 + H; ++Y)
            if (at(X, Y) == 0) {
                at(X, Y) = next++;
                coords.push_back(X);
                coords.push_back(Y);
            }

    auto special = [&](std::int64_t X, std::int64_t Y) {
        std::int64_t mx = floor_mod(X, D), my = floor_mod(Y, D);
        return (mx == 0 && my == 0) || (mx == D / 2 && my == D / 2);
    };
    std::vector<Edge> edges;
    auto add = [&](std::int64_t Xa, std::int64_t Ya, std::int64_t Xb, std::int64_t Yb) {
        bool b1 = special(Xa, Ya) || special(Xb, Yb);
        edges.push_back({at(Xa, Ya), at(Xb, Yb), b1 ? beta1 : beta2, b1 ? EdgeClass::Beta1 : EdgeClass::Beta2});
    };
    for (std::int64_t X = X0; X < X0 + W; ++X)
        for (std::int64_t Y = Y0; Y < Y0 + H; ++Y) {
            if (floor_mod(Y, D) == 0 && floor_mod(X, 2) == 0 && X + 2 < X0 + W) add(X, Y, X + 2, Y);
            if (floor_mod(X, D) == 0 && floor_mod(Y, 2) == 0 && Y + 2 < Y0 + H) add(X, Y, X, Y + 2);
        }
    for (std::int64_t a = x0; a < x1; ++a)
        for (std::int64_t b = y0; b < y1; ++b)
            for (std::int64_t j = 0; j < D; ++j) add(a * D + j, (b + 1) * D - j, a * D + j + 1, (b + 1) * D - j - 1);
    sort_edges(edges);
    return WeightedGraph(2, D, std::move(coords), std::move(edges), GraphKind::Triangulation, n);
}

WeightedGraph build_extended_triangulation(std::int64_t L, int n, double beta1, double beta2) {
    require(L >= 1, ErrorKind::Shape, "triangulation box needs L >= 1");
    return build_extended_triangulation_rect(-L, -L, L, L, n, beta1, beta2);
}

std::vector<std::vector<Incidence>> DualGraph::adjacency() const {
    std::vector<std::vector<Incidence>> adj(faces.size());
    for (int i = 0; i < static_cast<int>(dual_edges.size()); ++i) {
        const auto& e = dual_edges[static_cast<std::size_t>(i)];
        adj[static_cast<std::size_t>(e.u)].push_back({e.v, i});
        adj[static_cast<std::size_t>(e.v)].push_back({e.u, i});
    }
    return adj;
}

DualGraph build_dual_graph(const WeightedGraph& g) {
    require(g.dimension() == 2, ErrorKind::UnsupportedDimension, "dual graph requires a planar (d = 2) graph");
    require(g.kind() == GraphKind::Triangulation, ErrorKind::Topology, "dual graph requires an extended triangulation");
    const int nv = g.vertex_count();
    const int n = g.subdivisions();

    // Neighbours of each vertex in counter-clockwise order, by exact integer angle comparison.
    std::vector<std::vector<Incidence>> around(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        auto nb = g.neighbours(v);
        around[static_cast<std::size_t>(v)].assign(nb.begin(), nb.end());
        const auto pv = g.numerators(v);
        auto dir = [&](int w) {
            auto pw = g.numerators(w);
            return std::pair<std::int64_t, std::int64_t>{pw[0] - pv[0], pw[1] - pv[1]};
        };
        std::sort(around[static_cast<std::size_t>(v)].begin(), around[static_cast<std::size_t>(v)].end(),
                  [&](const Incidence& a, const Incidence& b) {
                      auto [ax, ay] = dir(a.vertex);
                      auto [bx, by] = dir(b.vertex);
                      int ha = (ay < 0 || (ay == 0 && ax < 0)) ? 1 : 0;
                      int hb = (by < 0 || (by == 0 && bx < 0)) ? 1 : 0;
                      if (ha != hb) return ha < hb;
                      return ax * by - ay * bx > 0;
                  });
    }
    auto position = [&](int v, int w) {
        const auto& list = around[static_cast<std::size_t>(v)];
        for (std::size_t k = 0; k < list.size(); ++k)
            if (list[k].vertex == w) return static_cast<int>(k);
        fail(ErrorKind::Topology, "broken adjacency");
    };

    // Left face of each half-edge (v, k) := v -> around[v][k].
    std::vector<std::size_t> base(static_cast<std::size_t>(nv) + 1, 0);
    for (int v = 0; v < nv; ++v) base[static_cast<std::size_t>(v) + 1] = base[static_cast<std::size_t>(v)] + around[static_cast<std::size_t>(v)].size();
    std::vector<int> left(base.back(), -1);

    struct Walk {
        std::vector<int> vertices;
        std::vector<int> edges;
        std::int64_t twice_area;
    };
    std::vector<Walk> walks;
    for (int v0 = 0; v0 < nv; ++v0) {
        for (std::size_t k0 = 0; k0 < around[static_cast<std::size_t>(v0)].size(); ++k0) {
            if (left[base[static_cast<std::size_t>(v0)] + k0] >= 0) continue;
            Walk w{{}, {}, 0};
            int v = v0;
            int k = static_cast<int>(k0);
            const int id = static_cast<int>(walks.size());
            while (left[base[static_cast<std::size_t>(v)] + static_cast<std::size_t>(k)] < 0) {
                left[base[static_cast<std::size_t>(v)] + static_cast<std::size_t>(k)] = id;
                const auto& inc = around[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
                w.vertices.push_back(v);
                w.edges.push_back(inc.edge);
                auto a = g.numerators(v);
                auto b = g.numerators(inc.vertex);
                w.twice_area += a[0] * b[1] - b[0] * a[1];
                int j = position(inc.vertex, v);
                int deg = static_cast<int>(around[static_cast<std::size_t>(inc.vertex)].size());
                k = (j - 1 + deg) % deg;
                v = inc.vertex;
            }
            require(v == v0 && k == static_cast<int>(k0), ErrorKind::Topology, "face walk did not close");
            walks.push_back(std::move(w));
        }
    }

    int outer_count = 0;
    for (const auto& w : walks) outer_count += w.twice_area < 0;
    require(outer_count == 1, ErrorKind::Topology, "expected exactly one unbounded face");

    std::vector<int> interior;
    for (int i = 0; i < static_cast<int>(walks.size()); ++i)
        if (walks[static_cast<std::size_t>(i)].twice_area > 0) interior.push_back(i);
        else require(walks[static_cast<std::size_t>(i)].twice_area < 0, ErrorKind::Topology, "degenerate face");

    DualGraph dual;
    dual.subdivisions = n;
    std::vector<Face> faces;
    for (int wi : interior) {
        const auto& w = walks[static_cast<std::size_t>(wi)];
        require(w.vertices.size() >= 3, ErrorKind::Topology, "face with fewer than three corners");
        double cx = 0, cy = 0;
        for (int v : w.vertices) {
            cx += g.coord(v, 0);
            cy += g.coord(v, 1);
        }
        cx /= static_cast<double>(w.vertices.size());
        cy /= static_cast<double>(w.vertices.size());
        faces.push_back({wi, w.edges, w.vertices, cx, cy, false});
    }
    std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
        return a.centroid_x != b.centroid_x ? a.centroid_x < b.centroid_x : a.centroid_y < b.centroid_y;
    });
    std::vector<int> walk_to_face(walks.size(), -1);
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
        walk_to_face[static_cast<std::size_t>(faces[static_cast<std::size_t>(f)].id)] = f;
        faces[static_cast<std::size_t>(f)].id = f;
    }

    // Per primal edge, the faces on its two sides.
    std::vector<std::pair<int, int>> sides(static_cast<std::size_t>(g.edge_count()), {-2, -2});
    for (int v = 0; v < nv; ++v)
        for (std::size_t k = 0; k < around[static_cast<std::size_t>(v)].size(); ++k) {
            const auto& inc = around[static_cast<std::size_t>(v)][k];
            int f = walk_to_face[static_cast<std::size_t>(left[base[static_cast<std::size_t>(v)] + k])];
            auto& s = sides[static_cast<std::size_t>(inc.edge)];
            (s.first == -2 ? s.first : s.second) = f;
        }
    std::map<std::pair<int, int>, int> shared;
    for (const auto& [a, b] : sides) {
        require(a != -2 && b != -2, ErrorKind::Topology, "edge without two sides");
        if (a < 0 || b < 0) {
            if (a >= 0) faces[static_cast<std::size_t>(a)].touches_outer = true;
            if (b >= 0) faces[static_cast<std::size_t>(b)].touches_outer = true;
            continue;
        }
        require(a != b, ErrorKind::Topology, "bridge edge inside a face");
        ++shared[{std::min(a, b), std::max(a, b)}];
    }
    for (const auto& [key, count] : shared) {
        DualEdgeType type;
        if (count == n + 1)
            type = DualEdgeType::Type1;
        else if (count == 2 * n + 2)
            type = DualEdgeType::Type2;
        else
            fail(ErrorKind::Topology, "faces share " + std::to_string(count) + " primal edges");
        dual.dual_edges.push_back({key.first, key.second, type});
    }
    dual.faces = std::move(faces);

    const std::int64_t origin[2] = {0, 0};
    if (auto o = g.find_vertex(origin)) {
        for (const auto& f : dual.faces)
            if (f.centroid_x > 0 && f.centroid_y > 0 &&
                std::find(f.vertices.begin(), f.vertices.end(), *o) != f.vertices.end())
                dual.origin_face = f.id;
    }
    return dual;
}

WeightedGraph build_renormalized_graph(const SiteRect& region, std::int64_t L0) {
    require(L0 >= 1, ErrorKind::Domain, "L0 must be positive");
    const int d = region.dimension();
    const std::int64_t pitch = 2 * L0 + 1;
    std::vector<std::int64_t> k(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        std::int64_t lo = region.lo[static_cast<std::size_t>(i)], hi = region.hi[static_cast<std::size_t>(i)];
        require(floor_mod(lo + L0, pitch) == 0 && (hi - lo + 1) % pitch == 0 && hi >= lo, ErrorKind::Partition,
                "region is not tiled by translates of the sub-box on the pitch lattice");
        k[static_cast<std::size_t>(i)] = (hi - lo + 1) / pitch;
    }
    SiteRect index_rect;
    for (int i = 0; i < d; ++i) {
        index_rect.lo.push_back(0);
        index_rect.hi.push_back(k[static_cast<std::size_t>(i)] - 1);
    }
    auto grid = build_rect_lattice(index_rect, 1.0);
    std::vector<std::int64_t> coords;
    coords.reserve(static_cast<std::size_t>(grid.vertex_count() * d));
    for (int v = 0; v < grid.vertex_count(); ++v)
        for (int i = 0; i < d; ++i)
            coords.push_back(region.lo[static_cast<std::size_t>(i)] + L0 + pitch * grid.numerators(v)[static_cast<std::size_t>(i)]);
    return WeightedGraph(d, 1, std::move(coords), grid.edges(), GraphKind::Renormalized, 0);
}

WeightedGraph build_renormalized_graph(const LatticeBox& region, std::int64_t L0) {
    return build_renormalized_graph(SiteRect::from_box(region), L0);
}

}  // namespace quenchxy
