#include "quenchxy/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <gmpxx.h>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include "quenchxy/error.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

double Window::diagonal() const { return std::hypot(x1 - x0, y1 - y0); }

namespace {

constexpr double kEps = 0x1.0p-53;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const mpq_class& q) { return sgn(q); }

}  // namespace

int orient2d(const Point2& a, const Point2& b, const Point2& c) {
    const double l = (a.x - c.x) * (b.y - c.y);
    const double r = (a.y - c.y) * (b.x - c.x);
    const double det = l - r;
    const double bound = kOrientBound * (std::fabs(l) + std::fabs(r));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    const mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    return sign_of((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                             (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                             (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double bound = kInCircleBound * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    const mpq_class qdx(d.x), qdy(d.y);
    const mpq_class ax = mpq_class(a.x) - qdx, ay = mpq_class(a.y) - qdy;
    const mpq_class bx = mpq_class(b.x) - qdx, by = mpq_class(b.y) - qdy;
    const mpq_class cx = mpq_class(c.x) - qdx, cy = mpq_class(c.y) - qdy;
    const mpq_class exact = (ax * ax + ay * ay) * (bx * cy - cx * by) + (bx * bx + by * by) * (cx * ay - ax * cy) +
                            (cx * cx + cy * cy) * (ax * by - bx * ay);
    return sign_of(exact);
}

std::vector<Point2> sample_poisson_points(const Window& window, double intensity, std::uint64_t seed) {
    require(window.x1 >= window.x0 && window.y1 >= window.y0, ErrorKind::Shape, "window corners out of order");
    require(intensity >= 0 && std::isfinite(intensity), ErrorKind::Domain, "intensity must be finite and >= 0");
    const double mean = window.area() * intensity;
    if (mean <= 0) return {};
    Rng rng(seed);
    std::poisson_distribution<long long> count(mean);
    const long long n = count(rng.engine());
    std::vector<Point2> points;
    points.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double x = window.x0 + (window.x1 - window.x0) * rng.uniform();
        const double y = window.y0 + (window.y1 - window.y0) * rng.uniform();
        points.push_back({x, y});
    }
    return points;
}

namespace {

struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbour across the edge opposite v[k]
    bool alive;
};

struct Triangulation {
    std::vector<Point2> pts;  // input points followed by three enclosing vertices
    std::vector<Tri> tris;
    int real_count = 0;
};

// Insertion order along a boustrophedon over a coarse grid keeps walks short.
std::vector<int> spatial_order(const std::vector<Point2>& pts) {
    const std::size_t n = pts.size();
    double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
    for (const auto& p : pts) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const int g = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 4.0)));
    auto cell = [&](double v, double lo, double hi) {
        if (hi <= lo) return 0;
        return std::min(g - 1, static_cast<int>((v - lo) / (hi - lo) * g));
    };
    std::vector<std::pair<std::int64_t, int>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int row = cell(pts[i].y, y0, y1);
        int col = cell(pts[i].x, x0, x1);
        if (row % 2) col = g - 1 - col;
        keys[i] = {static_cast<std::int64_t>(row) * g + col, static_cast<int>(i)};
    }
    std::sort(keys.begin(), keys.end());
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = keys[i].second;
    return order;
}

Triangulation bowyer_watson(const std::vector<Point2>& input) {
    Triangulation t;
    const int n = static_cast<int>(input.size());
    t.real_count = n;
    t.pts = input;
    for (const auto& p : input)
        require(std::isfinite(p.x) && std::isfinite(p.y), ErrorKind::DegenerateInput, "point coordinates must be finite");
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (n > 0) {
        x0 = x1 = input[0].x;
        y0 = y1 = input[0].y;
        for (const auto& p : input) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double span = std::max({x1 - x0, y1 - y0, 1.0}) * 1e7;
    t.pts.push_back({cx - 2 * span, cy - span});
    t.pts.push_back({cx + 2 * span, cy - span});
    t.pts.push_back({cx, cy + 2 * span});
    t.tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});
    if (n == 0) return t;

    auto contains_vertex = [&](const Tri& tri, const Point2& p) {
        for (int k = 0; k < 3; ++k) {
            const auto& q = t.pts[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(k)])];
            if (q.x == p.x && q.y == p.y) return true;
        }
        return false;
    };

    int last = 0;
    std::vector<int> bad, stack;
    std::vector<char> is_bad;
    std::vector<std::array<int, 3>> boundary;  // (a, b, outside neighbour)
    std::unordered_map<int, int> by_start;
    for (int idx : spatial_order(input)) {
        const Point2& p = t.pts[static_cast<std::size_t>(idx)];
        // visibility walk
        int cur = last;
        std::size_t steps = 0;
        const std::size_t cap = 4 * t.tris.size() + 64;
        while (true) {
            const Tri& tri = t.tris[static_cast<std::size_t>(cur)];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                const int a = tri.v[static_cast<std::size_t>((k + 1) % 3)], b = tri.v[static_cast<std::size_t>((k + 2) % 3)];
                if (orient2d(t.pts[static_cast<std::size_t>(a)], t.pts[static_cast<std::size_t>(b)], p) < 0) {
                    next = tri.nb[static_cast<std::size_t>(k)];
                    break;
                }
            }
            if (next < 0) break;
            cur = next;
            if (++steps > cap) {
                cur = -1;
                for (std::size_t s = 0; s < t.tris.size() && cur < 0; ++s) {
                    const Tri& c = t.tris[s];
                    if (!c.alive) continue;
                    bool inside = true;
                    for (int k = 0; k < 3 && inside; ++k)
                        inside = orient2d(t.pts[static_cast<std::size_t>(c.v[static_cast<std::size_t>((k + 1) % 3)])],
                                          t.pts[static_cast<std::size_t>(c.v[static_cast<std::size_t>((k + 2) % 3)])], p) >= 0;
                    if (inside) cur = static_cast<int>(s);
                }
                require(cur >= 0, ErrorKind::Numeric, "point location failed");
                break;
            }
        }
        if (contains_vertex(t.tris[static_cast<std::size_t>(cur)], p))
            fail(ErrorKind::DegenerateInput, "duplicate point at index " + std::to_string(idx));

        // cavity: triangles whose circumcircle strictly contains p
        is_bad.resize(t.tris.size(), 0);
        bad.clear();
        stack.assign(1, cur);
        is_bad[static_cast<std::size_t>(cur)] = 1;
        while (!stack.empty()) {
            const int s = stack.back();
            stack.pop_back();
            bad.push_back(s);
            for (int nb : t.tris[static_cast<std::size_t>(s)].nb) {
                if (nb < 0 || is_bad[static_cast<std::size_t>(nb)]) continue;
                const Tri& c = t.tris[static_cast<std::size_t>(nb)];
                if (incircle(t.pts[static_cast<std::size_t>(c.v[0])], t.pts[static_cast<std::size_t>(c.v[1])],
                             t.pts[static_cast<std::size_t>(c.v[2])], p) > 0) {
                    is_bad[static_cast<std::size_t>(nb)] = 1;
                    stack.push_back(nb);
                }
            }
        }
        boundary.clear();
        for (int s : bad) {
            const Tri& c = t.tris[static_cast<std::size_t>(s)];
            for (int k = 0; k < 3; ++k) {
                const int nb = c.nb[static_cast<std::size_t>(k)];
                if (nb >= 0 && is_bad[static_cast<std::size_t>(nb)]) continue;
                boundary.push_back({c.v[static_cast<std::size_t>((k + 1) % 3)], c.v[static_cast<std::size_t>((k + 2) % 3)], nb});
            }
        }
        for (int s : bad) {
            t.tris[static_cast<std::size_t>(s)].alive = false;
            is_bad[static_cast<std::size_t>(s)] = 0;
        }
        by_start.clear();
        const int first_new = static_cast<int>(t.tris.size());
        for (const auto& [a, b, outside] : boundary) {
            require(orient2d(t.pts[static_cast<std::size_t>(a)], t.pts[static_cast<std::size_t>(b)], p) > 0,
                    ErrorKind::Numeric, "cavity is not star-shaped");
            const int id = static_cast<int>(t.tris.size());
            t.tris.push_back({{a, b, idx}, {-1, -1, outside}, true});
            if (outside >= 0) {
                auto& o = t.tris[static_cast<std::size_t>(outside)];
                for (int k = 0; k < 3; ++k) {
                    const int oa = o.v[static_cast<std::size_t>((k + 1) % 3)], ob = o.v[static_cast<std::size_t>((k + 2) % 3)];
                    if (oa == b && ob == a) o.nb[static_cast<std::size_t>(k)] = id;
                }
            }
            by_start[a] = id;
        }
        for (int id = first_new; id < static_cast<int>(t.tris.size()); ++id) {
            auto& tri = t.tris[static_cast<std::size_t>(id)];
            const int other = by_start.at(tri.v[1]);  // the triangle (b, c, p)
            tri.nb[0] = other;
            t.tris[static_cast<std::size_t>(other)].nb[1] = id;
        }
        last = first_new;
    }
    return t;
}

// Neighbour lists among real points, including edges whose triangles involve
// the enclosing vertices (hull neighbours, collinear inputs).
std::vector<std::vector<int>> neighbour_lists(const Triangulation& t) {
    std::vector<std::vector<int>> nb(static_cast<std::size_t>(t.real_count));
    for (const auto& tri : t.tris) {
        if (!tri.alive) continue;
        for (int k = 0; k < 3; ++k) {
            const int a = tri.v[static_cast<std::size_t>(k)], b = tri.v[static_cast<std::size_t>((k + 1) % 3)];
            if (a < t.real_count && b < t.real_count) {
                nb[static_cast<std::size_t>(a)].push_back(b);
                nb[static_cast<std::size_t>(b)].push_back(a);
            }
        }
    }
    for (auto& l : nb) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    return nb;
}

double polygon_area(const std::vector<Point2>& poly) {
    double s = 0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const auto& a = poly[k];
        const auto& b = poly[(k + 1) % poly.size()];
        s += a.x * b.y - a.y * b.x;
    }
    return 0.5 * s;
}

// Clips a convex tagged polygon to {x : (x - m) . d <= 0}.
void clip_halfplane(VoronoiCell& cell, const Point2& m, const Point2& d, int tag) {
    const auto& V = cell.polygon;
    const auto& T = cell.edge_owner;
    const std::size_t n = V.size();
    if (n == 0) return;
    std::vector<Point2> outV;
    std::vector<int> outT;
    auto side = [&](const Point2& p) { return (p.x - m.x) * d.x + (p.y - m.y) * d.y; };
    for (std::size_t k = 0; k < n; ++k) {
        const Point2& cur = V[k];
        const Point2& nxt = V[(k + 1) % n];
        const double sc = side(cur), sn = side(nxt);
        auto cross = [&] {
            const double t = sc / (sc - sn);
            return Point2{cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)};
        };
        if (sc <= 0) {
            if (sn > 0 && sc < 0) {
                outV.push_back(cur);
                outT.push_back(T[k]);
                outV.push_back(cross());
                outT.push_back(tag);
            } else if (sn > 0) {
                outV.push_back(cur);
                outT.push_back(tag);
            } else {
                outV.push_back(cur);
                outT.push_back(T[k]);
            }
        } else if (sn < 0) {
            outV.push_back(cross());
            outT.push_back(T[k]);
        }
    }
    if (outV.size() < 3) {
        outV.clear();
        outT.clear();
    }
    cell.polygon = std::move(outV);
    cell.edge_owner = std::move(outT);
}

std::vector<VoronoiCell> clipped_cells(const std::vector<Point2>& pts, const std::vector<std::vector<int>>& nb,
                                       const Window& clip) {
    std::vector<VoronoiCell> cells(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& c = cells[i];
        c.polygon = {{clip.x0, clip.y0}, {clip.x1, clip.y0}, {clip.x1, clip.y1}, {clip.x0, clip.y1}};
        c.edge_owner = {-1, -1, -1, -1};
        const Point2& p = pts[i];
        for (int j : nb[i]) {
            const Point2& q = pts[static_cast<std::size_t>(j)];
            clip_halfplane(c, {0.5 * (p.x + q.x), 0.5 * (p.y + q.y)}, {q.x - p.x, q.y - p.y}, j);
        }
        c.area = c.polygon.empty() ? 0.0 : polygon_area(c.polygon);
    }
    return cells;
}

struct Facets {
    std::vector<VoronoiAdjacency> adjacency;
};

Facets facets_of(const std::vector<VoronoiCell>& cells, double threshold) {
    std::map<std::pair<int, int>, std::pair<double, int>> acc;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        for (std::size_t k = 0; k < c.polygon.size(); ++k) {
            const int j = c.edge_owner[k];
            if (j < 0) continue;
            const auto& a = c.polygon[k];
            const auto& b = c.polygon[(k + 1) % c.polygon.size()];
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            const int ii = static_cast<int>(i);
            auto& slot = acc[{std::min(ii, j), std::max(ii, j)}];
            slot.first += len;
            slot.second += 1;
        }
    }
    Facets f;
    for (const auto& [key, v] : acc) {
        // averaged over the two sides, which agree up to rounding
        const double len = v.first / (v.second >= 2 ? 2.0 : 1.0);
        if (len > threshold) f.adjacency.push_back({key.first, key.second, len});
    }
    return f;
}

}  // namespace

std::vector<Triangle> delaunay_triangulation(const std::vector<Point2>& points) {
    const auto t = bowyer_watson(points);
    std::vector<Triangle> out;
    for (const auto& tri : t.tris) {
        if (!tri.alive) continue;
        if (tri.v[0] >= t.real_count || tri.v[1] >= t.real_count || tri.v[2] >= t.real_count) continue;
        out.push_back({tri.v});
    }
    std::sort(out.begin(), out.end(), [](const Triangle& a, const Triangle& b) { return a.v < b.v; });
    return out;
}

std::vector<std::pair<int, int>> delaunay_edges(const std::vector<Triangle>& triangles) {
    std::vector<std::pair<int, int>> e;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t.v[static_cast<std::size_t>(k)], b = t.v[static_cast<std::size_t>((k + 1) % 3)];
            e.emplace_back(std::min(a, b), std::max(a, b));
        }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

const char* to_string(VoronoiStrength s) {
    switch (s) {
        case VoronoiStrength::F1: return "F1";
        case VoronoiStrength::F2: return "F2";
        case VoronoiStrength::F3: return "F3";
    }
    return "?";
}

double default_f2(double volume) { return -std::expm1(-volume); }

WeightedGraph VoronoiGraph::to_graph(double beta) const {
    require(beta >= 0, ErrorKind::Domain, "beta must be >= 0");
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < adjacency.size(); ++k)
        edges.push_back({adjacency[k].i, adjacency[k].j, beta * multipliers[k], EdgeClass::Generic});
    return WeightedGraph::from_edges(static_cast<int>(points.size()), std::move(edges));
}

VoronoiGraph build_voronoi_graph(const std::vector<Point2>& points, const Window& window, VoronoiStrength strength,
                                 const std::function<double(double)>& f) {
    require(points.size() >= 2, ErrorKind::DegenerateInput, "a Voronoi graph needs at least 2 points");
    require(window.area() > 0, ErrorKind::DegenerateInput, "window must have positive area");
    const auto t = bowyer_watson(points);
    VoronoiGraph g;
    g.points = points;
    g.window = window;
    g.cells = clipped_cells(points, neighbour_lists(t), window);
    g.adjacency = facets_of(g.cells, 1e-12 * window.diagonal()).adjacency;
    for (const auto& a : g.adjacency) {
        double m = 1.0;
        if (strength == VoronoiStrength::F2)
            m = f(g.cells[static_cast<std::size_t>(a.i)].area) * f(g.cells[static_cast<std::size_t>(a.j)].area);
        else if (strength == VoronoiStrength::F3)
            m = a.facet_length;
        require(m >= 0 && std::isfinite(m), ErrorKind::Domain, "coupling multiplier must be finite and >= 0");
        g.multipliers.push_back(m);
    }
    return g;
}

VoronoiEventRecord check_voronoi_events(const std::vector<Point2>& points, const Window& window, const Point2& z,
                                        double R, double H, const std::function<double(double)>& f) {
    require(R > 0 && H >= 0, ErrorKind::Domain, "need R > 0 and H >= 0");
    const Window six = Window::square(z, 6 * R);
    require(window.x0 <= six.x0 && window.y0 <= six.y0 && window.x1 >= six.x1 && window.y1 >= six.y1,
            ErrorKind::Coverage, "sample window does not cover z + [-6R, 6R]^2");
    VoronoiEventRecord rec;
    const Window unit = Window::square(z, R);
    std::vector<Point2> local;
    for (const auto& p : points) {
        if (six.contains(p)) local.push_back(p);
        if (unit.contains(p)) ++rec.count_r;
    }
    rec.f_rh = static_cast<double>(rec.count_r) <= H * R * R;
    if (local.empty()) {
        rec.max_gap = std::numeric_limits<double>::infinity();
        return rec;
    }
    const Window five = Window::square(z, 5 * R);
    const auto t = bowyer_watson(local);
    const auto cells = clipped_cells(local, neighbour_lists(t), five);
    // the farthest point of a convex cell from its site is a polygon vertex
    for (std::size_t i = 0; i < local.size(); ++i)
        for (const auto& v : cells[i].polygon)
            rec.max_gap = std::max(rec.max_gap, std::hypot(v.x - local[i].x, v.y - local[i].y));
    rec.e_r = rec.max_gap < R / 10;
    if (!rec.e_r) return rec;
    const Window four = Window::square(z, 4 * R);
    for (const auto& a : facets_of(cells, 1e-12 * five.diagonal()).adjacency) {
        if (!four.contains(local[static_cast<std::size_t>(a.i)]) || !four.contains(local[static_cast<std::size_t>(a.j)])) continue;
        const double f2 = f(cells[static_cast<std::size_t>(a.i)].area) * f(cells[static_cast<std::size_t>(a.j)].area);
        const double value = std::min(f2, a.facet_length);
        rec.k = rec.k ? std::min(*rec.k, value) : value;
    }
    return rec;
}

void write_points_csv(std::ostream& out, const std::vector<Point2>& points) {
    out << "x,y\n";
    char buf[64];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
        out << buf;
    }
}

std::vector<Point2> read_points_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::Parse, "empty point file");
    require(line == "x,y" || line == "x,y\r", ErrorKind::Parse, "point file header must be x,y");
    std::vector<Point2> pts;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        Point2 p{};
        char comma = 0;
        if (!(ss >> p.x >> comma >> p.y) || comma != ',')
            fail(ErrorKind::Parse, "bad point on line " + std::to_string(row));
        pts.push_back(p);
    }
    return pts;
}

}  // namespace quenchxy
