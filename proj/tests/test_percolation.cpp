#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <queue>
#include <vector>

#include "quenchxy/error.hpp"
#include "quenchxy/graph.hpp"
#include "quenchxy/percolation.hpp"
#include "quenchxy/rng.hpp"

using namespace quenchxy;

namespace {

PercolationSample with_open(const WeightedGraph& g, const std::vector<int>& open) {
    PercolationSample s;
    s.occupation.assign(static_cast<std::size_t>(g.vertex_count()), 0);
    for (int v : open) s.occupation[static_cast<std::size_t>(v)] = 1;
    return s;
}

int at(const WeightedGraph& g, std::int64_t x, std::int64_t y) { return *g.find_integer_point(std::vector<std::int64_t>{x, y}); }

// Flood fill over open sites, independent of the union-find labeling.
std::vector<int> flood_labels(const WeightedGraph& g, const PercolationSample& s) {
    std::vector<int> label(static_cast<std::size_t>(g.vertex_count()), -1);
    int next = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (!s.open(v) || label[static_cast<std::size_t>(v)] >= 0) continue;
        std::vector<int> stack{v};
        label[static_cast<std::size_t>(v)] = next;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& inc : g.neighbours(u))
                if (s.open(inc.vertex) && label[static_cast<std::size_t>(inc.vertex)] < 0) {
                    label[static_cast<std::size_t>(inc.vertex)] = next;
                    stack.push_back(inc.vertex);
                }
        }
        ++next;
    }
    return label;
}

// Open-path BFS distance inside the union of two boxes.
int bfs_distance(const WeightedGraph& g, const PercolationSample& s, const LatticeBox& a, const LatticeBox& b, int from,
                 int to) {
    auto inside = [&](int v) { return a.contains(g.numerators(v)) || b.contains(g.numerators(v)); };
    std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(from)] = 0;
    q.push(from);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const auto& inc : g.neighbours(u)) {
            const int w = inc.vertex;
            if (dist[static_cast<std::size_t>(w)] >= 0 || !s.open(w) || !inside(w)) continue;
            dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
            q.push(w);
        }
    }
    return dist[static_cast<std::size_t>(to)];
}

}  // namespace

TEST_CASE("percolation extremes") {
    const auto g = build_box_lattice(2, 3, 1.0);
    auto s = sample_percolation(g, PercolationKind::Site, 1.0, 1);
    CHECK(std::all_of(s.occupation.begin(), s.occupation.end(), [](auto o) { return o == 1; }));
    const auto ext = build_extended_lattice(2, 2, 2, 1.0, 1.0);
    s = sample_percolation(ext, PercolationKind::Site, 0.0, 1);
    for (int v = 0; v < ext.vertex_count(); ++v) CHECK(s.open(v) == !ext.in_integer_lattice(v));
    CHECK_THROWS_AS(sample_percolation(g, PercolationKind::Site, 1.5, 1), Error);
}

TEST_CASE("percolation open fraction and reproducibility") {
    const auto g = build_box_lattice(2, 158, 1.0);  // 317^2 ~ 1e5 sites
    const auto s = sample_percolation(g, PercolationKind::Site, 0.6, 42);
    const double n = static_cast<double>(s.occupation.size());
    const double open = static_cast<double>(std::count(s.occupation.begin(), s.occupation.end(), 1));
    CHECK(std::abs(open / n - 0.6) <= 4 * std::sqrt(0.24 / n));
    CHECK(sample_percolation(g, PercolationKind::Site, 0.6, 42).occupation == s.occupation);
    CHECK(sample_percolation(g, PercolationKind::Site, 0.6, 43).occupation != s.occupation);
    const auto e = sample_percolation(g, PercolationKind::Edge, 0.6, 42);
    CHECK(e.occupation.size() == static_cast<std::size_t>(g.edge_count()));
}

TEST_CASE("edge-from-site coupling") {
    const auto g = build_box_lattice(2, 50, 1.0);
    for (double u : {0.0, 1.0}) {
        const auto c = edge_from_site_coupling(g, u, 3);
        for (auto o : c.edges.occupation) CHECK(o == (u == 1.0));
        for (auto o : c.sites.occupation) CHECK(o == (u == 1.0));
    }
    const auto c = edge_from_site_coupling(g, 0.9, 5);
    double eo = 0, so = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        CHECK(c.edges.open(e) >= (c.sites.open(ed.u) && c.sites.open(ed.v)));
        eo += c.edges.open(e);
    }
    for (auto o : c.sites.occupation) so += o;
    const double ne = g.edge_count(), ns = g.vertex_count();
    CHECK(std::abs(eo / ne - 0.81) <= 4 * std::sqrt(0.81 * 0.19 / ne));
    // sites are not independent of each other's edges, so allow a wider margin
    CHECK(std::abs(so / ns - 0.6561) <= 0.02);
}

TEST_CASE("cluster labeling fixtures") {
    const auto g = build_box_lattice(2, 1, 1.0);
    auto all = sample_percolation(g, PercolationKind::Site, 1.0, 0);
    auto lab = label_clusters(g, all);
    CHECK(lab.count() == 1);
    CHECK(lab.diameter[0] == 2);
    const auto big = build_box_lattice(2, 4, 1.0);
    std::vector<int> open;
    for (int v = 0; v < big.vertex_count(); ++v)
        if ((big.numerators(v)[0] + big.numerators(v)[1]) % 2 == 0) open.push_back(v);
    lab = label_clusters(big, with_open(big, open));
    CHECK(lab.count() == static_cast<int>(open.size()));
    for (int sz : lab.size) CHECK(sz == 1);
}

TEST_CASE("cluster labeling agrees with flood fill") {
    const auto g = build_rect_lattice(SiteRect{{0, 0}, {19, 19}}, 1.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = sample_percolation(g, PercolationKind::Site, 0.55, seed);
        const auto lab = label_clusters(g, s);
        const auto ref = flood_labels(g, s);
        std::map<int, int> fwd, back;
        std::map<int, std::vector<int>> members;
        for (int v = 0; v < g.vertex_count(); ++v) {
            const int a = lab.label[static_cast<std::size_t>(v)], b = ref[static_cast<std::size_t>(v)];
            CHECK((a < 0) == (b < 0));
            if (a < 0) continue;
            if (!fwd.count(a)) fwd[a] = b;
            if (!back.count(b)) back[b] = a;
            CHECK(fwd[a] == b);
            CHECK(back[b] == a);
            members[a].push_back(v);
        }
        for (const auto& [c, vs] : members) {
            std::int64_t diam = 0;
            for (int a : vs)
                for (int b : vs)
                    for (int k = 0; k < 2; ++k)
                        diam = std::max(diam, std::abs(g.numerators(a)[static_cast<std::size_t>(k)] - g.numerators(b)[static_cast<std::size_t>(k)]));
            CHECK(lab.diameter[static_cast<std::size_t>(c)] == diam);
            CHECK(lab.size[static_cast<std::size_t>(c)] == static_cast<int>(vs.size()));
        }
    }
}

TEST_CASE("classify_box fixtures") {
    const LatticeBox box{{0, 0}, 5};
    const auto g = build_box_lattice(2, 10, 1.0);
    auto open = sample_percolation(g, PercolationKind::Site, 1.0, 0);
    auto r = classify_box(g, open, box);
    CHECK(r.pre_good);
    CHECK(r.good);
    REQUIRE(r.center_vertex.has_value());
    CHECK(*r.center_vertex == at(g, 0, 0));
    auto closed = sample_percolation(g, PercolationKind::Site, 0.0, 0);
    r = classify_box(g, closed, box);
    CHECK_FALSE(r.pre_good);
    CHECK_FALSE(r.good);
    CHECK_FALSE(r.crossing_cluster.has_value());

    // full-width cross plus a far two-site cluster
    std::vector<int> sites;
    for (std::int64_t t = -5; t <= 5; ++t) {
        sites.push_back(at(g, t, 0));
        sites.push_back(at(g, 0, t));
    }
    auto cross = with_open(g, sites);
    r = classify_box(g, cross, box);
    CHECK(r.pre_good);
    sites.push_back(at(g, 4, 4));
    sites.push_back(at(g, 4, 3));
    r = classify_box(g, with_open(g, sites), box);
    CHECK(r.crossing_cluster.has_value());
    CHECK(r.max_other_diameter == 1);
    CHECK_FALSE(r.pre_good);
    CHECK_FALSE(r.good);

    const auto small = build_box_lattice(2, 6, 1.0);
    CHECK_THROWS_AS(classify_box(small, sample_percolation(small, PercolationKind::Site, 1.0, 0), box), Error);
}

TEST_CASE("classification is deterministic and good implies preGood") {
    const LatticeBox box{{0, 0}, 4};
    const auto g = build_box_lattice(2, 8, 1.0);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = sample_percolation(g, PercolationKind::Site, 0.97, seed);
        const auto a = classify_box(g, s, box), b = classify_box(g, s, box);
        CHECK(a.pre_good == b.pre_good);
        CHECK(a.good == b.good);
        CHECK(a.max_other_diameter == b.max_other_diameter);
        if (a.good) CHECK(a.pre_good);
        if (a.pre_good) CHECK(a.crossing_cluster.has_value());
    }
}

TEST_CASE("connect_centers") {
    const LatticeBox a{{0, 0}, 5}, b{{11, 0}, 5};
    const auto g = build_rect_lattice(SiteRect{{-10, -10}, {21, 10}}, 1.0);
    const auto open = sample_percolation(g, PercolationKind::Site, 1.0, 0);
    const int ca = at(g, 0, 0), cb = at(g, 11, 3);
    auto path = connect_centers(g, open, a, b, ca, cb);
    REQUIRE(path.has_value());
    CHECK(path->size() == 15);  // L1 distance 14
    CHECK(path->front() == ca);
    CHECK(path->back() == cb);

    std::vector<int> sites;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.numerators(v)[0] != 6) sites.push_back(v);
    CHECK_FALSE(connect_centers(g, with_open(g, sites), a, b, ca, cb).has_value());
}

TEST_CASE("connect_centers matches BFS distance between good boxes") {
    const LatticeBox a{{0, 0}, 5}, b{{11, 0}, 5};
    const auto g = build_rect_lattice(SiteRect{{-10, -10}, {21, 10}}, 1.0);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto s = sample_percolation(g, PercolationKind::Site, 0.985, seed);
        // keep only the largest cluster so that no small clusters remain
        const auto lab = label_clusters(g, s);
        const int keep = static_cast<int>(std::max_element(lab.size.begin(), lab.size.end()) - lab.size.begin());
        for (int v = 0; v < g.vertex_count(); ++v)
            if (lab.label[static_cast<std::size_t>(v)] != keep) s.occupation[static_cast<std::size_t>(v)] = 0;
        const auto ra = classify_box(g, s, a), rb = classify_box(g, s, b);
        if (!ra.good || !rb.good) continue;
        ++checked;
        const auto path = connect_centers(g, s, a, b, *ra.center_vertex, *rb.center_vertex);
        REQUIRE(path.has_value());
        CHECK(static_cast<int>(path->size()) - 1 == bfs_distance(g, s, a, b, *ra.center_vertex, *rb.center_vertex));
        CHECK(path->size() <= 2 * 121);
        for (std::size_t i = 0; i < path->size(); ++i) {
            const int v = (*path)[i];
            CHECK(s.open(v));
            CHECK((a.contains(g.numerators(v)) || b.contains(g.numerators(v))));
            if (i > 0) {
                std::int64_t l1 = 0;
                for (int k = 0; k < 2; ++k) l1 += std::abs(g.numerators(v)[static_cast<std::size_t>(k)] - g.numerators((*path)[i - 1])[static_cast<std::size_t>(k)]);
                CHECK(l1 == 1);
            }
        }
    }
    CHECK(checked >= 5);
}

TEST_CASE("wilson interval") {
    const auto w = wilson_interval(0, 10);
    CHECK(w.lower == 0.0);
    CHECK(w.upper == doctest::Approx(3.841458820694124 / (10 + 3.841458820694124)).epsilon(1e-12));
    const auto h = wilson_interval(50, 100);
    CHECK(h.estimate == 0.5);
    CHECK(h.lower == doctest::Approx(1 - h.upper).epsilon(1e-12));
}

TEST_CASE("good-box scan trivial and subcritical regimes") {
    GoodBoxScanOptions opt;
    opt.trials = 50;
    for (const auto& r : goodbox_scan(2, 1.0, {2, 4}, opt, 9)) {
        CHECK(r.pre_good.estimate == 1.0);
        CHECK(r.good.estimate == 1.0);
        CHECK(r.adjacent_good_pairs == 50);
        CHECK(r.connection_failures == 0);
    }
    opt.trials = 400;
    const auto sub = goodbox_scan(2, 0.3, {4, 8}, opt, 9);
    CHECK(sub[0].pre_good.estimate < 0.05);
    CHECK(sub[1].pre_good.estimate <= sub[0].pre_good.estimate);
}

TEST_CASE("good-box scan does not depend on the worker count") {
    GoodBoxScanOptions opt;
    opt.trials = 200;
    const auto one = goodbox_scan(2, 0.9, {3}, opt, 11);
    opt.workers = 3;
    const auto three = goodbox_scan(2, 0.9, {3}, opt, 11);
    CHECK(one[0].pre_good.successes == three[0].pre_good.successes);
    CHECK(one[0].good.successes == three[0].good.successes);
}
