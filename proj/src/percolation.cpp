#include "quenchxy/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "quenchxy/error.hpp"
#include "quenchxy/parallel.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

const char* to_string(PercolationKind k) { return k == PercolationKind::Site ? "site" : "edge"; }

PercolationSample sample_percolation(const WeightedGraph& graph, PercolationKind kind, double p, std::uint64_t seed) {
    require(p >= 0 && p <= 1, ErrorKind::Domain, "percolation parameter must lie in [0,1]");
    PercolationSample s;
    s.kind = kind;
    s.p = p;
    s.seed = seed;
    Rng rng(seed);
    if (kind == PercolationKind::Site) {
        s.occupation.resize(static_cast<std::size_t>(graph.vertex_count()));
        const bool extended = graph.kind() == GraphKind::Extended || graph.kind() == GraphKind::Triangulation;
        for (int v = 0; v < graph.vertex_count(); ++v) {
            if (extended && !graph.in_integer_lattice(v))
                s.occupation[static_cast<std::size_t>(v)] = 1;
            else
                s.occupation[static_cast<std::size_t>(v)] = rng.bernoulli(p);
        }
    } else {
        s.occupation.resize(static_cast<std::size_t>(graph.edge_count()));
        for (auto& o : s.occupation) o = rng.bernoulli(p);
    }
    return s;
}

PercolationSample all_open(const WeightedGraph& graph, PercolationKind kind) {
    PercolationSample s;
    s.kind = kind;
    s.p = 1.0;
    s.occupation.assign(static_cast<std::size_t>(kind == PercolationKind::Site ? graph.vertex_count() : graph.edge_count()), 1);
    return s;
}

CoupledSamples edge_from_site_coupling(const WeightedGraph& graph, double u, std::uint64_t seed) {
    require(u >= 0 && u <= 1, ErrorKind::Domain, "coupling parameter must lie in [0,1]");
    require(graph.kind() == GraphKind::Box && graph.denominator() == 1, ErrorKind::Unsupported,
            "edge-from-site coupling is defined on box lattices");
    const int d = graph.dimension();
    const int nv = graph.vertex_count();
    Rng rng(seed);
    // z[v*2d + 2*axis + 0] points in +axis, +1 in -axis.
    std::vector<std::uint8_t> z(static_cast<std::size_t>(nv) * static_cast<std::size_t>(2 * d));
    for (auto& b : z) b = rng.bernoulli(u);

    CoupledSamples out;
    out.sites.kind = PercolationKind::Site;
    out.sites.p = std::pow(u, 2 * d);
    out.sites.seed = seed;
    out.sites.occupation.resize(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        std::uint8_t r = 1;
        for (int k = 0; k < 2 * d; ++k) r &= z[static_cast<std::size_t>(v) * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(k)];
        out.sites.occupation[static_cast<std::size_t>(v)] = r;
    }
    out.edges.kind = PercolationKind::Edge;
    out.edges.p = u * u;
    out.edges.seed = seed;
    out.edges.occupation.resize(static_cast<std::size_t>(graph.edge_count()));
    for (int e = 0; e < graph.edge_count(); ++e) {
        const auto& ed = graph.edge(e);
        auto a = graph.numerators(ed.u);
        auto b = graph.numerators(ed.v);
        int axis = 0;
        while (axis < d && a[static_cast<std::size_t>(axis)] == b[static_cast<std::size_t>(axis)]) ++axis;
        int lower = a[static_cast<std::size_t>(axis)] < b[static_cast<std::size_t>(axis)] ? ed.u : ed.v;
        int upper = lower == ed.u ? ed.v : ed.u;
        auto zl = z[static_cast<std::size_t>(lower) * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(2 * axis)];
        auto zu = z[static_cast<std::size_t>(upper) * static_cast<std::size_t>(2 * d) + static_cast<std::size_t>(2 * axis + 1)];
        out.edges.occupation[static_cast<std::size_t>(e)] = zl & zu;
    }
    return out;
}

double occupancy(const WeightedGraph& graph, const PercolationSample* disorder, int edge) {
    if (!disorder) return 1.0;
    const auto& e = graph.edge(edge);
    if (disorder->kind == PercolationKind::Site) return disorder->open(e.u) && disorder->open(e.v) ? 1.0 : 0.0;
    return disorder->open(edge) ? 1.0 : 0.0;
}

namespace {

void check_shape(const WeightedGraph& graph, const PercolationSample& s) {
    std::size_t expected = static_cast<std::size_t>(s.kind == PercolationKind::Site ? graph.vertex_count() : graph.edge_count());
    require(s.occupation.size() == expected, ErrorKind::Shape, "percolation sample does not match the graph");
}

bool vertex_present(const PercolationSample& s, int v) { return s.kind == PercolationKind::Edge || s.open(v); }

bool bond_open(const PercolationSample& s, const Edge& e, int edge) {
    return s.kind == PercolationKind::Site ? (s.open(e.u) && s.open(e.v)) : s.open(edge);
}

}  // namespace

ClusterLabeling label_clusters(const WeightedGraph& graph, const PercolationSample& sample) {
    check_shape(graph, sample);
    const int nv = graph.vertex_count();
    const int d = graph.dimension();
    ClusterLabeling out;
    out.label.assign(static_cast<std::size_t>(nv), -1);
    std::vector<int> queue;
    std::vector<std::int64_t> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int s = 0; s < nv; ++s) {
        if (out.label[static_cast<std::size_t>(s)] >= 0 || !vertex_present(sample, s)) continue;
        const int id = out.count();
        queue.assign(1, s);
        out.label[static_cast<std::size_t>(s)] = id;
        for (int i = 0; i < d; ++i) lo[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] = graph.numerators(s)[static_cast<std::size_t>(i)];
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            auto x = graph.numerators(v);
            for (int i = 0; i < d; ++i) {
                lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
                hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
            }
            for (const auto& inc : graph.neighbours(v)) {
                if (out.label[static_cast<std::size_t>(inc.vertex)] >= 0) continue;
                if (!bond_open(sample, graph.edge(inc.edge), inc.edge)) continue;
                out.label[static_cast<std::size_t>(inc.vertex)] = id;
                queue.push_back(inc.vertex);
            }
        }
        std::int64_t diam = 0;
        for (int i = 0; i < d; ++i) diam = std::max(diam, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
        out.size.push_back(static_cast<int>(queue.size()));
        out.diameter.push_back(diam);
    }
    return out;
}

namespace {

// Dense view of a percolated box lattice with per-axis strides.
class GridView {
public:
    GridView(const WeightedGraph& graph, const PercolationSample& sample) : graph_(graph), sample_(sample) {
        require(graph.kind() == GraphKind::Box && graph.denominator() == 1, ErrorKind::Unsupported,
                "box classification needs a box lattice");
        check_shape(graph, sample);
        d_ = graph.dimension();
        auto first = graph.numerators(0);
        auto last = graph.numerators(graph.vertex_count() - 1);
        lo_.assign(first.begin(), first.end());
        hi_.assign(last.begin(), last.end());
        stride_.assign(static_cast<std::size_t>(d_), 1);
        for (int i = d_ - 2; i >= 0; --i)
            stride_[static_cast<std::size_t>(i)] = stride_[static_cast<std::size_t>(i) + 1] * (hi_[static_cast<std::size_t>(i) + 1] - lo_[static_cast<std::size_t>(i) + 1] + 1);
        if (sample.kind == PercolationKind::Edge) {
            plus_edge_.assign(static_cast<std::size_t>(graph.vertex_count()) * static_cast<std::size_t>(d_), -1);
            for (int e = 0; e < graph.edge_count(); ++e) {
                const auto& ed = graph.edge(e);
                std::int64_t diff = ed.v - ed.u;
                for (int i = 0; i < d_; ++i)
                    if (diff == stride_[static_cast<std::size_t>(i)])
                        plus_edge_[static_cast<std::size_t>(ed.u) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(i)] = e;
            }
        }
    }

    int dim() const { return d_; }
    bool covers(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) const {
        for (int i = 0; i < d_; ++i)
            if (a[static_cast<std::size_t>(i)] < lo_[static_cast<std::size_t>(i)] || b[static_cast<std::size_t>(i)] > hi_[static_cast<std::size_t>(i)]) return false;
        return true;
    }
    std::int64_t id(const std::vector<std::int64_t>& x) const {
        std::int64_t v = 0;
        for (int i = 0; i < d_; ++i) v += (x[static_cast<std::size_t>(i)] - lo_[static_cast<std::size_t>(i)]) * stride_[static_cast<std::size_t>(i)];
        return v;
    }
    std::int64_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }
    bool present(std::int64_t v) const { return vertex_present(sample_, static_cast<int>(v)); }
    // Open bond between v and v + e_axis.
    bool open_plus(std::int64_t v, int axis) const {
        if (sample_.kind == PercolationKind::Site) return sample_.open(static_cast<int>(v)) && sample_.open(static_cast<int>(v + stride_[static_cast<std::size_t>(axis)]));
        int e = plus_edge_[static_cast<std::size_t>(v) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(axis)];
        return e >= 0 && sample_.open(e);
    }
    const WeightedGraph& graph() const { return graph_; }

private:
    const WeightedGraph& graph_;
    const PercolationSample& sample_;
    int d_ = 0;
    std::vector<std::int64_t> lo_, hi_, stride_;
    std::vector<int> plus_edge_;
};

struct PreGoodResult {
    bool pre_good = false;
    int crossing = -1;
    std::int64_t max_other = 0;
    std::vector<std::int64_t> crossing_sites;  // graph ids, only when requested
};

class BoxClassifier {
public:
    explicit BoxClassifier(const GridView& view) : view_(view) {}

    // Clusters of the sample restricted to [lo, hi].
    PreGoodResult pre_good(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi, bool keep_crossing) {
        const int d = view_.dim();
        std::vector<std::int64_t> ext(static_cast<std::size_t>(d));
        std::int64_t n = 1, diam_box = 0;
        for (int i = 0; i < d; ++i) {
            ext[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1;
            n *= ext[static_cast<std::size_t>(i)];
            diam_box = std::max(diam_box, ext[static_cast<std::size_t>(i)] - 1);
        }
        const std::int64_t bound = diam_box / 100;  // other clusters need diameter < floor(diam/100)
        std::vector<std::int64_t> lstride(static_cast<std::size_t>(d), 1);
        for (int i = d - 2; i >= 0; --i) lstride[static_cast<std::size_t>(i)] = lstride[static_cast<std::size_t>(i) + 1] * ext[static_cast<std::size_t>(i) + 1];
        label_.assign(static_cast<std::size_t>(n), -1);
        const std::int64_t base = view_.id(lo);

        PreGoodResult res;
        int clusters = 0, crossing_count = 0;
        bool has_other = false;
        std::vector<std::int64_t> cmin(static_cast<std::size_t>(d)), cmax(static_cast<std::size_t>(d)), x(static_cast<std::size_t>(d));
        const unsigned all_faces = (2u * static_cast<unsigned>(d) >= 32) ? ~0u : ((1u << (2 * d)) - 1u);
        for (std::int64_t s = 0; s < n; ++s) {
            if (label_[static_cast<std::size_t>(s)] >= 0) continue;
            auto gid = [&](std::int64_t local) {
                std::int64_t g = base, rem = local;
                for (int i = 0; i < d; ++i) {
                    std::int64_t c = rem / lstride[static_cast<std::size_t>(i)];
                    rem -= c * lstride[static_cast<std::size_t>(i)];
                    g += c * view_.stride(i);
                }
                return g;
            };
            if (!view_.present(gid(s))) continue;
            const int id = clusters++;
            queue_.assign(1, s);
            label_[static_cast<std::size_t>(s)] = id;
            unsigned faces = 0;
            for (int i = 0; i < d; ++i) {
                cmin[static_cast<std::size_t>(i)] = std::numeric_limits<std::int64_t>::max();
                cmax[static_cast<std::size_t>(i)] = std::numeric_limits<std::int64_t>::min();
            }
            for (std::size_t head = 0; head < queue_.size(); ++head) {
                std::int64_t v = queue_[head];
                std::int64_t rem = v;
                for (int i = 0; i < d; ++i) {
                    x[static_cast<std::size_t>(i)] = rem / lstride[static_cast<std::size_t>(i)];
                    rem -= x[static_cast<std::size_t>(i)] * lstride[static_cast<std::size_t>(i)];
                    cmin[static_cast<std::size_t>(i)] = std::min(cmin[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
                    cmax[static_cast<std::size_t>(i)] = std::max(cmax[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
                    if (x[static_cast<std::size_t>(i)] == 0) faces |= 1u << (2 * i);
                    if (x[static_cast<std::size_t>(i)] == ext[static_cast<std::size_t>(i)] - 1) faces |= 1u << (2 * i + 1);
                }
                std::int64_t g = gid(v);
                for (int i = 0; i < d; ++i) {
                    if (x[static_cast<std::size_t>(i)] + 1 < ext[static_cast<std::size_t>(i)]) {
                        std::int64_t w = v + lstride[static_cast<std::size_t>(i)];
                        if (label_[static_cast<std::size_t>(w)] < 0 && view_.open_plus(g, i)) {
                            label_[static_cast<std::size_t>(w)] = id;
                            queue_.push_back(w);
                        }
                    }
                    if (x[static_cast<std::size_t>(i)] > 0) {
                        std::int64_t w = v - lstride[static_cast<std::size_t>(i)];
                        if (label_[static_cast<std::size_t>(w)] < 0 && view_.open_plus(g - view_.stride(i), i)) {
                            label_[static_cast<std::size_t>(w)] = id;
                            queue_.push_back(w);
                        }
                    }
                }
            }
            std::int64_t diam = 0;
            for (int i = 0; i < d; ++i) diam = std::max(diam, cmax[static_cast<std::size_t>(i)] - cmin[static_cast<std::size_t>(i)]);
            if (faces == all_faces) {
                ++crossing_count;
                if (crossing_count == 1) {
                    res.crossing = id;
                    if (keep_crossing) {
                        res.crossing_sites.clear();
                        for (auto v : queue_) res.crossing_sites.push_back(gid(v));
                    }
                } else {
                    res.max_other = std::max(res.max_other, diam);
                    has_other = true;
                }
            } else {
                res.max_other = std::max(res.max_other, diam);
                has_other = true;
            }
            if (!keep_crossing && (crossing_count > 1 || (has_other && res.max_other >= bound))) {
                res.pre_good = false;
                return res;  // early exit: already decided
            }
        }
        res.pre_good = crossing_count == 1 && (!has_other || res.max_other < bound);
        if (crossing_count != 1) res.crossing = -1;
        return res;
    }

private:
    const GridView& view_;
    std::vector<int> label_;
    std::vector<std::int64_t> queue_;
};

GoodBoxReport classify_with(const GridView& view, BoxClassifier& cls, const LatticeBox& box, bool evaluate_good) {
    const int d = view.dim();
    require(box.dimension() == d, ErrorKind::Shape, "box dimension does not match the graph");
    const LatticeBox twice = box.scaled(2);
    std::vector<std::int64_t> lo2(static_cast<std::size_t>(d)), hi2(static_cast<std::size_t>(d)), lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        lo2[static_cast<std::size_t>(i)] = twice.lower(i);
        hi2[static_cast<std::size_t>(i)] = twice.upper(i);
        lo[static_cast<std::size_t>(i)] = box.lower(i);
        hi[static_cast<std::size_t>(i)] = box.upper(i);
    }
    require(view.covers(lo2, hi2), ErrorKind::Coverage, "sample does not cover the doubled box");

    GoodBoxReport rep;
    rep.box = box;
    auto main = cls.pre_good(lo, hi, true);
    rep.pre_good = main.pre_good;
    rep.max_other_diameter = main.max_other;
    if (main.crossing >= 0) {
        rep.crossing_cluster = main.crossing;
        const auto& g = view.graph();
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (auto v : main.crossing_sites) {
            std::int64_t dist = 0;
            auto xv = g.numerators(static_cast<int>(v));
            for (int i = 0; i < d; ++i) dist += std::llabs(xv[static_cast<std::size_t>(i)] - box.center[static_cast<std::size_t>(i)]);
            if (dist < best || (dist == best && v < *rep.center_vertex)) {
                best = dist;
                rep.center_vertex = static_cast<int>(v);
            }
        }
    }
    if (!rep.pre_good || !evaluate_good) return rep;

    const std::int64_t s_lo = (box.L + 9) / 10, s_hi = box.L / 2;
    std::vector<std::int64_t> y(static_cast<std::size_t>(d)), sub_lo(static_cast<std::size_t>(d)), sub_hi(static_cast<std::size_t>(d));
    for (std::int64_t s = std::max<std::int64_t>(s_lo, 1); s <= s_hi; ++s) {
        // centers y with y + Lambda_s meeting the box
        for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = box.lower(i) - s;
        while (true) {
            for (int i = 0; i < d; ++i) {
                sub_lo[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] - s;
                sub_hi[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + s;
            }
            if (!cls.pre_good(sub_lo, sub_hi, false).pre_good) return rep;
            int i = d - 1;
            for (; i >= 0; --i) {
                if (++y[static_cast<std::size_t>(i)] <= box.upper(i) + s) break;
                y[static_cast<std::size_t>(i)] = box.lower(i) - s;
            }
            if (i < 0) break;
        }
    }
    rep.good = true;
    return rep;
}

}  // namespace

GoodBoxReport classify_box(const WeightedGraph& graph, const PercolationSample& sample, const LatticeBox& box) {
    GridView view(graph, sample);
    BoxClassifier cls(view);
    return classify_with(view, cls, box, true);
}

std::optional<std::vector<int>> connect_centers(const WeightedGraph& graph, const PercolationSample& sample,
                                                const LatticeBox& boxA, const LatticeBox& boxB, int centerA,
                                                int centerB) {
    check_shape(graph, sample);
    require(boxA.L == boxB.L && boxA.dimension() == boxB.dimension(), ErrorKind::Domain, "boxes must have the same size");
    auto inside = [&](int v) {
        auto x = graph.numerators(v);
        if (graph.denominator() != 1) return false;
        return boxA.contains(x) || boxB.contains(x);
    };
    if (!inside(centerA) || !inside(centerB) || !vertex_present(sample, centerA) || !vertex_present(sample, centerB))
        return std::nullopt;
    const int nv = graph.vertex_count();
    std::vector<int> dist(static_cast<std::size_t>(nv), -1);
    std::vector<int> queue{centerB};
    dist[static_cast<std::size_t>(centerB)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        for (const auto& inc : graph.neighbours(v)) {
            if (dist[static_cast<std::size_t>(inc.vertex)] >= 0 || !inside(inc.vertex)) continue;
            if (!bond_open(sample, graph.edge(inc.edge), inc.edge)) continue;
            dist[static_cast<std::size_t>(inc.vertex)] = dist[static_cast<std::size_t>(v)] + 1;
            queue.push_back(inc.vertex);
        }
    }
    if (dist[static_cast<std::size_t>(centerA)] < 0) return std::nullopt;
    std::vector<int> path{centerA};
    int v = centerA;
    while (v != centerB) {
        int next = -1;
        for (const auto& inc : graph.neighbours(v)) {
            if (dist[static_cast<std::size_t>(inc.vertex)] != dist[static_cast<std::size_t>(v)] - 1) continue;
            if (!bond_open(sample, graph.edge(inc.edge), inc.edge)) continue;
            if (next < 0 || inc.vertex < next) next = inc.vertex;
        }
        v = next;
        path.push_back(v);
    }
    return path;
}

ProportionEstimate wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    ProportionEstimate e;
    e.successes = successes;
    e.trials = trials;
    if (trials <= 0) {
        e.lower = 0;
        e.upper = 1;
        return e;
    }
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double centre = (ph + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / denom;
    e.estimate = ph;
    e.lower = std::max(0.0, centre - half);
    e.upper = std::min(1.0, centre + half);
    return e;
}

std::vector<GoodBoxScanRow> goodbox_scan(int d, double p, const std::vector<std::int64_t>& L_list,
                                         const GoodBoxScanOptions& options, std::uint64_t seed) {
    require(d >= 1, ErrorKind::Shape, "dimension must be >= 1");
    require(p >= 0 && p <= 1, ErrorKind::Domain, "p must lie in [0,1]");
    require(options.trials > 0, ErrorKind::Domain, "trials must be positive");
    std::vector<GoodBoxScanRow> rows;
    for (auto L : L_list) {
        require(L >= 1, ErrorKind::Domain, "box parameter L must be >= 1");
        SiteRect rect;
        for (int i = 0; i < d; ++i) {
            rect.lo.push_back(-2 * L);
            rect.hi.push_back(i == 0 ? (2 * L + 1) + 2 * L : 2 * L);
        }
        const auto graph = build_rect_lattice(rect, 0.0);
        LatticeBox boxA{std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), L};
        LatticeBox boxB = boxA;
        boxB.center[0] = 2 * L + 1;
        const std::int64_t good_trials = options.good_trials < 0 ? options.trials : std::min(options.good_trials, options.trials);

        struct Outcome {
            bool pre = false, good = false, pair = false, failed = false;
        };
        std::vector<Outcome> outcomes(static_cast<std::size_t>(options.trials));
        const std::string tag = "goodbox/L=" + std::to_string(L);
        parallel_for(outcomes.size(), options.workers, [&](std::size_t t) {
            auto sample = sample_percolation(graph, PercolationKind::Site, p, derive_seed(seed, tag, t));
            GridView view(graph, sample);
            BoxClassifier cls(view);
            const bool eval_good = static_cast<std::int64_t>(t) < good_trials;
            auto a = classify_with(view, cls, boxA, eval_good);
            Outcome& o = outcomes[t];
            o.pre = a.pre_good;
            o.good = a.good;
            if (a.good) {
                auto b = classify_with(view, cls, boxB, true);
                if (b.good) {
                    o.pair = true;
                    o.failed = !connect_centers(graph, sample, boxA, boxB, *a.center_vertex, *b.center_vertex).has_value();
                }
            }
        });
        GoodBoxScanRow row;
        row.L = L;
        std::int64_t pre = 0, good = 0;
        for (const auto& o : outcomes) {
            pre += o.pre;
            good += o.good;
            row.adjacent_good_pairs += o.pair;
            row.connection_failures += o.failed;
        }
        row.pre_good = wilson_interval(pre, options.trials);
        row.good = wilson_interval(good, good_trials);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace quenchxy
