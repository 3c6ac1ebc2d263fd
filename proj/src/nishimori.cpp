#include "quenchxy/nishimori.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "quenchxy/bessel.hpp"
#include "quenchxy/error.hpp"
#include "quenchxy/models.hpp"
#include "quenchxy/parallel.hpp"
#include "quenchxy/rng.hpp"

namespace quenchxy {

namespace {

constexpr std::int64_t kChunk = 4096;

void check_path_shape(int d, int k) {
    require(d >= 2, ErrorKind::Domain, "paths need d >= 2");
    require(k >= 1, ErrorKind::Domain, "paths need k >= 1");
}

double beta_of(const Edge& e, double beta1, double beta2) { return e.cls == EdgeClass::Beta2 ? beta2 : beta1; }

}  // namespace

bool IncreasingPath::valid() const {
    if (d < 1 || k < 0 || steps.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(k)) return false;
    std::vector<int> count(static_cast<std::size_t>(d), 0);
    for (int a : steps) {
        if (a < 0 || a >= d) return false;
        ++count[static_cast<std::size_t>(a)];
    }
    return std::all_of(count.begin(), count.end(), [&](int c) { return c == k; });
}

IncreasingPath sample_increasing_path(int d, int k, Rng& rng) {
    check_path_shape(d, k);
    IncreasingPath p{d, k, {}};
    p.steps.reserve(static_cast<std::size_t>(d * k));
    for (int a = 0; a < d; ++a) p.steps.insert(p.steps.end(), static_cast<std::size_t>(k), a);
    std::shuffle(p.steps.begin(), p.steps.end(), rng.engine());
    return p;
}

int shared_edges(const IncreasingPath& a, const IncreasingPath& b) {
    require(a.d == b.d && a.steps.size() == b.steps.size(), ErrorKind::Shape, "paths of different shape");
    // both paths sit at l1-distance t after t steps, so a shared edge is a step
    // index where the positions agree and the axes agree
    std::vector<int> diff(static_cast<std::size_t>(a.d), 0);
    int mismatched = 0, shared = 0;
    for (std::size_t t = 0; t < a.steps.size(); ++t) {
        const int x = a.steps[t], y = b.steps[t];
        if (mismatched == 0 && x == y) ++shared;
        if (x != y) {
            for (int axis : {x, y}) {
                int& c = diff[static_cast<std::size_t>(axis)];
                const int before = c;
                c += axis == x ? 1 : -1;
                mismatched += (c != 0) - (before != 0);
            }
        }
    }
    return shared;
}

std::vector<IncreasingPath> enumerate_increasing_paths(int d, int k, std::size_t limit) {
    check_path_shape(d, k);
    IncreasingPath p{d, k, {}};
    for (int a = 0; a < d; ++a) p.steps.insert(p.steps.end(), static_cast<std::size_t>(k), a);
    std::vector<IncreasingPath> out;
    do {
        require(out.size() < limit, ErrorKind::Size, "too many increasing paths to enumerate");
        out.push_back(p);
    } while (std::next_permutation(p.steps.begin(), p.steps.end()));
    return out;
}

std::vector<double> exact_intersection_law(int d, int k) {
    const auto paths = enumerate_increasing_paths(d, k);
    std::vector<double> law(static_cast<std::size_t>(d * k) + 1, 0.0);
    for (const auto& a : paths)
        for (const auto& b : paths) law[static_cast<std::size_t>(shared_edges(a, b))] += 1;
    const double total = static_cast<double>(paths.size()) * static_cast<double>(paths.size());
    for (auto& v : law) v /= total;
    return law;
}

std::vector<ProportionEstimate> intersection_tail(int d, int k, std::int64_t trials, std::uint64_t seed,
                                                  unsigned workers) {
    check_path_shape(d, k);
    require(trials >= 1, ErrorKind::Domain, "need at least one trial");
    const std::size_t m = static_cast<std::size_t>(d * k) + 1;
    const std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
    std::vector<std::vector<std::int64_t>> counts(chunks, std::vector<std::int64_t>(m, 0));
    parallel_for(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, "paths", c));
        const std::int64_t n = std::min<std::int64_t>(kChunk, trials - static_cast<std::int64_t>(c) * kChunk);
        for (std::int64_t t = 0; t < n; ++t) {
            const auto a = sample_increasing_path(d, k, rng);
            const auto b = sample_increasing_path(d, k, rng);
            ++counts[c][static_cast<std::size_t>(shared_edges(a, b))];
        }
    });
    std::vector<std::int64_t> exact(m, 0);
    for (const auto& c : counts)
        for (std::size_t j = 0; j < m; ++j) exact[j] += c[j];
    std::vector<ProportionEstimate> tail(m);
    std::int64_t at_least = 0;
    for (std::size_t j = m; j-- > 0;) {
        at_least += exact[j];
        tail[j] = wilson_interval(at_least, trials);
    }
    return tail;
}

TailSlope log_tail_slope(const std::vector<ProportionEstimate>& tail, std::int64_t min_successes) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    TailSlope out;
    for (std::size_t j = 1; j < tail.size(); ++j) {
        const auto& t = tail[j];
        if (t.successes < min_successes || t.successes == t.trials) continue;
        const double p = static_cast<double>(t.successes) / static_cast<double>(t.trials);
        // delta method: Var(ln p_hat) = (1 - p) / (n p)
        const double var = (1 - p) / static_cast<double>(t.successes);
        const double w = 1 / var, x = static_cast<double>(j), y = std::log(p);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
        ++out.points;
    }
    require(out.points >= 2, ErrorKind::Data, "fewer than two tail points to fit");
    const double det = sw * sxx - sx * sx;
    out.slope = (sw * sxy - sx * sy) / det;
    out.std_error = std::sqrt(sw / det);
    return out;
}

void write_tail_csv(std::ostream& out, const std::vector<ProportionEstimate>& tail) {
    out << "j,successes,trials,estimate,lower,upper\n";
    out.precision(17);
    for (std::size_t j = 0; j < tail.size(); ++j)
        out << j << ',' << tail[j].successes << ',' << tail[j].trials << ',' << tail[j].estimate << ','
            << tail[j].lower << ',' << tail[j].upper << '\n';
}

GaugeIdentityRecord gauge_identity_check(const WeightedGraph& graph, const std::vector<EdgeFactor>& factors,
                                         double beta1, double beta2, const QuadratureSpec& spec) {
    spec.validate();
    const int m = graph.edge_count();
    require(m >= 1 && m <= 3, ErrorKind::Size, "gauge identity check supports 1 to 3 edges");
    require(static_cast<int>(factors.size()) == m, ErrorKind::Shape, "one factor per edge");
    require(beta1 >= 0 && beta2 >= 0, ErrorKind::Domain, "temperatures must be >= 0");

    const int G = spec.grid;
    std::vector<double> betas(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(G)));
    GaugeIdentityRecord r;
    r.rhs = 1.0;
    for (int e = 0; e < m; ++e) {
        const double b = beta_of(graph.edge(e), beta1, beta2);
        betas[static_cast<std::size_t>(e)] = b;
        double total = 0;
        for (int i = 0; i < G; ++i) {
            const double w = std::exp(b * (std::cos(kTwoPi * i / G) - 1));
            weights[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] = w;
            total += w;
        }
        for (auto& w : weights[static_cast<std::size_t>(e)]) w /= total;
        if (factors[static_cast<std::size_t>(e)] == EdgeFactor::Phase) r.rhs *= bessel_ratio_I1_I0(b);
    }

    std::vector<int> charge(static_cast<std::size_t>(graph.vertex_count()), 0);
    for (int e = 0; e < m; ++e)
        if (factors[static_cast<std::size_t>(e)] == EdgeFactor::Phase) {
            ++charge[static_cast<std::size_t>(graph.edge(e).u)];
            --charge[static_cast<std::size_t>(graph.edge(e).v)];
        }

    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    std::vector<AngleBond> bonds(static_cast<std::size_t>(m));
    std::complex<double> lhs = 0;
    while (true) {
        double weight = 1, phase = 0;
        for (int e = 0; e < m; ++e) {
            const double w = kTwoPi * idx[static_cast<std::size_t>(e)] / G;
            weight *= weights[static_cast<std::size_t>(e)][static_cast<std::size_t>(idx[static_cast<std::size_t>(e)])];
            if (factors[static_cast<std::size_t>(e)] == EdgeFactor::Phase) phase += w;
            // the bond weight is exp(J cos(theta_u - theta_v - omega)), so omega = -w
            bonds[static_cast<std::size_t>(e)] = {graph.edge(e).u, graph.edge(e).v, betas[static_cast<std::size_t>(e)], -w};
        }
        const auto q = angle_model_quadrature(graph.vertex_count(), bonds, charge, spec);
        lhs += weight * std::polar(1.0, phase) * q.expectation;
        int e = 0;
        while (e < m && ++idx[static_cast<std::size_t>(e)] == G) idx[static_cast<std::size_t>(e++)] = 0;
        if (e == m) break;
    }
    r.lhs = lhs;
    r.difference = std::abs(r.lhs - r.rhs);
    return r;
}

std::vector<int> path_vertices(const WeightedGraph& g, const IncreasingPath& path) {
    require(g.kind() == GraphKind::Extended, ErrorKind::Topology, "path walk needs an extended lattice");
    require(path.valid() && path.d == g.dimension(), ErrorKind::Shape, "path does not match the lattice");
    std::vector<std::int64_t> x(static_cast<std::size_t>(g.dimension()), 0);
    std::vector<int> out;
    auto here = [&] {
        auto v = g.find_vertex(x);
        require(v.has_value(), ErrorKind::Shape, "path leaves the lattice");
        out.push_back(*v);
    };
    here();
    const std::int64_t q = g.denominator();
    for (int a : path.steps)
        for (std::int64_t j = 0; j < q; ++j) {
            ++x[static_cast<std::size_t>(a)];
            here();
        }
    return out;
}

EstimatorResult omega_path_estimate(const WeightedGraph& g, const IncreasingPath& path, double beta1, double beta2,
                                    std::int64_t samples, std::uint64_t seed) {
    require(samples >= 2, ErrorKind::Domain, "need at least two samples");
    const auto verts = path_vertices(g, path);
    std::vector<double> betas;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
        int edge = -1;
        for (const auto& inc : g.neighbours(verts[i]))
            if (inc.vertex == verts[i + 1]) edge = inc.edge;
        require(edge >= 0, ErrorKind::Topology, "path steps along a missing edge");
        betas.push_back(beta_of(g.edge(edge), beta1, beta2));
    }
    Rng rng(seed);
    std::vector<double> series(static_cast<std::size_t>(samples));
    for (auto& s : series) {
        double total = 0;
        for (double b : betas) total += sample_von_mises(b, rng);
        s = std::cos(total);
    }
    return estimate_series(series);
}

NishimoriRecord nishimori_correlation_experiment(const NishimoriOptions& o) {
    require(o.d >= 2, ErrorKind::Domain, "need d >= 2");
    require(o.k >= 1 && o.k <= o.L, ErrorKind::Shape, "target k(1,...,1) must lie inside the box");
    require(o.n >= 1, ErrorKind::Domain, "need n >= 1");
    require(o.n_disorder >= 1, ErrorKind::Domain, "need at least one disorder sample");
    o.schedule.validate();
    const auto graph = build_extended_lattice(o.d, o.L, o.n, o.beta1, o.beta2);
    const std::vector<std::int64_t> zero(static_cast<std::size_t>(o.d), 0), target(static_cast<std::size_t>(o.d), o.k);
    const int x = *graph.find_integer_point(zero);
    const int y = *graph.find_integer_point(target);

    NishimoriRecord rec;
    rec.per_disorder.resize(static_cast<std::size_t>(o.n_disorder));
    parallel_for(static_cast<std::size_t>(o.n_disorder), o.workers, [&](std::size_t i) {
        const auto gauge = sample_gauge(graph, o.beta1, o.beta2, derive_seed(o.schedule.seed, "gauge", i));
        ChainModel model;
        model.graph = &graph;
        model.gauge = &gauge;
        ChainSchedule s = o.schedule;
        s.seed = derive_seed(o.schedule.seed, "chain", i);
        s.algorithm = Algorithm::HeatBath;
        // local moves from a hot start freeze vortex lines in at low temperature
        s.cold_start = true;
        const auto out = run_chain(model, s, {{"cos", {{x, y}}}});
        rec.per_disorder[i] = out.results.front();
    });
    rec.correlation = combine_disorder(rec.per_disorder);
    rec.lambda_power = std::pow(lambda_n(o.beta1, o.beta2, o.n), o.d * o.k);

    Rng rng(derive_seed(o.schedule.seed, "path", 0));
    const auto path = sample_increasing_path(o.d, o.k, rng);
    rec.omega_path =
        omega_path_estimate(graph, path, o.beta1, o.beta2, o.omega_samples, derive_seed(o.schedule.seed, "omega", 0));
    return rec;
}

void write_nishimori_csv(std::ostream& out, const NishimoriOptions& o, const NishimoriRecord& r) {
    out << "d,L,n,beta1,beta2,k,n_disorder,correlation,correlation_error,lambda_power,omega_path,omega_path_error\n";
    out.precision(17);
    out << o.d << ',' << o.L << ',' << o.n << ',' << o.beta1 << ',' << o.beta2 << ',' << o.k << ',' << o.n_disorder
        << ',' << r.correlation.mean << ',' << r.correlation.std_error << ',' << r.lambda_power << ','
        << r.omega_path.mean << ',' << r.omega_path.std_error << '\n';
}

}  // namespace quenchxy
